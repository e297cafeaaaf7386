#include "berger/mesh.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <set>
#include <utility>

#include "berger/errors.hpp"

namespace berger {

namespace {

AmbientPoint revolve(const ProfileState& st, double t) {
  return {std::complex<double>(std::cos(st.x) * std::cos(st.y), std::cos(st.x) * std::sin(st.y)),
          std::complex<double>(std::sin(st.x) * std::cos(t), std::sin(st.x) * std::sin(t))};
}

void flip_if_inward(SurfaceMesh& mesh) {
  if (projected_volume(mesh) < 0.0) {
    for (auto& tri : mesh.triangles) std::swap(tri[1], tri[2]);
  }
}

}  // namespace

std::array<double, 3> stereographic(const AmbientPoint& p) {
  const double d = 1.0 + p.w.imag();
  return {p.z.real() / d, p.z.imag() / d, p.w.real() / d};
}

SurfaceMesh build_mesh(const Trajectory& profile, std::size_t n_t) {
  const auto& st = profile.states;
  if (st.size() < 3) throw DomainError("build_mesh: profile needs at least 3 samples");
  if (n_t < 3) throw DomainError("build_mesh: n_t must be at least 3");
  if (std::abs(std::sin(st.front().x)) > 1e-7 || std::abs(std::sin(st.back().x)) > 1e-7) {
    throw DomainError("build_mesh: profile must start and end on the axis");
  }
  SurfaceMesh mesh;
  mesh.n_s = st.size() - 2;
  mesh.n_t = n_t;
  const double dt = 2.0 * std::numbers::pi / static_cast<double>(n_t);

  // Vertex 0: first pole; then rings; last vertex: second pole.
  mesh.vertices.push_back({{std::polar(1.0, st.front().y), {0.0, 0.0}}, st.front().s, 0.0});
  for (std::size_t i = 1; i + 1 < st.size(); ++i) {
    for (std::size_t j = 0; j < n_t; ++j) {
      const double t = dt * static_cast<double>(j);
      mesh.vertices.push_back({revolve(st[i], t), st[i].s, t});
    }
  }
  mesh.vertices.push_back({{std::polar(1.0, st.back().y), {0.0, 0.0}}, st.back().s, 0.0});

  const std::size_t first_pole = 0;
  const std::size_t last_pole = mesh.vertices.size() - 1;
  auto ring = [n_t](std::size_t i, std::size_t j) { return 1 + i * n_t + (j % n_t); };
  for (std::size_t j = 0; j < n_t; ++j) mesh.triangles.push_back({first_pole, ring(0, j + 1), ring(0, j)});
  for (std::size_t i = 0; i + 1 < mesh.n_s; ++i) {
    for (std::size_t j = 0; j < n_t; ++j) {
      const auto a = ring(i, j), b = ring(i, j + 1), c = ring(i + 1, j + 1), d = ring(i + 1, j);
      mesh.triangles.push_back({a, b, c});
      mesh.triangles.push_back({a, c, d});
    }
  }
  const std::size_t m = mesh.n_s - 1;
  for (std::size_t j = 0; j < n_t; ++j) mesh.triangles.push_back({last_pole, ring(m, j), ring(m, j + 1)});
  flip_if_inward(mesh);
  return mesh;
}

SurfaceMesh build_mesh(const SphereSolution& sol, std::size_t n_t) { return build_mesh(sol.profile, n_t); }

SurfaceMesh build_torus_mesh(const Trajectory& closed_profile, std::size_t n_t) {
  const auto& st = closed_profile.states;
  if (st.size() < 4) throw DomainError("build_torus_mesh: profile needs at least 4 samples");
  if (n_t < 3) throw DomainError("build_torus_mesh: n_t must be at least 3");
  const auto p0 = revolve(st.front(), 0.0);
  const auto p1 = revolve(st.back(), 0.0);
  if (std::abs(p0.z - p1.z) + std::abs(p0.w - p1.w) > 1e-9) {
    throw DomainError("build_torus_mesh: profile does not close up");
  }
  SurfaceMesh mesh;
  const std::size_t n = st.size() - 1;  // last sample duplicates the first
  mesh.n_s = n;
  mesh.n_t = n_t;
  const double dt = 2.0 * std::numbers::pi / static_cast<double>(n_t);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n_t; ++j) {
      const double t = dt * static_cast<double>(j);
      mesh.vertices.push_back({revolve(st[i], t), st[i].s, t});
    }
  }
  auto idx = [n, n_t](std::size_t i, std::size_t j) { return (i % n) * n_t + (j % n_t); };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n_t; ++j) {
      const auto a = idx(i, j), b = idx(i, j + 1), c = idx(i + 1, j + 1), d = idx(i + 1, j);
      mesh.triangles.push_back({a, b, c});
      mesh.triangles.push_back({a, c, d});
    }
  }
  flip_if_inward(mesh);
  return mesh;
}

long euler_characteristic(const SurfaceMesh& mesh) {
  std::set<std::pair<std::size_t, std::size_t>> edges;
  for (const auto& t : mesh.triangles) {
    for (int k = 0; k < 3; ++k) {
      const auto a = t[k], b = t[(k + 1) % 3];
      edges.insert({std::min(a, b), std::max(a, b)});
    }
  }
  return static_cast<long>(mesh.vertices.size()) - static_cast<long>(edges.size()) +
         static_cast<long>(mesh.triangles.size());
}

bool consistently_oriented(const SurfaceMesh& mesh) {
  std::map<std::pair<std::size_t, std::size_t>, int> directed;
  for (const auto& t : mesh.triangles) {
    for (int k = 0; k < 3; ++k) {
      if (++directed[{t[k], t[(k + 1) % 3]}] > 1) return false;
    }
  }
  for (const auto& [e, count] : directed) {
    if (directed.find({e.second, e.first}) == directed.end()) return false;
  }
  return true;
}

double projected_volume(const SurfaceMesh& mesh) {
  std::vector<std::array<double, 3>> p;
  p.reserve(mesh.vertices.size());
  for (const auto& v : mesh.vertices) p.push_back(stereographic(v.point));
  double vol = 0.0;
  for (const auto& t : mesh.triangles) {
    const auto& a = p[t[0]];
    const auto& b = p[t[1]];
    const auto& c = p[t[2]];
    vol += a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0]) + a[2] * (b[0] * c[1] - b[1] * c[0]);
  }
  return vol / 6.0;
}

}  // namespace berger
