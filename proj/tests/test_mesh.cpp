#include <doctest.h>

#include <cmath>
#include <numbers>

#include "berger/errors.hpp"
#include "berger/mesh.hpp"

using namespace berger;

TEST_SUITE("mesh") {

TEST_CASE("sphere mesh combinatorics") {
  // 64 interior samples plus the two axis samples.
  const auto sol = build_sphere(make_params(0.75), 3.0, 66);
  const auto mesh = build_mesh(sol, 32);
  CHECK(mesh.vertices.size() == 64u * 32u + 2u);
  CHECK(mesh.triangles.size() == 2u * 32u * 64u);
  CHECK(mesh.n_s == 64);
  CHECK(mesh.n_t == 32);
  CHECK(euler_characteristic(mesh) == 2);
  CHECK(consistently_oriented(mesh));
  CHECK(projected_volume(mesh) > 0.0);
  for (const auto& v : mesh.vertices) {
    CHECK(std::abs(std::norm(v.point.z) + std::norm(v.point.w) - 1.0) <= 1e-10);
  }
  for (const auto& t : mesh.triangles) {
    for (auto i : t) CHECK(i < mesh.vertices.size());
  }
}

TEST_CASE("mesh orientation is outward for several spheres") {
  for (auto [tau, K] : {std::pair{0.5, 4.0}, {2.0, 0.5}, {1.0, 2.0}, {0.2, 5.0}}) {
    const auto mesh = build_mesh(build_sphere(make_params(tau), K, 129), 48);
    CHECK(euler_characteristic(mesh) == 2);
    CHECK(consistently_oriented(mesh));
    CHECK(projected_volume(mesh) > 0.0);
  }
}

TEST_CASE("torus mesh from a Clifford profile") {
  const auto c = clifford_solution(make_params(0.8), 0.7, 65);
  const auto mesh = build_torus_mesh(c, 24);
  CHECK(mesh.vertices.size() == 64u * 24u);
  CHECK(euler_characteristic(mesh) == 0);
  CHECK(consistently_oriented(mesh));
  // Half a turn does not close up.
  const auto half = clifford_solution(make_params(0.8), 0.7, 65, 1.0);
  CHECK_THROWS_AS(build_torus_mesh(half, 24), DomainError);
}

TEST_CASE("mesh preconditions") {
  const auto sol = build_sphere(make_params(0.75), 3.0, 33);
  CHECK_THROWS_AS(build_mesh(sol, 2), DomainError);
  Trajectory tiny = sol.profile;
  tiny.states.resize(2);
  CHECK_THROWS_AS(build_mesh(tiny, 8), DomainError);
  Trajectory open = sol.profile;
  open.states.pop_back();
  CHECK_THROWS_AS(build_mesh(open, 8), DomainError);
}

TEST_CASE("stereographic projection") {
  const auto a = stereographic({{1.0, 0.0}, {0.0, 0.0}});
  CHECK(a == std::array<double, 3>{1.0, 0.0, 0.0});
  const auto b = stereographic({{0.0, 0.0}, {0.0, 1.0}});
  CHECK(b == std::array<double, 3>{0.0, 0.0, 0.0});
  const auto c = stereographic({{0.0, 0.0}, {1.0, 0.0}});
  CHECK(c == std::array<double, 3>{0.0, 0.0, 1.0});
}

}  // TEST_SUITE
