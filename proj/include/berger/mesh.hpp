#pragma once

// Triangulated surfaces of revolution Phi(s, t) = (e^{iy(s)} cos x(s), e^{it} sin x(s)).

#include <array>
#include <cstddef>
#include <vector>

#include "berger/geometry.hpp"
#include "berger/profile.hpp"
#include "berger/sphere.hpp"

namespace berger {

struct MeshVertex {
  AmbientPoint point;
  double s = 0.0;
  double t = 0.0;
};

struct SurfaceMesh {
  std::vector<MeshVertex> vertices;
  std::vector<std::array<std::size_t, 3>> triangles;
  /// Number of profile rings (pole vertices excluded) and of steps in t.
  std::size_t n_s = 0;
  std::size_t n_t = 0;
};

/// Revolves an axis-to-axis profile. The first and last profile samples must
/// lie on the axis; each collapses to a single pole vertex, so the mesh has
/// (samples - 2) * n_t + 2 vertices. Triangles are consistently oriented with
/// outward normals in the stereographic picture.
SurfaceMesh build_mesh(const Trajectory& profile, std::size_t n_t);
SurfaceMesh build_mesh(const SphereSolution& sol, std::size_t n_t);

/// Torus from a profile that closes up in y (one full turn of a Clifford
/// solution): doubly periodic grid with no poles.
SurfaceMesh build_torus_mesh(const Trajectory& closed_profile, std::size_t n_t);

/// Stereographic projection from (0, 0, 0, -1) in (Re z, Im z, Re w, Im w).
std::array<double, 3> stereographic(const AmbientPoint& p);

/// V - E + F.
long euler_characteristic(const SurfaceMesh& mesh);

/// Every interior edge is traversed once in each direction.
bool consistently_oriented(const SurfaceMesh& mesh);

/// Signed volume enclosed by the stereographic image.
double projected_volume(const SurfaceMesh& mesh);

}  // namespace berger
