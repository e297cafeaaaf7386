#pragma once

// CSV, SVG and OBJ emission. CSV is canonical; SVG renders the same
// polylines; OBJ carries meshes after stereographic projection.

#include <iosfwd>
#include <string>
#include <vector>

#include "berger/mesh.hpp"
#include "berger/phase.hpp"
#include "berger/profile.hpp"
#include "berger/sphere.hpp"

namespace berger::io {

inline constexpr const char* kToolVersion = "0.3.0";

/// 17 significant digits, locale independent.
std::string fmt(double v);

/// Columns s,x,y,alpha,energy_drift. Re-checks every row against the
/// trajectory's drift budget and throws AccuracyError on violation.
void write_profile_csv(std::ostream& os, const Trajectory& traj);

/// Columns X,Y,F on an nx x ny grid over [0,1] x [-1,1].
void write_phase_grid_csv(std::ostream& os, const BergerParams& params, double K, std::size_t nx, std::size_t ny);

/// Columns level,seq,X,Y; seq restarts at 0 at the first point of each component.
void write_contours_csv(std::ostream& os, const std::vector<ContourSet>& contours);

struct RegionRow {
  double tau = 0.0;
  double K = 0.0;
  double h = 0.0;
  Embeddedness verdict = Embeddedness::embedded;
};

/// Columns tau,K,h,embedded (embedded is 1, 0 or "indeterminate").
void write_region_csv(std::ostream& os, const std::vector<RegionRow>& rows);

struct BoundaryPoint {
  double K = 0.0;
  double tau_star = 0.0;
  bool has_root = false;
};

/// Columns K,tau_star,status ("boundary" or "embedded" for slices without a root).
void write_boundary_csv(std::ostream& os, const std::vector<BoundaryPoint>& points);

struct ObjHeader {
  double tau = 1.0;
  double K = 0.0;
  std::string description;
};

void write_obj(std::ostream& os, const SurfaceMesh& mesh, const ObjHeader& header);

/// Phase rectangle mapped to a 600 x 600 viewport; level 1 drawn bold.
std::string phase_portrait_svg(const std::vector<ContourSet>& contours, const std::string& title);

struct LabelledProfile {
  std::string label;
  const Trajectory* profile = nullptr;
  bool highlight = false;
};

/// Profiles drawn in the (y, x) plane with equal aspect ratio.
std::string profiles_svg(const std::vector<LabelledProfile>& profiles, const std::string& title);

/// Region points in the (tau, K) plane plus the boundary polyline.
std::string region_svg(const std::vector<RegionRow>& rows, const std::vector<BoundaryPoint>& boundary);

}  // namespace berger::io
