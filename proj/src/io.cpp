#include "berger/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>

#include "berger/errors.hpp"

namespace berger::io {

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::string fmt_short(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

const char* verdict_cell(Embeddedness e) {
  switch (e) {
    case Embeddedness::embedded: return "1";
    case Embeddedness::not_embedded: return "0";
    case Embeddedness::indeterminate: return "indeterminate";
  }
  return "";
}

}  // namespace

void write_profile_csv(std::ostream& os, const Trajectory& traj) {
  os << "s,x,y,alpha,energy_drift\n";
  const double budget = traj.drift_budget > 0.0 ? traj.drift_budget : std::numeric_limits<double>::infinity();
  for (const auto& st : traj.states) {
    const double drift = std::abs(profile_energy(traj.params, traj.K, st) - traj.energy0);
    if (drift > budget) {
      throw AccuracyError("write_profile_csv: energy drift " + fmt(drift) + " exceeds budget at s = " + fmt(st.s),
                          drift);
    }
    os << fmt(st.s) << ',' << fmt(st.x) << ',' << fmt(st.y) << ',' << fmt(st.alpha) << ',' << fmt(drift) << '\n';
  }
}

void write_phase_grid_csv(std::ostream& os, const BergerParams& params, double K, std::size_t nx, std::size_t ny) {
  if (nx < 2 || ny < 2) throw DomainError("write_phase_grid_csv: grid counts must be at least 2");
  os << "X,Y,F\n";
  for (std::size_t j = 0; j < ny; ++j) {
    const double Y = -1.0 + 2.0 * static_cast<double>(j) / static_cast<double>(ny - 1);
    for (std::size_t i = 0; i < nx; ++i) {
      const double X = static_cast<double>(i) / static_cast<double>(nx - 1);
      os << fmt(X) << ',' << fmt(Y) << ',' << fmt(energy_value(params, K, {X, Y})) << '\n';
    }
  }
}

void write_contours_csv(std::ostream& os, const std::vector<ContourSet>& contours) {
  os << "level,seq,X,Y\n";
  for (const auto& set : contours) {
    for (const auto& c : set.components) {
      for (std::size_t k = 0; k < c.points.size(); ++k) {
        os << fmt(set.level) << ',' << k << ',' << fmt(c.points[k].X) << ',' << fmt(c.points[k].Y) << '\n';
      }
    }
  }
}

void write_region_csv(std::ostream& os, const std::vector<RegionRow>& rows) {
  os << "tau,K,h,embedded\n";
  for (const auto& r : rows) {
    os << fmt(r.tau) << ',' << fmt(r.K) << ',' << fmt(r.h) << ',' << verdict_cell(r.verdict) << '\n';
  }
}

void write_boundary_csv(std::ostream& os, const std::vector<BoundaryPoint>& points) {
  os << "K,tau_star,status\n";
  for (const auto& p : points) {
    os << fmt(p.K) << ',' << (p.has_root ? fmt(p.tau_star) : std::string()) << ','
       << (p.has_root ? "boundary" : "embedded") << '\n';
  }
}

void write_obj(std::ostream& os, const SurfaceMesh& mesh, const ObjHeader& header) {
  os << "# berger-cgc " << kToolVersion << '\n';
  if (!header.description.empty()) os << "# " << header.description << '\n';
  os << "# tau " << fmt(header.tau) << '\n';
  os << "# K " << fmt(header.K) << '\n';
  os << "# projection stereographic from pole (0,0,0,-1) in (Re z, Im z, Re w, Im w) to R^3\n";
  os << "# vertices " << mesh.vertices.size() << " triangles " << mesh.triangles.size() << '\n';
  for (const auto& v : mesh.vertices) {
    const auto p = stereographic(v.point);
    os << "v " << fmt(p[0]) << ' ' << fmt(p[1]) << ' ' << fmt(p[2]) << '\n';
  }
  for (const auto& t : mesh.triangles) {
    os << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
  }
}

std::string phase_portrait_svg(const std::vector<ContourSet>& contours, const std::string& title) {
  // [0,1] x [-1,1] -> [0,600] x [0,600], Y upwards.
  constexpr double W = 600.0;
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"600\" height=\"600\" viewBox=\"0 0 600 600\">\n";
  os << "<title>" << title << "</title>\n";
  os << "<rect x=\"0\" y=\"0\" width=\"600\" height=\"600\" fill=\"white\" stroke=\"black\"/>\n";
  for (const auto& set : contours) {
    const bool bold = std::abs(set.level - 1.0) < 1e-12;
    for (const auto& c : set.components) {
      os << "<polyline fill=\"none\" stroke=\"black\" stroke-width=\"" << (bold ? "3" : "0.8") << "\" points=\"";
      for (const auto& p : c.points) {
        os << fmt_short(p.X * W) << ',' << fmt_short((1.0 - p.Y) * 0.5 * W) << ' ';
      }
      os << "\"/>\n";
    }
  }
  os << "</svg>\n";
  return os.str();
}

std::string profiles_svg(const std::vector<LabelledProfile>& profiles, const std::string& title) {
  double ymin = 0.0, ymax = 0.0, xmax = 0.0;
  for (const auto& lp : profiles) {
    for (const auto& st : lp.profile->states) {
      ymin = std::min(ymin, st.y);
      ymax = std::max(ymax, st.y);
      xmax = std::max(xmax, st.x);
    }
  }
  const double span_y = std::max(ymax - ymin, 1e-9);
  const double span_x = std::max(xmax, 1e-9);
  // Equal aspect: one scale for both axes.
  const double scale = std::min(800.0 / span_y, 400.0 / span_x);
  const double width = span_y * scale + 40.0;
  const double height = span_x * scale + 40.0;
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt_short(width) << "\" height=\""
     << fmt_short(height) << "\">\n";
  os << "<title>" << title << "</title>\n";
  for (const auto& lp : profiles) {
    os << "<polyline fill=\"none\" stroke=\"" << (lp.highlight ? "red" : "black") << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& st : lp.profile->states) {
      os << fmt_short(20.0 + (st.y - ymin) * scale) << ',' << fmt_short(height - 20.0 - st.x * scale) << ' ';
    }
    os << "\"><title>" << lp.label << "</title></polyline>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string region_svg(const std::vector<RegionRow>& rows, const std::vector<BoundaryPoint>& boundary) {
  double tmax = 1e-9, kmax = 1e-9;
  for (const auto& r : rows) {
    tmax = std::max(tmax, r.tau);
    kmax = std::max(kmax, r.K);
  }
  constexpr double W = 600.0;
  auto px = [&](double tau) { return 20.0 + tau / tmax * (W - 40.0); };
  auto py = [&](double K) { return W - 20.0 - K / kmax * (W - 40.0); };
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"600\" height=\"600\" viewBox=\"0 0 600 600\">\n";
  for (const auto& r : rows) {
    const char* fill = r.verdict == Embeddedness::embedded ? "lightgray" : "black";
    os << "<circle cx=\"" << fmt_short(px(r.tau)) << "\" cy=\"" << fmt_short(py(r.K)) << "\" r=\"2\" fill=\"" << fill
       << "\"/>\n";
  }
  os << "<polyline fill=\"none\" stroke=\"red\" stroke-width=\"2\" points=\"";
  for (const auto& b : boundary) {
    if (b.has_root) os << fmt_short(px(b.tau_star)) << ',' << fmt_short(py(b.K)) << ' ';
  }
  os << "\"/>\n</svg>\n";
  return os.str();
}

}  // namespace berger::io
