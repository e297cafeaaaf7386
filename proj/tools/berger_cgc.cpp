// berger-cgc: thresholds, phase portraits, spheres, embeddedness region and
// invariant checks for rotational CGC surfaces in Berger spheres.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "berger/errors.hpp"
#include "berger/io.hpp"
#include "berger/mesh.hpp"
#include "berger/phase.hpp"
#include "berger/sphere.hpp"
#include "berger/verify.hpp"

namespace fs = std::filesystem;
using namespace berger;

namespace {

enum ExitCode : int {
  kOk = 0,
  kConfigError = 2,
  kNoSphere = 3,
  kAccuracy = 4,
  kVerifyFailed = 5,
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::vector<double> tau_values;
  std::vector<double> k_values;
  std::string tau_range;
  std::string k_range;
  std::size_t samples = 513;
  std::size_t grid = 101;
  std::size_t mesh_steps = 128;
  std::optional<double> tol;
  std::vector<double> levels{0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0};
  std::string out = "berger-out";
  std::string format = "csv";
  std::size_t jobs = 0;

  std::set<std::string> formats;
  bool want(const char* f) const { return formats.count(f) > 0; }
};

/// a:b:n -> n evenly spaced values from a to b inclusive.
std::vector<double> parse_range(const std::string& spec, const char* name) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
  if (parts.size() != 3) throw ConfigError(std::string(name) + ": expected a:b:n, got '" + spec + "'");
  double a = 0.0, b = 0.0;
  long n = 0;
  try {
    std::size_t pos = 0;
    a = std::stod(parts[0], &pos);
    if (pos != parts[0].size()) throw std::invalid_argument("a");
    b = std::stod(parts[1], &pos);
    if (pos != parts[1].size()) throw std::invalid_argument("b");
    n = std::stol(parts[2], &pos);
    if (pos != parts[2].size()) throw std::invalid_argument("n");
  } catch (const std::exception&) {
    throw ConfigError(std::string(name) + ": cannot parse '" + spec + "'");
  }
  if (n < 1 || !std::isfinite(a) || !std::isfinite(b)) {
    throw ConfigError(std::string(name) + ": range must be finite with n >= 1");
  }
  if (n == 1 && a != b) throw ConfigError(std::string(name) + ": a single-point range needs a == b");
  std::vector<double> out(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] = n == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return out;
}

std::vector<double> resolve(const std::vector<double>& values, const std::string& range, const char* name,
                            std::vector<double> fallback) {
  if (!values.empty() && !range.empty()) {
    throw ConfigError(std::string("give either --") + name + " or --" + name + "-range, not both");
  }
  if (!range.empty()) return parse_range(range, (std::string("--") + name + "-range").c_str());
  if (!values.empty()) return values;
  return fallback;
}

void validate(RunConfig& cfg) {
  std::stringstream ss(cfg.format);
  for (std::string f; std::getline(ss, f, ',');) {
    if (f != "csv" && f != "svg" && f != "obj") throw ConfigError("--format: unknown format '" + f + "'");
    cfg.formats.insert(f);
  }
  if (cfg.formats.empty()) throw ConfigError("--format: no formats given");
  if (cfg.samples < 3) throw ConfigError("--samples must be at least 3");
  if (cfg.grid < 2) throw ConfigError("--grid must be at least 2");
  if (cfg.mesh_steps < 3) throw ConfigError("--mesh-steps must be at least 3");
  if (cfg.tol && !(*cfg.tol > 0.0)) throw ConfigError("--tol must be positive");
  for (double t : cfg.tau_values) {
    if (!(t > 0.0) || !std::isfinite(t)) throw ConfigError("--tau values must be positive");
  }
}

void check_taus(const std::vector<double>& taus) {
  for (double t : taus) {
    if (!(t > 0.0) || !std::isfinite(t)) throw ConfigError("tau values must be positive and finite");
  }
}

/// Runs task(i) for i in [0, n) on a pool of threads. Results are written by
/// index, so output order never depends on scheduling.
void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& task) {
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min(jobs, n);
  if (jobs <= 1) {
    for (std::size_t i = 0; i < n; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(n);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < jobs; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          task(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::string tag(double tau, double K) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "tau%.6g_K%.6g", tau, K);
  return buf;
}

fs::path out_file(const RunConfig& cfg, const std::string& name) {
  fs::create_directories(cfg.out);
  return fs::path(cfg.out) / name;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  f << text;
}

template <class Writer>
void write_with(const fs::path& path, Writer&& writer) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  writer(f);
}

int cmd_thresholds(const RunConfig& cfg) {
  const auto taus = resolve(cfg.tau_values, cfg.tau_range, "tau", {0.5, 0.75, 1.0, 2.0});
  check_taus(taus);
  std::ostringstream table;
  table << "tau,lambda,k0,kP,gap_lo,gap_hi\n";
  for (double tau : taus) {
    const auto p = make_params(tau);
    table << io::fmt(tau) << ',' << io::fmt(p.lambda()) << ',' << io::fmt(p.k0()) << ',' << io::fmt(p.kp()) << ',';
    // For tau > 1 spheres exist from 1/tau^2 on, but the classification by
    // immersed spheres with K >= kP only starts at tau^2.
    if (tau > 1.0) {
      table << io::fmt(p.k0()) << ',' << io::fmt(p.kp());
    } else {
      table << ',';
    }
    table << '\n';
  }
  std::cout << table.str();
  if (cfg.want("csv") && !cfg.out.empty()) write_text(out_file(cfg, "thresholds.csv"), table.str());
  return kOk;
}

int cmd_phase(const RunConfig& cfg) {
  const auto taus = resolve(cfg.tau_values, cfg.tau_range, "tau", {0.75});
  const auto ks = resolve(cfg.k_values, cfg.k_range, "k", {});
  check_taus(taus);
  if (ks.empty()) throw ConfigError("phase: give --k or --k-range");
  for (double K : ks) {
    if (K == 0.0 || !std::isfinite(K)) throw ConfigError("phase: K must be finite and non-zero");
  }
  if (cfg.levels.empty()) throw ConfigError("phase: --levels must not be empty");

  TraceOptions topts;
  if (cfg.tol) topts.trace_tol = *cfg.tol;

  struct Job {
    double tau, K;
    std::vector<ContourSet> contours;
    Connectivity conn;
  };
  std::vector<Job> jobs;
  for (double tau : taus) {
    for (double K : ks) jobs.push_back({tau, K, {}, {}});
  }
  parallel_for(jobs.size(), cfg.jobs, [&](std::size_t i) {
    auto& j = jobs[i];
    const auto params = make_params(j.tau);
    for (double level : cfg.levels) j.contours.push_back(trace_contours(params, j.K, level, 48, topts));
    j.conn = level_one_connectivity(params, j.K, topts);
  });

  std::cout << "tau,K,k0,level1_connected,sphere_exists,flagged\n";
  for (const auto& j : jobs) {
    const auto params = make_params(j.tau);
    std::cout << io::fmt(j.tau) << ',' << io::fmt(j.K) << ',' << io::fmt(params.k0()) << ','
              << (j.conn.connected ? 1 : 0) << ',' << (sphere_exists(params, j.K) ? 1 : 0) << ','
              << (j.conn.flagged ? 1 : 0) << '\n';
    for (const auto& c : j.contours) {
      if (c.failures > 0) {
        std::cerr << "phase " << tag(j.tau, j.K) << ": level " << c.level << ": " << c.failures
                  << " component(s) stopped at a critical point\n";
      }
    }
    const auto name = "phase_" + tag(j.tau, j.K);
    if (cfg.want("csv")) {
      write_with(out_file(cfg, name + "_grid.csv"),
                 [&](std::ostream& os) { io::write_phase_grid_csv(os, params, j.K, cfg.grid, cfg.grid); });
      write_with(out_file(cfg, name + "_contours.csv"), [&](std::ostream& os) { io::write_contours_csv(os, j.contours); });
    }
    if (cfg.want("svg")) {
      write_text(out_file(cfg, name + ".svg"),
                 io::phase_portrait_svg(j.contours, "F level sets, tau = " + io::fmt(j.tau) + ", K = " + io::fmt(j.K)));
    }
  }
  return kOk;
}

int cmd_sphere(const RunConfig& cfg) {
  const auto taus = resolve(cfg.tau_values, cfg.tau_range, "tau", {});
  const auto ks = resolve(cfg.k_values, cfg.k_range, "k", {});
  check_taus(taus);
  if (taus.empty() || ks.empty()) throw ConfigError("sphere: give --tau/--tau-range and --k/--k-range");

  struct Job {
    double tau, K;
    std::optional<SphereSolution> sol;
    bool no_sphere = false;
    bool pole = false;
    std::string error;
    bool accuracy = false;
  };
  std::vector<Job> jobs;
  for (double tau : taus) {
    for (double K : ks) jobs.push_back({tau, K, {}, false, false, {}, false});
  }
  parallel_for(jobs.size(), cfg.jobs, [&](std::size_t i) {
    auto& j = jobs[i];
    const auto params = make_params(j.tau);
    try {
      if (touches_pole(params, j.K)) {
        j.pole = true;
        return;
      }
      j.sol = build_sphere(params, j.K, cfg.samples);
    } catch (const NoSphereError& e) {
      j.no_sphere = true;
      j.error = e.what();
    } catch (const AccuracyError& e) {
      j.accuracy = true;
      j.error = e.what();
    }
  });

  int code = kOk;
  std::vector<io::LabelledProfile> drawn;
  std::cout << "tau,K,r,h,T,embedded\n";
  for (const auto& j : jobs) {
    const auto params = make_params(j.tau);
    if (j.no_sphere) {
      std::cerr << "sphere " << tag(j.tau, j.K) << ": no sphere, K must be at least k0 = " << io::fmt(params.k0())
                << '\n';
      code = std::max<int>(code, kNoSphere);
      continue;
    }
    if (j.accuracy) {
      std::cerr << "sphere " << tag(j.tau, j.K) << ": " << j.error << '\n';
      code = std::max<int>(code, kAccuracy);
      continue;
    }
    if (j.pole) {
      // Threshold sphere through the pole: the fiber extent is unbounded for
      // tau > 1 and the profile is not written.
      const double h = vertical_radius(params, j.K);
      std::cout << io::fmt(j.tau) << ',' << io::fmt(j.K) << ',' << io::fmt(std::numbers::pi / 2) << ',' << io::fmt(h)
                << ",," << to_string(classify_vertical_radius(h)) << '\n';
      continue;
    }
    const auto& sol = *j.sol;
    std::cout << io::fmt(j.tau) << ',' << io::fmt(j.K) << ',' << io::fmt(sol.r) << ',' << io::fmt(sol.h) << ','
              << io::fmt(sol.T) << ',' << to_string(sol.verdict) << '\n';
    const auto name = "sphere_" + tag(j.tau, j.K);
    try {
      if (cfg.want("csv")) {
        write_with(out_file(cfg, name + "_profile.csv"), [&](std::ostream& os) { io::write_profile_csv(os, sol.profile); });
      }
      if (cfg.want("obj")) {
        const auto mesh = build_mesh(sol, cfg.mesh_steps);
        write_with(out_file(cfg, name + ".obj"), [&](std::ostream& os) {
          io::write_obj(os, mesh, {j.tau, j.K, "rotational CGC sphere"});
        });
      }
    } catch (const AccuracyError& e) {
      std::cerr << "sphere " << tag(j.tau, j.K) << ": " << e.what() << '\n';
      code = std::max<int>(code, kAccuracy);
    }
    drawn.push_back({"tau = " + io::fmt(j.tau) + ", K = " + io::fmt(j.K), &sol.profile,
                     sol.verdict != Embeddedness::embedded});
  }
  if (cfg.want("svg") && !drawn.empty()) {
    write_text(out_file(cfg, "sphere_profiles.svg"), io::profiles_svg(drawn, "sphere profiles in the (y, x) plane"));
  }
  return code;
}

int cmd_embed_region(const RunConfig& cfg) {
  const auto taus = resolve(cfg.tau_values, cfg.tau_range, "tau", {});
  const auto ks = resolve(cfg.k_values, cfg.k_range, "k", {});
  check_taus(taus);
  if (taus.size() < 2 || ks.empty()) {
    throw ConfigError("embed-region: give --tau-range with at least two points and --k or --k-range");
  }
  auto sorted = taus;
  std::sort(sorted.begin(), sorted.end());
  const double tau_lo = sorted.front();
  const double tau_hi = sorted.back();
  const double step = (tau_hi - tau_lo) / static_cast<double>(sorted.size() - 1);

  std::vector<io::RegionRow> rows;
  for (double K : ks) {
    for (double tau : taus) {
      if (sphere_exists(make_params(tau), K)) rows.push_back({tau, K, 0.0, Embeddedness::embedded});
    }
  }
  std::vector<int> failed(rows.size(), 0);
  parallel_for(rows.size(), cfg.jobs, [&](std::size_t i) {
    try {
      rows[i].h = vertical_radius(make_params(rows[i].tau), rows[i].K);
      rows[i].verdict = classify_vertical_radius(rows[i].h);
    } catch (const AccuracyError&) {
      failed[i] = 1;
      rows[i].h = std::numeric_limits<double>::quiet_NaN();
      rows[i].verdict = Embeddedness::indeterminate;
    }
  });

  std::vector<io::BoundaryPoint> boundary(ks.size());
  std::vector<int> slice_failed(ks.size(), 0);
  parallel_for(ks.size(), cfg.jobs, [&](std::size_t i) {
    const double K = ks[i];
    boundary[i].K = K;
    // Scan only where the sphere exists.
    double lo = tau_lo;
    while (lo <= tau_hi && !sphere_exists(make_params(lo), K)) lo += step;
    if (lo > tau_hi) return;
    try {
      const auto [a, b] = find_boundary_bracket(K, lo, tau_hi, step);
      boundary[i].tau_star = embeddedness_boundary(K, a, b);
      boundary[i].has_root = true;
    } catch (const BracketError&) {
      // Slice without a sign change: recorded as embedded throughout.
    } catch (const AccuracyError&) {
      slice_failed[i] = 1;
    }
  });

  if (cfg.want("csv")) {
    write_with(out_file(cfg, "region.csv"), [&](std::ostream& os) { io::write_region_csv(os, rows); });
    write_with(out_file(cfg, "boundary.csv"), [&](std::ostream& os) { io::write_boundary_csv(os, boundary); });
  }
  if (cfg.want("svg")) write_text(out_file(cfg, "region.svg"), io::region_svg(rows, boundary));

  std::cout << "K,tau_star,status\n";
  for (const auto& b : boundary) {
    std::cout << io::fmt(b.K) << ',' << (b.has_root ? io::fmt(b.tau_star) : "") << ','
              << (b.has_root ? "boundary" : "embedded") << '\n';
  }
  const bool any_failed = std::count(failed.begin(), failed.end(), 1) + std::count(slice_failed.begin(), slice_failed.end(), 1) > 0;
  return any_failed ? kAccuracy : kOk;
}

int cmd_verify(const RunConfig& cfg) {
  verify::VerifyConfig vc;
  if (cfg.tol) vc.integrator_rtol = *cfg.tol;
  const auto results = verify::run_all(vc);
  nlohmann::json summary;
  summary["tool_version"] = io::kToolVersion;
  summary["integrator_rtol"] = vc.integrator_rtol;
  bool all = true;
  for (const auto& r : results) {
    summary["suites"].push_back(
        {{"name", r.name}, {"passed", r.passed}, {"metric", r.metric}, {"threshold", r.threshold}, {"detail", r.detail}});
    all = all && r.passed;
  }
  summary["passed"] = all;
  const auto text = summary.dump(2) + "\n";
  std::cout << text;
  if (!cfg.out.empty() && cfg.want("csv")) write_text(out_file(cfg, "verify.json"), text);
  return all ? kOk : kVerifyFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rotational constant Gauss curvature surfaces in Berger spheres"};
  app.set_version_flag("--version", io::kToolVersion);
  app.set_config("--config", "", "key = value configuration file; command-line flags take precedence");
  app.require_subcommand(1);

  RunConfig cfg;
  app.add_option("--tau", cfg.tau_values, "fiber scaling tau (repeatable)");
  app.add_option("--k", cfg.k_values, "Gauss curvature K (repeatable)");
  app.add_option("--tau-range", cfg.tau_range, "tau sweep a:b:n");
  app.add_option("--k-range", cfg.k_range, "K sweep a:b:n");
  app.add_option("--samples", cfg.samples, "profile samples per sphere")->capture_default_str();
  app.add_option("--grid", cfg.grid, "phase grid points per axis")->capture_default_str();
  app.add_option("--mesh-steps", cfg.mesh_steps, "rotation steps of OBJ meshes")->capture_default_str();
  app.add_option("--levels", cfg.levels, "contour levels of phase portraits")->delimiter(',')->capture_default_str();
  app.add_option("--tol", cfg.tol, "integrator relative tolerance (verify) or tracer tolerance (phase)");
  app.add_option("--out", cfg.out, "output directory")->capture_default_str();
  app.add_option("--format", cfg.format, "comma-separated subset of csv,svg,obj")->capture_default_str();
  app.add_option("--jobs", cfg.jobs, "worker threads for sweeps (0 = hardware concurrency)");

  auto* thresholds = app.add_subcommand("thresholds", "k0, kP and lambda per tau");
  auto* phase = app.add_subcommand("phase", "phase portraits of F with traced level curves");
  auto* sphere = app.add_subcommand("sphere", "build spheres: profile CSV, report, OBJ mesh");
  auto* region = app.add_subcommand("embed-region", "embeddedness over a (tau, K) grid and its boundary");
  auto* verify_cmd = app.add_subcommand("verify", "run the invariant suites, JSON summary on stdout");
  for (auto* sub : {thresholds, phase, sphere, region, verify_cmd}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    validate(cfg);
    if (thresholds->parsed()) return cmd_thresholds(cfg);
    if (phase->parsed()) return cmd_phase(cfg);
    if (sphere->parsed()) return cmd_sphere(cfg);
    if (region->parsed()) return cmd_embed_region(cfg);
    if (verify_cmd->parsed()) return cmd_verify(cfg);
  } catch (const ConfigError& e) {
    std::cerr << "berger-cgc: " << e.what() << '\n';
    return kConfigError;
  } catch (const DomainError& e) {
    std::cerr << "berger-cgc: " << e.what() << '\n';
    return kConfigError;
  } catch (const NoSphereError& e) {
    std::cerr << "berger-cgc: " << e.what() << '\n';
    return kNoSphere;
  } catch (const AccuracyError& e) {
    std::cerr << "berger-cgc: " << e.what() << '\n';
    return kAccuracy;
  }
  return kConfigError;
}
