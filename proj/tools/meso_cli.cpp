// Command-line front end. Talks to the library only through the C API.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "meso/meso.h"

namespace {

constexpr const char* kUnits = R"(Units:
  Moduli are in GPa: materials give E_gpa and nu (mu = E / (2 (1 + nu))) or
  mu_gpa directly; "void" has mu = 0. Lengths (centres, radii, domain radius,
  r_f, plane and line coordinates) are in the units of the cluster file. The
  background source term is dimensionless, so u carries length^2 / GPa for
  radial_source and length / GPa for linear_x (w_f = x_1 / mu_O).
  epsilon and d are dimensionless: radii and distances divided by the ball
  radius for ball domains; raw lengths for the whole space.

Exit codes: 0 success, 1 validation or solver failure, 2 I/O, parse or usage
error.)";

struct Failure {
  int code;
};

int exit_code(meso_status s) {
  switch (s) {
    case MESO_OK: return 0;
    case MESO_ERR_PARSE:
    case MESO_ERR_IO:
    case MESO_ERR_INVALID_ARGUMENT: return 2;
    default: return 1;
  }
}

void check(meso_status s, const std::string& context) {
  if (s == MESO_OK) return;
  std::cerr << "error: " << context << ": " << meso_last_error();
  if (meso_last_error_line() > 0) std::cerr << " (line " << meso_last_error_line() << ")";
  std::cerr << '\n';
  if (s == MESO_ERR_DIVERGED || s == MESO_ERR_NOT_CONVERGED) {
    std::cerr << "hint: the fixed-point iteration failed; try --method direct\n";
  }
  throw Failure{exit_code(s)};
}

[[noreturn]] void usage_error(const std::string& message) {
  std::cerr << "error: " << message << '\n';
  throw Failure{2};
}

struct ClusterPtr {
  meso_cluster* p = nullptr;
  ~ClusterPtr() { meso_cluster_free(p); }
};
struct CoeffsPtr {
  meso_coeffs* p = nullptr;
  ~CoeffsPtr() { meso_coeffs_free(p); }
};
struct StringPtr {
  char* p = nullptr;
  ~StringPtr() { meso_string_free(p); }
};

/// "-" writes to standard output.
void emit(const std::string& path, const char* text) {
  if (path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    std::cerr << "error: cannot open " << path << " for writing\n";
    throw Failure{2};
  }
  out << text;
  if (!out.flush()) {
    std::cerr << "error: cannot write " << path << '\n';
    throw Failure{2};
  }
}

std::string sig3(double x) {
  if (std::isinf(x)) return "inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

std::string full(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double parse_number(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    usage_error("bad number '" + s + "' in " + what);
  }
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(item);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

std::array<double, 3> parse_point(const std::string& s, const std::string& what) {
  const auto parts = split(s, ',');
  if (parts.size() != 3) usage_error(what + " must be x,y,z");
  return {parse_number(parts[0], what), parse_number(parts[1], what), parse_number(parts[2], what)};
}

int parse_axis(const std::string& s) {
  if (s == "x" || s == "0") return 0;
  if (s == "y" || s == "1") return 1;
  if (s == "z" || s == "2") return 2;
  usage_error("axis must be x, y or z");
}

void load_cluster(const std::string& path, double ratio, bool strict, ClusterPtr& out) {
  check(meso_cluster_load(path.c_str(), ratio, strict ? 1 : 0, &out.p), "loading " + path);
}

void load_coeffs(const std::string& path, CoeffsPtr& out) {
  check(meso_coeffs_load(path.c_str(), &out.p), "loading " + path);
}

void warn_ratio(const meso_cluster* cluster, double ratio) {
  int admissible = 1;
  StringPtr report;
  check(meso_cluster_validate(cluster, ratio, &admissible, nullptr), "validating");
  if (!admissible) {
    double eps = 0, d = 0;
    meso_cluster_metrics(cluster, &eps, &d, nullptr);
    std::cerr << "warning: eps/d = " << sig3(eps / d) << " exceeds " << ratio
              << "; the asymptotic regime may not hold\n";
  }
}

// ---------------------------------------------------------------------------

struct MetricsArgs {
  std::string cluster;
  double ratio = 0.5;
};

int run_metrics(const MetricsArgs& a) {
  ClusterPtr c;
  load_cluster(a.cluster, a.ratio, true, c);
  double eps = 0, d = 0;
  std::size_t n = 0;
  check(meso_cluster_metrics(c.p, &eps, &d, &n), "metrics");
  std::cout << "epsilon=" << sig3(eps) << " d=" << sig3(d) << " N=" << n << '\n';
  warn_ratio(c.p, a.ratio);
  return 0;
}

struct GenerateArgs {
  int n1 = 1000;
  double beta = 0.09;
  std::string material = "Aluminum";
  std::string matrix = "Structural Steel";
  std::string output = "-";
};

int run_generate(const GenerateArgs& a) {
  ClusterPtr c;
  check(meso_cluster_generate(a.n1, a.beta, a.material.c_str(), a.matrix.c_str(), &c.p),
        "generating");
  StringPtr json;
  check(meso_cluster_serialize(c.p, &json.p), "serializing");
  emit(a.output, json.p);
  double eps = 0, d = 0;
  std::size_t n = 0;
  check(meso_cluster_metrics(c.p, &eps, &d, &n), "metrics");
  std::cerr << "N=" << n << " epsilon=" << full(eps) << " d=" << full(d) << '\n';
  return 0;
}

struct ValidateArgs {
  std::string cluster;
  double ratio = 0.5;
};

int run_validate(const ValidateArgs& a) {
  ClusterPtr c;
  load_cluster(a.cluster, a.ratio, false, c);
  int admissible = 0;
  StringPtr report;
  check(meso_cluster_validate(c.p, a.ratio, &admissible, &report.p), "validating");
  std::cout << report.p;
  if (!admissible) std::cerr << "cluster is not admissible\n";
  return admissible ? 0 : 1;
}

struct SolveArgs {
  std::string cluster;
  std::string method = "auto";
  double tol = 1e-12;
  int max_iter = 500;
  std::string output = "-";
};

int run_solve(const SolveArgs& a) {
  ClusterPtr c;
  load_cluster(a.cluster, 0.5, true, c);
  warn_ratio(c.p, 0.5);
  CoeffsPtr k;
  check(meso_solve(c.p, a.method.c_str(), a.tol, a.max_iter, &k.p), "solving");
  StringPtr csv;
  check(meso_coeffs_serialize(k.p, &csv.p), "serializing");
  emit(a.output, csv.p);
  const char* method = nullptr;
  int iterations = 0;
  double residual = 0;
  meso_coeffs_info(k.p, &method, &iterations, &residual);
  std::cerr << "method=" << method << " iterations=" << iterations
            << " residual=" << full(residual) << '\n';
  return 0;
}

struct PlaneArgs {
  std::string cluster, coeffs;
  std::string axis = "z";
  double offset = 0.0;
  std::vector<std::string> bounds;
  std::string res = "200x200";
  std::string output = "-";
};

// Axes without --bounds span the cluster's bounding box padded by 2d,
// with d converted to a length (times R in a ball).
void default_bounds(const meso_cluster* c, const bool seen[3], double lo[3], double hi[3]) {
  double eps = 0, d = 0, mu = 0, radius = 0;
  size_t n = 0;
  check(meso_cluster_metrics(c, &eps, &d, &n), "reading metrics");
  check(meso_cluster_domain(c, &mu, &radius), "reading domain");
  double box_lo[3], box_hi[3];
  for (int ax = 0; ax < 3; ++ax) {
    box_lo[ax] = std::numeric_limits<double>::infinity();
    box_hi[ax] = -box_lo[ax];
  }
  double largest = 0;
  for (size_t j = 0; j < n; ++j) {
    double center[3], a = 0, shear = 0;
    check(meso_cluster_inclusion(c, j, center, &a, &shear), "reading inclusion");
    largest = std::max(largest, a);
    for (int ax = 0; ax < 3; ++ax) {
      box_lo[ax] = std::min(box_lo[ax], center[ax] - a);
      box_hi[ax] = std::max(box_hi[ax], center[ax] + a);
    }
  }
  const double length = std::isfinite(radius) ? radius : 1.0;
  const double pad = std::isfinite(d) ? 2 * d * length : largest;
  for (int ax = 0; ax < 3; ++ax) {
    if (seen[ax]) continue;
    lo[ax] = box_lo[ax] - pad;
    hi[ax] = box_hi[ax] + pad;
  }
}

int run_eval_plane(const PlaneArgs& a) {
  const int axis = parse_axis(a.axis);
  const int ua = axis == 0 ? 1 : 0;
  const int va = axis == 2 ? 1 : 2;
  double lo[3] = {0, 0, 0}, hi[3] = {0, 0, 0};
  bool seen[3] = {false, false, false};
  for (const auto& b : a.bounds) {
    const auto parts = split(b, ':');
    if (parts.size() != 3) usage_error("bounds must look like x:min:max");
    const int ax = parse_axis(parts[0]);
    if (ax == axis) usage_error("bounds must name the two in-plane axes");
    lo[ax] = parse_number(parts[1], "--bounds");
    hi[ax] = parse_number(parts[2], "--bounds");
    seen[ax] = true;
  }
  const auto res = split(a.res, 'x');
  if (res.size() != 2) usage_error("--res must look like 200x200");
  int nu = 0, nv = 0;
  try {
    nu = std::stoi(res[0]);
    nv = std::stoi(res[1]);
  } catch (const std::exception&) {
    usage_error("--res must look like 200x200");
  }

  ClusterPtr c;
  CoeffsPtr k;
  load_cluster(a.cluster, 0.5, true, c);
  load_coeffs(a.coeffs, k);
  if (!seen[ua] || !seen[va]) default_bounds(c.p, seen, lo, hi);
  StringPtr csv;
  check(meso_eval_plane_csv(c.p, k.p, axis, a.offset, lo[ua], hi[ua], lo[va], hi[va], nu, nv,
                            &csv.p),
        "evaluating plane");
  emit(a.output, csv.p);
  return 0;
}

struct LineArgs {
  std::string cluster, coeffs;
  std::string from = "-1.5,0,0";
  std::string to = "1.5,0,0";
  int samples = 1000;
  std::string output = "-";
};

int run_eval_line(const LineArgs& a) {
  const auto from = parse_point(a.from, "--from");
  const auto to = parse_point(a.to, "--to");
  ClusterPtr c;
  CoeffsPtr k;
  load_cluster(a.cluster, 0.5, true, c);
  load_coeffs(a.coeffs, k);
  StringPtr csv;
  check(meso_eval_line_csv(c.p, k.p, from.data(), to.data(), a.samples, &csv.p),
        "evaluating line");
  emit(a.output, csv.p);
  return 0;
}

struct HomogArgs {
  int n1 = 1000;
  double beta = 0.09;
  std::string material = "Aluminum";
  std::string matrix = "Structural Steel";
  int samples = 1000;
  double x_min = -1.5, x_max = 1.5;
  std::string method = "neumann";
  double tol = 1e-12;
  int max_iter = 500;
  std::string output = "-";
};

int run_homog(const HomogArgs& a) {
  meso_homog_options o;
  meso_homog_default_options(&o);
  o.n1 = a.n1;
  o.beta = a.beta;
  o.material = a.material.c_str();
  o.matrix = a.matrix.c_str();
  o.samples = a.samples;
  o.x_min = a.x_min;
  o.x_max = a.x_max;
  o.method = a.method.c_str();
  o.tol = a.tol;
  o.max_iter = a.max_iter;
  meso_homog_summary s{};
  StringPtr csv;
  check(meso_homog_compare(&o, &s, &csv.p), "homogenisation comparison");
  if (s.regime_warning) {
    std::cerr << "warning: 4 pi b^3 |ratio| is not small; the effective-medium limit is rough\n";
  }
  // Keep the CSV and the summary apart when both would go to stdout.
  if (a.output == "-") {
    std::cout << csv.p;
  } else {
    emit(a.output, csv.p);
  }
  std::ostream& summary = a.output == "-" ? std::cerr : std::cout;
  summary << "sup_gap=" << full(s.sup_gap) << '\n'
          << "N=" << s.count << " b=" << full(s.b) << " mu_hat=" << full(s.effective_shear)
          << " coefficient_gap=" << full(s.coefficient_gap) << " stability=" << full(s.stability)
          << '\n';
  return 0;
}

struct CheckArgs {
  std::string cluster, coeffs;
  int samples = 200;
};

int run_check(const CheckArgs& a) {
  if (a.samples < 1) usage_error("--samples must be positive");
  ClusterPtr c;
  CoeffsPtr k;
  load_cluster(a.cluster, 0.5, true, c);
  load_coeffs(a.coeffs, k);
  int ok = 0;
  StringPtr report;
  check(meso_check(c.p, k.p, static_cast<std::size_t>(a.samples), &ok, &report.p), "checking");
  std::cout << report.p;
  if (!ok) std::cerr << "hard invariant failed (continuity or solver residual)\n";
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Meso-scale approximation for clusters of small spherical inclusions", "meso"};
  app.footer(kUnits);
  app.require_subcommand(1);
  app.set_config("--config", "", "Read options from a TOML/INI file");

  unsigned threads = 0;
  bool dump_config = false;
  app.add_option("--threads", threads, "Worker threads (0 = available cores)");
  app.add_flag("--dump-config", dump_config, "Print the effective configuration and exit");
  // Global flags may follow the subcommand.
  app.fallthrough();

  MetricsArgs metrics;
  auto* cmd_metrics = app.add_subcommand("metrics", "Print epsilon, d and N of a cluster file");
  cmd_metrics->add_option("cluster", metrics.cluster, "Cluster JSON file")->required();
  cmd_metrics->add_option("--ratio", metrics.ratio, "eps/d warning threshold")->capture_default_str();

  GenerateArgs gen;
  auto* cmd_gen = app.add_subcommand(
      "generate", "Periodic spherical cluster inside the ball of diameter 1 (whole space, x_1 field)");
  cmd_gen->add_option("--n1", gen.n1, "Grid cells (a perfect cube)")->required();
  cmd_gen->add_option("--beta", gen.beta, "Volume-fraction parameter")->capture_default_str();
  cmd_gen->add_option("--material", gen.material, "Inclusion material")->capture_default_str();
  cmd_gen->add_option("--matrix", gen.matrix, "Matrix material")->capture_default_str();
  cmd_gen->add_option("-o,--output", gen.output, "Output cluster file (- for stdout)")
      ->capture_default_str();

  ValidateArgs val;
  auto* cmd_val = app.add_subcommand("validate", "Admissibility report (JSON) for a cluster file");
  cmd_val->add_option("cluster", val.cluster, "Cluster JSON file")->required();
  cmd_val->add_option("--ratio", val.ratio, "Largest admissible eps/d")->capture_default_str();

  SolveArgs solve;
  auto* cmd_solve = app.add_subcommand("solve", "Solve the interaction system for the coefficients");
  cmd_solve->add_option("cluster", solve.cluster, "Cluster JSON file")->required();
  cmd_solve->add_option("--method", solve.method, "direct, neumann or auto (direct while 3N <= 20000)")
      ->check(CLI::IsMember({"auto", "direct", "neumann"}))
      ->capture_default_str();
  cmd_solve->add_option("--tol", solve.tol, "Relative residual target (neumann)")->capture_default_str();
  cmd_solve->add_option("--max-iter", solve.max_iter, "Sweep limit (neumann)")->capture_default_str();
  cmd_solve->add_option("-o,--output", solve.output, "Coefficients CSV (- for stdout)")
      ->capture_default_str();

  PlaneArgs plane;
  auto* cmd_plane = app.add_subcommand("eval-plane", "Sample u and grad u on an axis-aligned plane");
  cmd_plane->add_option("cluster", plane.cluster, "Cluster JSON file")->required();
  cmd_plane->add_option("coeffs", plane.coeffs, "Coefficients CSV")->required();
  cmd_plane->add_option("--axis", plane.axis, "Plane normal: x, y or z")->capture_default_str();
  cmd_plane->add_option("--offset", plane.offset, "Plane position along the normal")
      ->capture_default_str();
  cmd_plane->add_option("--bounds", plane.bounds,
                        "In-plane ranges, e.g. x:1.5:3.5 y:1.5:3.5; missing axes span the cluster box padded by 2d")
      ->expected(1, 2);
  cmd_plane->add_option("--res", plane.res, "Samples per in-plane axis, e.g. 200x200")
      ->capture_default_str();
  cmd_plane->add_option("-o,--output", plane.output, "Output CSV (- for stdout)")
      ->capture_default_str();

  LineArgs line;
  auto* cmd_line = app.add_subcommand("eval-line", "Sample u and grad u along a segment");
  cmd_line->add_option("cluster", line.cluster, "Cluster JSON file")->required();
  cmd_line->add_option("coeffs", line.coeffs, "Coefficients CSV")->required();
  cmd_line->add_option("--from", line.from, "Start point x,y,z")->capture_default_str();
  cmd_line->add_option("--to", line.to, "End point x,y,z")->capture_default_str();
  cmd_line->add_option("--samples", line.samples, "Number of points")->capture_default_str();
  cmd_line->add_option("-o,--output", line.output, "Output CSV (- for stdout)")
      ->capture_default_str();

  HomogArgs homog;
  auto* cmd_homog = app.add_subcommand(
      "homog-compare", "Compare the solved cluster with the homogenised solution along x_1");
  cmd_homog->add_option("--n1", homog.n1, "Grid cells (a perfect cube)")->required();
  cmd_homog->add_option("--beta", homog.beta, "Volume-fraction parameter")->capture_default_str();
  cmd_homog->add_option("--material", homog.material, "Inclusion material")->capture_default_str();
  cmd_homog->add_option("--matrix", homog.matrix, "Matrix material")->capture_default_str();
  cmd_homog->add_option("--samples", homog.samples, "Points on the x_1 axis")->capture_default_str();
  cmd_homog->add_option("--x-min", homog.x_min, "First x_1")->capture_default_str();
  cmd_homog->add_option("--x-max", homog.x_max, "Last x_1")->capture_default_str();
  cmd_homog->add_option("--method", homog.method, "neumann or direct")
      ->check(CLI::IsMember({"direct", "neumann"}))
      ->capture_default_str();
  cmd_homog->add_option("--tol", homog.tol, "Relative residual target")->capture_default_str();
  cmd_homog->add_option("--max-iter", homog.max_iter, "Sweep limit")->capture_default_str();
  cmd_homog->add_option("-o,--output", homog.output, "Output CSV (- for stdout)")
      ->capture_default_str();

  CheckArgs chk;
  auto* cmd_check = app.add_subcommand(
      "check", "Interface and boundary residuals; fails on continuity or solver-residual breaches");
  cmd_check->add_option("cluster", chk.cluster, "Cluster JSON file")->required();
  cmd_check->add_option("coeffs", chk.coeffs, "Coefficients CSV")->required();
  cmd_check->add_option("--samples", chk.samples, "Directions per inclusion")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  if (dump_config) {
    // Globals, then only the selected subcommand's section.
    std::cout << "threads=" << threads << '\n';
    for (const auto* sub : app.get_subcommands()) {
      std::cout << '[' << sub->get_name() << "]\n" << sub->config_to_str(true, false);
    }
    return 0;
  }
  meso_set_threads(threads);

  try {
    if (cmd_metrics->parsed()) return run_metrics(metrics);
    if (cmd_gen->parsed()) return run_generate(gen);
    if (cmd_val->parsed()) return run_validate(val);
    if (cmd_solve->parsed()) return run_solve(solve);
    if (cmd_plane->parsed()) return run_eval_plane(plane);
    if (cmd_line->parsed()) return run_eval_line(line);
    if (cmd_homog->parsed()) return run_homog(homog);
    if (cmd_check->parsed()) return run_check(chk);
  } catch (const Failure& f) {
    return f.code;
  }
  return 2;
}
