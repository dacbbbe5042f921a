#include "meso/meso.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <limits>
#include <new>
#include <sstream>
#include <string>

#include "meso/core/error.hpp"
#include "meso/core/homog.hpp"
#include "meso/core/io.hpp"
#include "meso/core/parallel.hpp"

struct meso_cluster {
  meso::LoadedCluster data;
};

struct meso_coeffs {
  meso::CoefficientSet data;
};

namespace {

thread_local std::string g_last_error;
thread_local std::size_t g_last_line = 0;

meso_status map_code(meso::ErrorCode code) {
  using meso::ErrorCode;
  switch (code) {
    case ErrorCode::invalid_argument: return MESO_ERR_INVALID_ARGUMENT;
    case ErrorCode::incompatible: return MESO_ERR_INCOMPATIBLE;
    case ErrorCode::parse: return MESO_ERR_PARSE;
    case ErrorCode::io: return MESO_ERR_IO;
    case ErrorCode::validation: return MESO_ERR_VALIDATION;
    case ErrorCode::singular: return MESO_ERR_SINGULAR;
    case ErrorCode::diverged: return MESO_ERR_DIVERGED;
    case ErrorCode::not_converged: return MESO_ERR_NOT_CONVERGED;
  }
  return MESO_ERR_INTERNAL;
}

meso_status fail(meso_status status, std::string message, std::size_t line = 0) {
  g_last_error = std::move(message);
  g_last_line = line;
  return status;
}

/// Runs `body` and converts any exception into a status code.
template <class F>
meso_status guarded(F&& body) {
  g_last_error.clear();
  g_last_line = 0;
  try {
    body();
    return MESO_OK;
  } catch (const meso::SolverError& e) {
    std::ostringstream msg;
    msg << e.what() << " (iterations " << e.iterations() << ", last sweep ratio " << e.ratio()
        << ")";
    return fail(map_code(e.code()), msg.str());
  } catch (const meso::ParseError& e) {
    return fail(MESO_ERR_PARSE, e.what(), e.line());
  } catch (const meso::Error& e) {
    return fail(map_code(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(MESO_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(MESO_ERR_INTERNAL, e.what());
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw meso::Error(meso::ErrorCode::invalid_argument, what);
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

meso::Material builtin(const char* name) {
  require(name != nullptr, "material name is null");
  auto m = meso::find_builtin_material(name);
  if (!m) throw meso::Error(meso::ErrorCode::invalid_argument, std::string("unknown material ") + name);
  return *m;
}

constexpr std::size_t kDirectCap = 20000;

}  // namespace

extern "C" {

const char* meso_version(void) { return "1.0.0"; }

const char* meso_status_name(meso_status status) {
  switch (status) {
    case MESO_OK: return "ok";
    case MESO_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case MESO_ERR_INCOMPATIBLE: return "incompatible";
    case MESO_ERR_PARSE: return "parse";
    case MESO_ERR_IO: return "io";
    case MESO_ERR_VALIDATION: return "validation";
    case MESO_ERR_SINGULAR: return "singular";
    case MESO_ERR_DIVERGED: return "diverged";
    case MESO_ERR_NOT_CONVERGED: return "not_converged";
    case MESO_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* meso_last_error(void) { return g_last_error.c_str(); }

size_t meso_last_error_line(void) { return g_last_line; }

void meso_string_free(char* s) { std::free(s); }

void meso_set_threads(unsigned count) { meso::set_thread_count(count); }

meso_status meso_material_shear(const char* name, double* shear_gpa) {
  return guarded([&] {
    require(shear_gpa != nullptr, "null output");
    *shear_gpa = builtin(name).shear();
  });
}

meso_status meso_cluster_load(const char* path, double ratio_threshold, int strict,
                              meso_cluster** out) {
  return guarded([&] {
    require(path && out, "null argument");
    *out = new meso_cluster{meso::load_cluster(path, ratio_threshold, strict != 0)};
  });
}

meso_status meso_cluster_parse(const char* text, double ratio_threshold, int strict,
                               meso_cluster** out) {
  return guarded([&] {
    require(text && out, "null argument");
    *out = new meso_cluster{meso::parse_cluster(text, ratio_threshold, strict != 0)};
  });
}

meso_status meso_cluster_generate(int n1, double beta, const char* material, const char* matrix,
                                  meso_cluster** out) {
  return guarded([&] {
    require(out != nullptr, "null output");
    const auto domain = meso::DomainSpec::full_space(builtin(matrix));
    require(!domain.matrix().is_void(), "matrix cannot be a void");
    auto cluster = meso::generate_periodic_spherical_cluster(n1, beta, builtin(material), domain);
    auto report = meso::validate_cloud(cluster.cloud, domain);
    *out = new meso_cluster{
        meso::LoadedCluster{domain, std::move(cluster.cloud), meso::LinearX{}, std::move(report)}};
  });
}

void meso_cluster_free(meso_cluster* cluster) { delete cluster; }

meso_status meso_cluster_serialize(const meso_cluster* cluster, char** json) {
  return guarded([&] {
    require(cluster && json, "null argument");
    const auto& c = cluster->data;
    *json = copy_string(meso::serialize_cluster(c.cloud, c.domain, c.background));
  });
}

size_t meso_cluster_size(const meso_cluster* cluster) {
  return cluster ? cluster->data.cloud.size() : 0;
}

meso_status meso_cluster_metrics(const meso_cluster* cluster, double* epsilon, double* d,
                                 size_t* count) {
  return guarded([&] {
    require(cluster != nullptr, "null cluster");
    const auto& m = cluster->data.cloud.metrics();
    if (epsilon) *epsilon = m.epsilon;
    if (d) *d = m.d;
    if (count) *count = m.count;
  });
}

meso_status meso_cluster_inclusion(const meso_cluster* cluster, size_t index, double center[3],
                                   double* radius, double* shear_gpa) {
  return guarded([&] {
    require(cluster != nullptr, "null cluster");
    require(index < cluster->data.cloud.size(), "inclusion index out of range");
    const auto& inc = cluster->data.cloud[index];
    if (center) {
      for (int a = 0; a < 3; ++a) center[a] = inc.center[a];
    }
    if (radius) *radius = inc.radius;
    if (shear_gpa) *shear_gpa = inc.material.shear();
  });
}

meso_status meso_cluster_domain(const meso_cluster* cluster, double* matrix_shear,
                                double* radius) {
  return guarded([&] {
    require(cluster != nullptr, "null cluster");
    if (matrix_shear) *matrix_shear = cluster->data.domain.matrix_shear();
    if (radius) *radius = cluster->data.domain.radius();
  });
}

meso_status meso_cluster_validate(const meso_cluster* cluster, double ratio_threshold,
                                  int* admissible, char** report_json) {
  return guarded([&] {
    require(cluster != nullptr, "null cluster");
    require(ratio_threshold > 0.0, "ratio threshold must be positive");
    const auto& c = cluster->data;
    const auto report = meso::validate_cloud(c.cloud, c.domain, ratio_threshold);
    if (admissible) *admissible = report.admissible() ? 1 : 0;
    if (report_json) *report_json = copy_string(meso::validation_report_json(c.cloud, report));
  });
}

meso_status meso_solve(const meso_cluster* cluster, const char* method, double tol, int max_iter,
                       meso_coeffs** out) {
  return guarded([&] {
    require(cluster && out, "null argument");
    const std::string m = method ? method : "auto";
    const auto& c = cluster->data;
    const auto system = meso::assemble(c.cloud, c.domain, c.background);
    const bool direct = m == "direct" || (m == "auto" && system.unknowns() <= kDirectCap);
    if (m != "direct" && m != "neumann" && m != "auto") {
      throw meso::Error(meso::ErrorCode::invalid_argument, "unknown method " + m);
    }
    meso::CoefficientSet coeffs = direct ? meso::solve_direct(system, {kDirectCap})
                                         : meso::solve_neumann(system, {tol, max_iter});
    *out = new meso_coeffs{std::move(coeffs)};
  });
}

meso_status meso_contraction_norm(const meso_cluster* cluster, int iters, double* value) {
  return guarded([&] {
    require(cluster && value, "null argument");
    require(iters > 0, "iteration count must be positive");
    const auto& c = cluster->data;
    *value = meso::contraction_norm(meso::assemble(c.cloud, c.domain, c.background), iters).value;
  });
}

meso_status meso_stability_ratio(const meso_cluster* cluster, const meso_coeffs* coeffs,
                                 double* value) {
  return guarded([&] {
    require(cluster && coeffs && value, "null argument");
    const auto& c = cluster->data;
    require(coeffs->data.size() == c.cloud.size(), "coefficient count does not match cluster");
    *value = meso::stability_ratio(coeffs->data, meso::assemble(c.cloud, c.domain, c.background));
  });
}

meso_status meso_coeffs_load(const char* path, meso_coeffs** out) {
  return guarded([&] {
    require(path && out, "null argument");
    *out = new meso_coeffs{meso::load_coefficients(path)};
  });
}

meso_status meso_coeffs_parse(const char* csv, meso_coeffs** out) {
  return guarded([&] {
    require(csv && out, "null argument");
    std::istringstream in(csv);
    *out = new meso_coeffs{meso::read_coefficients_csv(in)};
  });
}

void meso_coeffs_free(meso_coeffs* coeffs) { delete coeffs; }

meso_status meso_coeffs_serialize(const meso_coeffs* coeffs, char** csv) {
  return guarded([&] {
    require(coeffs && csv, "null argument");
    std::ostringstream os;
    meso::write_coefficients_csv(os, coeffs->data);
    *csv = copy_string(os.str());
  });
}

size_t meso_coeffs_size(const meso_coeffs* coeffs) { return coeffs ? coeffs->data.size() : 0; }

meso_status meso_coeffs_get(const meso_coeffs* coeffs, size_t index, double c[3]) {
  return guarded([&] {
    require(coeffs && c, "null argument");
    require(index < coeffs->data.size(), "coefficient index out of range");
    for (int a = 0; a < 3; ++a) c[a] = coeffs->data.vectors[index][a];
  });
}

meso_status meso_coeffs_info(const meso_coeffs* coeffs, const char** method, int* iterations,
                             double* residual) {
  return guarded([&] {
    require(coeffs != nullptr, "null coefficients");
    if (method) *method = coeffs->data.method.c_str();
    if (iterations) *iterations = coeffs->data.iterations;
    if (residual) *residual = coeffs->data.residual;
  });
}

meso_status meso_eval(const meso_cluster* cluster, const meso_coeffs* coeffs, const double x[3],
                      double* u, double grad[3]) {
  return guarded([&] {
    require(cluster && coeffs && x, "null argument");
    const auto& c = cluster->data;
    const meso::Approximation approx(c.cloud, coeffs->data, c.domain, c.background);
    const auto vg = approx.eval(meso::Vec3(x[0], x[1], x[2]));
    if (u) *u = vg.value;
    if (grad) {
      for (int a = 0; a < 3; ++a) grad[a] = vg.grad[a];
    }
  });
}

meso_status meso_eval_plane_csv(const meso_cluster* cluster, const meso_coeffs* coeffs, int axis,
                                double offset, double u_min, double u_max, double v_min,
                                double v_max, int nu, int nv, char** csv) {
  return guarded([&] {
    require(cluster && coeffs && csv, "null argument");
    const auto& c = cluster->data;
    const meso::Approximation approx(c.cloud, coeffs->data, c.domain, c.background);
    const meso::PlaneSpec plane{axis, offset, u_min, u_max, v_min, v_max, nu, nv};
    std::ostringstream os;
    meso::write_samples_csv(os, meso::sample_plane(plane, approx));
    *csv = copy_string(os.str());
  });
}

meso_status meso_eval_line_csv(const meso_cluster* cluster, const meso_coeffs* coeffs,
                               const double from[3], const double to[3], int samples, char** csv) {
  return guarded([&] {
    require(cluster && coeffs && from && to && csv, "null argument");
    const auto& c = cluster->data;
    const meso::Approximation approx(c.cloud, coeffs->data, c.domain, c.background);
    std::ostringstream os;
    meso::write_samples_csv(os, meso::sample_line(meso::Vec3(from[0], from[1], from[2]),
                                                  meso::Vec3(to[0], to[1], to[2]), samples,
                                                  approx));
    *csv = copy_string(os.str());
  });
}

meso_status meso_effective_medium(double b, double mu_o, double mu_i, meso_medium* out) {
  return guarded([&] {
    require(out != nullptr, "null output");
    const auto m = meso::effective_medium(b, mu_o, mu_i);
    out->effective_shear = m.effective_shear;
    out->q = m.Q(0, 0);
    out->regime_indicator = m.regime_indicator;
    out->regime_warning = m.regime_warning() ? 1 : 0;
  });
}

void meso_homog_default_options(meso_homog_options* options) {
  if (!options) return;
  static const meso::HomogCompareOptions defaults;
  options->n1 = defaults.n1;
  options->beta = defaults.beta;
  options->material = "Aluminum";
  options->matrix = "Structural Steel";
  options->samples = defaults.samples;
  options->x_min = defaults.x_min;
  options->x_max = defaults.x_max;
  options->method = "neumann";
  options->tol = defaults.tol;
  options->max_iter = defaults.max_iter;
}

meso_status meso_homog_compare(const meso_homog_options* options, meso_homog_summary* summary,
                               char** csv) {
  return guarded([&] {
    require(options && summary, "null argument");
    require(options->material && options->matrix && options->method, "null option string");
    meso::HomogCompareOptions o;
    o.n1 = options->n1;
    o.beta = options->beta;
    o.material = options->material;
    o.matrix = options->matrix;
    o.samples = options->samples;
    o.x_min = options->x_min;
    o.x_max = options->x_max;
    o.method = options->method;
    o.tol = options->tol;
    o.max_iter = options->max_iter;
    const auto cmp = meso::homog_compare(o);
    summary->count = cmp.count;
    summary->b = cmp.b;
    summary->effective_shear = cmp.medium.effective_shear;
    summary->sup_gap = cmp.sup_gap;
    summary->sup_gap_homog_coeffs = cmp.sup_gap_homog_coeffs;
    summary->coefficient_gap = cmp.coefficient_gap;
    summary->stability = cmp.stability;
    summary->regime_warning = cmp.medium.regime_warning() ? 1 : 0;
    if (csv) {
      std::ostringstream os;
      meso::write_comparison_csv(os, cmp);
      *csv = copy_string(os.str());
    }
  });
}

meso_status meso_check(const meso_cluster* cluster, const meso_coeffs* coeffs,
                       size_t samples_per_inclusion, int* ok, char** report_json) {
  return guarded([&] {
    require(cluster && coeffs, "null argument");
    require(samples_per_inclusion > 0, "need at least one sample per inclusion");
    const auto report = meso::run_check(cluster->data, coeffs->data, samples_per_inclusion);
    if (ok) *ok = report.ok() ? 1 : 0;
    if (report_json) *report_json = copy_string(meso::check_report_json(report));
  });
}

}  // extern "C"
