#include "meso/core/validation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "meso/core/error.hpp"
#include "meso/core/parallel.hpp"

namespace meso {

std::vector<Vec3> fibonacci_sphere(std::size_t count) {
  std::vector<Vec3> dirs;
  dirs.reserve(count);
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (std::size_t i = 0; i < count; ++i) {
    const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(count);
    const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * static_cast<double>(i);
    dirs.emplace_back(rho * std::cos(phi), rho * std::sin(phi), z);
  }
  return dirs;
}

double ResidualReport::max_continuity() const noexcept {
  return continuity_sup.empty() ? 0.0
                                : *std::max_element(continuity_sup.begin(), continuity_sup.end());
}

double ResidualReport::max_flux_jump() const noexcept {
  return flux_jump_sup.empty() ? 0.0
                               : *std::max_element(flux_jump_sup.begin(), flux_jump_sup.end());
}

double ResidualReport::relative_continuity() const noexcept {
  return value_scale > 0.0 ? max_continuity() / value_scale : max_continuity();
}

double ResidualReport::relative_flux_jump() const noexcept {
  return flux_scale > 0.0 ? max_flux_jump() / flux_scale : max_flux_jump();
}

ResidualReport interface_residuals(const Approximation& approx,
                                   std::size_t samples_per_inclusion) {
  const Cloud& cloud = approx.cloud();
  const double mu_O = approx.domain().matrix_shear();
  const auto dirs = fibonacci_sphere(samples_per_inclusion);

  ResidualReport report;
  report.samples_per_inclusion = samples_per_inclusion;
  report.continuity_sup.assign(cloud.size(), 0.0);
  report.flux_jump_sup.assign(cloud.size(), 0.0);
  std::vector<double> value_scale(cloud.size(), 0.0);
  std::vector<double> flux_scale(cloud.size(), 0.0);

  parallel_for(cloud.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t j = begin; j < end; ++j) {
      const auto& inc = cloud[j];
      const double mu_I = inc.material.shear();
      const int idx = static_cast<int>(j);
      for (const auto& n : dirs) {
        const Vec3 x = inc.center + inc.radius * n;
        const auto outside = approx.eval(x, idx, Branch::exterior);
        const auto inside = approx.eval(x, idx, Branch::interior);
        const double flux_out = mu_O * outside.grad.dot(n);
        const double flux_in = mu_I * inside.grad.dot(n);
        report.continuity_sup[j] =
            std::max(report.continuity_sup[j], std::abs(outside.value - inside.value));
        report.flux_jump_sup[j] = std::max(report.flux_jump_sup[j], std::abs(flux_out - flux_in));
        value_scale[j] = std::max({value_scale[j], std::abs(outside.value), std::abs(inside.value)});
        flux_scale[j] = std::max({flux_scale[j], std::abs(flux_out), std::abs(flux_in)});
      }
    }
  });
  for (std::size_t j = 0; j < cloud.size(); ++j) {
    report.value_scale = std::max(report.value_scale, value_scale[j]);
    report.flux_scale = std::max(report.flux_scale, flux_scale[j]);
  }
  return report;
}

BoundaryResidual boundary_residual(const Approximation& approx, std::size_t samples) {
  const auto& domain = approx.domain();
  if (!domain.bounded()) {
    throw Error(ErrorCode::incompatible, "boundary residual needs a bounded domain");
  }
  const Cloud& cloud = approx.cloud();
  const auto& coeffs = approx.coefficients();
  const auto dirs = fibonacci_sphere(samples);
  std::vector<double> psi(samples, 0.0), env(samples, 0.0);

  parallel_for(samples, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const Vec3 x = domain.radius() * dirs[i];
      const double data = w_f_eval(x, approx.background(), domain).value;
      psi[i] = std::abs(approx.u(x) - data);
      double e = 0.0;
      for (std::size_t k = 0; k < cloud.size(); ++k) {
        const double a = cloud[k].radius;
        const double r = (x - cloud[k].center).norm();
        e += a * a * a * a * coeffs.vectors[k].norm() / (r * r * r);
      }
      env[i] = e;
    }
  });

  BoundaryResidual out;
  out.samples = samples;
  out.sup = samples ? *std::max_element(psi.begin(), psi.end()) : 0.0;
  out.envelope = samples ? *std::max_element(env.begin(), env.end()) : 0.0;
  return out;
}

double harmonicity_check(const std::vector<Vec3>& points,
                         const std::function<double(const Vec3&)>& field, double step) {
  if (!(step > 0.0)) throw Error(ErrorCode::invalid_argument, "step must be positive");
  double worst = 0.0;
  for (const auto& x : points) {
    const double u0 = field(x);
    double lap = 0.0, curvature = 0.0;
    Vec3 grad;
    for (int a = 0; a < 3; ++a) {
      Vec3 e = Vec3::Zero();
      e[a] = step;
      const double up = field(x + e);
      const double um = field(x - e);
      const double second = (up - 2.0 * u0 + um) / (step * step);
      lap += second;
      curvature += std::abs(second);
      grad[a] = (up - um) / (2.0 * step);
    }
    const double scale = curvature + grad.norm() / step;
    if (scale > 0.0) worst = std::max(worst, std::abs(lap) / scale);
  }
  return worst;
}

std::vector<Vec3> sample_matrix_points(const Cloud& cloud, const DomainSpec& domain,
                                       const BackgroundField& background,
                                       std::size_t count, double margin,
                                       std::uint64_t seed) {
  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 hi = -lo;
  for (const auto& inc : cloud.inclusions()) {
    lo = lo.cwiseMin(inc.center - Vec3::Constant(inc.radius));
    hi = hi.cwiseMax(inc.center + Vec3::Constant(inc.radius));
  }
  const double pad = std::isfinite(cloud.d()) ? 2.0 * cloud.d() : 1.0;
  lo -= Vec3::Constant(pad);
  hi += Vec3::Constant(pad);

  const double source_radius =
      std::holds_alternative<RadialSource>(background) ? std::get<RadialSource>(background).r_f : -1.0;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Vec3> out;
  std::size_t attempts = 0;
  while (out.size() < count && attempts < 1000 * count + 1000) {
    ++attempts;
    Vec3 x;
    for (int a = 0; a < 3; ++a) x[a] = lo[a] + (hi[a] - lo[a]) * unit(rng);
    if (domain.bounded() && x.norm() > domain.radius() - margin) continue;
    if (source_radius > 0.0 && x.norm() < source_radius + margin) continue;
    bool clear = true;
    for (const auto& inc : cloud.inclusions()) {
      if ((x - inc.center).norm() < inc.radius + margin) {
        clear = false;
        break;
      }
    }
    if (clear) out.push_back(x);
  }
  return out;
}

AppendixRatio appendix_identity_check(const Cloud& cloud, const CoefficientSet& coeffs,
                                      const DomainSpec& domain) {
  if (domain.bounded()) {
    throw Error(ErrorCode::incompatible, "inner-product check uses the full-space kernel");
  }
  if (cloud.size() < 2) throw Error(ErrorCode::invalid_argument, "needs at least two inclusions");
  if (coeffs.size() != cloud.size()) {
    throw Error(ErrorCode::incompatible, "coefficient count does not match cluster size");
  }
  const double mu_O = domain.matrix_shear();
  const std::size_t n = cloud.size();
  std::vector<Vec3> pc(n), qc(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto p = polarization_sphere(cloud[k].radius, mu_O, cloud[k].material.shear());
    pc[k] = p.matrix * coeffs.vectors[k];
    // Q = -P for negative definite P, P for positive definite, 0 otherwise.
    qc[k] = p.definiteness == Definiteness::negative ? Vec3(-pc[k]) : pc[k];
  }

  AppendixRatio out;
  double qq = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    Vec3 tpc = Vec3::Zero();
    for (std::size_t k = 0; k < n; ++k) {
      if (k == j) continue;
      tpc += free_space_mixed_hessian(cloud[j].center, cloud[k].center, mu_O) * pc[k];
    }
    out.numerator += tpc.dot(qc[j]);
    qq += qc[j].squaredNorm();
  }
  const double d = cloud.d();
  out.denominator = qq / (d * d * d);
  out.ratio = out.denominator > 0.0 ? out.numerator / out.denominator
                                    : std::numeric_limits<double>::quiet_NaN();
  return out;
}

}  // namespace meso
