#include "meso/core/homog.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include "meso/core/error.hpp"
#include "meso/core/format.hpp"

namespace meso {

EffectiveMedium effective_medium(double b, double mu_O, double mu_I) {
  if (!(b > 0.0) || !(mu_O > 0.0) || !(mu_I >= 0.0)) {
    throw Error(ErrorCode::invalid_argument,
                "effective medium needs b > 0, mu_O > 0, mu_I >= 0");
  }
  const double ratio = contrast_ratio(mu_O, mu_I);
  const double fraction = 4.0 * std::numbers::pi * b * b * b;
  EffectiveMedium m;
  m.b = b;
  m.Q = fraction * mu_O * ratio * Mat3::Identity();
  m.effective_stiffness = mu_O * Mat3::Identity() - m.Q;
  m.effective_shear = mu_O * (1.0 - fraction * ratio);
  m.regime_indicator = fraction * std::abs(ratio);
  return m;
}

double limit_b(double beta) {
  return std::cbrt(3.0 * (6.0 / std::numbers::pi) * beta / (4.0 * std::numbers::pi));
}

ValueGrad u_hat_sphere(const Vec3& x, double r, double mu_O, double mu_hat) {
  if (!(r > 0.0)) throw Error(ErrorCode::invalid_argument, "cloud radius must be positive");
  const double k = (mu_hat - mu_O) / (mu_O * (mu_hat + 2.0 * mu_O));
  ValueGrad out;
  out.value = x.x() / mu_O;
  out.grad = Vec3(1.0 / mu_O, 0.0, 0.0);
  const double rho2 = x.squaredNorm();
  if (rho2 < r * r) {
    out.value -= k * x.x();
    out.grad.x() -= k;
    return out;
  }
  const double rho = std::sqrt(rho2);
  const double kr3 = k * r * r * r;
  const double inv3 = 1.0 / (rho2 * rho);
  out.value -= kr3 * x.x() * inv3;
  Vec3 g = Vec3(inv3, 0.0, 0.0) - (3.0 * x.x() * inv3 / rho2) * x;
  out.grad -= kr3 * g;
  return out;
}

CoefficientSet coeffs_from_homog(const Cloud& cloud, const EffectiveMedium& medium,
                                 double r, double mu_O) {
  CoefficientSet out;
  out.method = "homog";
  out.vectors.reserve(cloud.size());
  for (const auto& inc : cloud.inclusions()) {
    out.vectors.push_back(-u_hat_sphere(inc.center, r, mu_O, medium.effective_shear).grad);
  }
  return out;
}

HomogComparison homog_compare(const HomogCompareOptions& options) {
  const auto material = find_builtin_material(options.material);
  const auto matrix = find_builtin_material(options.matrix);
  if (!material) throw Error(ErrorCode::invalid_argument, "unknown material " + options.material);
  if (!matrix) throw Error(ErrorCode::invalid_argument, "unknown material " + options.matrix);
  if (options.samples < 2) throw Error(ErrorCode::invalid_argument, "need >= 2 samples");

  const DomainSpec domain = DomainSpec::full_space(*matrix);
  const BackgroundField background = LinearX{};
  const auto cluster = generate_periodic_spherical_cluster(options.n1, options.beta,
                                                           *material, domain);
  const Cloud& cloud = cluster.cloud;
  const double mu_O = domain.matrix_shear();
  constexpr double cloud_radius = 0.5;

  const auto system = assemble(cloud, domain, background);
  HomogComparison out;
  if (options.method == "direct") {
    out.system_coeffs = solve_direct(system);
  } else if (options.method == "neumann") {
    out.system_coeffs = solve_neumann(system, {options.tol, options.max_iter});
  } else {
    throw Error(ErrorCode::invalid_argument, "unknown method " + options.method);
  }

  out.count = cloud.size();
  out.b = cluster.b;
  out.medium = effective_medium(cluster.b, mu_O, material->shear());
  out.stability = stability_ratio(out.system_coeffs, system);

  const auto homog_coeffs = coeffs_from_homog(cloud, out.medium, cloud_radius, mu_O);
  const Approximation solved(cloud, out.system_coeffs, domain, background);
  const Approximation from_homog(cloud, homog_coeffs, domain, background);

  const auto line = sample_line(Vec3(options.x_min, 0, 0), Vec3(options.x_max, 0, 0),
                                options.samples, solved);
  const auto line_h = sample_line(Vec3(options.x_min, 0, 0), Vec3(options.x_max, 0, 0),
                                  options.samples, from_homog);
  for (std::size_t i = 0; i < line.size(); ++i) {
    const Vec3& x = line[i].position;
    const double wf = x.x() / mu_O;
    const double sys = line[i].u - wf;
    const double hom = u_hat_sphere(x, cloud_radius, mu_O, out.medium.effective_shear).value - wf;
    const double hc = line_h[i].u - wf;
    out.x1.push_back(x.x());
    out.u_minus_wf_system.push_back(sys);
    out.u_minus_wf_homog.push_back(hom);
    out.u_minus_wf_homog_coeffs.push_back(hc);
    out.sup_gap = std::max(out.sup_gap, std::abs(sys - hom));
    out.sup_gap_homog_coeffs = std::max(out.sup_gap_homog_coeffs, std::abs(sys - hc));
  }

  for (std::size_t j = 0; j < cloud.size(); ++j) {
    if (cloud[j].center.norm() > kInteriorRadius) continue;
    const Vec3 grad_hat = -homog_coeffs.vectors[j];
    out.coefficient_gap =
        std::max(out.coefficient_gap, (out.system_coeffs.vectors[j] + grad_hat).norm());
  }
  return out;
}

void write_comparison_csv(std::ostream& os, const HomogComparison& cmp) {
  os << "# N=" << cmp.count << '\n'
     << "# b=" << format_double(cmp.b) << '\n'
     << "# mu_hat=" << format_double(cmp.medium.effective_shear) << '\n'
     << "# sup_gap=" << format_double(cmp.sup_gap) << '\n'
     << "# sup_gap_homog_coeffs=" << format_double(cmp.sup_gap_homog_coeffs) << '\n'
     << "# coefficient_gap=" << format_double(cmp.coefficient_gap) << '\n';
  os << "x1,u_minus_wf_system,u_minus_wf_homog,u_minus_wf_homog_coeffs\n";
  for (std::size_t i = 0; i < cmp.x1.size(); ++i) {
    os << format_double(cmp.x1[i]) << ',' << format_double(cmp.u_minus_wf_system[i]) << ','
       << format_double(cmp.u_minus_wf_homog[i]) << ','
       << format_double(cmp.u_minus_wf_homog_coeffs[i]) << '\n';
  }
}

}  // namespace meso
