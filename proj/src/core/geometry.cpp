#include "meso/core/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "meso/core/error.hpp"

namespace meso {

double shear_modulus(double youngs_gpa, double poisson) {
  if (!(youngs_gpa > 0.0) || !std::isfinite(youngs_gpa)) {
    throw Error(ErrorCode::invalid_argument,
                "Young's modulus must be positive and finite");
  }
  if (!(poisson > -1.0 && poisson < 0.5)) {
    throw Error(ErrorCode::invalid_argument,
                "Poisson ratio must lie in (-1, 0.5)");
  }
  return youngs_gpa / (2.0 * (1.0 + poisson));
}

Material Material::from_elastic(std::string name, double youngs_gpa,
                                double poisson) {
  const double mu = shear_modulus(youngs_gpa, poisson);
  return Material(std::move(name), mu, youngs_gpa, poisson);
}

Material Material::from_shear(std::string name, double shear_gpa) {
  if (!(shear_gpa >= 0.0) || !std::isfinite(shear_gpa)) {
    throw Error(ErrorCode::invalid_argument,
                "shear modulus must be finite and non-negative");
  }
  return Material(std::move(name), shear_gpa, std::nullopt, std::nullopt);
}

Material Material::void_material() {
  return Material("void", 0.0, std::nullopt, std::nullopt);
}

std::vector<Material> builtin_materials() {
  return {
      Material::from_elastic("Cast Iron", 140.0, 0.25),
      Material::from_elastic("Steel AISI 4340", 205.0, 0.28),
      Material::from_elastic("Aluminum", 70.0, 0.33),
      Material::from_elastic("Copper", 110.0, 0.35),
      Material::from_elastic("Iron", 200.0, 0.29),
      Material::from_elastic("Structural Steel", 200.0, 0.33),
  };
}

std::optional<Material> find_builtin_material(const std::string& name) {
  if (name == "void" || name == "None") return Material::void_material();
  for (auto& m : builtin_materials()) {
    if (m.name() == name) return m;
  }
  return std::nullopt;
}

DomainSpec DomainSpec::ball(double radius, Material matrix) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw Error(ErrorCode::invalid_argument, "ball radius must be positive");
  }
  if (!(matrix.shear() > 0.0)) {
    throw Error(ErrorCode::invalid_argument,
                "matrix shear modulus must be positive");
  }
  return DomainSpec(BoundedBall{radius}, std::move(matrix));
}

DomainSpec DomainSpec::full_space(Material matrix) {
  if (!(matrix.shear() > 0.0)) {
    throw Error(ErrorCode::invalid_argument,
                "matrix shear modulus must be positive");
  }
  return DomainSpec(FullSpace{}, std::move(matrix));
}

double DomainSpec::radius() const noexcept {
  if (const auto* b = std::get_if<BoundedBall>(&shape_)) return b->radius;
  return std::numeric_limits<double>::infinity();
}

bool DomainSpec::contains(const Vec3& x) const noexcept {
  if (!bounded()) return x.allFinite();
  return x.norm() < radius();
}

const char* to_string(SeparationConvention c) noexcept {
  switch (c) {
    case SeparationConvention::scaled_minimum: return "scaled_minimum";
    case SeparationConvention::half_minimum: return "half_minimum";
    case SeparationConvention::lattice_spacing: return "lattice_spacing";
  }
  return "unknown";
}

std::optional<SeparationConvention> separation_convention_from_string(
    const std::string& s) {
  if (s == "scaled_minimum") return SeparationConvention::scaled_minimum;
  if (s == "half_minimum") return SeparationConvention::half_minimum;
  if (s == "lattice_spacing") return SeparationConvention::lattice_spacing;
  return std::nullopt;
}

SeparationConvention default_convention(const DomainSpec& domain) noexcept {
  return domain.bounded() ? SeparationConvention::scaled_minimum
                          : SeparationConvention::half_minimum;
}

ClusterMetrics cluster_metrics(std::span<const Inclusion> inclusions,
                               const DomainSpec& domain,
                               SeparationConvention convention) {
  if (inclusions.empty()) {
    throw Error(ErrorCode::invalid_argument, "cluster has no inclusions");
  }
  if (convention == SeparationConvention::scaled_minimum && !domain.bounded()) {
    throw Error(ErrorCode::incompatible,
                "scaled_minimum convention needs a bounded domain");
  }

  double max_radius = 0.0;
  for (const auto& inc : inclusions) max_radius = std::max(max_radius, inc.radius);

  double min_sq = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < inclusions.size(); ++j) {
    for (std::size_t k = j + 1; k < inclusions.size(); ++k) {
      min_sq = std::min(min_sq,
                        (inclusions[j].center - inclusions[k].center).squaredNorm());
    }
  }
  const double min_dist = std::sqrt(min_sq);

  ClusterMetrics m;
  m.count = inclusions.size();
  m.convention = convention;
  switch (convention) {
    case SeparationConvention::scaled_minimum:
      m.epsilon = max_radius / domain.radius();
      m.d = min_dist / domain.radius();
      break;
    case SeparationConvention::half_minimum:
      m.epsilon = max_radius;
      m.d = 0.5 * min_dist;
      break;
    case SeparationConvention::lattice_spacing:
      m.epsilon = max_radius;
      m.d = min_dist;
      break;
  }
  return m;
}

ClusterMetrics cluster_metrics(std::span<const Inclusion> inclusions,
                               const DomainSpec& domain) {
  return cluster_metrics(inclusions, domain, default_convention(domain));
}

Cloud::Cloud(std::vector<Inclusion> inclusions, const DomainSpec& domain,
             SeparationConvention convention)
    : inclusions_(std::move(inclusions)) {
  for (std::size_t i = 0; i < inclusions_.size(); ++i) {
    const auto& inc = inclusions_[i];
    if (!(inc.radius > 0.0) || !std::isfinite(inc.radius) ||
        !inc.center.allFinite()) {
      std::ostringstream os;
      os << "inclusion " << i << " needs a finite centre and positive radius";
      throw Error(ErrorCode::invalid_argument, os.str());
    }
  }
  metrics_ = cluster_metrics(inclusions_, domain, convention);
}

Cloud::Cloud(std::vector<Inclusion> inclusions, const DomainSpec& domain)
    : Cloud(std::move(inclusions), domain, default_convention(domain)) {}

int Cloud::region_of(const Vec3& x) const noexcept {
  for (std::size_t k = 0; k < inclusions_.size(); ++k) {
    const auto& inc = inclusions_[k];
    if ((x - inc.center).squaredNorm() < inc.radius * inc.radius) {
      return static_cast<int>(k);
    }
  }
  return -1;
}

bool ValidationReport::geometry_ok() const noexcept {
  return std::all_of(violations.begin(), violations.end(),
                     [](const Violation& v) { return v.kind == ViolationKind::ratio; });
}

ValidationReport validate_cloud(const Cloud& cloud, const DomainSpec& domain,
                                double ratio_threshold) {
  ValidationReport report;
  report.ratio_threshold = ratio_threshold;
  const auto incs = cloud.inclusions();

  for (std::size_t j = 0; j < incs.size(); ++j) {
    for (std::size_t k = j + 1; k < incs.size(); ++k) {
      const double dist = (incs[j].center - incs[k].center).norm();
      if (!(dist > incs[j].radius + incs[k].radius)) {
        std::ostringstream os;
        os << "inclusions " << j << " and " << k << " overlap (distance "
           << dist << ", radii " << incs[j].radius << " + " << incs[k].radius
           << ")";
        report.violations.push_back({ViolationKind::overlap, j, k, os.str()});
      }
    }
  }

  if (domain.bounded()) {
    for (std::size_t j = 0; j < incs.size(); ++j) {
      if (!(incs[j].center.norm() + incs[j].radius < domain.radius())) {
        std::ostringstream os;
        os << "inclusion " << j << " is not strictly inside the ball of radius "
           << domain.radius();
        report.violations.push_back({ViolationKind::out_of_domain, j, j, os.str()});
      }
    }
  }

  const auto& m = cloud.metrics();
  report.eps_over_d = std::isinf(m.d) ? 0.0 : m.epsilon / m.d;
  if (report.eps_over_d > ratio_threshold) {
    std::ostringstream os;
    os << "eps/d = " << report.eps_over_d << " exceeds threshold "
       << ratio_threshold;
    report.violations.push_back({ViolationKind::ratio, 0, 0, os.str()});
  }
  return report;
}

std::optional<int> exact_cube_root(long long n) {
  if (n <= 0) return std::nullopt;
  long long r = static_cast<long long>(std::llround(std::cbrt(static_cast<double>(n))));
  for (long long c = std::max(1LL, r - 1); c <= r + 1; ++c) {
    if (c * c * c == n) return static_cast<int>(c);
  }
  return std::nullopt;
}

std::vector<Vec3> interior_cell_centers(int n) {
  if (n < 1) throw Error(ErrorCode::invalid_argument, "need at least one cell per side");
  // Corner coordinates are m / (2n) with integer m; the farthest corner of
  // cell i along an axis has |m| = max(|2i - n - 2|, |2i - n|), and the cell
  // lies strictly inside the ball iff the sum of squares is < n^2.
  std::vector<long long> reach(static_cast<std::size_t>(n));
  for (int i = 1; i <= n; ++i) {
    const long long a = std::llabs(2LL * i - n - 2);
    const long long b = std::llabs(2LL * i - n);
    reach[static_cast<std::size_t>(i - 1)] = std::max(a, b) * std::max(a, b);
  }
  const long long limit = static_cast<long long>(n) * n;
  auto coord = [n](int i) { return static_cast<double>(2 * i - 1 - n) / (2.0 * n); };

  std::vector<Vec3> centers;
  for (int i = 1; i <= n; ++i) {
    for (int j = 1; j <= n; ++j) {
      for (int k = 1; k <= n; ++k) {
        const long long s = reach[static_cast<std::size_t>(i - 1)] +
                            reach[static_cast<std::size_t>(j - 1)] +
                            reach[static_cast<std::size_t>(k - 1)];
        if (s < limit) centers.emplace_back(coord(i), coord(j), coord(k));
      }
    }
  }
  return centers;
}

PeriodicCluster generate_periodic_spherical_cluster(int n1, double beta,
                                                    const Material& material,
                                                    const DomainSpec& domain) {
  const auto side = exact_cube_root(n1);
  if (!side) {
    throw Error(ErrorCode::invalid_argument,
                "N1 = " + std::to_string(n1) + " is not a perfect cube");
  }
  // First pass: count the retained cells.
  const auto centers = interior_cell_centers(*side);
  const double count = static_cast<double>(centers.size());
  const double beta_max = 4.0 * std::numbers::pi * count / (3.0 * n1);
  if (centers.empty() || !(beta > 0.0) || !(beta < beta_max)) {
    std::ostringstream os;
    os << "beta = " << beta << " outside (0, " << beta_max << ") for N1 = " << n1
       << " (N = " << centers.size() << ")";
    throw Error(ErrorCode::invalid_argument, os.str());
  }

  // Second pass: size the radii.
  const double spacing = 1.0 / *side;
  const double b = std::cbrt(3.0 * n1 * beta / (4.0 * std::numbers::pi * count));
  const double radius = b * spacing;

  std::vector<Inclusion> incs;
  incs.reserve(centers.size());
  for (const auto& c : centers) incs.push_back({c, radius, material});

  return PeriodicCluster{
      Cloud(std::move(incs), domain, SeparationConvention::lattice_spacing), n1,
      beta, b, spacing};
}

}  // namespace meso
