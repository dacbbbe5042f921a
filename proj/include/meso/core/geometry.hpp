#pragma once

// Inclusion clouds: materials, domains, smallness metrics, admissibility
// checks and the periodic spherical-cluster generator.

#include <Eigen/Core>

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace meso {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// mu = E / (2(1 + nu)). Requires E > 0 and -1 < nu < 0.5.
double shear_modulus(double youngs_gpa, double poisson);

/// Isotropic material in GPa. A shear modulus of zero denotes a void.
class Material {
 public:
  static Material from_elastic(std::string name, double youngs_gpa,
                               double poisson);
  static Material from_shear(std::string name, double shear_gpa);
  static Material void_material();

  const std::string& name() const noexcept { return name_; }
  double shear() const noexcept { return shear_; }
  std::optional<double> youngs() const noexcept { return youngs_; }
  std::optional<double> poisson() const noexcept { return poisson_; }
  bool is_void() const noexcept { return shear_ == 0.0; }

 private:
  Material(std::string name, double shear, std::optional<double> youngs,
           std::optional<double> poisson)
      : name_(std::move(name)), shear_(shear), youngs_(youngs),
        poisson_(poisson) {}

  std::string name_;
  double shear_;
  std::optional<double> youngs_;
  std::optional<double> poisson_;
};

/// Materials of the reference data set (E in GPa, Poisson ratio).
std::vector<Material> builtin_materials();
std::optional<Material> find_builtin_material(const std::string& name);

struct Inclusion {
  Vec3 center;
  double radius;
  Material material;
};

struct BoundedBall {
  double radius;
};
struct FullSpace {};

/// The ambient body: a ball centred at the origin or the whole space.
class DomainSpec {
 public:
  static DomainSpec ball(double radius, Material matrix);
  static DomainSpec full_space(Material matrix);

  bool bounded() const noexcept {
    return std::holds_alternative<BoundedBall>(shape_);
  }
  /// Ball radius; +inf for the full space.
  double radius() const noexcept;
  const Material& matrix() const noexcept { return matrix_; }
  double matrix_shear() const noexcept { return matrix_.shear(); }
  /// Strict interior test (always true for the full space).
  bool contains(const Vec3& x) const noexcept;

 private:
  DomainSpec(std::variant<BoundedBall, FullSpace> shape, Material matrix)
      : shape_(shape), matrix_(std::move(matrix)) {}

  std::variant<BoundedBall, FullSpace> shape_;
  Material matrix_;
};

/// How the separation parameter d is defined.
enum class SeparationConvention {
  scaled_minimum,   ///< R^-1 * min |O_j - O_k| (bounded-ball data sets)
  half_minimum,     ///< 1/2 * min |O_j - O_k|
  lattice_spacing,  ///< min |O_j - O_k| (periodic generator, d = N1^-1/3)
};

const char* to_string(SeparationConvention c) noexcept;
std::optional<SeparationConvention> separation_convention_from_string(
    const std::string& s);
SeparationConvention default_convention(const DomainSpec& domain) noexcept;

struct ClusterMetrics {
  double epsilon = 0.0;
  double d = std::numeric_limits<double>::infinity();  ///< +inf when N = 1
  std::size_t count = 0;
  SeparationConvention convention = SeparationConvention::half_minimum;
};

/// epsilon is max radius (divided by R under scaled_minimum); d follows the
/// convention. Throws on an empty list.
ClusterMetrics cluster_metrics(std::span<const Inclusion> inclusions,
                               const DomainSpec& domain,
                               SeparationConvention convention);
ClusterMetrics cluster_metrics(std::span<const Inclusion> inclusions,
                               const DomainSpec& domain);

/// Immutable inclusion list with its metrics.
class Cloud {
 public:
  Cloud(std::vector<Inclusion> inclusions, const DomainSpec& domain,
        SeparationConvention convention);
  Cloud(std::vector<Inclusion> inclusions, const DomainSpec& domain);

  std::span<const Inclusion> inclusions() const noexcept { return inclusions_; }
  const Inclusion& operator[](std::size_t i) const { return inclusions_[i]; }
  std::size_t size() const noexcept { return inclusions_.size(); }
  const ClusterMetrics& metrics() const noexcept { return metrics_; }
  double epsilon() const noexcept { return metrics_.epsilon; }
  double d() const noexcept { return metrics_.d; }

  /// Index of the inclusion with |x - O| < a, or -1 (matrix). Points on an
  /// interface count as matrix.
  int region_of(const Vec3& x) const noexcept;

 private:
  std::vector<Inclusion> inclusions_;
  ClusterMetrics metrics_;
};

enum class ViolationKind { overlap, out_of_domain, ratio };

struct Violation {
  ViolationKind kind;
  std::size_t first = 0;   ///< inclusion index (overlap: lower index)
  std::size_t second = 0;  ///< overlap partner; unused otherwise
  std::string message;
};

struct ValidationReport {
  double eps_over_d = 0.0;
  double ratio_threshold = 0.5;
  std::vector<Violation> violations;

  bool admissible() const noexcept { return violations.empty(); }
  /// True when only the eps/d ratio is breached (a warning, not an error).
  bool geometry_ok() const noexcept;
};

inline constexpr double kDefaultRatioThreshold = 0.5;

/// Overlaps (|O_j - O_k| <= a_j + a_k), inclusions not strictly inside the
/// domain, and eps/d above the threshold. Findings are data, never thrown.
ValidationReport validate_cloud(const Cloud& cloud, const DomainSpec& domain,
                                double ratio_threshold = kDefaultRatioThreshold);

/// Cell centres of the n^3 grid on the unit cube whose cells lie strictly
/// inside the ball of radius 1/2 centred at the origin. Exact integer test.
std::vector<Vec3> interior_cell_centers(int cells_per_side);

struct PeriodicCluster {
  Cloud cloud;
  int n1 = 0;        ///< total number of grid cells
  double beta = 0;   ///< volume-fraction parameter
  double b = 0;      ///< eps / d
  double spacing = 0;
};

/// Periodic cluster of identical spheres inside the ball of radius 1/2:
/// d = n1^(-1/3), eps = b d with b = (3 n1 beta / (4 pi N))^(1/3).
/// n1 must be a perfect cube and 0 < beta < 4 pi N / (3 n1).
PeriodicCluster generate_periodic_spherical_cluster(int n1, double beta,
                                                    const Material& material,
                                                    const DomainSpec& domain);

/// Returns the cube root of n when n is a perfect cube.
std::optional<int> exact_cube_root(long long n);

}  // namespace meso
