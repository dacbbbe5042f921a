#pragma once

// Computable diagnostics of the approximation: interface continuity and
// flux-jump traces, the boundary trace on the outer sphere, discrete
// Laplacian defects and the inner-product ratio behind solvability.

#include <cstdint>
#include <functional>
#include <vector>

#include "meso/core/evaluator.hpp"

namespace meso {

/// Quasi-uniform unit vectors on the sphere (Fibonacci spiral).
std::vector<Vec3> fibonacci_sphere(std::size_t count);

inline constexpr std::size_t kDefaultInterfaceSamples = 200;

struct ResidualReport {
  std::vector<double> continuity_sup;  ///< per inclusion, |u+ - u-|
  std::vector<double> flux_jump_sup;   ///< per inclusion, |mu_O du/dn+ - mu_I du/dn-|
  double value_scale = 0.0;            ///< max |u| over interface samples
  double flux_scale = 0.0;             ///< max mu |du/dn| over both sides
  std::size_t samples_per_inclusion = 0;

  double max_continuity() const noexcept;
  double max_flux_jump() const noexcept;
  double relative_continuity() const noexcept;
  double relative_flux_jump() const noexcept;
};

/// One-sided traces use the analytic gradient of each branch of the
/// inclusion's own dipole field; nothing is differenced across interfaces.
ResidualReport interface_residuals(const Approximation& approx,
                                   std::size_t samples_per_inclusion = kDefaultInterfaceSamples);

struct BoundaryResidual {
  double sup = 0.0;       ///< sup |u - w_f| over the outer sphere
  double envelope = 0.0;  ///< sup over samples of sum_k a_k^4 |C_k| / |x - O_k|^3
  std::size_t samples = 0;
};

/// Bounded domains only.
BoundaryResidual boundary_residual(const Approximation& approx, std::size_t samples = 2000);

/// Max over points of |7-point Laplacian| / (sum_a |second difference_a| +
/// |central gradient| / step). Zero for exactly harmonic fields.
double harmonicity_check(const std::vector<Vec3>& points,
                         const std::function<double(const Vec3&)>& field, double step);

/// Random matrix points near the cloud that keep `margin` away from every
/// interface, from the boundary, and from the support of the source.
std::vector<Vec3> sample_matrix_points(const Cloud& cloud, const DomainSpec& domain,
                                       const BackgroundField& background,
                                       std::size_t count, double margin,
                                       std::uint64_t seed = 1);

struct AppendixRatio {
  double numerator = 0.0;    ///< <T P C, Q C>
  double denominator = 0.0;  ///< d^-3 <Q C, Q C>
  double ratio = 0.0;
};

/// Evaluates both sides of the inner-product estimate with Q_j = |P_j|
/// using the free-space kernel. Needs the full space and N >= 2.
AppendixRatio appendix_identity_check(const Cloud& cloud, const CoefficientSet& coeffs,
                                      const DomainSpec& domain);

}  // namespace meso
