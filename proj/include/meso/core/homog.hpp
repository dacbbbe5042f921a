#pragma once

// Effective-medium limit for periodic clusters of identical spheres and the
// explicit homogenised solution for a spherical cloud in a uniform field.

#include <iosfwd>
#include <string>
#include <vector>

#include "meso/core/evaluator.hpp"

namespace meso {

struct EffectiveMedium {
  Mat3 Q = Mat3::Zero();                    ///< limit of d^-3 P
  Mat3 effective_stiffness = Mat3::Zero();  ///< mu_O I - Q
  double effective_shear = 0.0;             ///< scalar of the stiffness
  double b = 0.0;                           ///< eps / d
  double regime_indicator = 0.0;            ///< 4 pi b^3 |ratio|

  /// Entries of Q are only "small" below this indicator.
  static constexpr double kRegimeWarning = 0.3;
  bool regime_warning() const noexcept { return regime_indicator > kRegimeWarning; }
};

/// Q = 4 pi b^3 mu_O ratio I and mu_hat = mu_O (1 - 4 pi b^3 ratio).
EffectiveMedium effective_medium(double b, double mu_O, double mu_I);

/// b in the N1 -> infinity limit, where N1 / N -> 6 / pi.
double limit_b(double beta);

/// u_hat = x_1 / mu_O - D_omega(x) for the ball of radius r at the origin;
/// inside it reduces to 3 x_1 / (mu_hat + 2 mu_O). |x| = r takes the
/// exterior branch.
ValueGrad u_hat_sphere(const Vec3& x, double r, double mu_O, double mu_hat);

/// C_j = -grad u_hat(O_j), method "homog".
CoefficientSet coeffs_from_homog(const Cloud& cloud, const EffectiveMedium& medium,
                                 double r, double mu_O);

inline constexpr double kInteriorRadius = 0.35;

struct HomogCompareOptions {
  int n1 = 1000;
  double beta = 0.09;
  std::string material = "Aluminum";
  std::string matrix = "Structural Steel";
  int samples = 1000;
  double x_min = -1.5;
  double x_max = 1.5;
  std::string method = "neumann";  ///< "neumann" or "direct"
  double tol = 1e-12;
  int max_iter = 500;
};

struct HomogComparison {
  std::size_t count = 0;
  double b = 0.0;
  EffectiveMedium medium;
  CoefficientSet system_coeffs;
  std::vector<double> x1;
  std::vector<double> u_minus_wf_system;
  std::vector<double> u_minus_wf_homog;          ///< u_hat - w_f
  std::vector<double> u_minus_wf_homog_coeffs;   ///< system formula, C from u_hat
  double sup_gap = 0.0;            ///< sup |system - homog|
  double sup_gap_homog_coeffs = 0.0;  ///< sup |system - homog_coeffs|
  double coefficient_gap = 0.0;    ///< max_{|O| <= 0.35} |C + grad u_hat(O)|
  double stability = 0.0;          ///< sum |C|^2 / sum |grad w_f(O)|^2
};

/// Generates the periodic cluster in the full space under x_1 / mu_O, solves
/// the interaction system and compares along the x_1 axis.
HomogComparison homog_compare(const HomogCompareOptions& options);

/// Summary comment lines (# key=value) followed by the columns
/// x1,u_minus_wf_system,u_minus_wf_homog,u_minus_wf_homog_coeffs.
void write_comparison_csv(std::ostream& os, const HomogComparison& cmp);

}  // namespace meso
