#pragma once

// Closed-form model fields: the unperturbed solution w_f, the Dirichlet
// Green's function of a ball (free-space part minus its regular part H), the
// dipole fields of a spherical inclusion and its polarization tensor.
//
// Conventions: Gamma(x, y) = 1 / (4 pi mu_O |x - y|), G = Gamma - H.
// "Mixed Hessian" M(z, w) means M_ab = d^2 / (dz_a dw_b).

#include <variant>

#include "meso/core/geometry.hpp"

namespace meso {

/// Point source supported in |x| < r_f, used with a bounded ball. The closed
/// form of w_f solves mu_O Lap w = (r_f - |x|) for |x| < r_f, zero outside,
/// with w = 0 on the boundary.
struct RadialSource {
  double r_f;
};
/// Uniform far field: w_f = x_1 / mu_O in the whole space.
struct LinearX {};

using BackgroundField = std::variant<RadialSource, LinearX>;

/// Throws ErrorCode::incompatible unless RadialSource pairs with a ball
/// (0 < r_f < R) or LinearX with the full space.
void check_compatible(const BackgroundField& bg, const DomainSpec& domain);

struct ValueGrad {
  double value = 0.0;
  Vec3 grad = Vec3::Zero();
};

ValueGrad w_f_eval(const Vec3& x, const BackgroundField& bg,
                   const DomainSpec& domain);

struct GreenEval {
  double G = 0.0;
  double H = 0.0;
};

/// Dirichlet Green's function of the ball |x| < R. x may lie on the sphere.
GreenEval greens_ball(const Vec3& x, const Vec3& y, double R, double mu_O);

/// Regular part H of the ball without input checks. Smooth in both points,
/// including y = 0 where it equals 1 / (4 pi mu_O R).
double regular_part_H(const Vec3& x, const Vec3& y, double R, double mu_O);
/// grad_y H(x, y).
Vec3 regular_part_grad_y(const Vec3& x, const Vec3& y, double R, double mu_O);
/// d^2 H / (dx_a dy_b).
Mat3 regular_part_mixed_hessian(const Vec3& x, const Vec3& y, double R,
                                double mu_O);

/// grad_y H(x, y) for the domain (zero in the full space). Checks inputs.
Vec3 grad_y_H(const Vec3& x, const Vec3& y, const DomainSpec& domain);

/// Mixed Hessian of Gamma: (I / r^3 - 3 r r^T / r^5) / (4 pi mu_O), r = z - w.
Mat3 free_space_mixed_hessian(const Vec3& z, const Vec3& w, double mu_O);

/// Mixed Hessian of G for the domain. Throws on coincident points.
Mat3 hessian_G(const Vec3& z, const Vec3& w, const DomainSpec& domain);

/// Unchecked mixed Hessian of G, used in the O(N^2) loops.
inline Mat3 mixed_hessian_G_unchecked(const Vec3& z, const Vec3& w,
                                      const DomainSpec& domain) {
  Mat3 m = free_space_mixed_hessian(z, w, domain.matrix_shear());
  if (domain.bounded()) {
    m -= regular_part_mixed_hessian(z, w, domain.radius(), domain.matrix_shear());
  }
  return m;
}

enum class Branch { automatic, exterior, interior };

struct DipoleEval {
  Vec3 value = Vec3::Zero();
  Mat3 jacobian = Mat3::Zero();  ///< jacobian(i, j) = dD_i / dx_j
};

/// (mu_I - mu_O) / (mu_I + 2 mu_O).
double contrast_ratio(double mu_O, double mu_I);

/// Vector of dipole fields of a spherical inclusion. The automatic branch
/// uses the interior formula for |x - O| < a and the exterior one otherwise.
DipoleEval dipole_field_sphere(const Vec3& x, const Inclusion& inclusion,
                               double mu_O, Branch branch = Branch::automatic);

enum class Definiteness { negative, zero, positive };

const char* to_string(Definiteness d) noexcept;

struct PolarizationTensor {
  Mat3 matrix = Mat3::Zero();
  Definiteness definiteness = Definiteness::zero;
};

/// 4 pi a^3 mu_O (mu_I - mu_O) / (mu_I + 2 mu_O) I.
PolarizationTensor polarization_sphere(double radius, double mu_O, double mu_I);

}  // namespace meso
