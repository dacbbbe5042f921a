#pragma once

// The meso-scale approximation
//   u(x) = w_f(x) + sum_k C_k . { D_k(x) - P_k grad_y H(x, O_k) }
// and its analytic gradient, plus plane and line sampling.

#include <iosfwd>
#include <vector>

#include "meso/core/system.hpp"

namespace meso {

struct FieldSample {
  Vec3 position = Vec3::Zero();
  double u = 0.0;
  Vec3 grad = Vec3::Zero();
  double grad_norm = 0.0;
  int region = -1;         ///< -1 matrix, otherwise inclusion index
  bool in_domain = true;   ///< false for grid points outside a bounded ball
};

/// Bound view over a solved configuration. Holds references; the inputs must
/// outlive it.
class Approximation {
 public:
  Approximation(const Cloud& cloud, const CoefficientSet& coeffs,
                const DomainSpec& domain, const BackgroundField& background);

  double u(const Vec3& x) const;
  Vec3 grad(const Vec3& x) const;
  /// u and grad together; the branch of inclusion `forced` can be pinned to
  /// evaluate one-sided traces on its interface.
  ValueGrad eval(const Vec3& x, int forced = -1,
                 Branch forced_branch = Branch::automatic) const;
  /// u - w_f.
  double correction(const Vec3& x) const;

  FieldSample sample(const Vec3& x) const;

  const Cloud& cloud() const noexcept { return cloud_; }
  const DomainSpec& domain() const noexcept { return domain_; }
  const BackgroundField& background() const noexcept { return background_; }
  const CoefficientSet& coefficients() const noexcept { return coeffs_; }

 private:
  void require_inside(const Vec3& x) const;

  const Cloud& cloud_;
  const CoefficientSet& coeffs_;
  const DomainSpec& domain_;
  const BackgroundField& background_;
  std::vector<Vec3> pc_;  ///< P_k C_k
};

double eval_u(const Vec3& x, const Cloud& cloud, const CoefficientSet& coeffs,
              const DomainSpec& domain, const BackgroundField& background);
Vec3 eval_grad_u(const Vec3& x, const Cloud& cloud, const CoefficientSet& coeffs,
                 const DomainSpec& domain, const BackgroundField& background);

/// Axis-aligned cut plane. `axis` is the normal (0, 1, 2); the in-plane axes
/// are the remaining two in increasing order (u-axis, v-axis).
struct PlaneSpec {
  int axis = 2;
  double offset = 0.0;
  double u_min = 0.0, u_max = 1.0;
  double v_min = 0.0, v_max = 1.0;
  int nu = 2;  ///< samples along the u-axis
  int nv = 2;  ///< samples along the v-axis
};

/// Row-major grid: v outer, u inner. Points outside a bounded domain are
/// returned with in_domain = false.
std::vector<FieldSample> sample_plane(const PlaneSpec& plane,
                                      const Approximation& approx);

std::vector<FieldSample> sample_line(const Vec3& from, const Vec3& to,
                                     int samples, const Approximation& approx);

/// Header x,y,z,u,gx,gy,gz,gnorm,region; out-of-domain rows carry nan.
void write_samples_csv(std::ostream& os, const std::vector<FieldSample>& samples);

}  // namespace meso
