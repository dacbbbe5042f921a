#include "meso/core/kernels.hpp"

#include <cmath>
#include <numbers>

#include "meso/core/error.hpp"

namespace meso {
namespace {

constexpr double kFourPi = 4.0 * std::numbers::pi;

// s(x, y) = |x|^2 |y|^2 - 2 R^2 x.y + R^4 = |y|^2 |x - ybar|^2, ybar = R^2 y / |y|^2.
inline double image_s(const Vec3& x, const Vec3& y, double R2) {
  return x.squaredNorm() * y.squaredNorm() - 2.0 * R2 * x.dot(y) + R2 * R2;
}

void require_pair(const Vec3& x, const Vec3& y, double R) {
  if (!x.allFinite() || !y.allFinite()) {
    throw Error(ErrorCode::invalid_argument, "non-finite point");
  }
  if (x == y) throw Error(ErrorCode::invalid_argument, "coincident points");
  if (!(y.norm() < R)) {
    throw Error(ErrorCode::invalid_argument, "source point outside the ball");
  }
  if (x.norm() > R * (1.0 + 1e-12)) {
    throw Error(ErrorCode::invalid_argument, "field point outside the ball");
  }
}

}  // namespace

void check_compatible(const BackgroundField& bg, const DomainSpec& domain) {
  if (const auto* src = std::get_if<RadialSource>(&bg)) {
    if (!domain.bounded()) {
      throw Error(ErrorCode::incompatible,
                  "radial source background needs a bounded ball");
    }
    if (!(src->r_f > 0.0 && src->r_f < domain.radius())) {
      throw Error(ErrorCode::incompatible, "source radius must satisfy 0 < r_f < R");
    }
  } else if (domain.bounded()) {
    throw Error(ErrorCode::incompatible,
                "linear_x background needs the full-space domain");
  }
}

ValueGrad w_f_eval(const Vec3& x, const BackgroundField& bg,
                   const DomainSpec& domain) {
  check_compatible(bg, domain);
  const double mu = domain.matrix_shear();
  ValueGrad out;
  if (std::holds_alternative<LinearX>(bg)) {
    out.value = x.x() / mu;
    out.grad = Vec3(1.0 / mu, 0.0, 0.0);
    return out;
  }

  const double rf = std::get<RadialSource>(bg).r_f;
  const double R = domain.radius();
  const double r = x.norm();
  double dr = 0.0;  // dw/dr
  if (r < rf) {
    out.value = (-0.5 * r * r * r + rf * r * r - rf * rf * rf * (2.0 * R - rf) / (2.0 * R)) /
                (6.0 * mu);
    dr = (-1.5 * r * r + 2.0 * rf * r) / (6.0 * mu);
  } else {
    const double rf4 = rf * rf * rf * rf;
    out.value = rf4 / (12.0 * mu) * (1.0 / R - 1.0 / r);
    dr = rf4 / (12.0 * mu * r * r);
  }
  if (r > 0.0) out.grad = (dr / r) * x;
  return out;
}

double regular_part_H(const Vec3& x, const Vec3& y, double R, double mu_O) {
  return R / (kFourPi * mu_O * std::sqrt(image_s(x, y, R * R)));
}

Vec3 regular_part_grad_y(const Vec3& x, const Vec3& y, double R, double mu_O) {
  const double R2 = R * R;
  const double s = image_s(x, y, R2);
  const double coef = -R / (kFourPi * mu_O * s * std::sqrt(s));
  return coef * (x.squaredNorm() * y - R2 * x);
}

Mat3 regular_part_mixed_hessian(const Vec3& x, const Vec3& y, double R,
                                double mu_O) {
  const double R2 = R * R;
  const double s = image_s(x, y, R2);
  const double s_m32 = 1.0 / (s * std::sqrt(s));
  const double s_m52 = s_m32 / s;
  // ds/dx_a / 2 and ds/dy_b / 2
  const Vec3 hx = y.squaredNorm() * x - R2 * y;
  const Vec3 hy = x.squaredNorm() * y - R2 * x;
  Mat3 m = 3.0 * s_m52 * (hx * hy.transpose());
  m -= s_m32 * (2.0 * x * y.transpose() - R2 * Mat3::Identity());
  return (R / (kFourPi * mu_O)) * m;
}

GreenEval greens_ball(const Vec3& x, const Vec3& y, double R, double mu_O) {
  require_pair(x, y, R);
  GreenEval out;
  out.H = regular_part_H(x, y, R, mu_O);
  out.G = 1.0 / (kFourPi * mu_O * (x - y).norm()) - out.H;
  return out;
}

Vec3 grad_y_H(const Vec3& x, const Vec3& y, const DomainSpec& domain) {
  if (!domain.bounded()) return Vec3::Zero();
  require_pair(x, y, domain.radius());
  return regular_part_grad_y(x, y, domain.radius(), domain.matrix_shear());
}

Mat3 free_space_mixed_hessian(const Vec3& z, const Vec3& w, double mu_O) {
  const Vec3 r = z - w;
  const double r2 = r.squaredNorm();
  const double inv_r = 1.0 / std::sqrt(r2);
  const double inv_r3 = inv_r * inv_r * inv_r;
  Mat3 m = inv_r3 * Mat3::Identity() - (3.0 * inv_r3 / r2) * (r * r.transpose());
  return m / (kFourPi * mu_O);
}

Mat3 hessian_G(const Vec3& z, const Vec3& w, const DomainSpec& domain) {
  if (!z.allFinite() || !w.allFinite()) {
    throw Error(ErrorCode::invalid_argument, "non-finite point");
  }
  if (z == w) throw Error(ErrorCode::invalid_argument, "coincident points");
  if (domain.bounded()) require_pair(z, w, domain.radius());
  return mixed_hessian_G_unchecked(z, w, domain);
}

double contrast_ratio(double mu_O, double mu_I) {
  return (mu_I - mu_O) / (mu_I + 2.0 * mu_O);
}

DipoleEval dipole_field_sphere(const Vec3& x, const Inclusion& inclusion,
                               double mu_O, Branch branch) {
  const double kappa = contrast_ratio(mu_O, inclusion.material.shear());
  const Vec3 xi = x - inclusion.center;
  const double a = inclusion.radius;
  const double r2 = xi.squaredNorm();
  if (branch == Branch::automatic) {
    branch = r2 < a * a ? Branch::interior : Branch::exterior;
  }

  DipoleEval out;
  if (branch == Branch::interior) {
    out.value = kappa * xi;
    out.jacobian = kappa * Mat3::Identity();
    return out;
  }
  const double inv_r = 1.0 / std::sqrt(r2);
  const double inv_r3 = inv_r * inv_r * inv_r;
  const double k = kappa * a * a * a;
  out.value = (k * inv_r3) * xi;
  out.jacobian = k * inv_r3 * (Mat3::Identity() - (3.0 / r2) * (xi * xi.transpose()));
  return out;
}

const char* to_string(Definiteness d) noexcept {
  switch (d) {
    case Definiteness::negative: return "negative";
    case Definiteness::zero: return "zero";
    case Definiteness::positive: return "positive";
  }
  return "unknown";
}

PolarizationTensor polarization_sphere(double radius, double mu_O, double mu_I) {
  if (!(radius > 0.0) || !(mu_O > 0.0) || !(mu_I >= 0.0)) {
    throw Error(ErrorCode::invalid_argument,
                "polarization needs a > 0, mu_O > 0, mu_I >= 0");
  }
  PolarizationTensor p;
  const double scale =
      kFourPi * radius * radius * radius * mu_O * contrast_ratio(mu_O, mu_I);
  p.matrix = scale * Mat3::Identity();
  p.definiteness = mu_I < mu_O   ? Definiteness::negative
                   : mu_I > mu_O ? Definiteness::positive
                                 : Definiteness::zero;
  return p;
}

}  // namespace meso
