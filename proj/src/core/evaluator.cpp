#include "meso/core/evaluator.hpp"

#include <cmath>
#include <limits>
#include <ostream>

#include "meso/core/error.hpp"
#include "meso/core/format.hpp"
#include "meso/core/parallel.hpp"

namespace meso {

Approximation::Approximation(const Cloud& cloud, const CoefficientSet& coeffs,
                             const DomainSpec& domain,
                             const BackgroundField& background)
    : cloud_(cloud), coeffs_(coeffs), domain_(domain), background_(background) {
  check_compatible(background, domain);
  if (coeffs.size() != cloud.size()) {
    throw Error(ErrorCode::incompatible,
                "coefficient count " + std::to_string(coeffs.size()) +
                    " does not match cluster size " + std::to_string(cloud.size()));
  }
  const double mu_O = domain.matrix_shear();
  pc_.reserve(cloud.size());
  for (std::size_t k = 0; k < cloud.size(); ++k) {
    const auto p = polarization_sphere(cloud[k].radius, mu_O, cloud[k].material.shear());
    pc_.push_back(p.matrix * coeffs.vectors[k]);
  }
}

void Approximation::require_inside(const Vec3& x) const {
  if (!x.allFinite()) throw Error(ErrorCode::invalid_argument, "non-finite point");
  if (domain_.bounded() && x.norm() > domain_.radius() * (1.0 + 1e-12)) {
    throw Error(ErrorCode::invalid_argument, "point outside the domain");
  }
}

ValueGrad Approximation::eval(const Vec3& x, int forced, Branch forced_branch) const {
  require_inside(x);
  ValueGrad out = w_f_eval(x, background_, domain_);
  const double mu_O = domain_.matrix_shear();
  const bool bounded = domain_.bounded();
  const double R = domain_.radius();
  for (std::size_t k = 0; k < cloud_.size(); ++k) {
    const Vec3& c = coeffs_.vectors[k];
    const Branch branch =
        static_cast<int>(k) == forced ? forced_branch : Branch::automatic;
    const auto dip = dipole_field_sphere(x, cloud_[k], mu_O, branch);
    out.value += c.dot(dip.value);
    out.grad += dip.jacobian.transpose() * c;
    if (bounded) {
      const Vec3& o = cloud_[k].center;
      out.value -= pc_[k].dot(regular_part_grad_y(x, o, R, mu_O));
      out.grad -= regular_part_mixed_hessian(x, o, R, mu_O) * pc_[k];
    }
  }
  return out;
}

double Approximation::u(const Vec3& x) const { return eval(x).value; }

Vec3 Approximation::grad(const Vec3& x) const { return eval(x).grad; }

double Approximation::correction(const Vec3& x) const {
  return eval(x).value - w_f_eval(x, background_, domain_).value;
}

FieldSample Approximation::sample(const Vec3& x) const {
  FieldSample s;
  s.position = x;
  if (domain_.bounded() && !(x.norm() <= domain_.radius())) {
    s.in_domain = false;
    s.u = s.grad_norm = std::numeric_limits<double>::quiet_NaN();
    s.grad = Vec3::Constant(std::numeric_limits<double>::quiet_NaN());
    return s;
  }
  const auto vg = eval(x);
  s.u = vg.value;
  s.grad = vg.grad;
  s.grad_norm = vg.grad.norm();
  s.region = cloud_.region_of(x);
  return s;
}

double eval_u(const Vec3& x, const Cloud& cloud, const CoefficientSet& coeffs,
              const DomainSpec& domain, const BackgroundField& background) {
  return Approximation(cloud, coeffs, domain, background).u(x);
}

Vec3 eval_grad_u(const Vec3& x, const Cloud& cloud, const CoefficientSet& coeffs,
                 const DomainSpec& domain, const BackgroundField& background) {
  return Approximation(cloud, coeffs, domain, background).grad(x);
}

namespace {

std::vector<FieldSample> sample_points(const std::vector<Vec3>& points,
                                       const Approximation& approx) {
  std::vector<FieldSample> out(points.size());
  parallel_for(points.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) out[i] = approx.sample(points[i]);
  });
  return out;
}

double lerp_grid(double lo, double hi, int i, int n) {
  if (i == n - 1) return hi;
  return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
}

}  // namespace

std::vector<FieldSample> sample_plane(const PlaneSpec& plane,
                                      const Approximation& approx) {
  if (plane.axis < 0 || plane.axis > 2) {
    throw Error(ErrorCode::invalid_argument, "plane axis must be 0, 1 or 2");
  }
  if (plane.nu < 2 || plane.nv < 2) {
    throw Error(ErrorCode::invalid_argument, "plane resolution must be >= 2 per side");
  }
  for (double v : {plane.offset, plane.u_min, plane.u_max, plane.v_min, plane.v_max}) {
    if (!std::isfinite(v)) throw Error(ErrorCode::invalid_argument, "plane bounds must be finite");
  }
  const auto& domain = approx.domain();
  if (domain.bounded() && !(std::abs(plane.offset) < domain.radius())) {
    throw Error(ErrorCode::invalid_argument, "plane does not intersect the domain");
  }

  const int ua = plane.axis == 0 ? 1 : 0;
  const int va = plane.axis == 2 ? 1 : 2;
  std::vector<Vec3> points;
  points.reserve(static_cast<std::size_t>(plane.nu) * static_cast<std::size_t>(plane.nv));
  for (int j = 0; j < plane.nv; ++j) {
    for (int i = 0; i < plane.nu; ++i) {
      Vec3 p;
      p[plane.axis] = plane.offset;
      p[ua] = lerp_grid(plane.u_min, plane.u_max, i, plane.nu);
      p[va] = lerp_grid(plane.v_min, plane.v_max, j, plane.nv);
      points.push_back(p);
    }
  }
  return sample_points(points, approx);
}

std::vector<FieldSample> sample_line(const Vec3& from, const Vec3& to,
                                     int samples, const Approximation& approx) {
  if (samples < 2) throw Error(ErrorCode::invalid_argument, "line needs >= 2 samples");
  if (!from.allFinite() || !to.allFinite()) {
    throw Error(ErrorCode::invalid_argument, "line end points must be finite");
  }
  std::vector<Vec3> points;
  points.reserve(static_cast<std::size_t>(samples));
  for (int i = 0; i < samples; ++i) {
    if (i == samples - 1) {
      points.push_back(to);
    } else {
      const double t = static_cast<double>(i) / static_cast<double>(samples - 1);
      points.push_back(from + t * (to - from));
    }
  }
  return sample_points(points, approx);
}

void write_samples_csv(std::ostream& os, const std::vector<FieldSample>& samples) {
  os << "x,y,z,u,gx,gy,gz,gnorm,region\n";
  for (const auto& s : samples) {
    os << format_double(s.position.x()) << ',' << format_double(s.position.y()) << ','
       << format_double(s.position.z()) << ',';
    if (!s.in_domain) {
      os << "nan,nan,nan,nan,nan,nan\n";
      continue;
    }
    os << format_double(s.u) << ',' << format_double(s.grad.x()) << ','
       << format_double(s.grad.y()) << ',' << format_double(s.grad.z()) << ','
       << format_double(s.grad_norm) << ',' << s.region << '\n';
  }
}

}  // namespace meso
