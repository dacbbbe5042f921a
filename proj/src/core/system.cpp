#include "meso/core/system.hpp"

#include <Eigen/LU>

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "meso/core/error.hpp"
#include "meso/core/parallel.hpp"

namespace meso {
namespace {

constexpr double kFourPi = 4.0 * std::numbers::pi;

// T_jk v for the free-space kernel, without forming the block.
inline Vec3 free_space_block_times(const Vec3& z, const Vec3& w, const Vec3& v,
                                   double inv_four_pi_mu) {
  const Vec3 r = z - w;
  const double r2 = r.squaredNorm();
  const double inv_r = 1.0 / std::sqrt(r2);
  const double inv_r3 = inv_r * inv_r * inv_r;
  return inv_four_pi_mu * inv_r3 * (v - (3.0 * r.dot(v) / r2) * r);
}

// (d^2 H / dz dw) v for the ball of radius R.
inline Vec3 regular_block_times(const Vec3& z, const Vec3& w, const Vec3& v,
                                double R2, double coef) {
  const double zz = z.squaredNorm();
  const double ww = w.squaredNorm();
  const double s = zz * ww - 2.0 * R2 * z.dot(w) + R2 * R2;
  const double s_m32 = 1.0 / (s * std::sqrt(s));
  const Vec3 hz = ww * z - R2 * w;
  const Vec3 hw = zz * w - R2 * z;
  return coef * ((3.0 * s_m32 / s * hw.dot(v)) * hz -
                 s_m32 * (2.0 * w.dot(v) * z - R2 * v));
}

}  // namespace

InteractionSystem assemble(const Cloud& cloud, const DomainSpec& domain,
                           const BackgroundField& background) {
  check_compatible(background, domain);
  const auto report = validate_cloud(cloud, domain, std::numeric_limits<double>::infinity());
  if (!report.geometry_ok()) {
    throw Error(ErrorCode::validation, report.violations.front().message);
  }

  InteractionSystem sys(domain);
  const std::size_t n = cloud.size();
  const double mu_O = domain.matrix_shear();
  sys.centers_.reserve(n);
  sys.polarization_.reserve(n);
  sys.active_.reserve(n);
  sys.rhs_.resize(static_cast<Eigen::Index>(3 * n));
  for (std::size_t j = 0; j < n; ++j) {
    const auto& inc = cloud[j];
    sys.centers_.push_back(inc.center);
    const auto p = polarization_sphere(inc.radius, mu_O, inc.material.shear());
    sys.polarization_.push_back(p.matrix);
    sys.active_.push_back(p.definiteness != Definiteness::zero);
    sys.rhs_.segment<3>(static_cast<Eigen::Index>(3 * j)) =
        -w_f_eval(inc.center, background, domain).grad;
  }
  return sys;
}

Mat3 InteractionSystem::block(std::size_t j, std::size_t k) const {
  if (j == k) return Mat3::Zero();
  return mixed_hessian_G_unchecked(centers_[j], centers_[k], domain_);
}

Eigen::VectorXd InteractionSystem::apply_T(const Eigen::VectorXd& v) const {
  const std::size_t n = size();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(v.size());
  const double mu = domain_.matrix_shear();
  const double inv_four_pi_mu = 1.0 / (kFourPi * mu);
  const bool bounded = domain_.bounded();
  const double R = bounded ? domain_.radius() : 0.0;
  const double R2 = R * R;
  const double coef = R / (kFourPi * mu);

  parallel_for(n, [&](std::size_t begin, std::size_t end) {
    for (std::size_t j = begin; j < end; ++j) {
      const Vec3& z = centers_[j];
      Vec3 acc = Vec3::Zero();
      for (std::size_t k = 0; k < n; ++k) {
        if (k == j || !active_[k]) continue;
        const Vec3 vk = v.segment<3>(static_cast<Eigen::Index>(3 * k));
        acc += free_space_block_times(z, centers_[k], vk, inv_four_pi_mu);
        if (bounded) acc -= regular_block_times(z, centers_[k], vk, R2, coef);
      }
      out.segment<3>(static_cast<Eigen::Index>(3 * j)) = acc;
    }
  });
  return out;
}

Eigen::VectorXd InteractionSystem::apply_interaction(const Eigen::VectorXd& c) const {
  Eigen::VectorXd pc(c.size());
  for (std::size_t k = 0; k < size(); ++k) {
    const auto i = static_cast<Eigen::Index>(3 * k);
    pc.segment<3>(i) = polarization_[k] * c.segment<3>(i);
  }
  return apply_T(pc);
}

Eigen::VectorXd InteractionSystem::apply(const Eigen::VectorXd& c) const {
  return c + apply_interaction(c);
}

Eigen::VectorXd InteractionSystem::apply_interaction_transpose(
    const Eigen::VectorXd& c) const {
  // T has inactive columns skipped in apply_T; the transpose needs the full
  // T, and the zero P_k rows kill what would otherwise leak through.
  const std::size_t n = size();
  Eigen::VectorXd tc = Eigen::VectorXd::Zero(c.size());
  parallel_for(n, [&](std::size_t begin, std::size_t end) {
    for (std::size_t j = begin; j < end; ++j) {
      if (!active_[j]) continue;
      Vec3 acc = Vec3::Zero();
      for (std::size_t k = 0; k < n; ++k) {
        if (k == j) continue;
        acc += block(j, k) * c.segment<3>(static_cast<Eigen::Index>(3 * k));
      }
      tc.segment<3>(static_cast<Eigen::Index>(3 * j)) = polarization_[j].transpose() * acc;
    }
  });
  return tc;
}

Eigen::MatrixXd InteractionSystem::dense() const {
  const std::size_t n = size();
  const auto dim = static_cast<Eigen::Index>(3 * n);
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(dim, dim);
  parallel_for(n, [&](std::size_t begin, std::size_t end) {
    for (std::size_t j = begin; j < end; ++j) {
      for (std::size_t k = 0; k < n; ++k) {
        if (k == j || !active_[k]) continue;
        a.block<3, 3>(static_cast<Eigen::Index>(3 * j), static_cast<Eigen::Index>(3 * k)) =
            block(j, k) * polarization_[k];
      }
    }
  });
  return a;
}

double InteractionSystem::residual_norm(const Eigen::VectorXd& c) const {
  return (apply(c) - rhs_).norm();
}

Eigen::VectorXd CoefficientSet::stacked() const {
  Eigen::VectorXd c(static_cast<Eigen::Index>(3 * vectors.size()));
  for (std::size_t j = 0; j < vectors.size(); ++j) {
    c.segment<3>(static_cast<Eigen::Index>(3 * j)) = vectors[j];
  }
  return c;
}

CoefficientSet CoefficientSet::from_stacked(const Eigen::VectorXd& c,
                                            std::string method, int iterations,
                                            double residual) {
  CoefficientSet out;
  const auto n = static_cast<std::size_t>(c.size() / 3);
  out.vectors.reserve(n);
  for (std::size_t j = 0; j < n; ++j) {
    out.vectors.emplace_back(c.segment<3>(static_cast<Eigen::Index>(3 * j)));
  }
  out.method = std::move(method);
  out.iterations = iterations;
  out.residual = residual;
  return out;
}

CoefficientSet solve_direct(const InteractionSystem& system,
                            const DirectOptions& options) {
  if (system.unknowns() > options.max_unknowns) {
    std::ostringstream os;
    os << "direct solve capped at " << options.max_unknowns << " unknowns ("
       << system.unknowns() << " requested); use the neumann method";
    throw Error(ErrorCode::invalid_argument, os.str());
  }
  const Eigen::MatrixXd a = system.dense();
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
  const double rcond = lu.rcond();
  Eigen::VectorXd c = lu.solve(system.rhs());
  if (!(rcond > 1e-14) || !c.allFinite()) {
    std::ostringstream os;
    os << "interaction matrix is numerically singular (rcond = " << rcond
       << "); the cluster is likely outside the admissible eps/d regime";
    throw Error(ErrorCode::singular, os.str());
  }
  return CoefficientSet::from_stacked(c, "direct", 1, system.residual_norm(c));
}

CoefficientSet solve_neumann(const InteractionSystem& system,
                             const NeumannOptions& options) {
  const Eigen::VectorXd& b = system.rhs();
  const double target = options.tol * b.norm();
  Eigen::VectorXd c = b;
  double previous = std::numeric_limits<double>::infinity();
  int growth_streak = 0;

  for (int it = 1; it <= options.max_iter; ++it) {
    const Eigen::VectorXd tpc = system.apply_interaction(c);
    // residual of the current iterate: (c + T P c) - b
    const double residual = (c + tpc - b).norm();
    if (residual <= target) {
      return CoefficientSet::from_stacked(c, "neumann", it, residual);
    }
    const double ratio = residual / previous;
    if (residual > previous) {
      if (++growth_streak >= 3) {
        std::ostringstream os;
        os << "fixed-point iteration diverged after " << it
           << " sweeps (residual ratio " << ratio << "); try the direct solver";
        throw SolverError(ErrorCode::diverged, os.str(), it, ratio);
      }
    } else {
      growth_streak = 0;
    }
    previous = residual;
    c = b - tpc;
  }
  std::ostringstream os;
  os << "fixed-point iteration did not reach tol " << options.tol << " in "
     << options.max_iter << " sweeps";
  throw SolverError(ErrorCode::not_converged, os.str(), options.max_iter,
                    std::numeric_limits<double>::quiet_NaN());
}

NormEstimate contraction_norm(const InteractionSystem& system, int iters) {
  NormEstimate est;
  const auto dim = static_cast<Eigen::Index>(system.unknowns());
  if (dim == 0) return est;
  Eigen::VectorXd v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    v[i] = 1.0 + 0.5 * std::sin(1.0 + static_cast<double>(i));
  }
  v.normalize();

  double lambda = 0.0;
  for (int it = 1; it <= std::max(iters, 1); ++it) {
    est.iterations = it;
    Eigen::VectorXd w = system.apply_interaction_transpose(system.apply_interaction(v));
    const double next = w.norm();
    if (next == 0.0) {
      lambda = 0.0;
      break;
    }
    v = w / next;
    const bool settled = std::abs(next - lambda) <= 1e-12 * next;
    lambda = next;
    if (settled) break;
  }
  est.value = std::sqrt(lambda);
  return est;
}

double stability_ratio(const CoefficientSet& coeffs,
                       const InteractionSystem& system) {
  const double denom = system.rhs().squaredNorm();
  if (denom == 0.0) return std::numeric_limits<double>::quiet_NaN();
  double num = 0.0;
  for (const auto& c : coeffs.vectors) num += c.squaredNorm();
  return num / denom;
}

}  // namespace meso
