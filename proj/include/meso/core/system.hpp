#pragma once

// The 3N x 3N interaction system (I + T P) C = b, b_j = -grad w_f(O_j),
// T_jk = mixed Hessian of G at (O_j, O_k) for j != k, T_jj = 0, and P the
// block diagonal of polarization tensors.

#include <Eigen/Core>

#include <string>
#include <vector>

#include "meso/core/kernels.hpp"

namespace meso {

class InteractionSystem {
 public:
  std::size_t size() const noexcept { return centers_.size(); }
  std::size_t unknowns() const noexcept { return 3 * centers_.size(); }

  const Eigen::VectorXd& rhs() const noexcept { return rhs_; }
  const std::vector<Vec3>& centers() const noexcept { return centers_; }
  const std::vector<Mat3>& polarizations() const noexcept { return polarization_; }
  const DomainSpec& domain() const noexcept { return domain_; }

  /// T_jk; zero for j == k.
  Mat3 block(std::size_t j, std::size_t k) const;

  /// y = T P c without forming the matrix. O(N^2), parallel over rows.
  Eigen::VectorXd apply_interaction(const Eigen::VectorXd& c) const;
  /// y = (I + T P) c.
  Eigen::VectorXd apply(const Eigen::VectorXd& c) const;
  /// y = (T P)^T c = P T c (T is symmetric).
  Eigen::VectorXd apply_interaction_transpose(const Eigen::VectorXd& c) const;

  /// Dense I + T P.
  Eigen::MatrixXd dense() const;

  /// ||(I + T P) c - b||_2.
  double residual_norm(const Eigen::VectorXd& c) const;

 private:
  friend InteractionSystem assemble(const Cloud&, const DomainSpec&,
                                    const BackgroundField&);
  explicit InteractionSystem(DomainSpec domain) : domain_(std::move(domain)) {}

  Eigen::VectorXd apply_T(const Eigen::VectorXd& v) const;

  DomainSpec domain_;
  std::vector<Vec3> centers_;
  std::vector<Mat3> polarization_;
  std::vector<char> active_;  ///< polarization is nonzero
  Eigen::VectorXd rhs_;
};

InteractionSystem assemble(const Cloud& cloud, const DomainSpec& domain,
                           const BackgroundField& background);

struct CoefficientSet {
  std::vector<Vec3> vectors;
  std::string method;
  int iterations = 0;
  double residual = 0.0;  ///< ||(I + T P) C - b||_2 at the end of the solve

  std::size_t size() const noexcept { return vectors.size(); }
  Eigen::VectorXd stacked() const;
  static CoefficientSet from_stacked(const Eigen::VectorXd& c, std::string method,
                                     int iterations, double residual);
};

struct DirectOptions {
  std::size_t max_unknowns = 20000;
};

/// Dense LU with partial pivoting. Throws ErrorCode::singular when the
/// reciprocal condition estimate collapses.
CoefficientSet solve_direct(const InteractionSystem& system,
                            const DirectOptions& options = {});

struct NeumannOptions {
  double tol = 1e-12;
  int max_iter = 500;
};

/// Fixed-point iteration C <- b - T P C, starting at C = b. Stops when the
/// residual of the current iterate is <= tol ||b||. Throws SolverError when
/// the residual grows for 3 consecutive sweeps or max_iter is exhausted.
CoefficientSet solve_neumann(const InteractionSystem& system,
                             const NeumannOptions& options = {});

struct NormEstimate {
  double value = 0.0;
  int iterations = 0;
};

/// Power iteration on (T P)^T (T P); returns the estimate of ||T P||_2.
NormEstimate contraction_norm(const InteractionSystem& system, int iters = 100);

/// sum |C_j|^2 / sum |b_j|^2; NaN when b vanishes.
double stability_ratio(const CoefficientSet& coeffs,
                       const InteractionSystem& system);

}  // namespace meso
