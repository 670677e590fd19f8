#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>

#include <Eigen/Core>

#include "giraf/kspace.hpp"
#include "giraf/lifting.hpp"
#include "giraf/phantom.hpp"
#include "giraf/report.hpp"

namespace giraf {

enum class OperatorMode
{
  exact,
  approximate,
};

std::string to_string(OperatorMode m);
OperatorMode operator_mode_from_string(std::string const &name);

/// IRLS parameters. `lambda` weights the data term of the normal equations
/// Q x + lambda P* P x = lambda P* b; lambda = +inf enforces P x = b exactly
/// and solves for the unsampled entries only.
struct IRLSConfig
{
  double p = 1.0;
  double lambda = std::numeric_limits<double>::infinity();
  /// eps_1 = eps0_factor * largest Gram eigenvalue at x_0.
  double eps0_factor = 1e-2;
  double eps_decay = 2.0;
  /// Floor of the schedule, relative to the same eigenvalue.
  double eps_min_factor = 1e-15;
  int max_outer = 20;
  double cg_tol = 1e-9;
  int cg_max = 500;
  OperatorMode op = OperatorMode::approximate;
  double convergence_tol = 1e-4;
  /// Filter spectra of the exact operator are cached while they fit in this budget.
  std::size_t filter_cache_bytes = std::size_t{256} << 20;
  int threads = 1;

  bool constrained() const { return std::isinf(lambda); }
  void validate() const;
};

/// Gridded sum-of-squares weight mu_bar(r) = sum_i alpha_i |gamma_i(r)|^2.
struct AnnihilatingMask
{
  GridShape grid;
  Eigen::VectorXd values;
};

struct WeightUpdate
{
  AnnihilatingMask mask;
  /// Ascending eigenvalues of the symmetrized Gram matrix and their eigenvectors.
  Eigen::VectorXd eigenvalues;
  MatX eigenvectors;
  /// alpha_i = (max(lambda_i, 0) + eps)^(p/2 - 1).
  Eigen::VectorXd alpha;

  /// Columns h_i = sqrt(alpha_i) v_i of H^(1/2).
  MatX filters() const;
};

/// (1/p) sum sigma^p for p in (0,1], sum log sigma for p = 0 (-inf if any sigma is 0).
double schatten_penalty(Eigen::VectorXd const &sigmas, double p);

/// Eigen-decomposition of the Gram matrix and the resulting annihilating mask on
/// `grid`; gamma_i is the trigonometric polynomial with coefficients v_i on lambda1.
WeightUpdate weight_update(MatX const &gram, double eps, double p, IndexSet2D const &lambda1, GridShape grid,
                           int threads = 1);

/// Mask from an explicit filter bank (columns on lambda1) and weights.
AnnihilatingMask mask_from_filters(MatX const &v, Eigen::VectorXd const &alpha, IndexSet2D const &lambda1,
                                   GridShape grid, int threads = 1);

/// Q~ x = sum_b w_b . restrict_gamma(FFT(mask . IFFT(embed(w_b x)))): the
/// regularization part of the approximate normal operator (2 FFTs per block).
class ApproxNormal
{
public:
  ApproxNormal(LiftingOperator const &op, AnnihilatingMask mask);
  VecX regularizer(VecX const &x) const;

private:
  LiftingOperator const &op_;
  AnnihilatingMask mask_;
};

/// Q x = sum_i T(.)^H T(x) h_i restricted to lambda2, accumulated in the
/// frequency domain (2 FFTs per filter and block).
class ExactNormal
{
public:
  ExactNormal(LiftingOperator const &op, MatX filters, std::size_t cache_bytes = std::size_t{256} << 20,
              int threads = 1);
  VecX regularizer(VecX const &x) const;

private:
  VecX spectrum(Eigen::Index i) const;

  LiftingOperator const &op_;
  MatX filters_;
  std::vector<VecX> cache_;
  int threads_;
};

/// y = Q~ x + lambda * 1_theta x.
KSpaceArray normal_apply_approx(KSpaceArray const &x, AnnihilatingMask const &mask, LiftingConfig const &cfg,
                                double lambda, SamplingMask const &theta);
/// y = sum_i adjoint_apply(apply(x, h_i), h_i) + lambda * 1_theta x.
KSpaceArray normal_apply_exact(KSpaceArray const &x, MatX const &filters, LiftingConfig const &cfg, double lambda,
                               SamplingMask const &theta);

struct CGResult
{
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
};

/// Conjugate gradient for a Hermitian positive semidefinite operator; x is the warm start.
CGResult conjugate_gradient(std::function<VecX(VecX const &)> const &A, VecX const &b, VecX &x, double tol,
                            int max_iter);

struct SolveResult
{
  KSpaceArray x;
  SolverReport report;
};

/// GIRAF: alternates the filter update (Gram eigen-decomposition) with the
/// weighted least-squares solve, starting from the zero-filled data.
/// `b` holds the samples in mask.theta element order.
SolveResult giraf_solve(VecX const &b, SamplingMask const &mask, LiftingConfig const &lifting, IRLSConfig const &cfg,
                        KSpaceArray const *reference = nullptr);

} // namespace giraf
