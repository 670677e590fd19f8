#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "giraf/irls.hpp"
#include "giraf/kspace.hpp"
#include "giraf/lifting.hpp"
#include "giraf/phantom.hpp"

namespace giraf {

enum class SVTMethod
{
  /// x <- delift(D_tau(T(x - step lambda P*(P x - b)))): one thresholding per
  /// iteration, then the structured projection.
  proximal,
  /// ADMM splitting Y = T(x) with scaled dual U: Y <- D_tau(T(x) + U),
  /// x <- least-squares fit of Y - U subject to the data term, U <- U + T(x) - Y.
  /// Converges to the nuclear-norm minimizer for any tau > 0.
  admm,
};

std::string to_string(SVTMethod m);
SVTMethod svt_method_from_string(std::string const &name);

/// Singular value thresholding on the dense lifted matrix.
struct SVTConfig
{
  SVTMethod method = SVTMethod::admm;
  double step = 1.0;
  /// Absolute threshold; when zero, tau = tau_factor * sigma_1(T(x_0)).
  double tau = 0.0;
  double tau_factor = 5e-2;
  int max_iter = 50;
  /// Relative-change stopping tolerance; 0 runs all max_iter iterations.
  double tol = 0.0;
  /// Data weight; +inf replaces the gradient step by projection onto P x = b.
  double lambda = std::numeric_limits<double>::infinity();
  /// Largest lifted matrix (rows * cols) the solver will materialize.
  std::size_t max_dense_entries = 50'000'000;

  bool constrained() const { return std::isinf(lambda); }

  void validate() const;
};

struct DeliftResult
{
  KSpaceArray x;
  /// Entries of gamma whose weights vanish at every matrix location (gradient DC).
  std::vector<Index2> unrecoverable;
};

/// Least-squares inverse of the lifting: x[k] = sum w conj X / sum |w|^2 over
/// all matrix locations holding a copy of x[k]. Unrecoverable entries take the
/// value from `fallback` when given, else zero, and are listed in the result.
DeliftResult delift(MatX const &X, LiftingConfig const &cfg, KSpaceArray const *fallback = nullptr);

/// Samples placed on theta, zeros elsewhere.
KSpaceArray zero_fill(VecX const &b, SamplingMask const &mask, IndexSet2D const &gamma);

SolveResult svt_solve(VecX const &b, SamplingMask const &mask, LiftingConfig const &lifting, SVTConfig const &cfg,
                      KSpaceArray const *reference = nullptr);

/// Isotropic periodic TV with a quadratic k-space data term,
/// min_u TV(u) + (weight/2) ||P F u - b||^2 with F u = FFT(u)/n, solved by a
/// fixed number of Chambolle-Pock iterations. Gamma must fill its own grid.
KSpaceArray tv_solve(VecX const &b, SamplingMask const &mask, IndexSet2D const &gamma, double weight, int iters);

} // namespace giraf
