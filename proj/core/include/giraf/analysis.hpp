#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include <Eigen/Core>

#include "giraf/irls.hpp"
#include "giraf/kspace.hpp"
#include "giraf/lifting.hpp"
#include "giraf/phantom.hpp"

namespace giraf {

using Point2 = std::array<double, 2>;

Eigen::VectorXd singular_values(MatX const &X);
/// Number of singular values above rel_tol * sigma_1 (0 for a zero matrix).
int numerical_rank(MatX const &X, double rel_tol);
int numerical_rank(Eigen::VectorXd const &sigmas, double rel_tol);

/// ||x - ref||^2 / ||ref||^2.
double mse(KSpaceArray const &x, KSpaceArray const &ref);
/// 20 log10(||ref|| / ||x - ref||) of the images on the FFT grid, capped at 300 dB.
double snr_db(KSpaceArray const &x, KSpaceArray const &ref);
constexpr double kSnrCapDb = 300.0;

/// D(r) = sum_{k in lambda} e^{j2pi k.r}.
Cx dirichlet(IndexSet2D const &lambda, Point2 r);
/// G_ij = D(r_i - r_j).
MatX dirichlet_gram(std::vector<Point2> const &points, IndexSet2D const &lambda);
/// Coefficients e^{-j2pi k.r} (k in lambda) of the translate D(. - r).
VecX dirichlet_translate(IndexSet2D const &lambda, Point2 r);

/// Minimum periodic distance on the unit torus.
double torus_distance(Point2 a, Point2 b);

/// Gradient coefficients (j2pi k1 c, j2pi k2 c) of mu0 scaled so that the
/// integral of |grad mu0|^2 over the unit square is 1.
std::array<VecX, 2> normalized_gradient_coeffs(EdgePolynomial const &edge);

struct Rho2Result
{
  double rho2 = 0.0;
  double lambda_min = 0.0;
  /// Sum over k of |c_x[k]| + |c_y[k]| (normalized gradient).
  double grad_l1 = 0.0;
  /// Q[k, l] = integral of conj(e_k) e_l |grad mu0|^2, k, l in lambda1.
  MatX Q;
};

/// rho2 = ||grad mu0^||_1^2 / lambda_min(Q).
Rho2Result rho2(EdgePolynomial const &edge, IndexSet2D const &lambda1);

/// Points on {mu0 = 0}: sign changes between neighbours of an n x n raster,
/// refined by Newton steps along the gradient.
std::vector<Point2> zero_set_points(EdgePolynomial const &edge, int raster);

struct Rho1Budget
{
  int raster = 256;
  int restarts = 32;
  std::uint64_t seed = 1;
};

struct Rho1Result
{
  /// Best (largest) sigma_min(G(P)) found.
  double sigma_min = 0.0;
  /// 1 / sigma_min: an upper estimate of rho1 over the searched point sets.
  double rho1 = 0.0;
  std::vector<Point2> points;
  int candidates = 0;
  int restarts = 0;
  std::uint64_t seed = 0;
};

/// Greedy farthest-point selection of R zero-set points from random starts.
Rho1Result rho1_estimate(EdgePolynomial const &edge, IndexSet2D const &lambda1, int R, Rho1Budget const &budget = {});

struct IncoherenceEstimate
{
  double rho1_lower = 0.0;
  double rho2 = 0.0;
  Rho1Result rho1_search;
};

IncoherenceEstimate incoherence(EdgePolynomial const &edge, IndexSet2D const &lambda1, Rho1Budget const &budget = {});

struct SubspaceLemmaResult
{
  int rank = 0;
  int numerical_rank = 0;
  std::vector<Point2> on_points;
  std::vector<Point2> off_points;
  std::vector<double> on_residuals;
  std::vector<double> off_residuals;
  /// min(off) / max(on).
  double contrast = 0.0;
  /// Translates chosen by pivoted QR; their count equals the row-space rank.
  int selected = 0;
  /// Rank of the candidate column-space vectors T d_i built from the selection.
  int column_rank = 0;
  double max_column_residual = 0.0;
};

/// Checks that Dirichlet translates at zero-set points lie in the row space of
/// the gradient-weighted lifting of f_hat (and off-set translates do not), and
/// that the selected translates map to a basis of the column space.
SubspaceLemmaResult subspace_lemma_check(KSpaceArray const &f_hat, EdgePolynomial const &edge,
                                         IndexSet2D const &lambda1, int n_points, std::uint64_t seed,
                                         double rank_tol = 1e-6);

struct WilsonInterval
{
  double lo = 0.0;
  double hi = 1.0;
};

WilsonInterval wilson_interval(int successes, int trials, double z = 1.96);

struct PhaseTrial
{
  std::uint64_t seed = 0;
  double error = 0.0;
  bool success = false;
};

struct PhaseLevel
{
  std::size_t samples = 0;
  int successes = 0;
  int trials = 0;
  double fraction = 0.0;
  WilsonInterval interval;
  std::vector<PhaseTrial> runs;
};

struct PhaseTable
{
  std::vector<PhaseLevel> levels;
  /// No level's interval lies entirely below that of a smaller sample count.
  bool monotone = true;
};

struct PhaseConfig
{
  std::vector<std::size_t> sample_counts;
  int trials = 10;
  std::uint64_t seed = 1;
  double success_tol = 1e-3;
  IRLSConfig solver;
  int threads = 1;
};

/// Monte-Carlo exact-recovery table: for each sample count, `trials` GIRAF
/// recoveries from fresh uniform masks; success = relative error < success_tol.
PhaseTable phase_transition(KSpaceArray const &truth, LiftingConfig const &lifting, PhaseConfig const &cfg);

/// Replays one recorded trial.
double phase_trial_error(KSpaceArray const &truth, LiftingConfig const &lifting, std::size_t samples,
                         std::uint64_t seed, IRLSConfig const &solver);

void write_phase_csv(std::ostream &os, PhaseTable const &t);

} // namespace giraf
