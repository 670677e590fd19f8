#include <limits>

#include <Eigen/QR>
#include <gtest/gtest.h>

#include "giraf/analysis.hpp"
#include "giraf/baselines.hpp"
#include "oracles.hpp"

using namespace giraf;

TEST(Delift, InvertsLifting)
{
  CounterRng rng(1);
  for (auto wk : {WeightingKind::identity, WeightingKind::gradient}) {
    auto const cfg = LiftingConfig::make(IndexSet2D::rect(9, 8), IndexSet2D::rect(3, 4), {wk});
    auto const x = oracle::random_kspace(cfg.gamma, rng);
    auto const d = delift(lift_dense(x, cfg), cfg, &x);
    EXPECT_LT(oracle::rel(d.x.values(), x.values()), 1e-14);
    EXPECT_EQ(d.unrecoverable.size(), wk == WeightingKind::gradient ? 1U : 0U);
  }
}

TEST(Delift, IsLeastSquaresAverage)
{
  // Delifting a perturbed matrix equals the least-squares solution of T(x) ~ X.
  CounterRng rng(2);
  auto const cfg = LiftingConfig::make(IndexSet2D::rect(6, 6), IndexSet2D::rect(2, 3), {WeightingKind::gradient});
  MatX const X = MatX::NullaryExpr(cfg.rows(), cfg.cols(), [&]() { return rng.complex_normal(); });
  auto const d = delift(X, cfg);
  auto const n = static_cast<Eigen::Index>(cfg.gamma.size());
  // Dense lifting map on vectorized matrices, without the unrecoverable DC column.
  auto const dc = static_cast<Eigen::Index>(cfg.gamma.index_of({0, 0}));
  MatX A(cfg.rows() * cfg.cols(), n - 1);
  for (Eigen::Index j = 0, c = 0; j < n; ++j) {
    if (j == dc) {
      continue;
    }
    KSpaceArray e(cfg.gamma);
    e.values()[j] = 1.0;
    MatX const T = lift_dense(e, cfg);
    A.col(c++) = Eigen::Map<VecX const>(T.data(), T.size());
  }
  VecX const ls = A.colPivHouseholderQr().solve(Eigen::Map<VecX const>(X.data(), X.size()));
  VecX got(n - 1);
  for (Eigen::Index j = 0, c = 0; j < n; ++j) {
    if (j != dc) {
      got[c++] = d.x.values()[j];
    }
  }
  EXPECT_LT(oracle::rel(got, ls), 1e-12);
  EXPECT_EQ(d.x.values()[dc], Cx(0.0, 0.0));
}

TEST(ZeroFill, PlacesSamples)
{
  CounterRng rng(3);
  auto const gamma = IndexSet2D::rect(8, 8);
  auto const x = oracle::random_kspace(gamma, rng);
  auto const m = make_mask(gamma, MaskScheme::uniform, 4.0, 2);
  auto const z = zero_fill(sample(x, m), m, gamma);
  EXPECT_EQ(sample(z, m), sample(x, m));
  EXPECT_EQ((z.values().array() != Cx(0.0, 0.0)).count(), 16);
}

TEST(SVT, RecoversLowRankDiracStream)
{
  std::vector<std::array<double, 2>> const loc{{0.12, 0.0}, {0.4, 0.0}, {0.71, 0.0}};
  std::vector<Cx> const amps{1.0, Cx{0.3, -0.6}, 0.8};
  auto const gamma = IndexSet2D::rect(41, 1);
  auto const truth = dirac_fourier(loc, amps, gamma);
  auto const lifting = LiftingConfig::make(gamma, IndexSet2D::rect(9, 1), {});
  auto const mask = make_mask_count(gamma, MaskScheme::uniform, 26, 7);
  auto const b = sample(truth, mask);
  SVTConfig cfg;
  cfg.max_iter = 300;
  auto const r = svt_solve(b, mask, lifting, cfg, &truth);
  EXPECT_EQ(sample(r.x, mask), b);
  EXPECT_LT(oracle::rel(r.x.values(), truth.values()), 1e-4);
  EXPECT_EQ(r.report.iterations.size(), 300U);
  EXPECT_TRUE(r.report.iterations.front().mse.has_value());

  // The proximal iteration is slower but still improves on zero-fill.
  cfg.method = SVTMethod::proximal;
  auto const p = svt_solve(b, mask, lifting, cfg, &truth);
  EXPECT_EQ(sample(p.x, mask), b);
  EXPECT_LT(mse(p.x, truth), 0.1 * mse(zero_fill(b, mask, gamma), truth));
  EXPECT_LT(*p.report.iterations.back().mse, *p.report.iterations.front().mse);
}

TEST(SVT, NoThresholdOnFullSamplingKeepsData)
{
  CounterRng rng(8);
  auto const gamma = IndexSet2D::rect(9, 9);
  auto const x = oracle::random_kspace(gamma, rng);
  auto const lifting = LiftingConfig::make(gamma, IndexSet2D::rect(3, 3), {WeightingKind::gradient});
  auto const mask = make_mask(gamma, MaskScheme::uniform, 1.0, 1);
  for (auto m : {SVTMethod::admm, SVTMethod::proximal}) {
    for (double lambda : {std::numeric_limits<double>::infinity(), 1.0}) {
      SVTConfig cfg;
      cfg.method = m;
      cfg.tau = 0.0;
      cfg.tau_factor = 0.0;
      cfg.lambda = lambda;
      cfg.max_iter = 5;
      auto const r = svt_solve(sample(x, mask), mask, lifting, cfg);
      EXPECT_LT(oracle::rel(r.x.values(), x.values()), 1e-12) << to_string(m) << " " << lambda;
    }
  }
}

TEST(SVT, MethodNames)
{
  EXPECT_EQ(svt_method_from_string(to_string(SVTMethod::admm)), SVTMethod::admm);
  EXPECT_EQ(svt_method_from_string("proximal"), SVTMethod::proximal);
  EXPECT_THROW(svt_method_from_string("svd"), std::invalid_argument);
}

TEST(Delift, LiftDeliftIsAProjection)
{
  CounterRng rng(6);
  auto const cfg = LiftingConfig::make(IndexSet2D::rect(7, 6), IndexSet2D::rect(3, 2), {WeightingKind::gradient});
  MatX const X = MatX::NullaryExpr(cfg.rows(), cfg.cols(), [&]() { return rng.complex_normal(); });
  MatX const P1 = lift_dense(delift(X, cfg).x, cfg);
  MatX const P2 = lift_dense(delift(P1, cfg).x, cfg);
  EXPECT_LT(oracle::rel(P2, P1), 1e-10);
}

TEST(SVT, RejectsOversizedProblemsAndBadConfig)
{
  auto const gamma = IndexSet2D::rect(64, 64);
  auto const lifting = LiftingConfig::make(gamma, IndexSet2D::rect(15, 15), {WeightingKind::gradient});
  auto const mask = make_mask(gamma, MaskScheme::uniform, 2.0, 1);
  SVTConfig cfg;
  cfg.max_dense_entries = 1000;
  EXPECT_THROW(svt_solve(VecX::Zero(static_cast<Eigen::Index>(mask.theta.size())), mask, lifting, cfg),
               std::invalid_argument);
  cfg = {};
  cfg.step = 0.0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

TEST(TV, PiecewiseConstantImageIsReconstructedWell)
{
  auto const gamma = IndexSet2D::rect(32, 32);
  CounterRng rng(4);
  auto const sep = random_separable_edge(3, 3, rng);
  auto const truth = phantom_fourier({sep.edge(), 1.0, 0.25, 4}, gamma);
  auto const mask = make_mask(gamma, MaskScheme::variable_density, 3.0, 5);
  auto const b = sample(truth, mask);
  auto const zf = zero_fill(b, mask, gamma);
  auto const tv = tv_solve(b, mask, gamma, 1e5, 400);
  EXPECT_GT(snr_db(tv, truth), snr_db(zf, truth) + 10.0);
  EXPECT_THROW(tv_solve(b, mask, gamma, 0.0, 10), std::invalid_argument);
  // Zero iterations return the zero-filled data.
  EXPECT_LT(oracle::rel(tv_solve(b, mask, gamma, 1.0, 0).values(), zf.values()), 1e-13);
}

TEST(TV, FullSamplingOfOneRegionPhantomIsNearExact)
{
  auto const gamma = IndexSet2D::rect(32, 32);
  CounterRng rng(7);
  auto const truth = phantom_fourier({random_edge(IndexSet2D::rect(3, 3), rng), 1.0, 0.0, 4}, gamma);
  auto const mask = make_mask(gamma, MaskScheme::uniform, 1.0, 1);
  auto const tv = tv_solve(sample(truth, mask), mask, gamma, 1e6, 400);
  EXPECT_GT(snr_db(tv, truth), 40.0);
}

TEST(TV, LargeWeightKeepsSampledData)
{
  auto const gamma = IndexSet2D::rect(16, 16);
  CounterRng rng(10);
  auto const x = oracle::random_kspace(gamma, rng);
  auto const mask = make_mask(gamma, MaskScheme::uniform, 2.0, 3);
  auto const b = sample(x, mask);
  auto const tv = tv_solve(b, mask, gamma, 1e12, 200);
  EXPECT_LT(oracle::rel(sample(tv, mask), b), 1e-6);
}
