#include "giraf/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include "detail/parallel.hpp"

namespace giraf {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Cx cis(double phase)
{
  return {std::cos(phase), std::sin(phase)};
}

double wrap01(double v)
{
  v -= std::floor(v);
  return v >= 1.0 ? 0.0 : v;
}

void check_same_gamma(KSpaceArray const &x, KSpaceArray const &ref)
{
  if (!(x.gamma() == ref.gamma())) {
    throw std::invalid_argument("arrays are defined on different index sets");
  }
}

} // namespace

Eigen::VectorXd singular_values(MatX const &X)
{
  if (X.size() == 0) {
    return {};
  }
  return Eigen::BDCSVD<MatX>(X).singularValues();
}

int numerical_rank(Eigen::VectorXd const &sigmas, double rel_tol)
{
  if (!(rel_tol > 0.0 && rel_tol < 1.0)) {
    throw std::invalid_argument("numerical_rank: rel_tol must lie in (0, 1)");
  }
  if (sigmas.size() == 0 || !(sigmas.maxCoeff() > 0.0)) {
    return 0;
  }
  double const thr = rel_tol * sigmas.maxCoeff();
  return static_cast<int>((sigmas.array() > thr).count());
}

int numerical_rank(MatX const &X, double rel_tol)
{
  return numerical_rank(singular_values(X), rel_tol);
}

double mse(KSpaceArray const &x, KSpaceArray const &ref)
{
  check_same_gamma(x, ref);
  double const r = ref.values().squaredNorm();
  if (!(r > 0.0)) {
    throw std::invalid_argument("mse: reference is zero");
  }
  return (x.values() - ref.values()).squaredNorm() / r;
}

double snr_db(KSpaceArray const &x, KSpaceArray const &ref)
{
  check_same_gamma(x, ref);
  KSpaceArray const err(ref.gamma(), ref.grid(), x.values() - ref.values());
  double const s = to_image(ref).norm();
  if (!(s > 0.0)) {
    throw std::invalid_argument("snr_db: reference is zero");
  }
  double const e = to_image(err).norm();
  if (e == 0.0) {
    return kSnrCapDb;
  }
  return std::min(kSnrCapDb, 20.0 * std::log10(s / e));
}

Cx dirichlet(IndexSet2D const &lambda, Point2 r)
{
  Cx s{0.0, 0.0};
  for (auto const &k : lambda) {
    s += cis(kTwoPi * (k.k1 * r[0] + k.k2 * r[1]));
  }
  return s;
}

MatX dirichlet_gram(std::vector<Point2> const &points, IndexSet2D const &lambda)
{
  auto const n = static_cast<Eigen::Index>(points.size());
  MatX G(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      auto const &a = points[static_cast<std::size_t>(i)];
      auto const &b = points[static_cast<std::size_t>(j)];
      G(i, j) = dirichlet(lambda, {a[0] - b[0], a[1] - b[1]});
    }
  }
  return G;
}

VecX dirichlet_translate(IndexSet2D const &lambda, Point2 r)
{
  VecX d(static_cast<Eigen::Index>(lambda.size()));
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    d[static_cast<Eigen::Index>(i)] = cis(-kTwoPi * (lambda[i].k1 * r[0] + lambda[i].k2 * r[1]));
  }
  return d;
}

double torus_distance(Point2 a, Point2 b)
{
  double dx = std::abs(a[0] - b[0]);
  double dy = std::abs(a[1] - b[1]);
  dx = std::min(dx, 1.0 - dx);
  dy = std::min(dy, 1.0 - dy);
  return std::hypot(dx, dy);
}

std::array<VecX, 2> normalized_gradient_coeffs(EdgePolynomial const &edge)
{
  edge.validate();
  auto const n = static_cast<Eigen::Index>(edge.lambda0.size());
  std::array<VecX, 2> g{VecX(n), VecX(n)};
  for (std::size_t i = 0; i < edge.lambda0.size(); ++i) {
    auto const e = static_cast<Eigen::Index>(i);
    Cx const jc = Cx{0.0, kTwoPi} * edge.coeffs[e];
    g[0][e] = jc * static_cast<double>(edge.lambda0[i].k1);
    g[1][e] = jc * static_cast<double>(edge.lambda0[i].k2);
  }
  double const energy = g[0].squaredNorm() + g[1].squaredNorm();
  if (!(energy > 0.0)) {
    throw std::invalid_argument("edge polynomial has zero gradient");
  }
  double const s = 1.0 / std::sqrt(energy);
  g[0] *= s;
  g[1] *= s;
  return g;
}

Rho2Result rho2(EdgePolynomial const &edge, IndexSet2D const &lambda1)
{
  auto const g = normalized_gradient_coeffs(edge);
  auto const &l0 = edge.lambda0;
  // W[d] = sum_m a[m + d] conj(a[m]): Fourier coefficients of |grad mu0|^2.
  auto W = [&](Index2 d) {
    Cx s{0.0, 0.0};
    for (std::size_t i = 0; i < l0.size(); ++i) {
      auto const j = l0.find(l0[i] + d);
      if (!j) {
        continue;
      }
      for (auto const &a : g) {
        s += a[static_cast<Eigen::Index>(*j)] * std::conj(a[static_cast<Eigen::Index>(i)]);
      }
    }
    return s;
  };
  auto const n = static_cast<Eigen::Index>(lambda1.size());
  Rho2Result out;
  out.Q.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index l = 0; l < n; ++l) {
      out.Q(k, l) = W(lambda1[static_cast<std::size_t>(k)] - lambda1[static_cast<std::size_t>(l)]);
    }
  }
  Eigen::SelfAdjointEigenSolver<MatX> es(out.Q, Eigen::EigenvaluesOnly);
  out.lambda_min = es.eigenvalues().minCoeff();
  double const scale = es.eigenvalues().cwiseAbs().maxCoeff();
  if (!(out.lambda_min > 1e-13 * scale)) {
    throw std::runtime_error("rho2: the weighted Gram form is singular (lambda_min = " +
                             std::to_string(out.lambda_min) + ")");
  }
  out.grad_l1 = g[0].cwiseAbs().sum() + g[1].cwiseAbs().sum();
  out.rho2 = out.grad_l1 * out.grad_l1 / out.lambda_min;
  return out;
}

std::vector<Point2> zero_set_points(EdgePolynomial const &edge, int raster)
{
  if (raster < 8) {
    throw std::invalid_argument("zero_set_points: raster too coarse");
  }
  Eigen::VectorXd const mu = rasterize_mu(edge, {raster, raster});
  auto at = [&](int a, int b) { return mu[static_cast<Eigen::Index>(a) * raster + b]; };
  double const h = 1.0 / raster;
  std::vector<Point2> pts;
  auto refine = [&](Point2 r) {
    for (int it = 0; it < 8; ++it) {
      double const v = edge.eval(r[0], r[1]);
      auto const gr = edge.gradient(r[0], r[1]);
      double const g2 = gr[0] * gr[0] + gr[1] * gr[1];
      if (!(g2 > 0.0)) {
        break;
      }
      r[0] -= v * gr[0] / g2;
      r[1] -= v * gr[1] / g2;
    }
    return Point2{wrap01(r[0]), wrap01(r[1])};
  };
  for (int a = 0; a < raster; ++a) {
    for (int b = 0; b < raster; ++b) {
      double const v = at(a, b);
      double const vx = at((a + 1) % raster, b);
      double const vy = at(a, (b + 1) % raster);
      if ((v > 0.0) != (vx > 0.0)) {
        double const t = v / (v - vx);
        pts.push_back(refine({(a + t) * h, b * h}));
      }
      if ((v > 0.0) != (vy > 0.0)) {
        double const t = v / (v - vy);
        pts.push_back(refine({a * h, (b + t) * h}));
      }
    }
  }
  return pts;
}

Rho1Result rho1_estimate(EdgePolynomial const &edge, IndexSet2D const &lambda1, int R, Rho1Budget const &budget)
{
  if (R < 1) {
    throw std::invalid_argument("rho1_estimate: R must be positive");
  }
  auto const cand = zero_set_points(edge, budget.raster);
  if (cand.size() < static_cast<std::size_t>(R)) {
    throw std::runtime_error("rho1_estimate: only " + std::to_string(cand.size()) + " zero-set points for R = " +
                             std::to_string(R));
  }
  Rho1Result best;
  best.candidates = static_cast<int>(cand.size());
  best.restarts = std::max(1, budget.restarts);
  best.seed = budget.seed;
  best.sigma_min = -1.0;
  CounterRng const root(budget.seed, 0x72686f31ULL);
  for (int s = 0; s < best.restarts; ++s) {
    auto rng = root.split(static_cast<std::uint64_t>(s));
    std::vector<Point2> sel;
    std::vector<double> mind(cand.size(), std::numeric_limits<double>::infinity());
    std::size_t next = static_cast<std::size_t>(rng.below(cand.size()));
    for (int r = 0; r < R; ++r) {
      sel.push_back(cand[next]);
      for (std::size_t i = 0; i < cand.size(); ++i) {
        mind[i] = std::min(mind[i], torus_distance(cand[i], cand[next]));
      }
      next = static_cast<std::size_t>(std::max_element(mind.begin(), mind.end()) - mind.begin());
    }
    Eigen::SelfAdjointEigenSolver<MatX> es(dirichlet_gram(sel, lambda1), Eigen::EigenvaluesOnly);
    double const smin = es.eigenvalues().cwiseAbs().minCoeff();
    if (smin > best.sigma_min) {
      best.sigma_min = smin;
      best.points = std::move(sel);
    }
  }
  best.rho1 = best.sigma_min > 0.0 ? 1.0 / best.sigma_min : std::numeric_limits<double>::infinity();
  return best;
}

IncoherenceEstimate incoherence(EdgePolynomial const &edge, IndexSet2D const &lambda1, Rho1Budget const &budget)
{
  IncoherenceEstimate out;
  auto const R = static_cast<int>(prop1_rank(lambda1, edge.lambda0));
  out.rho1_search = rho1_estimate(edge, lambda1, R, budget);
  out.rho1_lower = out.rho1_search.rho1;
  out.rho2 = rho2(edge, lambda1).rho2;
  return out;
}

SubspaceLemmaResult subspace_lemma_check(KSpaceArray const &f_hat, EdgePolynomial const &edge,
                                         IndexSet2D const &lambda1, int n_points, std::uint64_t seed,
                                         double rank_tol)
{
  auto const cfg = LiftingConfig::make(f_hat.gamma(), lambda1, Weighting{WeightingKind::gradient});
  MatX const T = lift_dense(f_hat, cfg);
  Eigen::BDCSVD<MatX> svd(T, Eigen::ComputeThinU | Eigen::ComputeThinV);
  SubspaceLemmaResult out;
  out.rank = static_cast<int>(prop1_rank(lambda1, edge.lambda0));
  out.numerical_rank = numerical_rank(svd.singularValues(), rank_tol);
  MatX const V = svd.matrixV().leftCols(out.rank);
  MatX const U = svd.matrixU().leftCols(out.rank);

  auto const cand = zero_set_points(edge, 256);
  if (cand.empty()) {
    throw std::runtime_error("subspace_lemma_check: empty zero set");
  }
  CounterRng rng(seed, 0x6c656d6dULL);
  for (int i = 0; i < n_points; ++i) {
    out.on_points.push_back(cand[static_cast<std::size_t>(rng.below(cand.size()))]);
  }
  Eigen::VectorXd const mu = rasterize_mu(edge, {64, 64});
  double const level = 0.25 * mu.cwiseAbs().maxCoeff();
  while (out.off_points.size() < static_cast<std::size_t>(n_points)) {
    Point2 const r{rng.uniform(), rng.uniform()};
    if (std::abs(edge.eval(r[0], r[1])) >= level) {
      out.off_points.push_back(r);
    }
  }
  auto residual = [&](VecX const &d) { return (d - V * (V.adjoint() * d)).norm() / d.norm(); };
  for (auto const &r : out.on_points) {
    out.on_residuals.push_back(residual(dirichlet_translate(lambda1, r)));
  }
  for (auto const &r : out.off_points) {
    out.off_residuals.push_back(residual(dirichlet_translate(lambda1, r)));
  }
  double const max_on = *std::max_element(out.on_residuals.begin(), out.on_residuals.end());
  double const min_off = *std::min_element(out.off_residuals.begin(), out.off_residuals.end());
  out.contrast = max_on > 0.0 ? min_off / max_on : std::numeric_limits<double>::infinity();

  MatX D(static_cast<Eigen::Index>(lambda1.size()), n_points);
  for (int i = 0; i < n_points; ++i) {
    D.col(i) = dirichlet_translate(lambda1, out.on_points[static_cast<std::size_t>(i)]);
  }
  Eigen::ColPivHouseholderQR<MatX> qr(D);
  qr.setThreshold(1e-8);
  out.selected = static_cast<int>(qr.rank());
  MatX Dsel(D.rows(), out.selected);
  for (int i = 0; i < out.selected; ++i) {
    Dsel.col(i) = D.col(qr.colsPermutation().indices()[i]);
  }
  MatX const C = T * Dsel;
  out.column_rank = numerical_rank(C, 1e-8);
  for (Eigen::Index i = 0; i < C.cols(); ++i) {
    VecX const c = C.col(i);
    double const n = c.norm();
    if (n > 0.0) {
      out.max_column_residual = std::max(out.max_column_residual, (c - U * (U.adjoint() * c)).norm() / n);
    }
  }
  return out;
}

WilsonInterval wilson_interval(int successes, int trials, double z)
{
  if (trials <= 0) {
    return {0.0, 1.0};
  }
  double const n = trials;
  double const p = successes / n;
  double const z2 = z * z;
  double const centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
  double const half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / (1.0 + z2 / n);
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

double phase_trial_error(KSpaceArray const &truth, LiftingConfig const &lifting, std::size_t samples,
                         std::uint64_t seed, IRLSConfig const &solver)
{
  auto const mask = make_mask_count(lifting.gamma, MaskScheme::uniform, samples, seed);
  VecX const b = sample(truth, mask);
  auto const res = giraf_solve(b, mask, lifting, solver);
  return (res.x.values() - truth.values()).norm() / truth.values().norm();
}

PhaseTable phase_transition(KSpaceArray const &truth, LiftingConfig const &lifting, PhaseConfig const &cfg)
{
  if (cfg.trials < 1) {
    throw std::invalid_argument("phase_transition: trials must be positive");
  }
  auto counts = cfg.sample_counts;
  std::sort(counts.begin(), counts.end());
  PhaseTable table;
  auto const nt = static_cast<std::size_t>(cfg.trials);
  for (auto const c : counts) {
    PhaseLevel lvl;
    lvl.samples = c;
    lvl.trials = cfg.trials;
    for (std::size_t t = 0; t < nt; ++t) {
      lvl.runs.push_back({splitmix64(splitmix64(cfg.seed ^ (static_cast<std::uint64_t>(c) << 20)) + t), 0.0, false});
    }
    table.levels.push_back(std::move(lvl));
  }
  std::size_t const jobs = counts.size() * nt;
  detail::parallel_chunks(jobs, cfg.threads, [&](std::size_t lo, std::size_t hi, std::size_t) {
    for (std::size_t j = lo; j < hi; ++j) {
      auto &lvl = table.levels[j / nt];
      auto &run = lvl.runs[j % nt];
      run.error = phase_trial_error(truth, lifting, lvl.samples, run.seed, cfg.solver);
      run.success = run.error < cfg.success_tol;
    }
  });
  for (auto &lvl : table.levels) {
    lvl.successes = static_cast<int>(std::count_if(lvl.runs.begin(), lvl.runs.end(), [](auto const &r) { return r.success; }));
    lvl.fraction = static_cast<double>(lvl.successes) / lvl.trials;
    lvl.interval = wilson_interval(lvl.successes, lvl.trials);
  }
  for (std::size_t i = 0; i < table.levels.size(); ++i) {
    for (std::size_t j = i + 1; j < table.levels.size(); ++j) {
      if (table.levels[j].interval.hi < table.levels[i].interval.lo) {
        table.monotone = false;
      }
    }
  }
  return table;
}

void write_phase_csv(std::ostream &os, PhaseTable const &t)
{
  os << "samples,trial,seed,error,success\n" << std::setprecision(10);
  for (auto const &lvl : t.levels) {
    for (std::size_t i = 0; i < lvl.runs.size(); ++i) {
      auto const &r = lvl.runs[i];
      os << lvl.samples << ',' << i << ',' << r.seed << ',' << r.error << ',' << (r.success ? 1 : 0) << '\n';
    }
  }
}

} // namespace giraf
