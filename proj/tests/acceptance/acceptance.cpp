// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero when any criterion fails. Arguments select criteria by id
// (e.g. `acceptance A2 A8`); no arguments runs all of them.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <limits>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "giraf/analysis.hpp"
#include "giraf/baselines.hpp"
#include "oracles.hpp"

using namespace giraf;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome
{
  bool pass = false;
  std::string detail;
};

struct Criterion
{
  std::string id;
  std::string title;
  std::function<Outcome()> run;
};

std::string fmt(char const *f, double v)
{
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double median(std::vector<double> v)
{
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

/// First iteration whose recorded MSE is below tol, or 0 when none is.
int first_below(SolverReport const &r, double tol)
{
  for (auto const &it : r.iterations) {
    if (it.mse && *it.mse < tol) {
      return it.iteration;
    }
  }
  return 0;
}

KSpaceArray edge_phantom(IndexSet2D const &gamma, std::uint64_t seed)
{
  CounterRng rng(seed);
  return phantom_fourier({random_edge(IndexSet2D::rect(3, 3), rng), 1.0, 0.25, 8}, gamma);
}

Outcome rank_law()
{
  auto const gamma = IndexSet2D::rect(65, 65);
  auto const l0 = IndexSet2D::rect(3, 3);
  auto const l1 = IndexSet2D::rect(5, 5);
  auto const cfg = LiftingConfig::make(gamma, l1, {WeightingKind::gradient});
  auto const expected = static_cast<int>(prop1_rank(l1, l0));
  int agree = 0;
  double worst_gap = 0.0;
  int const seeds = 6;
  for (std::uint64_t seed = 1; seed <= seeds; ++seed) {
    auto const s = singular_values(lift_dense(edge_phantom(gamma, seed), cfg));
    agree += numerical_rank(s, 1e-2) == expected;
    worst_gap = std::max(worst_gap, s[expected] / s[0]);
  }
  return {agree == seeds, std::to_string(agree) + "/" + std::to_string(seeds) + " phantoms have rank " +
                              std::to_string(expected) + ", worst sigma_17/sigma_1 " + fmt("%.2e", worst_gap)};
}

/// Matrix of x -> T(x) h over the basis of gamma.
MatX filter_map(LiftingConfig const &cfg, VecX const &h)
{
  auto const n = static_cast<Eigen::Index>(cfg.gamma.size());
  MatX A(cfg.rows(), n);
  for (Eigen::Index j = 0; j < n; ++j) {
    KSpaceArray e(cfg.gamma);
    e.values()[j] = 1.0;
    A.col(j) = lift_dense(e, cfg) * h;
  }
  return A;
}

Outcome operator_oracles()
{
  CounterRng rng(11);
  double worst = 0.0;
  double worst_ip = 0.0;
  for (int f : {3, 5}) {
    for (auto wk : {WeightingKind::identity, WeightingKind::gradient}) {
      auto const cfg = LiftingConfig::make(IndexSet2D::rect(16, 16), IndexSet2D::rect(f, f), {wk});
      LiftingOperator const op(cfg);
      for (int t = 0; t < 10; ++t) {
        auto const x = oracle::random_kspace(cfg.gamma, rng);
        VecX const h = oracle::random_vec(cfg.cols(), rng);
        VecX const v = oracle::random_vec(cfg.rows(), rng);
        MatX const T = lift_dense(x, cfg);
        MatX const A = filter_map(cfg, h);
        VecX const adj = op.adjoint(v, h).values();
        worst = std::max({worst, oracle::rel(op.apply(x, h), T * h), oracle::rel(adj, A.adjoint() * v),
                          oracle::rel(op.gram(x), T.adjoint() * T)});
        Cx const lhs = v.dot(op.apply(x, h));
        Cx const rhs = adj.dot(x.values());
        worst_ip = std::max(worst_ip, std::abs(lhs - rhs) / std::abs(lhs));
      }
    }
  }
  return {worst <= 1e-9 && worst_ip <= 1e-10,
          "max rel error " + fmt("%.1e", worst) + ", adjoint inner-product " + fmt("%.1e", worst_ip)};
}

/// One IRLS iteration from zero-fill, assembled with dense matrices.
VecX dense_irls_step(VecX const &b, SamplingMask const &mask, LiftingConfig const &cfg, IRLSConfig const &ic)
{
  auto const n = static_cast<Eigen::Index>(cfg.gamma.size());
  KSpaceArray const x0 = zero_fill(b, mask, cfg.gamma);
  MatX const T = lift_dense(x0, cfg);
  MatX const G = T.adjoint() * T;
  Eigen::SelfAdjointEigenSolver<MatX> es(G);
  double const eps = ic.eps0_factor * es.eigenvalues().maxCoeff();
  MatX Q = MatX::Zero(n, n);
  for (Eigen::Index i = 0; i < G.rows(); ++i) {
    double const alpha = std::pow(std::max(es.eigenvalues()[i], 0.0) + eps, ic.p / 2.0 - 1.0);
    MatX const A = filter_map(cfg, es.eigenvectors().col(i));
    Q += alpha * A.adjoint() * A;
  }
  Eigen::VectorXd const ind = mask.indicator();
  VecX const be = x0.values();
  if (!ic.constrained()) {
    MatX const M = Q + ic.lambda * MatX(ind.cast<Cx>().asDiagonal());
    return M.fullPivLu().solve(ic.lambda * be);
  }
  std::vector<Eigen::Index> free;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (ind[i] == 0.0) {
      free.push_back(i);
    }
  }
  auto const m = static_cast<Eigen::Index>(free.size());
  MatX Quu(m, m);
  VecX rhs(m);
  VecX const Qb = Q * be;
  for (Eigen::Index r = 0; r < m; ++r) {
    rhs[r] = -Qb[free[static_cast<std::size_t>(r)]];
    for (Eigen::Index c = 0; c < m; ++c) {
      Quu(r, c) = Q(free[static_cast<std::size_t>(r)], free[static_cast<std::size_t>(c)]);
    }
  }
  VecX const xu = Quu.fullPivLu().solve(rhs);
  VecX x = be;
  for (Eigen::Index r = 0; r < m; ++r) {
    x[free[static_cast<std::size_t>(r)]] = xu[r];
  }
  return x;
}

Outcome irls_step()
{
  auto const gamma = IndexSet2D::rect(16, 16);
  auto const truth = edge_phantom(gamma, 4);
  auto const cfg = LiftingConfig::make(gamma, IndexSet2D::rect(3, 3), {WeightingKind::gradient});
  auto const mask = make_mask(gamma, MaskScheme::uniform, 2.0, 5);
  auto const b = sample(truth, mask);
  double worst = 0.0;
  for (double p : {0.0, 0.5, 1.0}) {
    for (double lambda : {std::numeric_limits<double>::infinity(), 10.0}) {
      IRLSConfig ic;
      ic.p = p;
      ic.lambda = lambda;
      ic.op = OperatorMode::exact;
      ic.max_outer = 1;
      ic.cg_tol = 1e-13;
      ic.cg_max = 5000;
      auto const r = giraf_solve(b, mask, cfg, ic);
      worst = std::max(worst, oracle::rel(r.x.values(), dense_irls_step(b, mask, cfg, ic)));
    }
  }
  return {worst <= 1e-6, "max rel difference to dense step " + fmt("%.1e", worst) + " over p in {0, 0.5, 1}"};
}

Outcome giraf_vs_svt()
{
  std::ostringstream d;
  auto const cfg64 = LiftingConfig::make(IndexSet2D::rect(64, 64), IndexSet2D::rect(15, 15), {WeightingKind::gradient});
  auto const truth = edge_phantom(cfg64.gamma, 1);
  auto const mask = make_mask(cfg64.gamma, MaskScheme::uniform, 1.5, 3);
  auto const b = sample(truth, mask);
  SVTConfig sc;
  sc.max_iter = 50;
  auto const ref = svt_solve(b, mask, cfg64, sc);
  auto const svt = svt_solve(b, mask, cfg64, sc, &ref.x);
  int const svt_it = first_below(svt.report, 1e-4);

  IRLSConfig ic;
  ic.p = 1.0;
  ic.op = OperatorMode::exact;
  ic.cg_tol = 1e-6;
  ic.max_outer = 15;
  ic.convergence_tol = 1e-12;
  auto const g = giraf_solve(b, mask, cfg64, ic, &ref.x);
  int const giraf_it = first_below(g.report, 1e-4);
  bool const iter_ok = giraf_it > 0 && svt_it > 0 && giraf_it <= svt_it;
  d << "iterations to MSE<1e-4 vs 50-iteration SVT: giraf " << giraf_it << ", svt " << svt_it
    << " (giraf final MSE " << fmt("%.1e", *g.report.final_mse) << ")";

  // Per-iteration decomposition cost, 64^2 -> 128^2.
  auto decomp = [](SolverReport const &r) {
    std::vector<double> t;
    for (auto const &it : r.iterations) {
      t.push_back(it.decomp_s);
    }
    return median(t);
  };
  auto const cfg128 =
    LiftingConfig::make(IndexSet2D::rect(128, 128), IndexSet2D::rect(15, 15), {WeightingKind::gradient});
  auto const truth128 = edge_phantom(cfg128.gamma, 1);
  auto const mask128 = make_mask(cfg128.gamma, MaskScheme::uniform, 1.5, 3);
  IRLSConfig tc;
  tc.p = 1.0;
  tc.max_outer = 9;
  tc.convergence_tol = 1e-300;
  double const g64 = decomp(giraf_solve(b, mask, cfg64, tc).report);
  double const g128 = decomp(giraf_solve(sample(truth128, mask128), mask128, cfg128, tc).report);
  SVTConfig one;
  one.max_iter = 1;
  double const s64 = decomp(svt.report);
  double const s128 = decomp(svt_solve(sample(truth128, mask128), mask128, cfg128, one).report);
  double const g_ratio = g128 / g64;
  double const s_ratio = s128 / s64;
  bool const time_ok = g_ratio >= 0.8 && g_ratio <= 1.2 && s_ratio > 4.0;
  d << "; decomposition time 128^2/64^2: giraf " << fmt("%.2f", g_ratio) << " (" << fmt("%.3f", g64) << " s), svt "
    << fmt("%.2f", s_ratio) << " (" << fmt("%.2f", s64) << " s)";
  return {iter_ok && time_ok, d.str()};
}

Outcome approximation_quality()
{
  std::ostringstream d;
  std::vector<double> disc;
  for (int n : {32, 64, 128}) {
    auto const gamma = IndexSet2D::rect(n, n);
    auto const truth = edge_phantom(gamma, 1);
    auto const cfg = LiftingConfig::make(gamma, IndexSet2D::rect(7, 7), {WeightingKind::gradient});
    LiftingOperator const op(cfg);
    MatX const G = op.gram(truth);
    auto const wu = weight_update(G, 1e-2 * singular_values(G)[0], 1.0, cfg.lambda1, cfg.fft_grid);
    ApproxNormal const approx(op, wu.mask);
    ExactNormal const exact(op, wu.filters());
    CounterRng rng(5);
    double worst = 0.0;
    for (int t = 0; t < 5; ++t) {
      VecX const x = oracle::random_vec(static_cast<Eigen::Index>(gamma.size()), rng);
      VecX const e = exact.regularizer(x);
      worst = std::max(worst, (approx.regularizer(x) - e).norm() / e.norm());
    }
    disc.push_back(worst);
    d << n << "^2: " << fmt("%.3f", worst) << " ";
  }
  bool const monotone = disc[1] < disc[0] && disc[2] < disc[1];

  auto const gamma = IndexSet2D::rect(128, 128);
  auto const truth = edge_phantom(gamma, 1);
  auto const cfg = LiftingConfig::make(gamma, IndexSet2D::rect(7, 7), {WeightingKind::gradient});
  auto const mask = make_mask(gamma, MaskScheme::uniform, 2.0, 2);
  auto const b = sample(truth, mask);
  IRLSConfig ic;
  ic.p = 0.0;
  ic.max_outer = 10;
  ic.cg_tol = 1e-6;
  auto const ra = giraf_solve(b, mask, cfg, ic);
  ic.op = OperatorMode::exact;
  auto const re = giraf_solve(b, mask, cfg, ic);
  double const diff = oracle::rel(ra.x.values(), re.x.values());
  d << "; end-to-end exact vs approx at 128^2: " << fmt("%.3f", 100.0 * diff) << "%";
  return {monotone && diff < 1e-2, "discrepancy " + d.str()};
}

Outcome recovery_ordering()
{
  auto const gamma = IndexSet2D::rect(64, 64);
  auto const truth = edge_phantom(gamma, 1);
  auto const mask = make_mask(gamma, MaskScheme::uniform, 2.0, 2);
  auto const b = sample(truth, mask);
  double const zf = snr_db(zero_fill(b, mask, gamma), truth);
  double tv = -1e300;
  double tv_w = 0.0;
  for (double w : {1e3, 3e3, 1e4, 3e4, 1e5, 3e5, 1e6, 3e6}) {
    double const s = snr_db(tv_solve(b, mask, gamma, w, 500), truth);
    if (s > tv) {
      tv = s;
      tv_w = w;
    }
  }
  IRLSConfig ic;
  ic.p = 0.0;
  ic.max_outer = 15;
  ic.cg_tol = 1e-6;
  auto const cfg = LiftingConfig::make(gamma, IndexSet2D::rect(7, 7), {WeightingKind::gradient});
  double const g = snr_db(giraf_solve(b, mask, cfg, ic).x, truth);
  return {g >= tv + 0.5 && tv >= zf + 3.5, "SNR giraf " + fmt("%.2f", g) + " dB, tv " + fmt("%.2f", tv) +
                                                " dB (weight " + fmt("%.0e", tv_w) + "), zero-fill " +
                                                fmt("%.2f", zf) + " dB"};
}

Outcome filter_trend()
{
  auto const gamma = IndexSet2D::rect(48, 48);
  auto const truth = edge_phantom(gamma, 1);
  auto const mask = make_mask(gamma, MaskScheme::variable_density, 5.0, 3);
  auto const b = sample(truth, mask);
  IRLSConfig ic;
  ic.p = 0.0;
  ic.op = OperatorMode::exact;
  ic.max_outer = 12;
  ic.cg_tol = 1e-6;
  std::vector<double> snr;
  std::string d = "SNR by filter:";
  for (int f : {7, 11, 15}) {
    auto const cfg = LiftingConfig::make(gamma, IndexSet2D::rect(f, f), {WeightingKind::gradient});
    snr.push_back(snr_db(giraf_solve(b, mask, cfg, ic).x, truth));
    d += " " + std::to_string(f) + "x" + std::to_string(f) + " " + fmt("%.2f", snr.back()) + " dB";
  }
  bool ok = true;
  for (std::size_t i = 1; i < snr.size(); ++i) {
    ok = ok && snr[i] >= snr[i - 1] - 0.2;
  }
  return {ok, d};
}

Outcome fri_recovery()
{
  auto const gamma = IndexSet2D::rect(65, 1);
  std::vector<std::array<double, 2>> const loc{{0.07, 0.0}, {0.23, 0.0}, {0.41, 0.0}, {0.62, 0.0}, {0.85, 0.0}};
  std::vector<Cx> const amps{1.0, Cx{0.5, 0.8}, -0.7, Cx{0.3, -0.9}, 0.6};
  auto const truth = dirac_fourier(loc, amps, gamma);
  auto const cfg = LiftingConfig::make(gamma, IndexSet2D::rect(12, 1), {});
  IRLSConfig ic;
  ic.p = 0.0;
  ic.op = OperatorMode::exact;
  ic.max_outer = 200;
  ic.convergence_tol = 1e-12;
  int ok = 0;
  double worst = 0.0;
  int const trials = 10;
  for (std::uint64_t seed = 1; seed <= trials; ++seed) {
    auto const mask = make_mask(gamma, MaskScheme::uniform, 2.0, seed);
    auto const r = giraf_solve(sample(truth, mask), mask, cfg, ic);
    double const e = oracle::rel(r.x.values(), truth.values());
    ok += e < 1e-6;
    worst = std::max(worst, e);
  }
  return {ok == trials, std::to_string(ok) + "/" + std::to_string(trials) + " masks recovered, worst rel error " +
                          fmt("%.1e", worst)};
}

/// Smallest Rayleigh quotient of Q from random starts refined by projected gradient steps.
double rayleigh_search(MatX const &Q, CounterRng &rng)
{
  VecX best;
  double bq = 1e300;
  auto quotient = [&](VecX const &h) { return h.dot(Q * h).real() / h.squaredNorm(); };
  for (int t = 0; t < 2000; ++t) {
    VecX const h = oracle::random_vec(Q.rows(), rng);
    if (double const q = quotient(h); q < bq) {
      bq = q;
      best = h.normalized();
    }
  }
  double const step = 1.0 / Q.cwiseAbs().rowwise().sum().maxCoeff();
  for (int t = 0; t < 20000; ++t) {
    best = (best - step * (Q * best - quotient(best) * best)).normalized();
  }
  return quotient(best);
}

Outcome theory_suite()
{
  std::ostringstream d;
  CounterRng rng(2);
  auto const edge = random_edge(IndexSet2D::rect(3, 3), rng);
  auto const g = normalized_gradient_coeffs(edge);
  double worst = 0.0;
  for (int f : {3, 5}) {
    auto const l1 = IndexSet2D::rect(f, f);
    auto const n = static_cast<Eigen::Index>(l1.size());
    // Q by quadrature; the integrand has degree below the raster size, so it is exact.
    int const m = 32;
    MatX Q = MatX::Zero(n, n);
    for (int a = 0; a < m; ++a) {
      for (int c = 0; c < m; ++c) {
        double const x = double(a) / m;
        double const y = double(c) / m;
        double const w = std::norm(oracle::trig_sum(edge.lambda0, g[0], x, y)) +
                         std::norm(oracle::trig_sum(edge.lambda0, g[1], x, y));
        VecX e(n);
        for (Eigen::Index k = 0; k < n; ++k) {
          auto const kk = l1[static_cast<std::size_t>(k)];
          e[k] = std::polar(1.0, oracle::kTwoPi * (kk.k1 * x + kk.k2 * y));
        }
        Q += (w / (m * m)) * e.conjugate() * e.transpose();
      }
    }
    double const lam = rho2(edge, l1).lambda_min;
    worst = std::max(worst, std::abs(rayleigh_search(Q, rng) - lam) / lam);
  }
  bool const rho_ok = worst < 1e-2;
  d << "rho2 vs Rayleigh search " << fmt("%.2e", worst);

  CounterRng srng(5);
  auto const sep = random_separable_edge(3, 3, srng);
  auto const lemma = subspace_lemma_check(separable_phantom_fourier(sep, 1.0, 0.25, IndexSet2D::rect(33, 33)),
                                          sep.edge(), IndexSet2D::rect(5, 5), 40, 9);
  bool const lemma_ok = lemma.contrast > 1e2;
  d << "; lemma contrast " << fmt("%.1e", lemma.contrast);

  CounterRng prng(3);
  auto const psep = random_separable_edge(3, 3, prng);
  auto const gamma = IndexSet2D::rect(17, 17);
  auto const truth = separable_phantom_fourier(psep, 1.0, 0.25, gamma);
  auto const lifting = LiftingConfig::make(gamma, IndexSet2D::rect(5, 5), {WeightingKind::gradient});
  PhaseConfig pc;
  pc.sample_counts = {8, 72, 108, 144, gamma.size()};
  pc.trials = 5;
  pc.solver.p = 0.0;
  pc.solver.op = OperatorMode::exact;
  pc.solver.max_outer = 40;
  pc.solver.convergence_tol = 1e-10;
  pc.solver.cg_tol = 1e-10;
  auto const t = phase_transition(truth, lifting, pc);
  bool const phase_ok = t.monotone && t.levels.front().fraction == 0.0 && t.levels.back().fraction == 1.0;
  d << "; phase success";
  for (auto const &l : t.levels) {
    d << " " << l.samples << ":" << l.successes << "/" << l.trials;
  }
  d << (t.monotone ? " (monotone)" : " (not monotone)");
  return {rho_ok && lemma_ok && phase_ok, d.str()};
}

} // namespace

int main(int argc, char **argv)
{
  std::vector<Criterion> const all{
    {"A1", "rank law", rank_law},
    {"A2", "operator oracle equivalence", operator_oracles},
    {"A3", "IRLS step equivalence", irls_step},
    {"A4", "GIRAF matches SVT at p=1", giraf_vs_svt},
    {"A5", "approximation quality", approximation_quality},
    {"A6", "recovery quality ordering", recovery_ordering},
    {"A7", "filter-size trend", filter_trend},
    {"A8", "exact FRI recovery", fri_recovery},
    {"A9", "theory suite", theory_suite},
  };
  std::set<std::string> const chosen(argv + 1, argv + argc);
  int failures = 0;
  for (auto const &c : all) {
    if (!chosen.empty() && chosen.count(c.id) == 0) {
      continue;
    }
    auto const t0 = Clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (std::exception const &e) {
      o = {false, std::string("error: ") + e.what()};
    }
    double const s = std::chrono::duration<double>(Clock::now() - t0).count();
    failures += !o.pass;
    std::cout << c.id << " " << (o.pass ? "PASS" : "FAIL") << " " << c.title << ": " << o.detail << " ["
              << fmt("%.1f", s) << " s]" << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
