#include "giraf/irls.hpp"

#include <chrono>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "detail/parallel.hpp"
#include "giraf/analysis.hpp"

namespace giraf {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double smoothed_penalty(Eigen::VectorXd const &eig, double eps, double p)
{
  double s = 0.0;
  for (Eigen::Index i = 0; i < eig.size(); ++i) {
    double const v = std::max(eig[i], 0.0) + eps;
    s += p > 0.0 ? std::pow(v, 0.5 * p) / p : 0.5 * std::log(v);
  }
  return s;
}

} // namespace

std::string to_string(OperatorMode m)
{
  return m == OperatorMode::exact ? "exact" : "approx";
}

OperatorMode operator_mode_from_string(std::string const &name)
{
  if (name == "exact") {
    return OperatorMode::exact;
  }
  if (name == "approx" || name == "approximate") {
    return OperatorMode::approximate;
  }
  throw std::invalid_argument("unknown operator '" + name + "' (expected exact|approx)");
}

void IRLSConfig::validate() const
{
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("p must lie in [0, 1]");
  }
  if (!(lambda > 0.0)) {
    throw std::invalid_argument("lambda must be positive (inf for exact data consistency)");
  }
  if (!(eps0_factor > 0.0) || !(eps_decay > 1.0) || !(eps_min_factor > 0.0)) {
    throw std::invalid_argument("eps schedule needs eps0_factor > 0, eps_decay > 1, eps_min_factor > 0");
  }
  if (max_outer < 1 || cg_max < 1 || !(cg_tol > 0.0) || !(convergence_tol > 0.0)) {
    throw std::invalid_argument("iteration caps and tolerances must be positive");
  }
}

MatX WeightUpdate::filters() const
{
  MatX h = eigenvectors;
  for (Eigen::Index i = 0; i < h.cols(); ++i) {
    h.col(i) *= std::sqrt(alpha[i]);
  }
  return h;
}

double schatten_penalty(Eigen::VectorXd const &sigmas, double p)
{
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("schatten_penalty: p must lie in [0, 1]");
  }
  if ((sigmas.array() < 0.0).any()) {
    throw std::invalid_argument("schatten_penalty: singular values must be non-negative");
  }
  if (p == 0.0) {
    if ((sigmas.array() == 0.0).any()) {
      return -std::numeric_limits<double>::infinity();
    }
    return sigmas.array().log().sum();
  }
  return sigmas.array().pow(p).sum() / p;
}

AnnihilatingMask mask_from_filters(MatX const &v, Eigen::VectorXd const &alpha, IndexSet2D const &lambda1,
                                   GridShape grid, int threads)
{
  if (v.rows() != static_cast<Eigen::Index>(lambda1.size()) || alpha.size() != v.cols()) {
    throw std::invalid_argument("filter bank does not match lambda1");
  }
  Fft2 const fft(grid);
  auto const pos = grid_positions(lambda1, grid);
  auto const n = static_cast<std::size_t>(v.cols());
  auto const size = static_cast<Eigen::Index>(grid.size());
  std::vector<Eigen::VectorXd> partial(detail::chunk_count(n, threads), Eigen::VectorXd::Zero(size));
  detail::parallel_chunks(n, threads, [&](std::size_t b, std::size_t e, std::size_t c) {
    VecX buf(size);
    for (std::size_t i = b; i < e; ++i) {
      buf.setZero();
      for (std::size_t k = 0; k < pos.size(); ++k) {
        buf[static_cast<Eigen::Index>(pos[k])] += v(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i));
      }
      fft.inverse_unnormalized({buf.data(), grid.size()});
      partial[c] += alpha[static_cast<Eigen::Index>(i)] * buf.cwiseAbs2();
    }
  });
  AnnihilatingMask mask{grid, Eigen::VectorXd::Zero(size)};
  for (auto const &p : partial) {
    mask.values += p;
  }
  return mask;
}

namespace {

Eigen::SelfAdjointEigenSolver<MatX> decompose(MatX const &gram)
{
  Eigen::SelfAdjointEigenSolver<MatX> es(0.5 * (gram + gram.adjoint()));
  if (es.info() != Eigen::Success || !es.eigenvalues().allFinite()) {
    throw std::runtime_error("weight_update: eigen-decomposition failed or produced non-finite values");
  }
  return es;
}

WeightUpdate from_eigen(Eigen::SelfAdjointEigenSolver<MatX> const &es, double eps, double p,
                        IndexSet2D const &lambda1, GridShape grid, int threads)
{
  if (!(eps > 0.0)) {
    throw std::invalid_argument("weight_update: eps must be positive");
  }
  WeightUpdate out;
  out.eigenvalues = es.eigenvalues();
  out.eigenvectors = es.eigenvectors();
  out.alpha.resize(out.eigenvalues.size());
  for (Eigen::Index i = 0; i < out.alpha.size(); ++i) {
    out.alpha[i] = std::pow(std::max(out.eigenvalues[i], 0.0) + eps, 0.5 * p - 1.0);
  }
  out.mask = mask_from_filters(out.eigenvectors, out.alpha, lambda1, grid, threads);
  return out;
}

} // namespace

WeightUpdate weight_update(MatX const &gram, double eps, double p, IndexSet2D const &lambda1, GridShape grid,
                           int threads)
{
  if (!(eps > 0.0)) {
    throw std::invalid_argument("weight_update: eps must be positive");
  }
  return from_eigen(decompose(gram), eps, p, lambda1, grid, threads);
}

ApproxNormal::ApproxNormal(LiftingOperator const &op, AnnihilatingMask mask)
  : op_{op}
  , mask_{std::move(mask)}
{
  if (mask_.grid != op_.config().fft_grid || static_cast<std::size_t>(mask_.values.size()) != mask_.grid.size()) {
    throw std::invalid_argument("annihilating mask grid does not match the lifting's FFT grid");
  }
}

VecX ApproxNormal::regularizer(VecX const &x) const
{
  auto const &cfg = op_.config();
  auto const &pos = op_.gamma_positions();
  auto const size = cfg.fft_grid.size();
  VecX y = VecX::Zero(x.size());
  VecX buf(static_cast<Eigen::Index>(size));
  for (int b = 0; b < cfg.weighting.blocks(); ++b) {
    auto const &w = op_.weights(b);
    buf.setZero();
    for (std::size_t i = 0; i < pos.size(); ++i) {
      buf[static_cast<Eigen::Index>(pos[i])] = w[static_cast<Eigen::Index>(i)] * x[static_cast<Eigen::Index>(i)];
    }
    op_.fft().inverse({buf.data(), size});
    buf.array() *= mask_.values.array();
    op_.fft().forward({buf.data(), size});
    for (std::size_t i = 0; i < pos.size(); ++i) {
      y[static_cast<Eigen::Index>(i)] += w[static_cast<Eigen::Index>(i)] * buf[static_cast<Eigen::Index>(pos[i])];
    }
  }
  return y;
}

ExactNormal::ExactNormal(LiftingOperator const &op, MatX filters, std::size_t cache_bytes, int threads)
  : op_{op}
  , filters_{std::move(filters)}
  , threads_{threads}
{
  if (filters_.rows() != op_.config().cols()) {
    throw std::invalid_argument("filter length does not match lambda1");
  }
  auto const need = static_cast<std::size_t>(filters_.cols()) * op_.config().fft_grid.size() * sizeof(Cx);
  if (need <= cache_bytes) {
    cache_.reserve(static_cast<std::size_t>(filters_.cols()));
    for (Eigen::Index i = 0; i < filters_.cols(); ++i) {
      cache_.push_back(op_.filter_spectrum(filters_.col(i)));
    }
  }
}

VecX ExactNormal::spectrum(Eigen::Index i) const
{
  if (!cache_.empty()) {
    return cache_[static_cast<std::size_t>(i)];
  }
  return op_.filter_spectrum(filters_.col(i));
}

VecX ExactNormal::regularizer(VecX const &x) const
{
  auto const &cfg = op_.config();
  auto const size = cfg.fft_grid.size();
  auto const esize = static_cast<Eigen::Index>(size);
  int const blocks = cfg.weighting.blocks();
  KSpaceArray const xa(cfg.gamma, cfg.fft_grid, x);

  std::vector<VecX> spec;
  for (int b = 0; b < blocks; ++b) {
    spec.push_back(op_.data_spectrum(xa, b));
  }
  Eigen::VectorXd keep = Eigen::VectorXd::Zero(esize);
  for (auto const p : op_.lambda2_positions()) {
    keep[static_cast<Eigen::Index>(p)] = 1.0;
  }

  auto const n = static_cast<std::size_t>(filters_.cols());
  auto const chunks = detail::chunk_count(n, threads_);
  std::vector<std::vector<VecX>> acc(chunks, std::vector<VecX>(static_cast<std::size_t>(blocks), VecX::Zero(esize)));
  detail::parallel_chunks(n, threads_, [&](std::size_t lo, std::size_t hi, std::size_t c) {
    VecX buf(esize);
    for (std::size_t i = lo; i < hi; ++i) {
      VecX const h = spectrum(static_cast<Eigen::Index>(i));
      for (int b = 0; b < blocks; ++b) {
        buf = spec[static_cast<std::size_t>(b)].cwiseProduct(h);
        op_.fft().inverse({buf.data(), size});
        buf.array() *= keep.array();
        op_.fft().forward({buf.data(), size});
        acc[c][static_cast<std::size_t>(b)].array() += h.array().conjugate() * buf.array();
      }
    }
  });

  VecX y = VecX::Zero(x.size());
  auto const &pos = op_.gamma_positions();
  for (int b = 0; b < blocks; ++b) {
    VecX total = VecX::Zero(esize);
    for (std::size_t c = 0; c < chunks; ++c) {
      total += acc[c][static_cast<std::size_t>(b)];
    }
    op_.fft().inverse({total.data(), size});
    auto const &w = op_.weights(b);
    for (std::size_t i = 0; i < pos.size(); ++i) {
      y[static_cast<Eigen::Index>(i)] += w[static_cast<Eigen::Index>(i)] * total[static_cast<Eigen::Index>(pos[i])];
    }
  }
  return y;
}

KSpaceArray normal_apply_approx(KSpaceArray const &x, AnnihilatingMask const &mask, LiftingConfig const &cfg,
                                double lambda, SamplingMask const &theta)
{
  LiftingOperator const op(cfg);
  ApproxNormal const q(op, mask);
  VecX y = q.regularizer(x.values());
  y += lambda * theta.indicator().cast<Cx>().cwiseProduct(x.values());
  return x.with_values(std::move(y));
}

KSpaceArray normal_apply_exact(KSpaceArray const &x, MatX const &filters, LiftingConfig const &cfg, double lambda,
                               SamplingMask const &theta)
{
  LiftingOperator const op(cfg);
  ExactNormal const q(op, filters);
  VecX y = q.regularizer(x.values());
  y += lambda * theta.indicator().cast<Cx>().cwiseProduct(x.values());
  return x.with_values(std::move(y));
}

CGResult conjugate_gradient(std::function<VecX(VecX const &)> const &A, VecX const &b, VecX &x, double tol,
                            int max_iter)
{
  CGResult res;
  double const bnorm = b.norm();
  if (x.size() != b.size()) {
    x = VecX::Zero(b.size());
  }
  if (bnorm == 0.0) {
    x.setZero();
    res.converged = true;
    return res;
  }
  VecX r = b - A(x);
  double rs = r.squaredNorm();
  res.relative_residual = std::sqrt(rs) / bnorm;
  if (res.relative_residual < tol) {
    res.converged = true;
    return res;
  }
  VecX p = r;
  for (int it = 1; it <= max_iter; ++it) {
    VecX const Ap = A(p);
    double const pAp = p.dot(Ap).real();
    if (!(pAp > 0.0)) {
      break;
    }
    double const alpha = rs / pAp;
    x += alpha * p;
    r -= alpha * Ap;
    double const rs_new = r.squaredNorm();
    res.iterations = it;
    res.relative_residual = std::sqrt(rs_new) / bnorm;
    if (res.relative_residual < tol) {
      res.converged = true;
      break;
    }
    p = r + (rs_new / rs) * p;
    rs = rs_new;
  }
  return res;
}

SolveResult giraf_solve(VecX const &b, SamplingMask const &mask, LiftingConfig const &lifting, IRLSConfig const &cfg,
                        KSpaceArray const *reference)
{
  auto const t_start = Clock::now();
  cfg.validate();
  lifting.validate();
  if (!(mask.gamma == lifting.gamma)) {
    throw std::invalid_argument("sampling mask and lifting use different gamma");
  }
  if (b.size() != static_cast<Eigen::Index>(mask.theta.size())) {
    throw std::invalid_argument("sample vector length does not match the mask");
  }
  if (!b.allFinite()) {
    throw std::invalid_argument("samples contain non-finite values");
  }

  LiftingOperator const op(lifting);
  auto const n = static_cast<Eigen::Index>(lifting.gamma.size());
  Eigen::VectorXd const ind = mask.indicator();
  VecX const ind_c = ind.cast<Cx>();
  VecX const free_c = (1.0 - ind.array()).matrix().cast<Cx>();

  VecX b_emb = VecX::Zero(n);
  for (std::size_t i = 0; i < mask.theta.size(); ++i) {
    b_emb[static_cast<Eigen::Index>(lifting.gamma.index_of(mask.theta[i]))] = b[static_cast<Eigen::Index>(i)];
  }
  VecX x = b_emb;

  SolveResult result;
  result.report.solver = "giraf";
  auto data_fit = [&](VecX const &v) { return ind_c.cwiseProduct(v - b_emb).squaredNorm(); };

  double eps = 0.0;
  double eps_min = 0.0;
  for (int it = 1; it <= cfg.max_outer; ++it) {
    IterationRecord rec;
    rec.iteration = it;
    auto const t_iter = Clock::now();

    auto t0 = Clock::now();
    KSpaceArray const xa(lifting.gamma, lifting.fft_grid, x);
    MatX const G = op.gram(xa);
    rec.gram_s = seconds_since(t0);

    t0 = Clock::now();
    auto const es = decompose(G);
    rec.decomp_s = seconds_since(t0);
    auto const t_mask = Clock::now();
    if (it == 1) {
      double const lmax = es.eigenvalues().maxCoeff();
      if (!(lmax > 0.0)) {
        result.report.warnings.emplace_back("lifted zero-filled data is zero; returning it unchanged");
        break;
      }
      eps = cfg.eps0_factor * lmax;
      eps_min = cfg.eps_min_factor * lmax;
    }
    WeightUpdate const wu = from_eigen(es, eps, cfg.p, lifting.lambda1, lifting.fft_grid, cfg.threads);
    rec.eps = eps;
    rec.spectrum_min = wu.eigenvalues.minCoeff();
    rec.spectrum_max = wu.eigenvalues.maxCoeff();
    Eigen::VectorXd const sig = wu.eigenvalues.cwiseMax(0.0).cwiseSqrt();
    rec.penalty = schatten_penalty(sig, cfg.p);
    rec.objective = smoothed_penalty(wu.eigenvalues, eps, cfg.p);
    if (!cfg.constrained()) {
      rec.objective += 0.5 * cfg.lambda * data_fit(x);
    }

    std::function<VecX(VecX const &)> Q;
    std::optional<ApproxNormal> approx;
    std::optional<ExactNormal> exact;
    if (cfg.op == OperatorMode::approximate) {
      approx.emplace(op, wu.mask);
      Q = [&](VecX const &v) { return approx->regularizer(v); };
    } else {
      exact.emplace(op, wu.filters(), cfg.filter_cache_bytes, cfg.threads);
      Q = [&](VecX const &v) { return exact->regularizer(v); };
    }
    rec.mask_s = seconds_since(t_mask);

    auto surrogate = [&](VecX const &v) {
      double s = v.dot(Q(v)).real();
      if (!cfg.constrained()) {
        s += cfg.lambda * data_fit(v);
      }
      return s;
    };

    t0 = Clock::now();
    rec.surrogate_before = surrogate(x);
    VecX x_new;
    CGResult cg;
    if (cfg.constrained()) {
      auto A = [&](VecX const &z) -> VecX { return free_c.cwiseProduct(Q(free_c.cwiseProduct(z))); };
      VecX const rhs = -free_c.cwiseProduct(Q(b_emb));
      VecX z = free_c.cwiseProduct(x);
      cg = conjugate_gradient(A, rhs, z, cfg.cg_tol, cfg.cg_max);
      x_new = b_emb + free_c.cwiseProduct(z);
    } else {
      auto A = [&](VecX const &v) -> VecX { return Q(v) + cfg.lambda * ind_c.cwiseProduct(v); };
      VecX const rhs = cfg.lambda * b_emb;
      x_new = x;
      cg = conjugate_gradient(A, rhs, x_new, cfg.cg_tol, cfg.cg_max);
    }
    if (!x_new.allFinite()) {
      throw std::runtime_error("GIRAF iterate became non-finite at iteration " + std::to_string(it));
    }
    rec.surrogate_after = surrogate(x_new);
    rec.solve_s = seconds_since(t0);
    rec.cg_iterations = cg.iterations;
    rec.cg_residual = cg.relative_residual;
    rec.cg_converged = cg.converged;
    if (!cg.converged) {
      result.report.warnings.push_back("CG did not reach tolerance at iteration " + std::to_string(it) +
                                       " (relative residual " + std::to_string(cg.relative_residual) + ")");
    }

    double const xn = x.norm();
    rec.relative_change = xn > 0.0 ? (x_new - x).norm() / xn : (x_new - x).norm();
    x = std::move(x_new);
    rec.data_fit = data_fit(x);
    if (reference != nullptr) {
      KSpaceArray const cur(lifting.gamma, lifting.fft_grid, x);
      rec.mse = mse(cur, *reference);
      rec.snr_db = snr_db(cur, *reference);
    }
    rec.total_s = seconds_since(t_iter);
    result.report.iterations.push_back(rec);

    if (rec.relative_change < cfg.convergence_tol) {
      result.report.converged = true;
      break;
    }
    eps = std::max(eps / cfg.eps_decay, eps_min);
  }

  result.x = KSpaceArray(lifting.gamma, lifting.fft_grid, x);
  if (reference != nullptr) {
    result.report.final_mse = mse(result.x, *reference);
    result.report.final_snr_db = snr_db(result.x, *reference);
  }
  result.report.total_s = seconds_since(t_start);
  return result;
}

} // namespace giraf
