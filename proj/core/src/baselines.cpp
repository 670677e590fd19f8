#include "giraf/baselines.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include <Eigen/SVD>

#include "giraf/analysis.hpp"

namespace giraf {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

VecX embed_samples(VecX const &b, SamplingMask const &mask, IndexSet2D const &gamma)
{
  if (b.size() != static_cast<Eigen::Index>(mask.theta.size())) {
    throw std::invalid_argument("sample vector length does not match the mask");
  }
  VecX x = VecX::Zero(static_cast<Eigen::Index>(gamma.size()));
  for (std::size_t i = 0; i < mask.theta.size(); ++i) {
    x[static_cast<Eigen::Index>(gamma.index_of(mask.theta[i]))] = b[static_cast<Eigen::Index>(i)];
  }
  return x;
}

} // namespace

std::string to_string(SVTMethod m)
{
  return m == SVTMethod::proximal ? "proximal" : "admm";
}

SVTMethod svt_method_from_string(std::string const &name)
{
  if (name == "proximal") {
    return SVTMethod::proximal;
  }
  if (name == "admm") {
    return SVTMethod::admm;
  }
  throw std::invalid_argument("unknown SVT method '" + name + "' (expected proximal|admm)");
}

void SVTConfig::validate() const
{
  if (!(step > 0.0) || tau < 0.0 || !(tau_factor >= 0.0) || max_iter < 1 || tol < 0.0 || !(lambda > 0.0)) {
    throw std::invalid_argument("invalid SVT configuration");
  }
}

namespace {

/// Per-entry sums of conj(w) X and |w|^2 over the matrix locations holding a copy of x[k].
std::pair<VecX, Eigen::VectorXd> delift_sums(MatX const &X, LiftingConfig const &cfg)
{
  if (X.rows() != cfg.rows() || X.cols() != cfg.cols()) {
    throw std::invalid_argument("lifted matrix shape does not match the lifting");
  }
  auto const ng = static_cast<Eigen::Index>(cfg.gamma.size());
  auto const n2 = static_cast<Eigen::Index>(cfg.lambda2.size());
  VecX num = VecX::Zero(ng);
  Eigen::VectorXd den = Eigen::VectorXd::Zero(ng);
  for (int b = 0; b < cfg.weighting.blocks(); ++b) {
    for (Eigen::Index r = 0; r < n2; ++r) {
      Index2 const l = cfg.lambda2[static_cast<std::size_t>(r)];
      for (Eigen::Index c = 0; c < cfg.cols(); ++c) {
        Index2 const m = l - cfg.lambda1[static_cast<std::size_t>(c)];
        double const w = cfg.weighting.weight(b, m);
        auto const i = static_cast<Eigen::Index>(cfg.gamma.index_of(m));
        num[i] += w * X(b * n2 + r, c);
        den[i] += w * w;
      }
    }
  }
  return {std::move(num), std::move(den)};
}

} // namespace

DeliftResult delift(MatX const &X, LiftingConfig const &cfg, KSpaceArray const *fallback)
{
  auto const [num, den] = delift_sums(X, cfg);
  DeliftResult out{KSpaceArray(cfg.gamma, cfg.fft_grid), {}};
  for (Eigen::Index i = 0; i < num.size(); ++i) {
    if (den[i] > 0.0) {
      out.x.values()[i] = num[i] / den[i];
    } else {
      Index2 const k = cfg.gamma[static_cast<std::size_t>(i)];
      out.unrecoverable.push_back(k);
      out.x.values()[i] = fallback != nullptr ? (*fallback)(k) : Cx{0.0, 0.0};
    }
  }
  return out;
}

KSpaceArray zero_fill(VecX const &b, SamplingMask const &mask, IndexSet2D const &gamma)
{
  if (!mask.theta.is_subset_of(gamma)) {
    throw std::invalid_argument("sampling locations are not contained in gamma");
  }
  return {gamma, GridShape{gamma.extent(0), gamma.extent(1)}, embed_samples(b, mask, gamma)};
}

SolveResult svt_solve(VecX const &b, SamplingMask const &mask, LiftingConfig const &lifting, SVTConfig const &cfg,
                      KSpaceArray const *reference)
{
  auto const t_start = Clock::now();
  cfg.validate();
  lifting.validate();
  if (!(mask.gamma == lifting.gamma)) {
    throw std::invalid_argument("sampling mask and lifting use different gamma");
  }
  auto const entries = static_cast<std::size_t>(lifting.rows()) * static_cast<std::size_t>(lifting.cols());
  if (entries > cfg.max_dense_entries) {
    throw std::invalid_argument("lifted matrix has " + std::to_string(entries) + " entries, above the dense cap of " +
                                std::to_string(cfg.max_dense_entries) + "; use the giraf solver for this size");
  }
  if (!b.allFinite()) {
    throw std::invalid_argument("samples contain non-finite values");
  }

  VecX const b_emb = embed_samples(b, mask, lifting.gamma);
  Eigen::VectorXd const ind = mask.indicator();
  VecX const ind_c = ind.cast<Cx>();
  KSpaceArray x(lifting.gamma, lifting.fft_grid, b_emb);
  bool const admm = cfg.method == SVTMethod::admm;
  MatX U;

  SolveResult result;
  result.report.solver = "svt";
  double tau = cfg.tau;
  auto data_fit = [&](VecX const &v) { return ind_c.cwiseProduct(v - b_emb).squaredNorm(); };

  for (int it = 1; it <= cfg.max_iter; ++it) {
    IterationRecord rec;
    rec.iteration = it;
    auto const t_iter = Clock::now();

    auto t0 = Clock::now();
    MatX X;
    if (admm) {
      X = lift_dense(x, lifting);
      if (U.size() == 0) {
        U = MatX::Zero(X.rows(), X.cols());
      }
      X += U;
    } else {
      KSpaceArray z = x;
      if (!cfg.constrained()) {
        z.values() -= cfg.step * cfg.lambda * ind_c.cwiseProduct(x.values() - b_emb);
      }
      X = lift_dense(z, lifting);
    }
    double const lift_s = seconds_since(t0);

    t0 = Clock::now();
    Eigen::BDCSVD<MatX> svd(X, Eigen::ComputeThinU | Eigen::ComputeThinV);
    rec.decomp_s = seconds_since(t0);
    Eigen::VectorXd const sig = svd.singularValues();
    if (it == 1 && tau == 0.0) {
      tau = cfg.tau_factor * (sig.size() > 0 ? sig[0] : 0.0);
    }
    double const thr = admm ? tau : cfg.step * tau;
    rec.eps = thr;
    rec.spectrum_max = sig.size() > 0 ? sig.maxCoeff() : 0.0;
    rec.spectrum_min = sig.size() > 0 ? sig.minCoeff() : 0.0;

    t0 = Clock::now();
    Eigen::Index r = 0;
    while (r < sig.size() && sig[r] > thr) {
      ++r;
    }
    Eigen::VectorXd const shrunk = (sig.head(r).array() - thr).matrix();
    MatX Y = svd.matrixU().leftCols(r) * shrunk.asDiagonal() * svd.matrixV().leftCols(r).adjoint();
    rec.penalty = shrunk.sum();
    VecX x_new;
    if (admm) {
      // argmin_x ||T(x) - (Y - U)||^2 / (2 tau) + (lambda / 2) ||P x - b||^2, entrywise.
      auto const [num, den] = delift_sums(Y - U, lifting);
      x_new = x.values();
      for (Eigen::Index i = 0; i < x_new.size(); ++i) {
        if (ind[i] > 0.0 && (cfg.constrained() || den[i] == 0.0)) {
          x_new[i] = b_emb[i];
        } else if (ind[i] > 0.0) {
          x_new[i] = (num[i] + tau * cfg.lambda * b_emb[i]) / (den[i] + tau * cfg.lambda);
        } else if (den[i] > 0.0) {
          x_new[i] = num[i] / den[i];
        }
      }
      KSpaceArray const xa(lifting.gamma, lifting.fft_grid, x_new);
      U += lift_dense(xa, lifting) - Y;
    } else {
      KSpaceArray const fallback = x;
      auto d = delift(Y, lifting, &fallback);
      x_new = std::move(d.x.values());
      if (cfg.constrained()) {
        x_new = ind_c.cwiseProduct(b_emb) + (VecX::Ones(x_new.size()) - ind_c).cwiseProduct(x_new);
      }
    }
    if (!x_new.allFinite()) {
      throw std::runtime_error("SVT iterate became non-finite at iteration " + std::to_string(it));
    }
    rec.solve_s = lift_s + seconds_since(t0);
    rec.objective = tau * rec.penalty + (cfg.constrained() ? 0.0 : 0.5 * cfg.lambda * data_fit(x_new));

    double const xn = x.norm();
    rec.relative_change = xn > 0.0 ? (x_new - x.values()).norm() / xn : (x_new - x.values()).norm();
    x.values() = std::move(x_new);
    rec.data_fit = data_fit(x.values());
    if (reference != nullptr) {
      rec.mse = mse(x, *reference);
      rec.snr_db = snr_db(x, *reference);
    }
    rec.total_s = seconds_since(t_iter);
    result.report.iterations.push_back(rec);
    if (cfg.tol > 0.0 && rec.relative_change < cfg.tol) {
      result.report.converged = true;
      break;
    }
  }
  if (cfg.tol == 0.0) {
    result.report.converged = true;
  }
  result.x = std::move(x);
  if (reference != nullptr) {
    result.report.final_mse = mse(result.x, *reference);
    result.report.final_snr_db = snr_db(result.x, *reference);
  }
  result.report.total_s = seconds_since(t_start);
  return result;
}

KSpaceArray tv_solve(VecX const &b, SamplingMask const &mask, IndexSet2D const &gamma, double weight, int iters)
{
  if (!(weight > 0.0)) {
    throw std::invalid_argument("TV data weight must be positive");
  }
  if (iters < 0) {
    throw std::invalid_argument("TV iteration count must be non-negative");
  }
  GridShape const grid{gamma.extent(0), gamma.extent(1)};
  auto const n = static_cast<Eigen::Index>(grid.size());
  double const nd = static_cast<double>(grid.size());
  int const n1 = grid.n1;
  int const n2 = grid.n2;
  KSpaceArray const x0 = zero_fill(b, mask, gamma);
  VecX const b_emb = x0.values();
  Eigen::VectorXd const ind = mask.indicator();
  auto const pos = grid_positions(gamma, grid);
  Fft2 const fft(grid);

  auto at = [n2](int a, int c) { return static_cast<Eigen::Index>(a) * n2 + c; };
  auto grad = [&](VecX const &u, VecX &gx, VecX &gy) {
    for (int a = 0; a < n1; ++a) {
      for (int c = 0; c < n2; ++c) {
        gx[at(a, c)] = u[at((a + 1) % n1, c)] - u[at(a, c)];
        gy[at(a, c)] = u[at(a, (c + 1) % n2)] - u[at(a, c)];
      }
    }
  };
  // Negative adjoint of grad.
  auto div = [&](VecX const &px, VecX const &py, VecX &out) {
    for (int a = 0; a < n1; ++a) {
      for (int c = 0; c < n2; ++c) {
        out[at(a, c)] = px[at(a, c)] - px[at((a + n1 - 1) % n1, c)] + py[at(a, c)] - py[at(a, (c + n2 - 1) % n2)];
      }
    }
  };
  // Closed-form prox of (tau*weight/2)||P F u - b||^2: F = FFT/n is a scaled unitary map.
  auto prox_data = [&](VecX &u, double tau) {
    fft.forward({u.data(), grid.size()});
    u /= nd;
    double const s = tau * weight / nd;
    for (std::size_t i = 0; i < pos.size(); ++i) {
      auto const gi = static_cast<Eigen::Index>(i);
      if (ind[gi] > 0.0) {
        auto const p = static_cast<Eigen::Index>(pos[i]);
        u[p] = (u[p] + s * b_emb[gi]) / (1.0 + s);
      }
    }
    fft.inverse_unnormalized({u.data(), grid.size()});
  };

  VecX u = to_image(x0);
  VecX ubar = u;
  VecX px = VecX::Zero(n);
  VecX py = VecX::Zero(n);
  VecX gx(n);
  VecX gy(n);
  VecX dv(n);
  double const step = 0.99 / std::sqrt(8.0);
  for (int it = 0; it < iters; ++it) {
    grad(ubar, gx, gy);
    px += step * gx;
    py += step * gy;
    for (Eigen::Index i = 0; i < n; ++i) {
      double const mag = std::sqrt(std::norm(px[i]) + std::norm(py[i]));
      if (mag > 1.0) {
        px[i] /= mag;
        py[i] /= mag;
      }
    }
    div(px, py, dv);
    VecX u_new = u + step * dv;
    prox_data(u_new, step);
    ubar = 2.0 * u_new - u;
    u = std::move(u_new);
  }
  return from_image(u, gamma, grid);
}

} // namespace giraf
