#include "giraf/lifting.hpp"

#include <stdexcept>

namespace giraf {

double Weighting::weight(int block, Index2 k) const
{
  if (kind == WeightingKind::identity) {
    return 1.0;
  }
  return block == 0 ? static_cast<double>(k.k1) : static_cast<double>(k.k2);
}

Eigen::VectorXd Weighting::weights(int block, IndexSet2D const &set) const
{
  Eigen::VectorXd w(static_cast<Eigen::Index>(set.size()));
  for (std::size_t i = 0; i < set.size(); ++i) {
    w[static_cast<Eigen::Index>(i)] = weight(block, set[i]);
  }
  return w;
}

std::string to_string(WeightingKind kind)
{
  return kind == WeightingKind::gradient ? "gradient" : "identity";
}

WeightingKind weighting_from_string(std::string const &name)
{
  if (name == "identity") {
    return WeightingKind::identity;
  }
  if (name == "gradient") {
    return WeightingKind::gradient;
  }
  throw std::invalid_argument("unknown weighting '" + name + "' (expected identity|gradient)");
}

LiftingConfig LiftingConfig::make(IndexSet2D gamma, IndexSet2D lambda1, Weighting weighting,
                                  std::optional<GridShape> fft_grid)
{
  LiftingConfig cfg;
  cfg.lambda2 = valid_output_set(gamma, lambda1);
  cfg.fft_grid = fft_grid.value_or(GridShape{gamma.extent(0), gamma.extent(1)});
  cfg.gamma = std::move(gamma);
  cfg.lambda1 = std::move(lambda1);
  cfg.weighting = weighting;
  cfg.validate();
  return cfg;
}

void LiftingConfig::validate() const
{
  if (!gamma.rectangular() || !lambda1.rectangular() || !lambda2.rectangular()) {
    throw std::invalid_argument("lifting supports must be rectangular");
  }
  if (!(valid_output_set(gamma, lambda1) == lambda2)) {
    throw std::invalid_argument("lambda2 is not the valid output set of (gamma, lambda1)");
  }
  if (fft_grid.n1 < gamma.extent(0) || fft_grid.n2 < gamma.extent(1)) {
    throw std::invalid_argument("FFT grid " + format_extents({fft_grid.n1, fft_grid.n2}) +
                                " is too small for the alias-free valid region of gamma " +
                                format_extents(gamma.extents()));
  }
}

LiftingOperator::LiftingOperator(LiftingConfig cfg)
  : cfg_{std::move(cfg)}
  , fft_{cfg_.fft_grid}
{
  cfg_.validate();
  pos_gamma_ = grid_positions(cfg_.gamma, cfg_.fft_grid);
  pos_l1_ = grid_positions(cfg_.lambda1, cfg_.fft_grid);
  pos_l2_ = grid_positions(cfg_.lambda2, cfg_.fft_grid);
  for (int b = 0; b < cfg_.weighting.blocks(); ++b) {
    weights_.push_back(cfg_.weighting.weights(b, cfg_.gamma));
  }
}

void LiftingOperator::check_data(KSpaceArray const &x) const
{
  if (!(x.gamma() == cfg_.gamma)) {
    throw std::invalid_argument("k-space data is not defined on the lifting's gamma");
  }
}

void LiftingOperator::check_filter(VecX const &h) const
{
  if (h.size() != cfg_.cols()) {
    throw std::invalid_argument("filter length does not match lambda1");
  }
}

VecX LiftingOperator::filter_spectrum(VecX const &h) const
{
  check_filter(h);
  VecX buf = VecX::Zero(static_cast<Eigen::Index>(cfg_.fft_grid.size()));
  for (std::size_t i = 0; i < pos_l1_.size(); ++i) {
    buf[static_cast<Eigen::Index>(pos_l1_[i])] = h[static_cast<Eigen::Index>(i)];
  }
  fft_.forward({buf.data(), cfg_.fft_grid.size()});
  return buf;
}

VecX LiftingOperator::data_spectrum(KSpaceArray const &x, int block) const
{
  check_data(x);
  auto const &w = weights(block);
  VecX buf = VecX::Zero(static_cast<Eigen::Index>(cfg_.fft_grid.size()));
  for (std::size_t i = 0; i < pos_gamma_.size(); ++i) {
    auto const e = static_cast<Eigen::Index>(i);
    buf[static_cast<Eigen::Index>(pos_gamma_[i])] = w[e] * x.values()[e];
  }
  fft_.forward({buf.data(), cfg_.fft_grid.size()});
  return buf;
}

VecX LiftingOperator::apply(KSpaceArray const &x, VecX const &h) const
{
  VecX const hs = filter_spectrum(h);
  auto const n2 = static_cast<Eigen::Index>(cfg_.lambda2.size());
  VecX out(cfg_.rows());
  for (int b = 0; b < cfg_.weighting.blocks(); ++b) {
    VecX buf = data_spectrum(x, b).cwiseProduct(hs);
    fft_.inverse({buf.data(), cfg_.fft_grid.size()});
    for (Eigen::Index i = 0; i < n2; ++i) {
      out[b * n2 + i] = buf[static_cast<Eigen::Index>(pos_l2_[static_cast<std::size_t>(i)])];
    }
  }
  return out;
}

KSpaceArray LiftingOperator::adjoint(VecX const &v, VecX const &h) const
{
  if (v.size() != cfg_.rows()) {
    throw std::invalid_argument("adjoint input length does not match the lifted row count");
  }
  VecX const hs = filter_spectrum(h).conjugate();
  auto const n2 = static_cast<Eigen::Index>(cfg_.lambda2.size());
  KSpaceArray out(cfg_.gamma, cfg_.fft_grid);
  VecX buf(static_cast<Eigen::Index>(cfg_.fft_grid.size()));
  for (int b = 0; b < cfg_.weighting.blocks(); ++b) {
    buf.setZero();
    for (Eigen::Index i = 0; i < n2; ++i) {
      buf[static_cast<Eigen::Index>(pos_l2_[static_cast<std::size_t>(i)])] = v[b * n2 + i];
    }
    fft_.forward({buf.data(), cfg_.fft_grid.size()});
    buf.array() *= hs.array();
    fft_.inverse({buf.data(), cfg_.fft_grid.size()});
    auto const &w = weights(b);
    for (std::size_t i = 0; i < pos_gamma_.size(); ++i) {
      auto const e = static_cast<Eigen::Index>(i);
      out.values()[e] += w[e] * buf[static_cast<Eigen::Index>(pos_gamma_[i])];
    }
  }
  return out;
}

MatX LiftingOperator::gram(KSpaceArray const &x) const
{
  check_data(x);
  // G[k,k'] = sum_b sum_{m in lambda2 - k} conj(g_b[m]) g_b[m + d], d = k - k'.
  // For each d the products P_d[m] are integrated over the box lambda2 - k
  // with a summed-area table on gamma's box.
  auto const &g = cfg_.gamma;
  auto const &l1 = cfg_.lambda1;
  auto const &l2 = cfg_.lambda2;
  int const e1 = g.extent(0);
  int const e2 = g.extent(1);
  int const f1 = l1.extent(0);
  int const f2 = l1.extent(1);
  int const blocks = cfg_.weighting.blocks();

  std::vector<VecX> wx;
  for (int b = 0; b < blocks; ++b) {
    wx.emplace_back(weights(b).cast<Cx>().cwiseProduct(x.values()));
  }

  auto const n = static_cast<Eigen::Index>(l1.size());
  MatX G = MatX::Zero(n, n);
  std::vector<Cx> sat(static_cast<std::size_t>(e1 + 1) * static_cast<std::size_t>(e2 + 1));
  auto S = [&](int a, int b) -> Cx & {
    return sat[static_cast<std::size_t>(a) * static_cast<std::size_t>(e2 + 1) + static_cast<std::size_t>(b)];
  };

  for (int d1 = 0; d1 < f1; ++d1) {
    for (int d2 = -(f2 - 1); d2 < f2; ++d2) {
      if (d1 == 0 && d2 < 0) {
        continue;
      }
      // SAT over local coordinates a in [0,e1), b in [0,e2) of P_d.
      for (int a = 0; a <= e1; ++a) {
        S(a, 0) = 0.0;
      }
      for (int b = 0; b <= e2; ++b) {
        S(0, b) = 0.0;
      }
      for (int a = 0; a < e1; ++a) {
        Cx row{0.0, 0.0};
        for (int b = 0; b < e2; ++b) {
          int const a2 = a + d1;
          int const b2 = b + d2;
          if (a2 < e1 && b2 >= 0 && b2 < e2) {
            auto const i = static_cast<Eigen::Index>(a) * e2 + b;
            auto const j = static_cast<Eigen::Index>(a2) * e2 + b2;
            for (int blk = 0; blk < blocks; ++blk) {
              row += std::conj(wx[static_cast<std::size_t>(blk)][i]) * wx[static_cast<std::size_t>(blk)][j];
            }
          }
          S(a + 1, b + 1) = S(a, b + 1) + row;
        }
      }
      // Pairs (k, k') in lambda1 with k - k' = d.
      for (int p1 = std::max(0, d1); p1 < f1 && p1 - d1 < f1; ++p1) {
        for (int p2 = std::max(0, d2); p2 < f2 && p2 - d2 >= 0; ++p2) {
          if (p2 - d2 >= f2) {
            continue;
          }
          Index2 const k{l1.lo().k1 + p1, l1.lo().k2 + p2};
          // Window lambda2 - k in gamma-local coordinates.
          int const a0 = l2.lo().k1 - k.k1 - g.lo().k1;
          int const b0 = l2.lo().k2 - k.k2 - g.lo().k2;
          int const a1 = a0 + l2.extent(0);
          int const b1 = b0 + l2.extent(1);
          Cx const v = S(a1, b1) - S(a0, b1) - S(a1, b0) + S(a0, b0);
          auto const r = static_cast<Eigen::Index>(p1) * f2 + p2;
          auto const c = static_cast<Eigen::Index>(p1 - d1) * f2 + (p2 - d2);
          G(r, c) = v;
          G(c, r) = std::conj(v);
        }
      }
    }
  }
  return G;
}

MatX lift_dense(KSpaceArray const &x, LiftingConfig const &cfg)
{
  cfg.validate();
  if (!(x.gamma() == cfg.gamma)) {
    throw std::invalid_argument("k-space data is not defined on the lifting's gamma");
  }
  auto const n2 = static_cast<Eigen::Index>(cfg.lambda2.size());
  MatX T(cfg.rows(), cfg.cols());
  for (int b = 0; b < cfg.weighting.blocks(); ++b) {
    for (Eigen::Index r = 0; r < n2; ++r) {
      Index2 const l = cfg.lambda2[static_cast<std::size_t>(r)];
      for (Eigen::Index c = 0; c < cfg.cols(); ++c) {
        Index2 const m = l - cfg.lambda1[static_cast<std::size_t>(c)];
        T(b * n2 + r, c) = cfg.weighting.weight(b, m) * x(m);
      }
    }
  }
  return T;
}

VecX apply(KSpaceArray const &x, VecX const &h, LiftingConfig const &cfg)
{
  return LiftingOperator(cfg).apply(x, h);
}

KSpaceArray adjoint_apply(VecX const &v, VecX const &h, LiftingConfig const &cfg)
{
  return LiftingOperator(cfg).adjoint(v, h);
}

MatX gram_matrix(KSpaceArray const &x, LiftingConfig const &cfg)
{
  return LiftingOperator(cfg).gram(x);
}

} // namespace giraf
