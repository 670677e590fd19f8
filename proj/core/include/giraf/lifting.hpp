#pragma once

// Convolutional lifting T(x): rows indexed by (block, l in lambda2), columns by
// k in lambda1, entry w_b[l-k] * x[l-k]. T(x) h is the valid part of the
// linear convolution (w_b x) * h.

#include <optional>
#include <string>

#include <Eigen/Core>

#include "giraf/fft.hpp"
#include "giraf/grid.hpp"
#include "giraf/kspace.hpp"

namespace giraf {

using MatX = Eigen::MatrixXcd;

enum class WeightingKind
{
  identity,
  gradient,
};

/// k-space multiplier M. Gradient weighting uses w1[k] = k1, w2[k] = k2
/// (the -j2pi factor is dropped) and stacks the two blocks.
struct Weighting
{
  WeightingKind kind = WeightingKind::identity;

  int blocks() const { return kind == WeightingKind::gradient ? 2 : 1; }
  double weight(int block, Index2 k) const;
  /// Per-element weights of block `block` on `set`.
  Eigen::VectorXd weights(int block, IndexSet2D const &set) const;
};

std::string to_string(WeightingKind kind);
WeightingKind weighting_from_string(std::string const &name);

struct LiftingConfig
{
  IndexSet2D gamma;
  IndexSet2D lambda1;
  IndexSet2D lambda2;
  Weighting weighting;
  GridShape fft_grid;

  /// Builds a consistent config; lambda2 = valid_output_set(gamma, lambda1)
  /// and the FFT grid defaults to gamma's extents.
  static LiftingConfig make(IndexSet2D gamma, IndexSet2D lambda1, Weighting weighting = {},
                            std::optional<GridShape> fft_grid = std::nullopt);

  Eigen::Index rows() const { return static_cast<Eigen::Index>(weighting.blocks() * lambda2.size()); }
  Eigen::Index cols() const { return static_cast<Eigen::Index>(lambda1.size()); }
  void validate() const;
};

/// FFT-backed realization of the lifting for one configuration. Holds the
/// FFT plans and index maps; all methods are const and thread-safe.
class LiftingOperator
{
public:
  explicit LiftingOperator(LiftingConfig cfg);

  LiftingConfig const &config() const { return cfg_; }
  Fft2 const &fft() const { return fft_; }
  std::vector<std::size_t> const &gamma_positions() const { return pos_gamma_; }
  std::vector<std::size_t> const &lambda1_positions() const { return pos_l1_; }
  std::vector<std::size_t> const &lambda2_positions() const { return pos_l2_; }
  Eigen::VectorXd const &weights(int block) const { return weights_[static_cast<std::size_t>(block)]; }

  /// T(x) h, stacked by block (length rows()).
  VecX apply(KSpaceArray const &x, VecX const &h) const;
  /// T(.)^H applied to v for fixed filter h: returns x with <T(x)h, v> = <x, adjoint(v, h)>.
  KSpaceArray adjoint(VecX const &v, VecX const &h) const;
  /// T(x)^H T(x), exact.
  MatX gram(KSpaceArray const &x) const;

  /// Spectrum of h placed on the FFT grid (unnormalized forward transform).
  VecX filter_spectrum(VecX const &h) const;
  /// Spectrum of w_b x placed on the FFT grid.
  VecX data_spectrum(KSpaceArray const &x, int block) const;

private:
  void check_data(KSpaceArray const &x) const;
  void check_filter(VecX const &h) const;

  LiftingConfig cfg_;
  Fft2 fft_;
  std::vector<std::size_t> pos_gamma_;
  std::vector<std::size_t> pos_l1_;
  std::vector<std::size_t> pos_l2_;
  std::vector<Eigen::VectorXd> weights_;
};

/// Dense T(x), rows ordered (block, lambda2 element), columns lambda1 elements.
MatX lift_dense(KSpaceArray const &x, LiftingConfig const &cfg);

VecX apply(KSpaceArray const &x, VecX const &h, LiftingConfig const &cfg);
KSpaceArray adjoint_apply(VecX const &v, VecX const &h, LiftingConfig const &cfg);
MatX gram_matrix(KSpaceArray const &x, LiftingConfig const &cfg);

} // namespace giraf
