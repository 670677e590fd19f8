#pragma once

#include <filesystem>
#include <iosfwd>

#include <Eigen/Core>

#include "giraf/fft.hpp"
#include "giraf/grid.hpp"

namespace giraf {

using VecX = Eigen::VectorXcd;

/// Complex Fourier samples defined on a rectangular index set gamma, with the
/// FFT grid on which circular convolutions of this data are carried out.
/// Values are stored in gamma's element order (row-major, k1 slow).
class KSpaceArray
{
public:
  KSpaceArray() = default;
  /// Zero array; the FFT grid defaults to gamma's extents.
  explicit KSpaceArray(IndexSet2D gamma);
  KSpaceArray(IndexSet2D gamma, GridShape grid);
  KSpaceArray(IndexSet2D gamma, GridShape grid, VecX values);

  IndexSet2D const &gamma() const { return gamma_; }
  GridShape grid() const { return grid_; }
  std::size_t size() const { return gamma_.size(); }

  VecX const &values() const { return values_; }
  VecX &values() { return values_; }

  Cx operator()(Index2 k) const { return values_[static_cast<Eigen::Index>(gamma_.index_of(k))]; }
  Cx &operator()(Index2 k) { return values_[static_cast<Eigen::Index>(gamma_.index_of(k))]; }

  double norm() const { return values_.norm(); }
  bool finite() const { return values_.allFinite(); }
  bool same_layout(KSpaceArray const &o) const { return gamma_ == o.gamma_ && grid_ == o.grid_; }

  KSpaceArray with_values(VecX v) const { return {gamma_, grid_, std::move(v)}; }

  friend KSpaceArray operator+(KSpaceArray const &a, KSpaceArray const &b);
  friend KSpaceArray operator-(KSpaceArray const &a, KSpaceArray const &b);
  friend KSpaceArray operator*(Cx s, KSpaceArray const &a);

private:
  IndexSet2D gamma_;
  GridShape grid_;
  VecX values_;
};

/// Flat grid positions (row-major on `grid`) of every element of `set`, each taken modulo the grid.
std::vector<std::size_t> grid_positions(IndexSet2D const &set, GridShape grid);

/// Spatial samples u(p/n) = sum_k x[k] e^{+j2pi k.p/n} on the FFT grid (row-major n1 x n2).
VecX to_image(KSpaceArray const &x);
/// Inverse of to_image when gamma fills the grid: x[k] = (1/n) sum_p u[p] e^{-j2pi k.p/n}.
KSpaceArray from_image(VecX const &image, IndexSet2D const &gamma, GridShape grid);

// Binary format, little-endian:
//   char[4] "GKSP", u32 n1, u32 n2, u32 flags
//   flags & 1: i32 lo1, i32 lo2 follow (gamma is not centered)
//   flags & 2: u32 g1, u32 g2 follow (FFT grid differs from gamma's extents)
//   then n1*n2 pairs of f64 (re, im) in row-major order.
void write_kspace(std::ostream &os, KSpaceArray const &x);
KSpaceArray read_kspace(std::istream &is);
void write_kspace(std::filesystem::path const &path, KSpaceArray const &x);
KSpaceArray read_kspace(std::filesystem::path const &path);
/// Debug export: one line per element "k1,k2,re,im".
void write_kspace_csv(std::ostream &os, KSpaceArray const &x);

} // namespace giraf
