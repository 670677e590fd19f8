#pragma once

// Index-set algebra on the 2-D integer frequency grid.

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace giraf {

/// A frequency index (k1, k2). Ordering is lexicographic, which is the
/// row-major order used for every flattened array in the library.
struct Index2
{
  int k1 = 0;
  int k2 = 0;

  friend auto operator<=>(Index2 const &, Index2 const &) = default;
  friend Index2 operator+(Index2 a, Index2 b) { return {a.k1 + b.k1, a.k2 + b.k2}; }
  friend Index2 operator-(Index2 a, Index2 b) { return {a.k1 - b.k1, a.k2 - b.k2}; }
  friend Index2 operator-(Index2 a) { return {-a.k1, -a.k2}; }
};

/// Dimensions of the FFT grid used for circular convolutions.
struct GridShape
{
  int n1 = 0;
  int n2 = 0;

  std::size_t size() const { return static_cast<std::size_t>(n1) * static_cast<std::size_t>(n2); }
  /// Flat row-major offset of the grid cell holding frequency k (taken modulo the grid).
  std::size_t position(Index2 k) const;

  friend bool operator==(GridShape const &, GridShape const &) = default;
};

/// Parses "WxH" (e.g. "15x15") into a pair of positive extents.
std::array<int, 2> parse_extents(std::string const &text);
std::string format_extents(std::array<int, 2> extents);

/// Finite subset of Z^2.
///
/// Elements are kept unique and sorted lexicographically. Sets built with
/// `rect` (or lists that happen to fill their bounding box) are flagged
/// rectangular; for those `index_of` is O(1).
///
/// Centered convention: an axis of extent e spans ceil(-e/2) .. floor((e-1)/2).
class IndexSet2D
{
public:
  IndexSet2D() = default;

  static IndexSet2D rect(int e1, int e2);
  static IndexSet2D rect(std::array<int, 2> extents) { return rect(extents[0], extents[1]); }
  static IndexSet2D rect(int e1, int e2, Index2 lo);
  static IndexSet2D list(std::vector<Index2> elements);

  static int centered_low(int extent);

  bool empty() const { return elements_.empty(); }
  std::size_t size() const { return elements_.size(); }
  bool rectangular() const { return rectangular_; }
  bool centered() const;

  Index2 lo() const { return lo_; }
  Index2 hi() const { return hi_; }
  int extent(int axis) const;
  std::array<int, 2> extents() const { return {extent(0), extent(1)}; }

  std::vector<Index2> const &elements() const { return elements_; }
  Index2 operator[](std::size_t i) const { return elements_[i]; }
  auto begin() const { return elements_.begin(); }
  auto end() const { return elements_.end(); }

  bool contains(Index2 k) const;
  std::optional<std::size_t> find(Index2 k) const;
  /// Position of k in element order; throws std::out_of_range when absent.
  std::size_t index_of(Index2 k) const;
  bool is_subset_of(IndexSet2D const &other) const;

  IndexSet2D reflected() const;
  IndexSet2D translated(Index2 shift) const;

  friend bool operator==(IndexSet2D const &a, IndexSet2D const &b) { return a.elements_ == b.elements_; }

private:
  void finalize();

  std::vector<Index2> elements_;
  Index2 lo_{0, 0};
  Index2 hi_{-1, -1};
  bool rectangular_ = false;
};

void to_json(nlohmann::json &j, IndexSet2D const &s);
void from_json(nlohmann::json const &j, IndexSet2D &s);

/// Minkowski sum {x + y : x in a, y in b}.
IndexSet2D dilate(IndexSet2D const &a, IndexSet2D const &b);

/// Output set of the valid (non-aliased) convolution of Gamma-supported data
/// with a filter on lambda1: { l : l - k in gamma for all k in lambda1 }.
/// Extents are |gamma|_i - |lambda1|_i + 1 and dilate(reflect(lambda1), result)
/// reproduces gamma; for centered odd-extent filters this is also
/// dilate(lambda1, result).
IndexSet2D valid_output_set(IndexSet2D const &gamma, IndexSet2D const &lambda1);

/// Number of integer shifts of lambda0 contained in lambda1 (0 when lambda0 does not fit).
std::int64_t count_shifts(IndexSet2D const &lambda1, IndexSet2D const &lambda0);

/// |lambda1| - count_shifts(lambda1, lambda0): rank of the gradient-weighted
/// lifting of a piecewise-constant image whose minimal edge polynomial lives on lambda0.
std::int64_t prop1_rank(IndexSet2D const &lambda1, IndexSet2D const &lambda0);

/// True when gamma's extents cover those of 2*lambda1 (+) lambda0, the size
/// condition under which prop1_rank is the exact rank.
bool rank_formula_applies(IndexSet2D const &gamma, IndexSet2D const &lambda1, IndexSet2D const &lambda0);

} // namespace giraf
