#pragma once

#include <complex>
#include <cstdint>
#include <limits>

namespace giraf {

/// Counter-based generator: draw i of stream (seed, stream) is a pure
/// function of (seed, stream, i), so results do not depend on which thread
/// or in which order independent streams are consumed.
class CounterRng
{
public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  /// Uniform on [0, 1).
  double uniform();
  /// Uniform integer on [0, n).
  std::uint64_t below(std::uint64_t n);
  /// Standard normal (Box-Muller; no cached second value so the stream stays counter-addressable).
  double normal();
  std::complex<double> complex_normal();

  std::uint64_t counter() const { return counter_; }
  /// Independent child stream, e.g. one per Monte-Carlo trial.
  CounterRng split(std::uint64_t child) const;

private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

std::uint64_t splitmix64(std::uint64_t x);

} // namespace giraf
