#pragma once

#include <complex>
#include <memory>
#include <span>

#include "giraf/grid.hpp"

namespace giraf {

using Cx = std::complex<double>;

/// In-place 2-D DFT on a fixed grid, backed by FFTW.
///
/// Plans are created once (planning is serialized internally) and executed
/// through FFTW's new-array interface, so one Fft2 may be shared by threads
/// as long as each call works on its own buffer.
///
/// forward: X[k] = sum_p x[p] e^{-j2pi k.p/n}          (unnormalized)
/// inverse: x[p] = (1/n) sum_k X[k] e^{+j2pi k.p/n}
class Fft2
{
public:
  explicit Fft2(GridShape shape);

  GridShape shape() const { return shape_; }

  void forward(std::span<Cx> data) const;
  void inverse(std::span<Cx> data) const;
  /// Inverse transform without the 1/n factor: evaluates the trigonometric
  /// polynomial sum_k X[k] e^{+j2pi k.r} at the grid points r = p/n.
  void inverse_unnormalized(std::span<Cx> data) const;

private:
  struct Plans;
  GridShape shape_;
  std::shared_ptr<Plans const> plans_;
};

} // namespace giraf
