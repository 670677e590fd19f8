#include "giraf/fft.hpp"

#include <mutex>
#include <stdexcept>
#include <vector>

#include <fftw3.h>

namespace giraf {

namespace {

std::mutex &planner_mutex()
{
  static std::mutex m;
  return m;
}

} // namespace

struct Fft2::Plans
{
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;

  explicit Plans(GridShape s)
  {
    std::vector<Cx> scratch(s.size());
    auto *p = reinterpret_cast<fftw_complex *>(scratch.data());
    std::lock_guard lock(planner_mutex());
    unsigned const flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fwd = fftw_plan_dft_2d(s.n1, s.n2, p, p, FFTW_FORWARD, flags);
    bwd = fftw_plan_dft_2d(s.n1, s.n2, p, p, FFTW_BACKWARD, flags);
    if (fwd == nullptr || bwd == nullptr) {
      throw std::runtime_error("FFTW planning failed");
    }
  }

  ~Plans()
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(bwd);
  }

  Plans(Plans const &) = delete;
  Plans &operator=(Plans const &) = delete;
};

Fft2::Fft2(GridShape shape)
  : shape_{shape}
{
  if (shape.n1 <= 0 || shape.n2 <= 0) {
    throw std::invalid_argument("Fft2: grid dimensions must be positive");
  }
  plans_ = std::make_shared<Plans const>(shape);
}

void Fft2::forward(std::span<Cx> data) const
{
  if (data.size() != shape_.size()) {
    throw std::invalid_argument("Fft2::forward: buffer size does not match grid");
  }
  auto *p = reinterpret_cast<fftw_complex *>(data.data());
  fftw_execute_dft(plans_->fwd, p, p);
}

void Fft2::inverse_unnormalized(std::span<Cx> data) const
{
  if (data.size() != shape_.size()) {
    throw std::invalid_argument("Fft2::inverse: buffer size does not match grid");
  }
  auto *p = reinterpret_cast<fftw_complex *>(data.data());
  fftw_execute_dft(plans_->bwd, p, p);
}

void Fft2::inverse(std::span<Cx> data) const
{
  inverse_unnormalized(data);
  double const scale = 1.0 / static_cast<double>(shape_.size());
  for (auto &v : data) {
    v *= scale;
  }
}

} // namespace giraf
