#include "giraf/random.hpp"

#include <cmath>
#include <numbers>

namespace giraf {

std::uint64_t splitmix64(std::uint64_t x)
{
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
  : key_{splitmix64(seed ^ splitmix64(stream + 0x632BE59BD9B4E019ULL))}
{
}

CounterRng::result_type CounterRng::operator()()
{
  return splitmix64(key_ + 0xD1B54A32D192ED03ULL * counter_++);
}

double CounterRng::uniform()
{
  return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

std::uint64_t CounterRng::below(std::uint64_t n)
{
  std::uint64_t const limit = max() - max() % n;
  while (true) {
    auto const v = (*this)();
    if (v < limit) {
      return v % n;
    }
  }
}

double CounterRng::normal()
{
  double u1 = uniform();
  while (u1 <= 0.0) {
    u1 = uniform();
  }
  double const u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::complex<double> CounterRng::complex_normal()
{
  double const re = normal();
  double const im = normal();
  return {re * std::numbers::sqrt2 / 2.0, im * std::numbers::sqrt2 / 2.0};
}

CounterRng CounterRng::split(std::uint64_t child) const
{
  CounterRng r(0, 0);
  r.key_ = splitmix64(key_ ^ splitmix64(child + 0x2545F4914F6CDD1DULL));
  return r;
}

} // namespace giraf
