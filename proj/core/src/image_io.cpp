#include "giraf/image_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace giraf {

Eigen::VectorXd image_magnitude(KSpaceArray const &x)
{
  return to_image(x).cwiseAbs();
}

double percentile(Eigen::VectorXd const &v, double fraction)
{
  if (v.size() == 0) {
    throw std::invalid_argument("percentile of an empty array");
  }
  std::vector<double> s(v.data(), v.data() + v.size());
  auto const rank = static_cast<std::size_t>(
      std::clamp(std::ceil(fraction * static_cast<double>(s.size())) - 1.0, 0.0, static_cast<double>(s.size() - 1)));
  std::nth_element(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(rank), s.end());
  return s[rank];
}

void write_pgm16(std::ostream &os, Eigen::VectorXd const &image, GridShape shape)
{
  if (static_cast<std::size_t>(image.size()) != shape.size()) {
    throw std::invalid_argument("image size does not match its shape");
  }
  double const top = percentile(image, 0.995);
  double const scale = top > 0.0 ? 65535.0 / top : 0.0;
  os << "P5\n" << shape.n2 << ' ' << shape.n1 << "\n65535\n";
  for (Eigen::Index i = 0; i < image.size(); ++i) {
    auto const v = static_cast<unsigned>(std::lround(std::clamp(image[i] * scale, 0.0, 65535.0)));
    char const bytes[2] = {static_cast<char>((v >> 8) & 0xFFU), static_cast<char>(v & 0xFFU)};
    os.write(bytes, 2);
  }
  if (!os) {
    throw std::runtime_error("failed writing PGM image");
  }
}

void write_pgm16(std::filesystem::path const &path, Eigen::VectorXd const &image, GridShape shape)
{
  std::ofstream os(path, std::ios::binary);
  if (!os) {
    throw std::runtime_error("cannot open " + path.string() + " for writing");
  }
  write_pgm16(os, image, shape);
}

} // namespace giraf
