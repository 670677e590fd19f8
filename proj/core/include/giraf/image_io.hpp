#pragma once

#include <filesystem>
#include <iosfwd>

#include <Eigen/Core>

#include "giraf/kspace.hpp"

namespace giraf {

/// |to_image(x)| on x's FFT grid, row-major (n1 rows, n2 columns).
Eigen::VectorXd image_magnitude(KSpaceArray const &x);

/// Value below which the given fraction of entries lies (nearest rank).
double percentile(Eigen::VectorXd const &v, double fraction);

/// Binary 16-bit PGM (P5, maxval 65535, big-endian samples). Values are
/// windowed linearly to [0, 99.5th percentile] and clipped.
void write_pgm16(std::ostream &os, Eigen::VectorXd const &image, GridShape shape);
void write_pgm16(std::filesystem::path const &path, Eigen::VectorXd const &image, GridShape shape);

} // namespace giraf
