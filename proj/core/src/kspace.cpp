#include "giraf/kspace.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <stdexcept>

namespace giraf {

namespace {

constexpr std::array<char, 4> kMagic{'G', 'K', 'S', 'P'};
constexpr std::uint32_t kFlagOffset = 1U;
constexpr std::uint32_t kFlagGrid = 2U;

void put_u32(std::ostream &os, std::uint32_t v)
{
  std::array<char, 4> b{};
  for (int i = 0; i < 4; ++i) {
    b[static_cast<std::size_t>(i)] = static_cast<char>((v >> (8 * i)) & 0xFFU);
  }
  os.write(b.data(), 4);
}

std::uint32_t get_u32(std::istream &is)
{
  std::array<unsigned char, 4> b{};
  is.read(reinterpret_cast<char *>(b.data()), 4);
  if (!is) {
    throw std::runtime_error("k-space file truncated");
  }
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) {
    v = (v << 8) | b[static_cast<std::size_t>(i)];
  }
  return v;
}

void put_f64(std::ostream &os, double d)
{
  auto const bits = std::bit_cast<std::uint64_t>(d);
  put_u32(os, static_cast<std::uint32_t>(bits & 0xFFFFFFFFULL));
  put_u32(os, static_cast<std::uint32_t>(bits >> 32));
}

double get_f64(std::istream &is)
{
  std::uint64_t const lo = get_u32(is);
  std::uint64_t const hi = get_u32(is);
  return std::bit_cast<double>(lo | (hi << 32));
}

void check_grid(IndexSet2D const &gamma, GridShape grid)
{
  if (!gamma.rectangular()) {
    throw std::invalid_argument("k-space support must be rectangular");
  }
  if (grid.n1 < gamma.extent(0) || grid.n2 < gamma.extent(1)) {
    throw std::invalid_argument("FFT grid " + format_extents({grid.n1, grid.n2}) + " is smaller than k-space support " +
                                format_extents(gamma.extents()));
  }
}

} // namespace

KSpaceArray::KSpaceArray(IndexSet2D gamma)
  : KSpaceArray(gamma, GridShape{gamma.extent(0), gamma.extent(1)})
{
}

KSpaceArray::KSpaceArray(IndexSet2D gamma, GridShape grid)
  : gamma_{std::move(gamma)}
  , grid_{grid}
  , values_{VecX::Zero(static_cast<Eigen::Index>(gamma_.size()))}
{
  check_grid(gamma_, grid_);
}

KSpaceArray::KSpaceArray(IndexSet2D gamma, GridShape grid, VecX values)
  : gamma_{std::move(gamma)}
  , grid_{grid}
  , values_{std::move(values)}
{
  check_grid(gamma_, grid_);
  if (static_cast<std::size_t>(values_.size()) != gamma_.size()) {
    throw std::invalid_argument("k-space values do not match the size of gamma");
  }
}

KSpaceArray operator+(KSpaceArray const &a, KSpaceArray const &b)
{
  if (!a.same_layout(b)) {
    throw std::invalid_argument("k-space arrays have different layouts");
  }
  return a.with_values(a.values_ + b.values_);
}

KSpaceArray operator-(KSpaceArray const &a, KSpaceArray const &b)
{
  if (!a.same_layout(b)) {
    throw std::invalid_argument("k-space arrays have different layouts");
  }
  return a.with_values(a.values_ - b.values_);
}

KSpaceArray operator*(Cx s, KSpaceArray const &a)
{
  return a.with_values(s * a.values_);
}

std::vector<std::size_t> grid_positions(IndexSet2D const &set, GridShape grid)
{
  std::vector<std::size_t> pos;
  pos.reserve(set.size());
  for (auto const &k : set) {
    pos.push_back(grid.position(k));
  }
  return pos;
}

VecX to_image(KSpaceArray const &x)
{
  auto const grid = x.grid();
  VecX img = VecX::Zero(static_cast<Eigen::Index>(grid.size()));
  auto const pos = grid_positions(x.gamma(), grid);
  for (std::size_t i = 0; i < pos.size(); ++i) {
    img[static_cast<Eigen::Index>(pos[i])] = x.values()[static_cast<Eigen::Index>(i)];
  }
  Fft2 const fft(grid);
  fft.inverse_unnormalized({img.data(), grid.size()});
  return img;
}

KSpaceArray from_image(VecX const &image, IndexSet2D const &gamma, GridShape grid)
{
  if (static_cast<std::size_t>(image.size()) != grid.size()) {
    throw std::invalid_argument("image size does not match grid");
  }
  VecX buf = image;
  Fft2 const fft(grid);
  fft.forward({buf.data(), grid.size()});
  KSpaceArray out(gamma, grid);
  auto const pos = grid_positions(gamma, grid);
  double const scale = 1.0 / static_cast<double>(grid.size());
  for (std::size_t i = 0; i < pos.size(); ++i) {
    out.values()[static_cast<Eigen::Index>(i)] = buf[static_cast<Eigen::Index>(pos[i])] * scale;
  }
  return out;
}

void write_kspace(std::ostream &os, KSpaceArray const &x)
{
  auto const &g = x.gamma();
  check_grid(g, x.grid());
  std::uint32_t flags = 0;
  if (!g.centered()) {
    flags |= kFlagOffset;
  }
  if (x.grid() != GridShape{g.extent(0), g.extent(1)}) {
    flags |= kFlagGrid;
  }
  os.write(kMagic.data(), 4);
  put_u32(os, static_cast<std::uint32_t>(g.extent(0)));
  put_u32(os, static_cast<std::uint32_t>(g.extent(1)));
  put_u32(os, flags);
  if ((flags & kFlagOffset) != 0U) {
    put_u32(os, static_cast<std::uint32_t>(g.lo().k1));
    put_u32(os, static_cast<std::uint32_t>(g.lo().k2));
  }
  if ((flags & kFlagGrid) != 0U) {
    put_u32(os, static_cast<std::uint32_t>(x.grid().n1));
    put_u32(os, static_cast<std::uint32_t>(x.grid().n2));
  }
  for (Eigen::Index i = 0; i < x.values().size(); ++i) {
    put_f64(os, x.values()[i].real());
    put_f64(os, x.values()[i].imag());
  }
  if (!os) {
    throw std::runtime_error("failed writing k-space data");
  }
}

KSpaceArray read_kspace(std::istream &is)
{
  std::array<char, 4> magic{};
  is.read(magic.data(), 4);
  if (!is || magic != kMagic) {
    throw std::runtime_error("not a k-space file (bad magic)");
  }
  auto const n1 = static_cast<int>(get_u32(is));
  auto const n2 = static_cast<int>(get_u32(is));
  auto const flags = get_u32(is);
  if (n1 <= 0 || n2 <= 0) {
    throw std::runtime_error("k-space file has invalid extents");
  }
  IndexSet2D gamma = IndexSet2D::rect(n1, n2);
  if ((flags & kFlagOffset) != 0U) {
    auto const lo1 = static_cast<std::int32_t>(get_u32(is));
    auto const lo2 = static_cast<std::int32_t>(get_u32(is));
    gamma = IndexSet2D::rect(n1, n2, {lo1, lo2});
  }
  GridShape grid{n1, n2};
  if ((flags & kFlagGrid) != 0U) {
    grid.n1 = static_cast<int>(get_u32(is));
    grid.n2 = static_cast<int>(get_u32(is));
  }
  VecX v(static_cast<Eigen::Index>(gamma.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    double const re = get_f64(is);
    double const im = get_f64(is);
    v[i] = {re, im};
  }
  return {std::move(gamma), grid, std::move(v)};
}

void write_kspace(std::filesystem::path const &path, KSpaceArray const &x)
{
  std::ofstream os(path, std::ios::binary);
  if (!os) {
    throw std::runtime_error("cannot open " + path.string() + " for writing");
  }
  write_kspace(os, x);
}

KSpaceArray read_kspace(std::filesystem::path const &path)
{
  std::ifstream is(path, std::ios::binary);
  if (!is) {
    throw std::runtime_error("cannot open " + path.string());
  }
  return read_kspace(is);
}

void write_kspace_csv(std::ostream &os, KSpaceArray const &x)
{
  os << "k1,k2,re,im\n" << std::setprecision(17);
  auto const &g = x.gamma();
  for (std::size_t i = 0; i < g.size(); ++i) {
    auto const v = x.values()[static_cast<Eigen::Index>(i)];
    os << g[i].k1 << ',' << g[i].k2 << ',' << v.real() << ',' << v.imag() << '\n';
  }
}

} // namespace giraf
