#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json_fwd.hpp>

#include "giraf/grid.hpp"
#include "giraf/kspace.hpp"
#include "giraf/random.hpp"

namespace giraf {

/// Real trigonometric polynomial mu0(r) = sum_k c[k] e^{j2pi k.r} on lambda0,
/// with c[-k] = conj(c[k]). Coordinates: x pairs with k1, y with k2.
struct EdgePolynomial
{
  IndexSet2D lambda0;
  VecX coeffs;

  double eval(double x, double y) const;
  /// (d/dx, d/dy) of mu0.
  std::array<double, 2> gradient(double x, double y) const;
  /// Throws when the support is not symmetric, the coefficients are not
  /// conjugate-symmetric (to 1e-12 relative) or all vanish.
  void validate() const;
};

void to_json(nlohmann::json &j, EdgePolynomial const &e);
void from_json(nlohmann::json const &j, EdgePolynomial &e);

/// Random conjugate-symmetric coefficients on lambda0 (which must be
/// symmetric about the origin), redrawn until the zero set is non-empty and
/// both sign regions cover at least `min_area` of the unit square.
EdgePolynomial random_edge(IndexSet2D const &lambda0, CounterRng &rng, double min_area = 0.02);

/// mu0 sampled at r = (p1/n1, p2/n2), row-major; shape must cover lambda0's extents.
Eigen::VectorXd rasterize_mu(EdgePolynomial const &edge, GridShape shape);

/// Fraction of raster cells with mu0 > 0.
double positive_fraction(Eigen::VectorXd const &mu);

/// Piecewise-constant image f = a_pos on {mu0 > 0}, a_neg on {mu0 <= 0}.
struct Phantom
{
  EdgePolynomial edge;
  double a_pos = 1.0;
  double a_neg = 0.25;
  int oversample = 8;
};

/// Fourier coefficients of the phantom on gamma by quadrature: f is rasterized
/// on an (oversample x gamma extents) grid, transformed and divided by the
/// raster size. The error is O(1/oversample).
KSpaceArray phantom_fourier(Phantom const &ph, IndexSet2D const &gamma);

/// Raster of the phantom image itself.
Eigen::VectorXd rasterize_phantom(Phantom const &ph, GridShape shape);

/// Separable edge polynomial mu0(x, y) = p(x) q(y). Each factor is a real
/// 1-D trigonometric polynomial with coefficients on -K..K. Its regions are
/// unions of rectangles, so Fourier coefficients are available in closed form.
struct SeparableEdge
{
  VecX p;
  VecX q;

  EdgePolynomial edge() const;
};

/// Real roots in [0,1) of the trigonometric polynomial sum_{k=-K}^{K} c[k+K] e^{j2pi k x}, sorted.
std::vector<double> trig_roots(VecX const &c);

/// Random factors with 2K_i distinct real roots each (K_i = (extent_i - 1) / 2).
SeparableEdge random_separable_edge(int extent1, int extent2, CounterRng &rng);

/// Exact Fourier coefficients of a_pos on {p q > 0}, a_neg elsewhere.
KSpaceArray separable_phantom_fourier(SeparableEdge const &edge, double a_pos, double a_neg, IndexSet2D const &gamma);

/// rho[k] = sum_i amps[i] e^{-j2pi k.r_i}.
KSpaceArray dirac_fourier(std::vector<std::array<double, 2>> const &locations, std::vector<Cx> const &amps,
                          IndexSet2D const &gamma);

enum class MaskScheme
{
  uniform,
  variable_density,
};

std::string to_string(MaskScheme s);
MaskScheme mask_scheme_from_string(std::string const &name);

struct SamplingMask
{
  IndexSet2D gamma;
  IndexSet2D theta;
  MaskScheme scheme = MaskScheme::uniform;
  std::uint64_t seed = 0;
  double acceleration = 1.0;
  /// Width of the Gaussian density (variable density only).
  double sigma = 0.0;

  /// 1 for sampled entries of gamma, 0 otherwise, in gamma element order.
  Eigen::VectorXd indicator() const;
};

void to_json(nlohmann::json &j, SamplingMask const &m);
void from_json(nlohmann::json const &j, SamplingMask &m);

/// Draws round(|gamma| / acceleration) locations; the DC index is always kept.
/// Uniform: the rest are drawn uniformly without replacement. Variable density:
/// weighted sampling without replacement with weight exp(-|k|^2 / (2 sigma^2)),
/// sigma = max extent / 4.
SamplingMask make_mask(IndexSet2D const &gamma, MaskScheme scheme, double acceleration, std::uint64_t seed);
/// Same as make_mask with an explicit sample count.
SamplingMask make_mask_count(IndexSet2D const &gamma, MaskScheme scheme, std::size_t count, std::uint64_t seed);

/// Values of x on theta, in theta element order.
VecX sample(KSpaceArray const &x, SamplingMask const &mask);

/// Adds complex white Gaussian noise of standard deviation sigma to every sample.
void add_noise(VecX &samples, double sigma, CounterRng &rng);

} // namespace giraf
