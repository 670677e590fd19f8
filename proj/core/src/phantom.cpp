#include "giraf/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace giraf {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Cx cis(double phase)
{
  return {std::cos(phase), std::sin(phase)};
}

VecX random_symmetric_coeffs(IndexSet2D const &support, CounterRng &rng)
{
  VecX c = VecX::Zero(static_cast<Eigen::Index>(support.size()));
  for (std::size_t i = 0; i < support.size(); ++i) {
    Index2 const k = support[i];
    Index2 const mk = -k;
    if (k == mk) {
      c[static_cast<Eigen::Index>(i)] = rng.normal();
    } else if (mk < k) {
      auto const v = rng.complex_normal();
      c[static_cast<Eigen::Index>(i)] = v;
      c[static_cast<Eigen::Index>(support.index_of(mk))] = std::conj(v);
    }
  }
  return c;
}

double eval_trig_1d(VecX const &c, double x)
{
  auto const K = static_cast<int>((c.size() - 1) / 2);
  double s = 0.0;
  for (int k = -K; k <= K; ++k) {
    s += (c[k + K] * cis(kTwoPi * k * x)).real();
  }
  return s;
}

/// Integral over [a, b] of e^{-j2pi k x}.
Cx interval_transform(int k, double a, double b)
{
  if (k == 0) {
    return b - a;
  }
  double const w = kTwoPi * k;
  return (cis(-w * a) - cis(-w * b)) / Cx{0.0, w};
}

/// Fourier coefficients -n..n of the indicator of {p > 0} on [0, 1).
std::vector<Cx> positive_set_transform(VecX const &p, int n)
{
  auto const roots = trig_roots(p);
  std::vector<Cx> out(static_cast<std::size_t>(2 * n + 1), Cx{0.0, 0.0});
  if (roots.empty()) {
    if (eval_trig_1d(p, 0.0) > 0.0) {
      out[static_cast<std::size_t>(n)] = 1.0;
    }
    return out;
  }
  for (std::size_t i = 0; i < roots.size(); ++i) {
    double const a = roots[i];
    double const b = i + 1 < roots.size() ? roots[i + 1] : roots[0] + 1.0;
    if (eval_trig_1d(p, 0.5 * (a + b)) <= 0.0) {
      continue;
    }
    for (int k = -n; k <= n; ++k) {
      out[static_cast<std::size_t>(k + n)] += interval_transform(k, a, b);
    }
  }
  return out;
}

} // namespace

double EdgePolynomial::eval(double x, double y) const
{
  double s = 0.0;
  for (std::size_t i = 0; i < lambda0.size(); ++i) {
    Index2 const k = lambda0[i];
    s += (coeffs[static_cast<Eigen::Index>(i)] * cis(kTwoPi * (k.k1 * x + k.k2 * y))).real();
  }
  return s;
}

std::array<double, 2> EdgePolynomial::gradient(double x, double y) const
{
  std::array<double, 2> g{0.0, 0.0};
  for (std::size_t i = 0; i < lambda0.size(); ++i) {
    Index2 const k = lambda0[i];
    Cx const t = coeffs[static_cast<Eigen::Index>(i)] * cis(kTwoPi * (k.k1 * x + k.k2 * y)) * Cx{0.0, kTwoPi};
    g[0] += (t * static_cast<double>(k.k1)).real();
    g[1] += (t * static_cast<double>(k.k2)).real();
  }
  return g;
}

void EdgePolynomial::validate() const
{
  if (lambda0.empty() || static_cast<std::size_t>(coeffs.size()) != lambda0.size()) {
    throw std::invalid_argument("edge polynomial coefficients do not match lambda0");
  }
  if (!(lambda0.reflected() == lambda0)) {
    throw std::invalid_argument("edge polynomial support must be symmetric about the origin");
  }
  double const scale = coeffs.norm();
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw std::invalid_argument("edge polynomial is identically zero or not finite");
  }
  for (std::size_t i = 0; i < lambda0.size(); ++i) {
    auto const j = lambda0.index_of(-lambda0[i]);
    if (std::abs(coeffs[static_cast<Eigen::Index>(i)] - std::conj(coeffs[static_cast<Eigen::Index>(j)])) >
        1e-12 * scale) {
      throw std::invalid_argument("edge polynomial coefficients are not conjugate-symmetric");
    }
  }
}

void to_json(nlohmann::json &j, EdgePolynomial const &e)
{
  auto coeffs = nlohmann::json::array();
  for (Eigen::Index i = 0; i < e.coeffs.size(); ++i) {
    coeffs.push_back({e.coeffs[i].real(), e.coeffs[i].imag()});
  }
  j = {{"lambda0", e.lambda0}, {"coeffs", coeffs}};
}

void from_json(nlohmann::json const &j, EdgePolynomial &e)
{
  e.lambda0 = j.at("lambda0").get<IndexSet2D>();
  auto const &c = j.at("coeffs");
  e.coeffs.resize(static_cast<Eigen::Index>(c.size()));
  for (std::size_t i = 0; i < c.size(); ++i) {
    e.coeffs[static_cast<Eigen::Index>(i)] = {c[i].at(0).get<double>(), c[i].at(1).get<double>()};
  }
  e.validate();
}

EdgePolynomial random_edge(IndexSet2D const &lambda0, CounterRng &rng, double min_area)
{
  if (!(lambda0.reflected() == lambda0)) {
    throw std::invalid_argument("random_edge: lambda0 must be symmetric about the origin");
  }
  int const n = std::max(64, 8 * std::max(lambda0.extent(0), lambda0.extent(1)));
  GridShape const shape{n, n};
  for (int attempt = 0; attempt < 1000; ++attempt) {
    EdgePolynomial e{lambda0, random_symmetric_coeffs(lambda0, rng)};
    double const frac = positive_fraction(rasterize_mu(e, shape));
    if (frac >= min_area && frac <= 1.0 - min_area) {
      return e;
    }
  }
  throw std::runtime_error("random_edge: no admissible edge polynomial found");
}

Eigen::VectorXd rasterize_mu(EdgePolynomial const &edge, GridShape shape)
{
  if (shape.n1 < edge.lambda0.extent(0) || shape.n2 < edge.lambda0.extent(1)) {
    throw std::invalid_argument("raster grid is smaller than the edge polynomial support");
  }
  VecX buf = VecX::Zero(static_cast<Eigen::Index>(shape.size()));
  for (std::size_t i = 0; i < edge.lambda0.size(); ++i) {
    buf[static_cast<Eigen::Index>(shape.position(edge.lambda0[i]))] += edge.coeffs[static_cast<Eigen::Index>(i)];
  }
  Fft2(shape).inverse_unnormalized({buf.data(), shape.size()});
  return buf.real();
}

double positive_fraction(Eigen::VectorXd const &mu)
{
  if (mu.size() == 0) {
    return 0.0;
  }
  return static_cast<double>((mu.array() > 0.0).count()) / static_cast<double>(mu.size());
}

Eigen::VectorXd rasterize_phantom(Phantom const &ph, GridShape shape)
{
  Eigen::VectorXd const mu = rasterize_mu(ph.edge, shape);
  return (mu.array() > 0.0).select(Eigen::VectorXd::Constant(mu.size(), ph.a_pos),
                                   Eigen::VectorXd::Constant(mu.size(), ph.a_neg));
}

KSpaceArray phantom_fourier(Phantom const &ph, IndexSet2D const &gamma)
{
  if (ph.oversample < 1) {
    throw std::invalid_argument("phantom oversample factor must be positive");
  }
  GridShape const fine{ph.oversample * gamma.extent(0), ph.oversample * gamma.extent(1)};
  VecX buf = rasterize_phantom(ph, fine).cast<Cx>();
  Fft2(fine).forward({buf.data(), fine.size()});
  KSpaceArray out(gamma);
  double const scale = 1.0 / static_cast<double>(fine.size());
  for (std::size_t i = 0; i < gamma.size(); ++i) {
    out.values()[static_cast<Eigen::Index>(i)] = buf[static_cast<Eigen::Index>(fine.position(gamma[i]))] * scale;
  }
  return out;
}

EdgePolynomial SeparableEdge::edge() const
{
  auto const K1 = static_cast<int>((p.size() - 1) / 2);
  auto const K2 = static_cast<int>((q.size() - 1) / 2);
  EdgePolynomial e;
  e.lambda0 = IndexSet2D::rect(2 * K1 + 1, 2 * K2 + 1);
  e.coeffs.resize(static_cast<Eigen::Index>(e.lambda0.size()));
  for (std::size_t i = 0; i < e.lambda0.size(); ++i) {
    Index2 const k = e.lambda0[i];
    e.coeffs[static_cast<Eigen::Index>(i)] = p[k.k1 + K1] * q[k.k2 + K2];
  }
  return e;
}

std::vector<double> trig_roots(VecX const &c)
{
  if (c.size() % 2 == 0) {
    throw std::invalid_argument("trig_roots: coefficient count must be odd");
  }
  auto const K = static_cast<int>((c.size() - 1) / 2);
  std::vector<double> roots;
  if (K == 0) {
    return roots;
  }
  int const n = 256 * (2 * K + 1);
  auto f = [&](double x) { return eval_trig_1d(c, x); };
  double xa = 0.0;
  double const f0 = f(xa);
  double fa = f0;
  for (int i = 1; i <= n; ++i) {
    double xb = static_cast<double>(i) / n;
    // Reuse f(0) at x = 1 so a root on the wrap point is seen exactly once.
    double const fb = i == n ? f0 : f(xb);
    if ((fa < 0.0 && fb >= 0.0) || (fa >= 0.0 && fb < 0.0)) {
      double lo = xa;
      double hi = xb;
      bool const rising = fa < 0.0;
      for (int it = 0; it < 100 && hi - lo > 1e-17; ++it) {
        double const mid = 0.5 * (lo + hi);
        if ((f(mid) < 0.0) == rising) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      double const r = 0.5 * (lo + hi);
      roots.push_back(r >= 1.0 ? r - 1.0 : r);
    }
    xa = xb;
    fa = fb;
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

SeparableEdge random_separable_edge(int extent1, int extent2, CounterRng &rng)
{
  auto factor = [&](int extent) {
    if (extent < 3 || extent % 2 == 0) {
      throw std::invalid_argument("separable edge factors need odd extents >= 3");
    }
    int const K = (extent - 1) / 2;
    auto const support = IndexSet2D::rect(extent, 1);
    for (int attempt = 0; attempt < 1000; ++attempt) {
      VecX c = random_symmetric_coeffs(support, rng);
      auto const roots = trig_roots(c);
      if (roots.size() != static_cast<std::size_t>(2 * K)) {
        continue;
      }
      double sep = roots.front() + 1.0 - roots.back();
      for (std::size_t i = 1; i < roots.size(); ++i) {
        sep = std::min(sep, roots[i] - roots[i - 1]);
      }
      if (sep < 0.25 / (2.0 * K)) {
        continue;
      }
      auto const t = positive_set_transform(c, 0);
      double const len = t[0].real();
      if (len < 0.15 || len > 0.85) {
        continue;
      }
      return c;
    }
    throw std::runtime_error("random_separable_edge: no admissible factor found");
  };
  SeparableEdge e;
  e.p = factor(extent1);
  e.q = factor(extent2);
  return e;
}

KSpaceArray separable_phantom_fourier(SeparableEdge const &edge, double a_pos, double a_neg, IndexSet2D const &gamma)
{
  int const n1 = std::max(std::abs(gamma.lo().k1), std::abs(gamma.hi().k1));
  int const n2 = std::max(std::abs(gamma.lo().k2), std::abs(gamma.hi().k2));
  auto const pp = positive_set_transform(edge.p, n1);
  auto const qp = positive_set_transform(edge.q, n2);
  KSpaceArray out(gamma);
  for (std::size_t i = 0; i < gamma.size(); ++i) {
    Index2 const k = gamma[i];
    Cx const p_pos = pp[static_cast<std::size_t>(k.k1 + n1)];
    Cx const q_pos = qp[static_cast<std::size_t>(k.k2 + n2)];
    Cx const p_neg = (k.k1 == 0 ? 1.0 : 0.0) - p_pos;
    Cx const q_neg = (k.k2 == 0 ? 1.0 : 0.0) - q_pos;
    Cx v = (a_pos - a_neg) * (p_pos * q_pos + p_neg * q_neg);
    if (k.k1 == 0 && k.k2 == 0) {
      v += a_neg;
    }
    out.values()[static_cast<Eigen::Index>(i)] = v;
  }
  return out;
}

KSpaceArray dirac_fourier(std::vector<std::array<double, 2>> const &locations, std::vector<Cx> const &amps,
                          IndexSet2D const &gamma)
{
  if (locations.size() != amps.size()) {
    throw std::invalid_argument("dirac_fourier: locations and amplitudes differ in length");
  }
  KSpaceArray out(gamma);
  for (std::size_t i = 0; i < gamma.size(); ++i) {
    Index2 const k = gamma[i];
    Cx s{0.0, 0.0};
    for (std::size_t d = 0; d < locations.size(); ++d) {
      s += amps[d] * cis(-kTwoPi * (k.k1 * locations[d][0] + k.k2 * locations[d][1]));
    }
    out.values()[static_cast<Eigen::Index>(i)] = s;
  }
  return out;
}

std::string to_string(MaskScheme s)
{
  return s == MaskScheme::variable_density ? "variable_density" : "uniform";
}

MaskScheme mask_scheme_from_string(std::string const &name)
{
  if (name == "uniform") {
    return MaskScheme::uniform;
  }
  if (name == "variable_density" || name == "vd") {
    return MaskScheme::variable_density;
  }
  throw std::invalid_argument("unknown mask scheme '" + name + "' (expected uniform|variable_density)");
}

Eigen::VectorXd SamplingMask::indicator() const
{
  Eigen::VectorXd ind = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(gamma.size()));
  for (auto const &k : theta) {
    ind[static_cast<Eigen::Index>(gamma.index_of(k))] = 1.0;
  }
  return ind;
}

void to_json(nlohmann::json &j, SamplingMask const &m)
{
  auto idx = nlohmann::json::array();
  for (auto const &k : m.theta) {
    idx.push_back({k.k1, k.k2});
  }
  j = {{"scheme", to_string(m.scheme)}, {"seed", m.seed},   {"acceleration", m.acceleration},
       {"sigma", m.sigma},              {"gamma", m.gamma}, {"indices", idx}};
}

void from_json(nlohmann::json const &j, SamplingMask &m)
{
  m.scheme = mask_scheme_from_string(j.at("scheme").get<std::string>());
  m.seed = j.at("seed").get<std::uint64_t>();
  m.acceleration = j.at("acceleration").get<double>();
  m.sigma = j.value("sigma", 0.0);
  m.gamma = j.at("gamma").get<IndexSet2D>();
  std::vector<Index2> el;
  for (auto const &p : j.at("indices")) {
    el.push_back({p.at(0).get<int>(), p.at(1).get<int>()});
  }
  m.theta = IndexSet2D::list(std::move(el));
  if (!m.theta.is_subset_of(m.gamma)) {
    throw std::invalid_argument("mask indices are not contained in gamma");
  }
}

SamplingMask make_mask(IndexSet2D const &gamma, MaskScheme scheme, double acceleration, std::uint64_t seed)
{
  if (!(acceleration >= 1.0)) {
    throw std::invalid_argument("acceleration must be >= 1");
  }
  auto const count = static_cast<long long>(std::llround(static_cast<double>(gamma.size()) / acceleration));
  if (count < 1) {
    throw std::invalid_argument("acceleration leaves no samples");
  }
  auto m = make_mask_count(gamma, scheme, static_cast<std::size_t>(count), seed);
  m.acceleration = acceleration;
  return m;
}

SamplingMask make_mask_count(IndexSet2D const &gamma, MaskScheme scheme, std::size_t count, std::uint64_t seed)
{
  if (count < 1 || count > gamma.size()) {
    throw std::invalid_argument("sample count must lie in [1, |gamma|]");
  }
  SamplingMask m;
  m.gamma = gamma;
  m.scheme = scheme;
  m.seed = seed;
  m.acceleration = static_cast<double>(gamma.size()) / static_cast<double>(count);
  m.sigma = scheme == MaskScheme::variable_density ? 0.25 * std::max(gamma.extent(0), gamma.extent(1)) : 0.0;

  std::vector<Index2> chosen;
  std::vector<std::size_t> pool;
  auto const dc = gamma.find({0, 0});
  for (std::size_t i = 0; i < gamma.size(); ++i) {
    if (dc && *dc == i) {
      continue;
    }
    pool.push_back(i);
  }
  std::size_t need = count;
  if (dc) {
    chosen.push_back({0, 0});
    --need;
  }
  CounterRng rng(seed, 0x6d61736bULL);
  if (scheme == MaskScheme::uniform) {
    for (std::size_t i = 0; i < need; ++i) {
      auto const j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
      std::swap(pool[i], pool[j]);
      chosen.push_back(gamma[pool[i]]);
    }
  } else {
    // Efraimidis-Spirakis: keep the largest log(u) / w.
    double const s2 = 2.0 * m.sigma * m.sigma;
    std::vector<std::pair<double, std::size_t>> keys;
    keys.reserve(pool.size());
    for (auto const i : pool) {
      Index2 const k = gamma[i];
      double const w = std::exp(-(static_cast<double>(k.k1) * k.k1 + static_cast<double>(k.k2) * k.k2) / s2);
      double u = rng.uniform();
      while (u <= 0.0) {
        u = rng.uniform();
      }
      keys.emplace_back(std::log(u) / w, i);
    }
    auto const by_key = [](auto const &a, auto const &b) { return a.first > b.first || (a.first == b.first && a.second < b.second); };
    std::nth_element(keys.begin(), keys.begin() + static_cast<std::ptrdiff_t>(need), keys.end(), by_key);
    for (std::size_t i = 0; i < need; ++i) {
      chosen.push_back(gamma[keys[i].second]);
    }
  }
  m.theta = IndexSet2D::list(std::move(chosen));
  return m;
}

VecX sample(KSpaceArray const &x, SamplingMask const &mask)
{
  VecX b(static_cast<Eigen::Index>(mask.theta.size()));
  for (std::size_t i = 0; i < mask.theta.size(); ++i) {
    b[static_cast<Eigen::Index>(i)] = x(mask.theta[i]);
  }
  return b;
}

void add_noise(VecX &samples, double sigma, CounterRng &rng)
{
  for (Eigen::Index i = 0; i < samples.size(); ++i) {
    samples[i] += sigma * rng.complex_normal();
  }
}

} // namespace giraf
