#include "giraf/grid.hpp"

#include <algorithm>
#include <charconv>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace giraf {

namespace {

int floor_mod(int a, int n)
{
  int const r = a % n;
  return r < 0 ? r + n : r;
}

} // namespace

std::size_t GridShape::position(Index2 k) const
{
  return static_cast<std::size_t>(floor_mod(k.k1, n1)) * static_cast<std::size_t>(n2) +
         static_cast<std::size_t>(floor_mod(k.k2, n2));
}

std::array<int, 2> parse_extents(std::string const &text)
{
  auto const x = text.find_first_of("xX");
  if (x == std::string::npos) {
    throw std::invalid_argument("expected extents of the form WxH, got '" + text + "'");
  }
  std::array<int, 2> out{};
  auto parse = [&](std::string_view s, int &v) {
    auto const [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || v <= 0) {
      throw std::invalid_argument("invalid extent in '" + text + "'");
    }
  };
  std::string_view const sv(text);
  parse(sv.substr(0, x), out[0]);
  parse(sv.substr(x + 1), out[1]);
  return out;
}

std::string format_extents(std::array<int, 2> extents)
{
  return std::to_string(extents[0]) + "x" + std::to_string(extents[1]);
}

int IndexSet2D::centered_low(int extent)
{
  // ceil(-e/2)
  return -(extent / 2);
}

IndexSet2D IndexSet2D::rect(int e1, int e2)
{
  return rect(e1, e2, {centered_low(e1), centered_low(e2)});
}

IndexSet2D IndexSet2D::rect(int e1, int e2, Index2 lo)
{
  if (e1 <= 0 || e2 <= 0) {
    throw std::invalid_argument("rectangular index set needs positive extents");
  }
  IndexSet2D s;
  s.elements_.reserve(static_cast<std::size_t>(e1) * static_cast<std::size_t>(e2));
  for (int a = 0; a < e1; ++a) {
    for (int b = 0; b < e2; ++b) {
      s.elements_.push_back({lo.k1 + a, lo.k2 + b});
    }
  }
  s.lo_ = lo;
  s.hi_ = {lo.k1 + e1 - 1, lo.k2 + e2 - 1};
  s.rectangular_ = true;
  return s;
}

IndexSet2D IndexSet2D::list(std::vector<Index2> elements)
{
  IndexSet2D s;
  s.elements_ = std::move(elements);
  s.finalize();
  return s;
}

void IndexSet2D::finalize()
{
  std::sort(elements_.begin(), elements_.end());
  elements_.erase(std::unique(elements_.begin(), elements_.end()), elements_.end());
  if (elements_.empty()) {
    lo_ = {0, 0};
    hi_ = {-1, -1};
    rectangular_ = false;
    return;
  }
  lo_ = hi_ = elements_.front();
  for (auto const &e : elements_) {
    lo_.k1 = std::min(lo_.k1, e.k1);
    lo_.k2 = std::min(lo_.k2, e.k2);
    hi_.k1 = std::max(hi_.k1, e.k1);
    hi_.k2 = std::max(hi_.k2, e.k2);
  }
  auto const box = static_cast<std::size_t>(hi_.k1 - lo_.k1 + 1) * static_cast<std::size_t>(hi_.k2 - lo_.k2 + 1);
  rectangular_ = box == elements_.size();
}

bool IndexSet2D::centered() const
{
  return rectangular_ && lo_.k1 == centered_low(extent(0)) && lo_.k2 == centered_low(extent(1));
}

int IndexSet2D::extent(int axis) const
{
  if (elements_.empty()) {
    return 0;
  }
  return axis == 0 ? hi_.k1 - lo_.k1 + 1 : hi_.k2 - lo_.k2 + 1;
}

bool IndexSet2D::contains(Index2 k) const
{
  return find(k).has_value();
}

std::optional<std::size_t> IndexSet2D::find(Index2 k) const
{
  if (elements_.empty() || k.k1 < lo_.k1 || k.k1 > hi_.k1 || k.k2 < lo_.k2 || k.k2 > hi_.k2) {
    return std::nullopt;
  }
  if (rectangular_) {
    return static_cast<std::size_t>(k.k1 - lo_.k1) * static_cast<std::size_t>(extent(1)) +
           static_cast<std::size_t>(k.k2 - lo_.k2);
  }
  auto const it = std::lower_bound(elements_.begin(), elements_.end(), k);
  if (it == elements_.end() || *it != k) {
    return std::nullopt;
  }
  return static_cast<std::size_t>(it - elements_.begin());
}

std::size_t IndexSet2D::index_of(Index2 k) const
{
  auto const i = find(k);
  if (!i) {
    throw std::out_of_range("index (" + std::to_string(k.k1) + "," + std::to_string(k.k2) + ") not in set");
  }
  return *i;
}

bool IndexSet2D::is_subset_of(IndexSet2D const &other) const
{
  return std::all_of(elements_.begin(), elements_.end(), [&](Index2 k) { return other.contains(k); });
}

IndexSet2D IndexSet2D::reflected() const
{
  if (rectangular_) {
    return rect(extent(0), extent(1), -hi_);
  }
  std::vector<Index2> r;
  r.reserve(elements_.size());
  for (auto const &e : elements_) {
    r.push_back(-e);
  }
  return list(std::move(r));
}

IndexSet2D IndexSet2D::translated(Index2 shift) const
{
  if (rectangular_) {
    return rect(extent(0), extent(1), lo_ + shift);
  }
  std::vector<Index2> r;
  r.reserve(elements_.size());
  for (auto const &e : elements_) {
    r.push_back(e + shift);
  }
  return list(std::move(r));
}

void to_json(nlohmann::json &j, IndexSet2D const &s)
{
  if (s.rectangular()) {
    j = nlohmann::json{{"kind", "rect"},
                       {"extents", {s.extent(0), s.extent(1)}},
                       {"offset", {s.lo().k1, s.lo().k2}}};
    return;
  }
  auto elems = nlohmann::json::array();
  for (auto const &e : s) {
    elems.push_back({e.k1, e.k2});
  }
  j = nlohmann::json{{"kind", "list"}, {"elements", std::move(elems)}, {"offset", {0, 0}}};
}

void from_json(nlohmann::json const &j, IndexSet2D &s)
{
  auto const kind = j.at("kind").get<std::string>();
  Index2 offset{0, 0};
  bool has_offset = false;
  if (j.contains("offset")) {
    auto const o = j.at("offset").get<std::array<int, 2>>();
    offset = {o[0], o[1]};
    has_offset = true;
  }
  if (kind == "rect") {
    auto const e = j.at("extents").get<std::array<int, 2>>();
    s = has_offset ? IndexSet2D::rect(e[0], e[1], offset) : IndexSet2D::rect(e[0], e[1]);
  } else if (kind == "list") {
    std::vector<Index2> elems;
    for (auto const &p : j.at("elements")) {
      elems.push_back({p.at(0).get<int>() + offset.k1, p.at(1).get<int>() + offset.k2});
    }
    s = IndexSet2D::list(std::move(elems));
  } else {
    throw std::invalid_argument("unknown index set kind '" + kind + "'");
  }
}

IndexSet2D dilate(IndexSet2D const &a, IndexSet2D const &b)
{
  if (a.empty() || b.empty()) {
    throw std::invalid_argument("dilate: both index sets must be non-empty");
  }
  if (a.rectangular() && b.rectangular()) {
    return IndexSet2D::rect(a.extent(0) + b.extent(0) - 1, a.extent(1) + b.extent(1) - 1, a.lo() + b.lo());
  }
  std::vector<Index2> sums;
  sums.reserve(a.size() * b.size());
  for (auto const &x : a) {
    for (auto const &y : b) {
      sums.push_back(x + y);
    }
  }
  return IndexSet2D::list(std::move(sums));
}

IndexSet2D valid_output_set(IndexSet2D const &gamma, IndexSet2D const &lambda1)
{
  if (!gamma.rectangular() || !lambda1.rectangular()) {
    throw std::invalid_argument("valid_output_set: gamma and lambda1 must be rectangular");
  }
  int const e1 = gamma.extent(0) - lambda1.extent(0) + 1;
  int const e2 = gamma.extent(1) - lambda1.extent(1) + 1;
  if (e1 < 1 || e2 < 1) {
    throw std::invalid_argument("filter support " + format_extents(lambda1.extents()) + " is larger than grid " +
                                format_extents(gamma.extents()));
  }
  return IndexSet2D::rect(e1, e2, gamma.lo() + lambda1.hi());
}

std::int64_t count_shifts(IndexSet2D const &lambda1, IndexSet2D const &lambda0)
{
  if (lambda1.empty() || lambda0.empty()) {
    return 0;
  }
  if (lambda1.rectangular() && lambda0.rectangular()) {
    std::int64_t const a = lambda1.extent(0) - lambda0.extent(0) + 1;
    std::int64_t const b = lambda1.extent(1) - lambda0.extent(1) + 1;
    return (a <= 0 || b <= 0) ? 0 : a * b;
  }
  std::int64_t count = 0;
  for (int s1 = lambda1.lo().k1 - lambda0.lo().k1; s1 <= lambda1.hi().k1 - lambda0.hi().k1; ++s1) {
    for (int s2 = lambda1.lo().k2 - lambda0.lo().k2; s2 <= lambda1.hi().k2 - lambda0.hi().k2; ++s2) {
      bool const fits = std::all_of(lambda0.begin(), lambda0.end(),
                                    [&](Index2 k) { return lambda1.contains(k + Index2{s1, s2}); });
      count += fits ? 1 : 0;
    }
  }
  return count;
}

std::int64_t prop1_rank(IndexSet2D const &lambda1, IndexSet2D const &lambda0)
{
  return static_cast<std::int64_t>(lambda1.size()) - count_shifts(lambda1, lambda0);
}

bool rank_formula_applies(IndexSet2D const &gamma, IndexSet2D const &lambda1, IndexSet2D const &lambda0)
{
  for (int axis = 0; axis < 2; ++axis) {
    int const needed = 2 * lambda1.extent(axis) - 1 + lambda0.extent(axis) - 1;
    if (gamma.extent(axis) < needed) {
      return false;
    }
  }
  return lambda1.size() >= lambda0.size();
}

} // namespace giraf
