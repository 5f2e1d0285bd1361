#include "rpf/driver.hpp"

#include <algorithm>
#include <cmath>

namespace rpf {

namespace {

constexpr std::uint64_t kIidStream = 1;
constexpr std::uint64_t kMarkovStream = 2;

int pick_from_cdf(const std::vector<double>& cdf, double u) {
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  const std::ptrdiff_t idx = it - cdf.begin();
  return static_cast<int>(
      std::min<std::ptrdiff_t>(idx, static_cast<std::ptrdiff_t>(cdf.size()) - 1));
}

int step_chain(const std::vector<std::vector<double>>& rows, int state,
               double u) {
  const auto& row = rows[static_cast<std::size_t>(state)];
  double cum = 0.0;
  for (std::size_t j = 0; j < row.size(); ++j) {
    cum += row[j];
    if (u < cum) return static_cast<int>(j);
  }
  return static_cast<int>(row.size()) - 1;
}

double circle_frac(double x) {
  double t = x - std::floor(x);
  if (t >= 1.0) t -= 1.0;
  return t;
}

}  // namespace

Driver::Driver(DriverSpec spec, std::uint64_t seed)
    : spec_(std::move(spec)), seed_(seed) {
  if (const auto* iid = std::get_if<IidDriver>(&spec_)) {
    if (iid->probs.empty()) fail_schema("iid driver needs probabilities");
    double sum = 0.0;
    for (double p : iid->probs) {
      if (p < 0.0) fail_schema("iid probability below zero");
      sum += p;
      iid_cdf_.push_back(sum);
    }
    if (std::fabs(sum - 1.0) > kProbSumTol)
      fail_schema("iid probabilities must sum to one");
    iid_cdf_.back() = 1.0;
    symbol_count_ = static_cast<int>(iid->probs.size());
  } else if (const auto* mk = std::get_if<MarkovDriver>(&spec_)) {
    const std::size_t n = mk->transition.size();
    if (n == 0 || mk->stationary.size() != n)
      fail_schema("markov driver needs a square chain with a stationary law");
    double psum = 0.0;
    for (double p : mk->stationary) {
      if (p <= 0.0) fail_schema("stationary law must be strictly positive");
      psum += p;
    }
    if (std::fabs(psum - 1.0) > kProbSumTol)
      fail_schema("stationary law must sum to one");
    for (const auto& row : mk->transition) {
      if (row.size() != n) fail_schema("markov transition matrix not square");
      double rsum = 0.0;
      for (double p : row) {
        if (p < 0.0) fail_schema("negative transition probability");
        rsum += p;
      }
      if (std::fabs(rsum - 1.0) > kProbSumTol)
        fail_schema("transition rows must sum to one");
    }
    for (std::size_t j = 0; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        acc += mk->stationary[i] * mk->transition[i][j];
      if (std::fabs(acc - mk->stationary[j]) > kStationaryTol)
        fail_schema("law is not stationary for the transition matrix");
    }
    reversed_.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        reversed_[i][j] =
            mk->stationary[j] * mk->transition[j][i] / mk->stationary[i];
    symbol_count_ = static_cast<int>(n);
  } else {
    const auto& rot = std::get<RotationDriver>(spec_);
    if (rot.cells.empty()) fail_schema("rotation driver needs a partition");
    double cursor = 0.0;
    int max_sym = -1;
    for (const auto& c : rot.cells) {
      if (std::fabs(c.lo - cursor) > kProbSumTol)
        fail_schema("rotation partition must tile [0,1)");
      if (!(c.hi > c.lo)) fail_schema("empty rotation cell");
      if (c.symbol < 0) fail_schema("negative rotation symbol");
      cursor = c.hi;
      max_sym = std::max(max_sym, c.symbol);
    }
    if (std::fabs(cursor - 1.0) > kProbSumTol)
      fail_schema("rotation partition must tile [0,1)");
    symbol_count_ = max_sym + 1;
  }
}

bool Driver::deterministic() const {
  if (symbol_count_ == 1) return true;
  if (const auto* iid = std::get_if<IidDriver>(&spec_)) {
    for (double p : iid->probs)
      if (p == 1.0) return true;
  }
  return std::holds_alternative<RotationDriver>(spec_);
}

int Driver::symbol_at(std::int64_t k) const {
  if (const auto* iid = std::get_if<IidDriver>(&spec_)) {
    (void)iid;
    return pick_from_cdf(iid_cdf_, counter_uniform(seed_, k, kIidStream));
  }
  if (const auto* rot = std::get_if<RotationDriver>(&spec_)) {
    const double t =
        circle_frac(rot->omega0 + static_cast<double>(k) * rot->alpha);
    for (const auto& c : rot->cells) {
      if (t >= c.lo && t < c.hi) return c.symbol;
    }
    return rot->cells.back().symbol;
  }
  const auto& mk = std::get<MarkovDriver>(spec_);
  int state = pick_from_cdf(
      [&] {
        std::vector<double> cdf;
        double cum = 0.0;
        for (double p : mk.stationary) cdf.push_back(cum += p);
        cdf.back() = 1.0;
        return cdf;
      }(),
      counter_uniform(seed_, 0, kMarkovStream));
  if (k > 0) {
    for (std::int64_t j = 1; j <= k; ++j)
      state = step_chain(mk.transition, state,
                         counter_uniform(seed_, j, kMarkovStream));
  } else if (k < 0) {
    for (std::int64_t j = -1; j >= k; --j)
      state = step_chain(reversed_, state,
                         counter_uniform(seed_, j, kMarkovStream));
  }
  return state;
}

std::vector<int> Driver::word(std::int64_t start, int len) const {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(len));
  if (std::holds_alternative<MarkovDriver>(spec_) && len > 1) {
    // one walk instead of len independent walks from index 0
    const auto& mk = std::get<MarkovDriver>(spec_);
    const std::int64_t last = start + len - 1;
    std::vector<int> states(static_cast<std::size_t>(len), 0);
    // walk from min(start, 0) upward to `last`, recording the window
    const std::int64_t from = std::min<std::int64_t>(start, 0);
    int state = symbol_at(from);
    for (std::int64_t k = from; k <= last; ++k) {
      if (k > from)
        state = step_chain(mk.transition, state,
                           counter_uniform(seed_, k, kMarkovStream));
      if (k >= start) states[static_cast<std::size_t>(k - start)] = state;
    }
    return states;
  }
  for (int j = 0; j < len; ++j) out.push_back(symbol_at(start + j));
  return out;
}

std::vector<std::int64_t> Driver::base_points(int count, int spacing) const {
  std::vector<std::int64_t> out;
  out.reserve(static_cast<std::size_t>(count));
  if (policy() == BasePointPolicy::Birkhoff) {
    for (int i = 0; i < count; ++i) out.push_back(i);
  } else {
    for (int i = 0; i < count; ++i)
      out.push_back(static_cast<std::int64_t>(i) * spacing);
  }
  return out;
}

BasePointPolicy Driver::policy() const {
  return std::holds_alternative<RotationDriver>(spec_)
             ? BasePointPolicy::Birkhoff
             : BasePointPolicy::Spread;
}

}  // namespace rpf
