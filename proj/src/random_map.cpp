#include "rpf/random_map.hpp"

#include <algorithm>
#include <cmath>

namespace rpf {

namespace {

constexpr double kMpDomainSlack = 1e-12;

struct ForwardVisitor {
  double x;
  double operator()(const AffineBranch& b) const { return b.a * x + b.b; }
  double operator()(const PowerBranch& b) const {
    const double d = x - b.x0;
    return b.c * std::pow(std::fabs(d), b.p);
  }
  double operator()(const QuadraticBranch& b) const {
    return b.alpha * (x - b.r0) * (x - b.r1);
  }
  double operator()(const MannevillePomeauBranch& b) const {
    if (b.gamma == 1.0) return x * (1.0 + 2.0 * x);
    return x * (1.0 + std::pow(2.0, b.gamma) * std::pow(x, b.gamma));
  }
};

struct DerivVisitor {
  double x;
  bool right_of_x0;  // only meaningful for PowerBranch
  double operator()(const AffineBranch& b) const { return b.a; }
  double operator()(const PowerBranch& b) const {
    const double d = std::fabs(x - b.x0);
    const double mag = b.c * b.p * std::pow(d, b.p - 1.0);
    return right_of_x0 ? mag : -mag;
  }
  double operator()(const QuadraticBranch& b) const {
    return b.alpha * (2.0 * x - b.r0 - b.r1);
  }
  double operator()(const MannevillePomeauBranch& b) const {
    if (b.gamma == 1.0) return 1.0 + 4.0 * x;
    return 1.0 + std::pow(2.0, b.gamma) * (1.0 + b.gamma) *
                     std::pow(x, b.gamma);
  }
};

}  // namespace

Branch::Branch(Interval domain, BranchFamily family)
    : domain_(domain), family_(family) {
  if (domain_.length() <= 0.0) fail_schema("branch with empty domain");
  if (const auto* a = std::get_if<AffineBranch>(&family_)) {
    if (a->a == 0.0) fail_schema("affine branch with zero slope");
  } else if (const auto* p = std::get_if<PowerBranch>(&family_)) {
    if (p->c == 0.0 || p->p <= 0.0) fail_schema("degenerate power branch");
    if (domain_.lo < p->x0 - kMpDomainSlack && domain_.hi > p->x0 + kMpDomainSlack)
      fail_schema("power branch domain straddles its base point");
  } else if (const auto* q = std::get_if<QuadraticBranch>(&family_)) {
    if (q->alpha == 0.0) fail_schema("degenerate quadratic branch");
    const double vertex = 0.5 * (q->r0 + q->r1);
    if (domain_.lo < vertex - kMpDomainSlack &&
        domain_.hi > vertex + kMpDomainSlack)
      fail_schema("quadratic branch domain straddles the vertex");
  } else if (const auto* m = std::get_if<MannevillePomeauBranch>(&family_)) {
    if (m->gamma <= 0.0) fail_schema("intermittent branch needs gamma > 0");
    if (domain_.lo < -kMpDomainSlack || domain_.hi > 0.5 + kMpDomainSlack)
      fail_schema("intermittent branch lives on [0, 1/2]");
  }
  const double flo = forward(domain_.lo);
  const double fhi = forward(domain_.hi);
  increasing_ = fhi >= flo;
  image_ = hull(flo, fhi);
  const double dmid = derivative(0.5 * (domain_.lo + domain_.hi));
  if (dmid == 0.0) fail_schema("branch is not monotone on its domain");
}

double Branch::forward(double x) const {
  return std::visit(ForwardVisitor{x}, family_);
}

double Branch::derivative(double x) const {
  bool right = true;
  if (const auto* p = std::get_if<PowerBranch>(&family_))
    right = domain_.lo >= p->x0 - kMpDomainSlack;
  return std::visit(DerivVisitor{x, right}, family_);
}

double Branch::invert(double y, double abs_tol) const {
  y = std::min(std::max(y, image_.lo), image_.hi);
  if (const auto* a = std::get_if<AffineBranch>(&family_)) {
    return (y - a->b) / a->a;
  }
  if (const auto* p = std::get_if<PowerBranch>(&family_)) {
    const double r = std::pow(y / p->c, 1.0 / p->p);
    const bool right = domain_.lo >= p->x0 - kMpDomainSlack;
    return right ? p->x0 + r : p->x0 - r;
  }
  if (const auto* q = std::get_if<QuadraticBranch>(&family_)) {
    const double m = 0.5 * (q->r0 + q->r1);
    const double d = 0.5 * (q->r0 - q->r1);
    const double disc = std::max(0.0, y / q->alpha + d * d);
    const double r = std::sqrt(disc);
    const bool right = domain_.lo >= m - kMpDomainSlack;
    return right ? m + r : m - r;
  }
  const auto* m = std::get_if<MannevillePomeauBranch>(&family_);
  if (m != nullptr && m->gamma == 1.0) {
    // x (1 + 2x) = y solves in closed form
    return 0.25 * (std::sqrt(1.0 + 8.0 * y) - 1.0);
  }
  // intermittent branch: monotone increasing, safeguarded bisection-Newton
  double lo = domain_.lo, hi = domain_.hi;
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double fx = forward(x) - y;
    if (fx > 0.0) {
      hi = x;
    } else {
      lo = x;
    }
    const double dfx = derivative(x);
    double next = x - fx / dfx;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::fabs(next - x) <= abs_tol) return next;
    x = next;
  }
  fail_numeric("branch inverse did not converge");
}

double Branch::abs_deriv_min() const {
  return std::min(std::fabs(derivative(domain_.lo)),
                  std::fabs(derivative(domain_.hi)));
}

double Branch::abs_deriv_max() const {
  return std::max(std::fabs(derivative(domain_.lo)),
                  std::fabs(derivative(domain_.hi)));
}

std::string Branch::family_tag() const {
  if (std::holds_alternative<AffineBranch>(family_)) return "affine";
  if (std::holds_alternative<PowerBranch>(family_)) return "power";
  if (std::holds_alternative<QuadraticBranch>(family_)) return "quadratic";
  return "mp";
}

OpenMap::OpenMap(Interval base, std::vector<Branch> branches, IntervalSet hole)
    : base_(base), branches_(std::move(branches)), hole_(std::move(hole)) {
  if (base_.length() <= 0.0) fail_schema("OpenMap: empty base interval");
  if (branches_.empty()) fail_schema("OpenMap: needs at least one branch");
  std::sort(branches_.begin(), branches_.end(),
            [](const Branch& a, const Branch& b) {
              return a.domain().lo < b.domain().lo;
            });
  const double ztol = zero_tol();
  double cursor = base_.lo;
  for (const auto& br : branches_) {
    if (std::fabs(br.domain().lo - cursor) > ztol)
      fail_schema("OpenMap: branch domains must tile the base interval");
    cursor = br.domain().hi;
    if (br.image().lo < base_.lo - full_tol() ||
        br.image().hi > base_.hi + full_tol())
      fail_assumption("OpenMap: branch image leaves the base interval");
  }
  if (std::fabs(cursor - base_.hi) > ztol)
    fail_schema("OpenMap: branch domains must tile the base interval");
  check_hole_set(base_, hole_);
  survivor_ = subtract_holes(base_, hole_, ztol);

  for (int bi = 0; bi < static_cast<int>(branches_.size()); ++bi) {
    const Branch& br = branches_[static_cast<std::size_t>(bi)];
    for (const Interval& part : subtract_holes(br.domain(), hole_, ztol)) {
      Level1Element e;
      e.dom = part;
      e.branch = bi;
      if (part.lo == br.domain().lo && part.hi == br.domain().hi) {
        e.image = br.image();
      } else {
        e.image = hull(br.forward(part.lo), br.forward(part.hi));
      }
      e.full = e.image.lo <= base_.lo + full_tol() &&
               e.image.hi >= base_.hi - full_tol();
      elements_.push_back(e);
    }
  }
  if (elements_.empty()) fail_assumption("OpenMap: survivor set is empty");
}

bool OpenMap::has_protected_full_branch() const {
  for (const auto& e : elements_) {
    if (!e.full) continue;
    const Branch& br = branches_[static_cast<std::size_t>(e.branch)];
    if (std::fabs(e.dom.lo - br.domain().lo) <= zero_tol() &&
        std::fabs(e.dom.hi - br.domain().hi) <= zero_tol())
      return true;
  }
  return false;
}

int OpenMap::full_count() const {
  int n = 0;
  for (const auto& e : elements_) n += e.full ? 1 : 0;
  return n;
}

int OpenMap::longest_partial_run() const {
  int best = 0, run = 0;
  for (const auto& e : elements_) {
    if (e.full) {
      run = 0;
    } else {
      best = std::max(best, ++run);
    }
  }
  return best;
}

void validate_family(const MapFamily& family) {
  if (family.maps.empty()) fail_schema("map family is empty");
  for (const auto& m : family.maps) {
    if (std::fabs(m.base().lo - family.base.lo) > 1e-12 ||
        std::fabs(m.base().hi - family.base.hi) > 1e-12)
      fail_schema("all maps must share the family base interval");
    if (!m.has_protected_full_branch())
      fail_assumption(
          "every map needs a full branch whose domain avoids the holes");
  }
}

// --- survivor partition DFS --------------------------------------------------

namespace {

struct WalkCore {
  const MapFamily& family;
  const std::vector<int>& word;
  bool materialize;
  double ztol;
  double ftol;
  double itol;

  // Per-depth inverse-chain bookkeeping for domain materialization.
  std::vector<const Branch*> chain;
  std::vector<double> aff_s, aff_t;  // composed inverse x = s*y + t
  std::vector<char> aff_ok;

  std::function<void(const SurvivorWalker::Element&, const std::vector<int>&)>
      emit;
  std::vector<int> branch_chain;

  WalkCore(const MapFamily& fam, const std::vector<int>& w, bool mat)
      : family(fam), word(w), materialize(mat) {
    ztol = kZeroLengthRel * fam.base.length();
    ftol = kFullBranchRel * fam.base.length();
    itol = kInvertAbsTol * fam.base.length();
    const std::size_t n = w.size();
    chain.resize(n, nullptr);
    aff_s.assign(n + 1, 1.0);
    aff_t.assign(n + 1, 0.0);
    aff_ok.assign(n + 1, 1);
    branch_chain.assign(n, 0);
  }

  double pull_back(double y, std::size_t depth) const {
    // preimage of fiber-`depth` coordinate under the first `depth` branches
    if (aff_ok[depth]) return aff_s[depth] * y + aff_t[depth];
    double x = y;
    for (std::size_t k = depth; k-- > 0;) x = chain[k]->invert(x, itol);
    return x;
  }

  void recurse(std::size_t depth, Interval y, bool orient_up) {
    if (depth == word.size()) {
      SurvivorWalker::Element leaf;
      leaf.image = y;
      leaf.full = y.lo <= family.base.lo + ftol && y.hi >= family.base.hi - ftol;
      if (materialize) {
        const double a = pull_back(y.lo, depth);
        const double b = pull_back(y.hi, depth);
        leaf.dom = hull(a, b);
      }
      emit(leaf, branch_chain);
      return;
    }
    const OpenMap& map = family.at(word[depth]);
    const auto& elems = map.elements();
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(elems.size());
    for (std::ptrdiff_t step = 0; step < n; ++step) {
      const std::ptrdiff_t idx = orient_up ? step : n - 1 - step;
      const Level1Element& e = elems[static_cast<std::size_t>(idx)];
      const double clo = std::max(e.dom.lo, y.lo);
      const double chi = std::min(e.dom.hi, y.hi);
      if (chi - clo <= ztol) continue;
      const Branch& br = map.branches()[static_cast<std::size_t>(e.branch)];
      Interval img;
      if (clo == e.dom.lo && chi == e.dom.hi) {
        img = e.image;
      } else {
        img = hull(br.forward(clo), br.forward(chi));
      }
      chain[depth] = &br;
      branch_chain[depth] = e.branch;
      if (materialize) {
        if (aff_ok[depth] && std::holds_alternative<AffineBranch>(br.family())) {
          const auto& ab = std::get<AffineBranch>(br.family());
          aff_s[depth + 1] = aff_s[depth] / ab.a;
          aff_t[depth + 1] = aff_t[depth] - aff_s[depth] * ab.b / ab.a;
          aff_ok[depth + 1] = 1;
        } else {
          aff_ok[depth + 1] = 0;
        }
      }
      recurse(depth + 1, img, orient_up == br.increasing());
    }
  }
};

}  // namespace

SurvivorWalker::SurvivorWalker(const MapFamily& family, std::vector<int> word,
                               bool materialize_domains)
    : family_(family), word_(std::move(word)), materialize_(materialize_domains) {
  if (word_.empty()) fail_schema("survivor partition needs a nonempty word");
  for (int s : word_) (void)family_.at(s);
}

void SurvivorWalker::walk(const Visitor& visit) const {
  WalkCore core(family_, word_, materialize_);
  core.emit = [&](const Element& e, const std::vector<int>&) { visit(e); };
  core.recurse(0, family_.base, true);
}

SurvivorStats SurvivorWalker::stats() const {
  SurvivorStats st;
  std::int64_t run = 0;
  WalkCore core(family_, word_, false);
  core.emit = [&](const Element& e, const std::vector<int>&) {
    ++st.element_count;
    if (e.full) {
      ++st.full_count;
      run = 0;
    } else {
      ++run;
      st.longest_partial_run = std::max(st.longest_partial_run, run);
    }
  };
  core.recurse(0, family_.base, true);
  return st;
}

std::vector<SurvivorElement> survivor_partition(const MapFamily& family,
                                                const std::vector<int>& word) {
  if (word.empty()) fail_schema("survivor partition needs a nonempty word");
  for (int s : word) (void)family.at(s);
  std::vector<SurvivorElement> out;
  WalkCore core(family, word, true);
  core.emit = [&](const SurvivorWalker::Element& e,
                  const std::vector<int>& chain) {
    SurvivorElement el;
    el.dom = e.dom;
    el.image = e.image;
    el.full = e.full;
    el.branch_chain = chain;
    out.push_back(std::move(el));
  };
  core.recurse(0, family.base, true);
  return out;
}

SurvivorStats survivor_stats(const MapFamily& family,
                             const std::vector<int>& word) {
  return SurvivorWalker(family, word, false).stats();
}

}  // namespace rpf
