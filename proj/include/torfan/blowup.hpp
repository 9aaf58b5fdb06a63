#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "torfan/error.hpp"
#include "torfan/fan.hpp"
#include "torfan/fgl.hpp"
#include "torfan/series.hpp"
#include "torfan/sr.hpp"

namespace torfan {

// Blow-up along a smooth center: the star subdivision downstairs, pull-back
// by x_rho -> x_rho +_F x_E on the center's rays, and the push-forward
// transfer. The transfer requires the multiplicative form x + y - v x y
// (v = 0 included).
class Blowup {
public:
  Blowup(FanPtr base, Cone center, FormalGroupLaw law)
      : base_(std::move(base)), center_(std::move(center)), law_(std::move(law)) {
    std::sort(center_.begin(), center_.end());
    if (!law_.multiplicative_form())
      throw UnsupportedError(
          "blow-up transfer requires a formal group law of multiplicative form");
    auto [total, exc] = star_subdivision(*base_, center_);
    total_ = std::move(total);
    exc_index_ = exc;
    base_ctx_ = make_fan_context(base_, law_.params(), law_.trunc());
    total_ctx_ = make_fan_context(total_, law_.params(), law_.trunc());

    pull_images_.reserve(base_->ray_count());
    Series xe = Series::variable(total_ctx_, exc_index_);
    for (std::size_t r = 0; r < base_->ray_count(); ++r) {
      Series xr = Series::variable(total_ctx_, r);
      if (std::binary_search(center_.begin(), center_.end(), static_cast<int>(r)))
        pull_images_.push_back(formal_sum(law_, xr, xe));
      else
        pull_images_.push_back(xr);
    }
    for (const auto& nf : base_->minimal_nonfaces()) {
      Series prod = Series::constant(total_ctx_, Int(1));
      for (int r : nf) prod *= pull_images_[r];
      if (!prod.is_zero())
        throw Error("blow-up: a Stanley-Reisner generator does not map into the "
                    "subdivided ideal");
    }
  }

  const FanPtr& base() const { return base_; }
  const FanPtr& total() const { return total_; }
  const Cone& center() const { return center_; }
  int exc_index() const { return exc_index_; }
  const FormalGroupLaw& law() const { return law_; }
  const SeriesCtxPtr& base_ctx() const { return base_ctx_; }
  const SeriesCtxPtr& total_ctx() const { return total_ctx_; }

  Series pullback(const Series& f) const {
    require_same_context(f.ctx(), base_ctx_, "blow-up pullback");
    return f.substitute(pull_images_, total_ctx_);
  }

  // Push-forward of a single formal monomial prod x_{center_i}^{s_i} * x_E^t.
  // Dimension-2 centers use the closed forms, higher centers the recursion.
  Series pushforward_monomial(const std::vector<int>& s, int t) const {
    check_raw_monomial(s, t);
    if (center_.size() == 2) return closed_form(s, t);
    return engine(s, t);
  }

  Series pushforward_monomial_closed(const std::vector<int>& s, int t) const {
    if (center_.size() != 2)
      throw DomainError("push-forward closed forms require a two-dimensional center");
    check_raw_monomial(s, t);
    return closed_form(s, t);
  }

  Series pushforward_monomial_recursive(const std::vector<int>& s, int t) const {
    check_raw_monomial(s, t);
    return engine(s, t);
  }

  // Module homomorphism over the downstairs ring: each term splits into a
  // factor free of the center and exceptional variables (carried across) and
  // a monomial in them (transferred).
  Series pushforward(const Series& f) const {
    require_same_context(f.ctx(), total_ctx_, "blow-up pushforward");
    const std::size_t m = base_->ray_count();
    Series out = Series::zero(base_ctx_);
    for (const auto& [mono, c] : f.terms()) {
      std::vector<int> s(center_.size(), 0);
      Mono rest(m, 0);
      for (std::size_t r = 0; r < m; ++r) {
        auto pos = std::lower_bound(center_.begin(), center_.end(), static_cast<int>(r));
        if (pos != center_.end() && *pos == static_cast<int>(r))
          s[pos - center_.begin()] = mono[r];
        else
          rest[r] = mono[r];
      }
      int t = mono[exc_index_];
      Series transfer = center_.size() == 2 ? closed_form(s, t) : engine(s, t);
      out += Series::monomial(base_ctx_, rest, c) * transfer;
    }
    return out;
  }

private:
  std::string raw_monomial_str(const std::vector<int>& s, int t) const {
    std::ostringstream out;
    bool first = true;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] == 0) continue;
      if (!first) out << "*";
      out << base_->label(center_[i]);
      if (s[i] != 1) out << "^" << s[i];
      first = false;
    }
    if (t != 0) {
      if (!first) out << "*";
      out << total_->label(exc_index_);
      if (t != 1) out << "^" << t;
      first = false;
    }
    return first ? "1" : out.str();
  }

  void check_raw_monomial(const std::vector<int>& s, int t) const {
    if (s.size() != center_.size())
      throw StructuralError("push-forward: one exponent per center ray required");
    if (t < 0) throw DomainError("push-forward: negative exponent");
    for (int e : s)
      if (e < 0) throw DomainError("push-forward: negative exponent");
    if (*std::min_element(s.begin(), s.end()) >= 1)
      throw UnderdeterminedError(
          raw_monomial_str(s, t),
          "push-forward underdetermined at monomial " + raw_monomial_str(s, t) +
              ": every center ray occurs, so the monomial is not reachable from the "
              "strict-transform seeds");
  }

  Series xvar(int ray) const { return Series::variable(base_ctx_, ray); }

  // Theorem-style closed forms for a two-dimensional center {a, b}.
  Series closed_form(const std::vector<int>& s, int t) const {
    const int a = center_[0], b = center_[1];
    const CoeffElem& v = law_.mult_v();
    if (s[0] + s[1] + t > law_.trunc()) return Series::zero(base_ctx_);
    if (s[0] == 0 && s[1] == 0) {
      if (t == 0) return Series::constant(base_ctx_, Int(1));
      // x_E^n -> v * sum_{i=1..n} x_a^{n+1-i} x_b^i - sum_{i=1..n-1} x_a^{n-i} x_b^i
      Series xa = xvar(a), xb = xvar(b);
      Series r = Series::zero(base_ctx_);
      for (int i = 1; i <= t; ++i) r += (xa.pow(t + 1 - i) * xb.pow(i)).scaled(v);
      for (int i = 1; i <= t - 1; ++i) r -= xa.pow(t - i) * xb.pow(i);
      return r;
    }
    // x_a^s x_E^t -> x_a x_b^t (x_a -_F x_b)^{s-1}, with a the occurring ray
    const bool first = s[0] > 0;
    Series xa = xvar(first ? a : b);
    Series xb = xvar(first ? b : a);
    const int e = first ? s[0] : s[1];
    Series diff = formal_sum(law_, xa, formal_inverse(law_, xb));
    return xa * xb.pow(t) * diff.pow(e - 1);
  }

  // Recursive engine from the strict-transform seeds; valid in any center
  // dimension >= 2.
  Series engine(const std::vector<int>& s, int t) const {
    const int deg = std::accumulate(s.begin(), s.end(), 0) + t;
    if (deg > law_.trunc()) return Series::zero(base_ctx_);
    auto key = std::make_pair(s, t);
    auto hit = memo_.find(key);
    if (hit != memo_.end()) return hit->second;

    const std::size_t k = center_.size();
    const CoeffElem& v = law_.mult_v();
    int max_e = *std::max_element(s.begin(), s.end());
    if (max_e >= 1 && *std::min_element(s.begin(), s.end()) >= 1)
      throw Error("push-forward engine: unreachable monomial slipped through");

    Series result = Series::zero(base_ctx_);
    if (max_e <= 1 && t == 0) {
      // seed: strict transforms of a proper face of the center push to itself
      Mono mono(base_->ray_count(), 0);
      for (std::size_t i = 0; i < k; ++i)
        if (s[i] == 1) mono[center_[i]] = 1;
      result = Series::monomial(base_ctx_, mono, CoeffElem::one(law_.params()));
    } else if (max_e <= 1) {
      std::size_t occupied = 0;
      for (std::size_t i = 0; i < k; ++i)
        if (s[i] == 1) ++occupied;
      std::size_t a = 0;
      while (s[a] == 1) ++a;
      if (occupied == k - 1) {
        // x_S x_a = 0 upstairs, so pulling one x_E down is multiplication by x_a
        result = xvar(center_[a]) * engine(s, t - 1);
      } else {
        // v x_S x_a x_E^t = x_S x_a x_E^{t-1} + x_S x_E^t - pullback(x_a) x_S x_E^{t-1}
        std::vector<int> s2 = s;
        s2[a] = 1;
        result = xvar(center_[a]) * engine(s, t - 1) - engine(s2, t - 1) +
                 engine(s2, t).scaled(v);
      }
    } else {
      // rewrite one x_a through x_a = pullback(x_a) +_F chi(x_E)
      std::size_t a = 0;
      for (std::size_t i = 1; i < k; ++i)
        if (s[i] > s[a]) a = i;
      std::vector<int> s2 = s;
      --s2[a];
      // W = pushforward(chi(x_E) * x^{s2} x_E^t); chi(z) = -sum v^i z^{i+1}
      Series w = Series::zero(base_ctx_);
      const int rem = deg - 1;
      CoeffElem vpow = CoeffElem::one(law_.params());
      for (int i = 0; rem + 1 + i <= law_.trunc(); ++i) {
        w -= engine(s2, t + 1 + i).scaled(vpow);
        if (v.is_zero()) break;
        vpow *= v;
      }
      Series xa = xvar(center_[a]);
      result = xa * engine(s2, t) + w - (xa * w).scaled(v);
    }
    memo_.emplace(std::move(key), result);
    return result;
  }

  FanPtr base_;
  Cone center_;
  FormalGroupLaw law_;
  FanPtr total_;
  int exc_index_ = -1;
  SeriesCtxPtr base_ctx_;
  SeriesCtxPtr total_ctx_;
  std::vector<Series> pull_images_;
  mutable std::map<std::pair<std::vector<int>, int>, Series> memo_;
};

inline Blowup make_blowup(FanPtr fan, Cone center, const FormalGroupLaw& law) {
  return Blowup(std::move(fan), std::move(center), law);
}

struct PushPullReport {
  bool ok = true;
  std::vector<std::string> failures;

  void fail(std::string msg) {
    ok = false;
    failures.push_back(std::move(msg));
  }
};

// Projection formula, section property of the pull-back, and the vanishing
// of the push-forward of the inverted exceptional class.
inline PushPullReport check_push_pull(const Blowup& b, const Series& f, const Series& g) {
  PushPullReport rep;
  Series pf = b.pullback(f);
  if (!(b.pushforward(pf * g) == f * b.pushforward(g)))
    rep.fail("projection formula fails: pushforward(pullback(f) * g) != f * pushforward(g)");
  if (!(b.pushforward(pf) == f))
    rep.fail("pushforward(pullback(f)) != f");
  Series xe = Series::variable(b.total_ctx(), b.exc_index());
  if (!b.pushforward(formal_inverse(b.law(), xe)).is_zero())
    rep.fail("pushforward of the formal inverse of the exceptional class is nonzero");
  return rep;
}

}  // namespace torfan
