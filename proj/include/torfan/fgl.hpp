#pragma once

#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "torfan/coeff.hpp"
#include "torfan/error.hpp"
#include "torfan/series.hpp"

namespace torfan {

enum class FglKind { additive, multiplicative, lorentz, generic };

// One-dimensional commutative formal group law over the coefficient ring,
// tabulated to a truncation degree: F(x, y) = sum a_{i,j} x^i y^j.
class FormalGroupLaw {
public:
  using Table = std::map<std::pair<int, int>, CoeffElem>;

  static FormalGroupLaw additive(ParamSpecPtr params, int trunc) {
    Table t = linear_part(params);
    return FormalGroupLaw(FglKind::additive, std::move(params), trunc, std::move(t),
                          "additive");
  }

  // F(x, y) = x + y - v x y.
  static FormalGroupLaw multiplicative(const CoeffElem& v, int trunc) {
    Table t = linear_part(v.spec());
    if (!v.is_zero() && trunc >= 2) t.emplace(std::make_pair(1, 1), -v);
    FormalGroupLaw f(FglKind::multiplicative, v.spec(), trunc, std::move(t),
                     "mult:" + v.str());
    f.mult_v_ = v;
    return f;
  }

  // F(x, y) = (x + y) / (1 + u2 x y): a_{k+1,k} = a_{k,k+1} = (-u2)^k.
  static FormalGroupLaw lorentz(const CoeffElem& u2, int trunc) {
    Table t = linear_part(u2.spec());
    CoeffElem c = -u2;
    for (int k = 1; 2 * k + 1 <= trunc; ++k) {
      CoeffElem a = c.pow(k);
      t.emplace(std::make_pair(k + 1, k), a);
      t.emplace(std::make_pair(k, k + 1), a);
    }
    return FormalGroupLaw(FglKind::lorentz, u2.spec(), trunc, std::move(t),
                          "lorentz:" + u2.str());
  }

  static FormalGroupLaw generic(ParamSpecPtr params, int trunc, Table table,
                                std::string describe = "generic") {
    for (const auto& [ij, c] : table) {
      auto [i, j] = ij;
      if (i < 0 || j < 0 || i + j < 1)
        throw DomainError("formal group law: bad table index");
      require_same_spec(c.spec(), params, "formal group law table");
    }
    for (auto it = table.begin(); it != table.end();)
      it = it->second.is_zero() ? table.erase(it) : std::next(it);
    // the linear part is implicit when absent; kept as given when present
    for (auto ij : {std::make_pair(1, 0), std::make_pair(0, 1)})
      if (!table.count(ij)) table.emplace(ij, CoeffElem::one(params));
    for (auto it = table.begin(); it != table.end();)
      it = (it->first.first + it->first.second > trunc) ? table.erase(it) : std::next(it);
    return FormalGroupLaw(FglKind::generic, std::move(params), trunc, std::move(table),
                          std::move(describe));
  }

  FglKind kind() const { return kind_; }
  const ParamSpecPtr& params() const { return params_; }
  int trunc() const { return trunc_; }
  const Table& table() const { return table_; }
  const std::string& describe() const { return describe_; }

  CoeffElem coeff(int i, int j) const {
    auto it = table_.find({i, j});
    return it == table_.end() ? CoeffElem::zero(params_) : it->second;
  }

  // Multiplicative-form laws x + y - v x y (v = 0 gives the additive one).
  bool multiplicative_form() const {
    return kind_ == FglKind::additive || kind_ == FglKind::multiplicative;
  }

  const CoeffElem& mult_v() const {
    if (!multiplicative_form())
      throw DomainError("formal group law: not of multiplicative form");
    return mult_v_;
  }

  bool has_inverse() const { return !chi_.empty(); }

  // Coefficients of the formal inverse chi(z) = sum chi[d] z^d.
  const std::vector<CoeffElem>& chi_coeffs() const {
    if (!has_inverse())
      throw DomainError("formal group law: formal inverse undefined (linear part not a unit)");
    return chi_;
  }

private:
  FormalGroupLaw(FglKind kind, ParamSpecPtr params, int trunc, Table table,
                 std::string describe)
      : kind_(kind),
        params_(std::move(params)),
        trunc_(trunc),
        table_(std::move(table)),
        describe_(std::move(describe)),
        mult_v_(CoeffElem::zero(params_)) {
    if (trunc_ < 1) throw DomainError("formal group law: truncation degree must be >= 1");
    compute_chi();
  }

  static Table linear_part(const ParamSpecPtr& params) {
    Table t;
    t.emplace(std::make_pair(1, 0), CoeffElem::one(params));
    t.emplace(std::make_pair(0, 1), CoeffElem::one(params));
    return t;
  }

  // Solve F(z, chi(z)) = 0 degree by degree; needs a unit a_{0,1}.
  void compute_chi() {
    CoeffElem a01 = coeff(0, 1);
    if (!a01.is_unit()) return;
    CoeffElem a01_inv = a01.unit_inverse();
    auto ctx = make_free_context({"z"}, params_, trunc_);
    Series z = Series::variable(ctx, 0);
    std::vector<CoeffElem> c(trunc_ + 1, CoeffElem::zero(params_));
    Series partial = Series::zero(ctx);
    for (int d = 1; d <= trunc_; ++d) {
      Series val = eval(z, partial);
      Mono m{d};
      c[d] = -(a01_inv * val.coeff_of(m));
      partial += Series::monomial(ctx, m, c[d]);
    }
    if (!eval(z, partial).is_zero())
      throw Error("formal group law: inverse solver failed");
    chi_ = std::move(c);
  }

public:
  // F(a, b) evaluated on two series of the same context.
  Series eval(const Series& a, const Series& b) const {
    require_same_context(a.ctx(), b.ctx(), "formal group law eval");
    require_same_spec(params_, a.ctx()->params, "formal group law eval");
    if (trunc_ < a.ctx()->trunc)
      throw StructuralError("formal group law eval: law truncated below the host");
    if (!a.constant_term().is_zero() || !b.constant_term().is_zero())
      throw DomainError("formal group law eval: operands must have zero constant term");
    const auto& ctx = a.ctx();
    std::vector<Series> pa{Series::constant(ctx, Int(1))};
    std::vector<Series> pb{Series::constant(ctx, Int(1))};
    auto power = [&](std::vector<Series>& cache, const Series& base, int e) -> const Series& {
      while (static_cast<int>(cache.size()) <= e) cache.push_back(cache.back() * base);
      return cache[e];
    };
    Series r = Series::zero(ctx);
    for (const auto& [ij, c] : table_) {
      auto [i, j] = ij;
      if (i + j > ctx->trunc) continue;
      Series t = power(pa, a, i) * power(pb, b, j);
      r += t.scaled(c);
    }
    return r;
  }

private:
  FglKind kind_;
  ParamSpecPtr params_;
  int trunc_;
  Table table_;
  std::string describe_;
  CoeffElem mult_v_;
  std::vector<CoeffElem> chi_;
};

inline Series formal_sum(const FormalGroupLaw& f, const Series& a, const Series& b) {
  return f.eval(a, b);
}

inline Series formal_inverse(const FormalGroupLaw& f, const Series& a) {
  if (!a.constant_term().is_zero())
    throw DomainError("formal_inverse: operand must have zero constant term");
  require_same_spec(f.params(), a.ctx()->params, "formal_inverse");
  if (f.trunc() < a.ctx()->trunc)
    throw StructuralError("formal_inverse: law truncated below the host");
  const auto& c = f.chi_coeffs();
  const auto& ctx = a.ctx();
  Series r = Series::zero(ctx);
  Series p = Series::constant(ctx, Int(1));
  for (int d = 1; d <= ctx->trunc && d < static_cast<int>(c.size()); ++d) {
    p *= a;
    if (p.is_zero()) break;
    r += p.scaled(c[d]);
  }
  return r;
}

// n-fold formal sum of a with itself; negative n through the inverse.
inline Series int_multiple(const FormalGroupLaw& f, const Int& n, const Series& a) {
  if (n == 0) return Series::zero(a.ctx());
  if (n < 0) return formal_inverse(f, int_multiple(f, -n, a));
  Series r = a;
  for (Int i = 1; i < n; ++i) r = formal_sum(f, r, a);
  return r;
}

struct FglCheckReport {
  bool ok = true;
  std::vector<std::string> failures;

  void fail(std::string msg) {
    ok = false;
    failures.push_back(std::move(msg));
  }
};

// Commutativity and neutral element on the table, associativity on a
// three-variable host; failures name the first offending coefficient.
inline FglCheckReport check_fgl_axioms(const FormalGroupLaw& f) {
  FglCheckReport rep;
  for (const auto& [ij, c] : f.table()) {
    auto [i, j] = ij;
    if (!(f.coeff(j, i) == c)) {
      std::ostringstream out;
      out << "commutativity fails at a_{" << i << "," << j << "}";
      rep.fail(out.str());
      break;
    }
  }
  for (int i = 1; i <= f.trunc(); ++i) {
    CoeffElem expect =
        i == 1 ? CoeffElem::one(f.params()) : CoeffElem::zero(f.params());
    if (!(f.coeff(i, 0) == expect)) {
      std::ostringstream out;
      out << "neutral element fails at a_{" << i << ",0}";
      rep.fail(out.str());
      break;
    }
    if (!(f.coeff(0, i) == expect)) {
      std::ostringstream out;
      out << "neutral element fails at a_{0," << i << "}";
      rep.fail(out.str());
      break;
    }
  }
  auto ctx = make_free_context({"x", "y", "z"}, f.params(), f.trunc());
  Series x = Series::variable(ctx, 0);
  Series y = Series::variable(ctx, 1);
  Series z = Series::variable(ctx, 2);
  Series lhs = f.eval(f.eval(x, y), z);
  Series rhs = f.eval(x, f.eval(y, z));
  Series diff = lhs - rhs;
  if (!diff.is_zero()) {
    const auto& [m, c] = *diff.terms().begin();
    std::ostringstream out;
    out << "associativity fails at monomial x^" << m[0] << " y^" << m[1] << " z^" << m[2];
    rep.fail(out.str());
  }
  return rep;
}

}  // namespace torfan
