#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "torfan/error.hpp"
#include "torfan/numeric.hpp"

namespace torfan {

// Coefficient ring description: Z extended by an ordered list of named
// parameters, a subset of which is invertible (admits negative exponents).
class ParamSpec {
public:
  ParamSpec() = default;

  ParamSpec(std::vector<std::string> names, const std::vector<std::string>& invertible)
      : names_(std::move(names)), invertible_(names_.size(), false) {
    for (std::size_t i = 0; i < names_.size(); ++i) {
      if (names_[i].empty()) throw DomainError("ParamSpec: empty parameter name");
      for (std::size_t j = i + 1; j < names_.size(); ++j)
        if (names_[i] == names_[j])
          throw DomainError("ParamSpec: duplicate parameter '" + names_[i] + "'");
    }
    for (const auto& name : invertible) {
      auto idx = index_of(name);
      if (!idx) throw DomainError("ParamSpec: invertible name '" + name + "' not a parameter");
      invertible_[*idx] = true;
    }
  }

  static std::shared_ptr<const ParamSpec> make(std::vector<std::string> names = {},
                                               std::vector<std::string> invertible = {}) {
    return std::make_shared<const ParamSpec>(std::move(names), invertible);
  }

  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  const std::string& name(std::size_t i) const { return names_.at(i); }
  bool is_invertible(std::size_t i) const { return invertible_.at(i); }

  std::optional<std::size_t> index_of(const std::string& name) const {
    for (std::size_t i = 0; i < names_.size(); ++i)
      if (names_[i] == name) return i;
    return std::nullopt;
  }

  bool operator==(const ParamSpec& o) const {
    return names_ == o.names_ && invertible_ == o.invertible_;
  }
  bool operator!=(const ParamSpec& o) const { return !(*this == o); }

private:
  std::vector<std::string> names_;
  std::vector<bool> invertible_;
};

using ParamSpecPtr = std::shared_ptr<const ParamSpec>;

inline bool same_spec(const ParamSpecPtr& a, const ParamSpecPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return *a == *b;
}

inline void require_same_spec(const ParamSpecPtr& a, const ParamSpecPtr& b,
                              const char* where) {
  if (!same_spec(a, b))
    throw StructuralError(std::string(where) + ": mismatched parameter rings");
}

// Element of the coefficient ring: finitely many terms, each a nonzero
// integer times a monomial in the parameters. Exponent vectors are keyed in
// lexicographic order; negative exponents only at invertible positions.
class CoeffElem {
public:
  using Exps = std::vector<int>;
  using TermMap = std::map<Exps, Int>;

  CoeffElem() : spec_(empty_spec()) {}

  explicit CoeffElem(ParamSpecPtr spec) : spec_(std::move(spec)) { check_spec(); }

  static CoeffElem zero(ParamSpecPtr spec) { return CoeffElem(std::move(spec)); }

  static CoeffElem from_int(ParamSpecPtr spec, Int value) {
    CoeffElem r(std::move(spec));
    if (value != 0) r.terms_.emplace(Exps(r.spec_->size(), 0), std::move(value));
    return r;
  }

  static CoeffElem one(ParamSpecPtr spec) { return from_int(std::move(spec), 1); }

  static CoeffElem monomial(ParamSpecPtr spec, Exps exps, Int coeff) {
    CoeffElem r(std::move(spec));
    if (exps.size() != r.spec_->size())
      throw StructuralError("CoeffElem: exponent vector length mismatch");
    r.validate_exps(exps);
    if (coeff != 0) r.terms_.emplace(std::move(exps), std::move(coeff));
    return r;
  }

  static CoeffElem parameter(ParamSpecPtr spec, const std::string& name) {
    auto idx = spec->index_of(name);
    if (!idx) throw DomainError("CoeffElem: unknown parameter '" + name + "'");
    Exps e(spec->size(), 0);
    e[*idx] = 1;
    return monomial(std::move(spec), std::move(e), 1);
  }

  static CoeffElem from_terms(ParamSpecPtr spec,
                              const std::vector<std::pair<Exps, Int>>& terms) {
    CoeffElem r(std::move(spec));
    for (const auto& [exps, c] : terms) {
      if (exps.size() != r.spec_->size())
        throw StructuralError("CoeffElem: exponent vector length mismatch");
      r.validate_exps(exps);
      r.add_term(exps, c);
    }
    return r;
  }

  const ParamSpecPtr& spec() const { return spec_; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  bool is_one() const {
    return terms_.size() == 1 && terms_.begin()->second == 1 &&
           is_constant_exps(terms_.begin()->first);
  }

  // Integer value of a constant element; error if a parameter occurs.
  Int as_int() const {
    if (terms_.empty()) return 0;
    if (terms_.size() == 1 && is_constant_exps(terms_.begin()->first))
      return terms_.begin()->second;
    throw DomainError("CoeffElem: not an integer constant");
  }

  // Unit test used across the library: plus or minus a monomial whose
  // support lies in the invertible parameters.
  bool is_unit() const {
    if (terms_.size() != 1) return false;
    const auto& [exps, c] = *terms_.begin();
    if (c != 1 && c != -1) return false;
    for (std::size_t i = 0; i < exps.size(); ++i)
      if (exps[i] != 0 && !spec_->is_invertible(i)) return false;
    return true;
  }

  CoeffElem unit_inverse() const {
    if (!is_unit()) throw DomainError("CoeffElem: not a unit");
    const auto& [exps, c] = *terms_.begin();
    Exps inv(exps.size());
    for (std::size_t i = 0; i < exps.size(); ++i) inv[i] = -exps[i];
    return monomial(spec_, std::move(inv), c);
  }

  friend CoeffElem operator+(const CoeffElem& a, const CoeffElem& b) {
    require_same_spec(a.spec_, b.spec_, "coeff add");
    CoeffElem r = a;
    for (const auto& [exps, c] : b.terms_) r.add_term(exps, c);
    return r;
  }

  friend CoeffElem operator-(const CoeffElem& a) {
    CoeffElem r = a;
    for (auto& [exps, c] : r.terms_) c = -c;
    return r;
  }

  friend CoeffElem operator-(const CoeffElem& a, const CoeffElem& b) { return a + (-b); }

  friend CoeffElem operator*(const CoeffElem& a, const CoeffElem& b) {
    require_same_spec(a.spec_, b.spec_, "coeff mul");
    CoeffElem r(a.spec_);
    for (const auto& [ea, ca] : a.terms_)
      for (const auto& [eb, cb] : b.terms_) {
        Exps e(ea.size());
        for (std::size_t i = 0; i < ea.size(); ++i) e[i] = ea[i] + eb[i];
        r.add_term(e, ca * cb);
      }
    return r;
  }

  CoeffElem& operator+=(const CoeffElem& b) { return *this = *this + b; }
  CoeffElem& operator-=(const CoeffElem& b) { return *this = *this - b; }
  CoeffElem& operator*=(const CoeffElem& b) { return *this = *this * b; }

  CoeffElem pow(int e) const {
    if (e < 0) return unit_inverse().pow(-e);
    CoeffElem r = one(spec_);
    CoeffElem b = *this;
    int k = e;
    while (k > 0) {
      if (k & 1) r *= b;
      if (k >>= 1) b *= b;
    }
    return r;
  }

  bool operator==(const CoeffElem& o) const {
    require_same_spec(spec_, o.spec_, "coeff eq");
    return terms_ == o.terms_;
  }
  bool operator!=(const CoeffElem& o) const { return !(*this == o); }

  // Total order compatible with the term maps of series; spec-equality assumed.
  bool operator<(const CoeffElem& o) const { return terms_ < o.terms_; }

  // Ring homomorphism into the coefficient ring over `target`: every
  // parameter occurring in this element must be assigned, and assignments to
  // invertible parameters must be units.
  CoeffElem specialize(const std::map<std::string, CoeffElem>& assign,
                       const ParamSpecPtr& target) const {
    for (const auto& [name, value] : assign) {
      if (!spec_->index_of(name))
        throw DomainError("specialize: '" + name + "' is not a source parameter");
      require_same_spec(value.spec(), target, "specialize");
    }
    std::vector<std::optional<CoeffElem>> images(spec_->size());
    for (std::size_t i = 0; i < spec_->size(); ++i) {
      auto it = assign.find(spec_->name(i));
      if (it == assign.end()) continue;
      if (spec_->is_invertible(i) && !it->second.is_unit())
        throw DomainError("specialize: non-unit value for invertible parameter '" +
                          spec_->name(i) + "'");
      images[i] = it->second;
    }
    CoeffElem r = zero(target);
    for (const auto& [exps, c] : terms_) {
      CoeffElem term = from_int(target, c);
      for (std::size_t i = 0; i < exps.size(); ++i) {
        if (exps[i] == 0) continue;
        if (!images[i])
          throw DomainError("specialize: parameter '" + spec_->name(i) +
                            "' occurs but has no assigned value");
        term *= images[i]->pow(exps[i]);
      }
      r += term;
    }
    return r;
  }

  std::string str() const {
    if (terms_.empty()) return "0";
    std::ostringstream out;
    bool first = true;
    for (const auto& [exps, c] : terms_) {
      Int a = c;
      if (first) {
        if (a < 0) {
          out << "-";
          a = -a;
        }
      } else {
        out << (a < 0 ? " - " : " + ");
        if (a < 0) a = -a;
      }
      std::string mono = mono_str(exps);
      if (mono.empty())
        out << a;
      else if (a == 1)
        out << mono;
      else
        out << a << "*" << mono;
      first = false;
    }
    return out.str();
  }

  static const ParamSpecPtr& empty_spec() {
    static const ParamSpecPtr spec = ParamSpec::make();
    return spec;
  }

private:
  void check_spec() const {
    if (!spec_) throw StructuralError("CoeffElem: null ParamSpec");
  }

  static bool is_constant_exps(const Exps& e) {
    return std::all_of(e.begin(), e.end(), [](int x) { return x == 0; });
  }

  void validate_exps(const Exps& exps) const {
    for (std::size_t i = 0; i < exps.size(); ++i)
      if (exps[i] < 0 && !spec_->is_invertible(i))
        throw DomainError("CoeffElem: negative exponent at non-invertible parameter '" +
                          spec_->name(i) + "'");
  }

  void add_term(const Exps& exps, const Int& c) {
    if (c == 0) return;
    auto [it, inserted] = terms_.emplace(exps, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }

  std::string mono_str(const Exps& exps) const {
    std::ostringstream out;
    bool first = true;
    for (std::size_t i = 0; i < exps.size(); ++i) {
      if (exps[i] == 0) continue;
      if (!first) out << "*";
      out << spec_->name(i);
      if (exps[i] != 1) out << "^" << exps[i];
      first = false;
    }
    return out.str();
  }

  ParamSpecPtr spec_;
  TermMap terms_;
};

}  // namespace torfan
