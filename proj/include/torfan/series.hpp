#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "torfan/coeff.hpp"
#include "torfan/error.hpp"
#include "torfan/fan.hpp"

namespace torfan {

// Exponent vector of a series monomial.
using Mono = std::vector<int>;

inline int mono_degree(const Mono& m) {
  int d = 0;
  for (int e : m) d += e;
  return d;
}

// Graded lexicographic: degree first, then lexicographic on exponents.
struct GradedLexLess {
  bool operator()(const Mono& a, const Mono& b) const {
    int da = mono_degree(a), db = mono_degree(b);
    if (da != db) return da < db;
    return a < b;
  }
};

// Shared context of a truncated series: variable labels, coefficient ring,
// truncation degree, and (optionally) the fan whose Stanley-Reisner ideal is
// divided out.
struct SeriesContext {
  std::vector<std::string> labels;
  ParamSpecPtr params;
  int trunc = 0;
  FanPtr fan;  // null: free truncated polynomial ring

  bool matches(const SeriesContext& o) const {
    if (labels != o.labels || trunc != o.trunc || !same_spec(params, o.params))
      return false;
    if (!fan != !o.fan) return false;
    return !fan || fan->signature() == o.fan->signature();
  }
};

using SeriesCtxPtr = std::shared_ptr<const SeriesContext>;

inline SeriesCtxPtr make_free_context(std::vector<std::string> labels, ParamSpecPtr params,
                                      int trunc) {
  if (trunc < 1) throw DomainError("series context: truncation degree must be >= 1");
  auto ctx = std::make_shared<SeriesContext>();
  ctx->labels = std::move(labels);
  ctx->params = std::move(params);
  ctx->trunc = trunc;
  return ctx;
}

inline SeriesCtxPtr make_fan_context(FanPtr fan, ParamSpecPtr params, int trunc) {
  if (trunc < 1) throw DomainError("series context: truncation degree must be >= 1");
  auto ctx = std::make_shared<SeriesContext>();
  ctx->labels = fan->labels();
  ctx->params = std::move(params);
  ctx->trunc = trunc;
  ctx->fan = std::move(fan);
  return ctx;
}

inline void require_same_context(const SeriesCtxPtr& a, const SeriesCtxPtr& b,
                                 const char* where) {
  if (a == b) return;
  if (!a || !b || !a->matches(*b))
    throw StructuralError(std::string(where) + ": mismatched series contexts");
}

// Truncated power series: finitely many terms of degree <= trunc, and, when
// a fan is attached, only terms whose support is a face.
class Series {
public:
  using TermMap = std::map<Mono, CoeffElem, GradedLexLess>;

  Series() = default;
  explicit Series(SeriesCtxPtr ctx) : ctx_(std::move(ctx)) {}

  static Series zero(SeriesCtxPtr ctx) { return Series(std::move(ctx)); }

  static Series constant(SeriesCtxPtr ctx, CoeffElem c) {
    Series s(std::move(ctx));
    s.add_term(Mono(s.vars(), 0), std::move(c));
    return s;
  }

  static Series constant(SeriesCtxPtr ctx, Int n) {
    auto c = CoeffElem::from_int(ctx->params, std::move(n));
    return constant(std::move(ctx), std::move(c));
  }

  static Series variable(SeriesCtxPtr ctx, std::size_t i) {
    Series s(ctx);
    if (i >= s.vars()) throw DomainError("series: variable index out of range");
    Mono m(s.vars(), 0);
    m[i] = 1;
    s.add_term(std::move(m), CoeffElem::one(ctx->params));
    return s;
  }

  static Series monomial(SeriesCtxPtr ctx, Mono m, CoeffElem c) {
    Series s(std::move(ctx));
    if (m.size() != s.vars()) throw StructuralError("series: monomial length mismatch");
    for (int e : m)
      if (e < 0) throw DomainError("series: negative exponent");
    s.add_term(std::move(m), std::move(c));
    return s;
  }

  static Series from_terms(SeriesCtxPtr ctx, const std::vector<std::pair<Mono, CoeffElem>>& terms) {
    Series s(std::move(ctx));
    for (const auto& [m, c] : terms) {
      if (m.size() != s.vars()) throw StructuralError("series: monomial length mismatch");
      for (int e : m)
        if (e < 0) throw DomainError("series: negative exponent");
      s.add_term(m, c);
    }
    return s;
  }

  const SeriesCtxPtr& ctx() const { return ctx_; }
  std::size_t vars() const { return ctx_->labels.size(); }
  int trunc() const { return ctx_->trunc; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  CoeffElem coeff_of(const Mono& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? CoeffElem::zero(ctx_->params) : it->second;
  }

  CoeffElem constant_term() const { return coeff_of(Mono(vars(), 0)); }

  int degree() const {  // -1 for zero
    int d = -1;
    for (const auto& [m, c] : terms_) d = std::max(d, mono_degree(m));
    return d;
  }

  friend Series operator+(const Series& a, const Series& b) {
    require_same_context(a.ctx_, b.ctx_, "series add");
    Series r = a;
    for (const auto& [m, c] : b.terms_) r.add_term(m, c);
    return r;
  }

  friend Series operator-(const Series& a) {
    Series r = a;
    for (auto& [m, c] : r.terms_) c = -c;
    return r;
  }

  friend Series operator-(const Series& a, const Series& b) { return a + (-b); }

  friend Series operator*(const Series& a, const Series& b) {
    require_same_context(a.ctx_, b.ctx_, "series mul");
    Series r(a.ctx_);
    const int n = a.ctx_->trunc;
    for (const auto& [ma, ca] : a.terms_) {
      const int da = mono_degree(ma);
      for (const auto& [mb, cb] : b.terms_) {
        if (da + mono_degree(mb) > n) continue;
        Mono m(ma.size());
        for (std::size_t i = 0; i < ma.size(); ++i) m[i] = ma[i] + mb[i];
        r.add_term(std::move(m), ca * cb);
      }
    }
    return r;
  }

  Series& operator+=(const Series& b) { return *this = *this + b; }
  Series& operator-=(const Series& b) { return *this = *this - b; }
  Series& operator*=(const Series& b) { return *this = *this * b; }

  Series scaled(const CoeffElem& c) const {
    require_same_spec(c.spec(), ctx_->params, "series scale");
    Series r(ctx_);
    for (const auto& [m, v] : terms_) r.add_term(m, v * c);
    return r;
  }

  Series pow(int e) const {
    if (e < 0) throw DomainError("series: negative power");
    Series r = constant(ctx_, Int(1));
    for (int i = 0; i < e; ++i) r *= *this;
    return r;
  }

  bool operator==(const Series& o) const {
    require_same_context(ctx_, o.ctx_, "series eq");
    return terms_ == o.terms_;
  }
  bool operator!=(const Series& o) const { return !(*this == o); }

  // Substitution homomorphism: variable i maps to images[i], which must live
  // in the target context and have zero constant term.
  Series substitute(const std::vector<Series>& images, const SeriesCtxPtr& target) const {
    if (images.size() != vars())
      throw StructuralError("substitute: one image per variable required");
    for (const auto& img : images) {
      require_same_context(img.ctx_, target, "substitute");
      if (!img.constant_term().is_zero())
        throw DomainError("substitute: image has nonzero constant term");
    }
    require_same_spec(ctx_->params, target->params, "substitute");
    std::vector<std::vector<Series>> pows(images.size());
    auto power = [&](std::size_t v, int e) -> const Series& {
      auto& cache = pows[v];
      if (cache.empty()) cache.push_back(constant(target, Int(1)));
      while (static_cast<int>(cache.size()) <= e) cache.push_back(cache.back() * images[v]);
      return cache[e];
    };
    Series r(target);
    for (const auto& [m, c] : terms_) {
      Series t = constant(target, c);
      for (std::size_t v = 0; v < m.size() && !t.is_zero(); ++v)
        if (m[v] > 0) t *= power(v, m[v]);
      r += t;
    }
    return r;
  }

  // Coefficient-wise ring homomorphism; the shape of terms is preserved up
  // to dropped zeros.
  Series specialize(const std::map<std::string, CoeffElem>& assign,
                    const ParamSpecPtr& target_params) const {
    auto ctx = std::make_shared<SeriesContext>();
    ctx->labels = ctx_->labels;
    ctx->params = target_params;
    ctx->trunc = ctx_->trunc;
    ctx->fan = ctx_->fan;
    Series r(ctx);
    for (const auto& [m, c] : terms_) r.add_term(m, c.specialize(assign, target_params));
    return r;
  }

  Series truncated(int new_trunc) const {
    if (new_trunc > ctx_->trunc)
      throw DomainError("truncate: cannot extend a truncated series");
    auto ctx = std::make_shared<SeriesContext>();
    ctx->labels = ctx_->labels;
    ctx->params = ctx_->params;
    ctx->trunc = new_trunc;
    ctx->fan = ctx_->fan;
    Series r(ctx);
    for (const auto& [m, c] : terms_) r.add_term(m, c);
    return r;
  }

  static std::uint64_t support_mask(const Mono& m) {
    std::uint64_t s = 0;
    for (std::size_t i = 0; i < m.size(); ++i)
      if (m[i] > 0) s |= std::uint64_t(1) << i;
    return s;
  }

  std::string mono_str(const Mono& m) const {
    std::ostringstream out;
    bool first = true;
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (m[i] == 0) continue;
      if (!first) out << "*";
      out << ctx_->labels[i];
      if (m[i] != 1) out << "^" << m[i];
      first = false;
    }
    return out.str();
  }

  std::string str() const {
    if (terms_.empty()) return "0";
    std::ostringstream out;
    bool first = true;
    for (const auto& [m, c] : terms_) {
      bool neg = false;
      std::string body;
      std::string mono = mono_str(m);
      if (c.terms().size() == 1) {
        const auto& [exps, a] = *c.terms().begin();
        neg = a < 0;
        CoeffElem mag = CoeffElem::monomial(c.spec(), exps, neg ? Int(-a) : a);
        std::string cs = mag.str();
        if (mono.empty())
          body = cs;
        else if (mag.is_one())
          body = mono;
        else
          body = cs + "*" + mono;
      } else {
        body = "(" + c.str() + ")";
        if (!mono.empty()) body += "*" + mono;
      }
      if (first)
        out << (neg ? "-" : "") << body;
      else
        out << (neg ? " - " : " + ") << body;
      first = false;
    }
    return out.str();
  }

private:
  void add_term(Mono m, CoeffElem c) {
    require_same_spec(c.spec(), ctx_->params, "series term");
    if (c.is_zero()) return;
    if (mono_degree(m) > ctx_->trunc) return;
    if (ctx_->fan && !ctx_->fan->is_face_mask(support_mask(m))) return;
    auto it = terms_.find(m);
    if (it == terms_.end()) {
      terms_.emplace(std::move(m), std::move(c));
    } else {
      it->second += c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  SeriesCtxPtr ctx_;
  TermMap terms_;
};

}  // namespace torfan
