#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "torfan/error.hpp"
#include "torfan/fan.hpp"
#include "torfan/fgl.hpp"
#include "torfan/series.hpp"

namespace torfan {

inline void require_fan_series(const Series& f, const char* where) {
  if (!f.ctx()->fan) throw StructuralError(std::string(where) + ": series has no fan attached");
}

// Kill every variable outside the cone; the image lives in the same ring.
inline Series restrict_to_cone(const Series& f, const Cone& cone) {
  require_fan_series(f, "restrict_to_cone");
  if (!f.ctx()->fan->is_face(cone))
    throw DomainError("restrict_to_cone: not a cone of the fan");
  const std::uint64_t mask = Fan::mask_of(cone);
  std::vector<std::pair<Mono, CoeffElem>> kept;
  for (const auto& [m, c] : f.terms())
    if ((Series::support_mask(m) & ~mask) == 0) kept.emplace_back(m, c);
  return Series::from_terms(f.ctx(), kept);
}

inline Cone cone_intersection(const Cone& a, const Cone& b) {
  Cone r;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(r));
  return r;
}

// Glue a tuple of sections, one per maximal cone, into the unique global
// element restricting to them: inclusion-exclusion over the nonempty sets of
// maximal cones. Compatibility is checked pairwise first.
inline Series glue_tuple(const std::vector<Series>& tuple) {
  if (tuple.empty()) throw DomainError("glue_tuple: empty tuple");
  const auto& ctx = tuple[0].ctx();
  if (!ctx->fan) throw StructuralError("glue_tuple: series have no fan attached");
  const Fan& fan = *ctx->fan;
  const std::size_t d = fan.max_cone_count();
  if (tuple.size() != d)
    throw StructuralError("glue_tuple: expected one section per maximal cone");
  if (d > 20) throw UnsupportedError("glue_tuple: too many maximal cones");
  for (std::size_t i = 0; i < d; ++i) {
    require_same_context(tuple[i].ctx(), ctx, "glue_tuple");
    if (!(restrict_to_cone(tuple[i], fan.max_cone(i)) == tuple[i]))
      throw DomainError("glue_tuple: section " + std::to_string(i) +
                        " is not supported on its cone");
  }
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i + 1; j < d; ++j) {
      Cone shared = cone_intersection(fan.max_cone(i), fan.max_cone(j));
      Series diff = restrict_to_cone(tuple[i], shared) - restrict_to_cone(tuple[j], shared);
      if (!diff.is_zero()) {
        const auto& m = diff.terms().begin()->first;
        std::string mono = mono_degree(m) == 0 ? "1" : diff.mono_str(m);
        throw IncompatibleTupleError(
            i, j, mono,
            "glue_tuple: sections on maximal cones " + std::to_string(i) + " and " +
                std::to_string(j) + " disagree at monomial " + mono);
      }
    }
  Series out = Series::zero(ctx);
  for (std::uint64_t s = 1; s < (std::uint64_t(1) << d); ++s) {
    std::size_t lead = 0;
    while (!(s >> lead & 1)) ++lead;
    Cone shared = fan.max_cone(lead);
    for (std::size_t i = lead + 1; i < d; ++i)
      if (s >> i & 1) shared = cone_intersection(shared, fan.max_cone(i));
    Series g = restrict_to_cone(tuple[lead], shared);
    if (__builtin_popcountll(s) % 2 == 1)
      out += g;
    else
      out -= g;
  }
  return out;
}

// First Chern class of the line bundle of a character: the formal sum over
// all rays of the pairing multiples of the ray classes.
inline Series character_class(const SeriesCtxPtr& ctx, const FormalGroupLaw& f,
                              const std::vector<Int>& alpha) {
  if (!ctx->fan) throw StructuralError("character_class: fan context required");
  const Fan& fan = *ctx->fan;
  if (alpha.size() != static_cast<std::size_t>(fan.dim()))
    throw StructuralError("character_class: character length mismatch");
  Series acc = Series::zero(ctx);
  for (std::size_t r = 0; r < fan.ray_count(); ++r) {
    Int n = 0;
    for (int j = 0; j < fan.dim(); ++j) n += alpha[j] * fan.ray(r)[j];
    if (n == 0) continue;
    acc = formal_sum(f, acc, int_multiple(f, n, Series::variable(ctx, r)));
  }
  return acc;
}

// Generators-and-relations description of a quotient of a free truncated
// series ring.
struct Presentation {
  SeriesCtxPtr ctx;  // free ring on the presentation's variables
  std::vector<Series> relations;
};

// The equivariant model: one variable per ray, one square-free monomial per
// minimal non-face.
inline Presentation equivariant_presentation(const FanPtr& fan, const FormalGroupLaw& f) {
  Presentation p;
  p.ctx = make_free_context(fan->labels(), f.params(), f.trunc());
  for (const auto& nf : fan->minimal_nonfaces()) {
    Mono m(fan->ray_count(), 0);
    for (int r : nf) m[r] = 1;
    p.relations.push_back(Series::monomial(p.ctx, std::move(m), CoeffElem::one(f.params())));
  }
  return p;
}

namespace detail {

// Elimination data for a full-dimensional cone tau: the surviving variables
// and the substitution images of all variables.
struct Elimination {
  SeriesCtxPtr target;           // free ring on rays outside tau
  std::vector<Series> images;    // per source ray
  std::vector<int> kept_rays;    // ascending ray indices outside tau
};

inline Elimination make_elimination(const FanPtr& fan, const Cone& tau,
                                    const FormalGroupLaw& f) {
  if (tau.size() != static_cast<std::size_t>(fan->dim()))
    throw DomainError("ordinary model: tau must be full-dimensional");
  if (!fan->is_face(tau)) throw DomainError("ordinary model: tau is not a cone of the fan");
  Elimination e;
  std::vector<std::string> labels;
  for (std::size_t r = 0; r < fan->ray_count(); ++r)
    if (std::find(tau.begin(), tau.end(), static_cast<int>(r)) == tau.end()) {
      e.kept_rays.push_back(static_cast<int>(r));
      labels.push_back(fan->label(r));
    }
  e.target = make_free_context(std::move(labels), f.params(), f.trunc());
  IntMat duals = dual_basis(*fan, tau);
  e.images.resize(fan->ray_count(), Series::zero(e.target));
  for (std::size_t k = 0; k < e.kept_rays.size(); ++k)
    e.images[e.kept_rays[k]] = Series::variable(e.target, k);
  for (std::size_t t = 0; t < tau.size(); ++t) {
    // x_rho, rho in tau(1), equals chi of the character class of the dual
    // character alpha_{tau,rho} expressed in the surviving variables
    Series acc = Series::zero(e.target);
    for (std::size_t k = 0; k < e.kept_rays.size(); ++k) {
      Int n = 0;
      for (int j = 0; j < fan->dim(); ++j) n += duals(t, j) * fan->ray(e.kept_rays[k])[j];
      if (n == 0) continue;
      acc = formal_sum(f, acc, int_multiple(f, n, Series::variable(e.target, k)));
    }
    e.images[tau[t]] = formal_inverse(f, acc);
  }
  return e;
}

}  // namespace detail

// Image of a fan-supported element in the ordinary model at tau: the tau
// variables are rewritten into the surviving ones.
inline Series ordinary_eliminate(const Series& g, const Cone& tau, const FormalGroupLaw& f) {
  require_fan_series(g, "ordinary_eliminate");
  auto e = detail::make_elimination(g.ctx()->fan, tau, f);
  return g.substitute(e.images, e.target);
}

// The ordinary model: variables are the rays outside tau, relations are the
// elimination images of the Stanley-Reisner generators.
inline Presentation ordinary_presentation(const FanPtr& fan, const FormalGroupLaw& f,
                                          const Cone& tau) {
  auto e = detail::make_elimination(fan, tau, f);
  auto source = make_free_context(fan->labels(), f.params(), f.trunc());
  Presentation p;
  p.ctx = e.target;
  for (const auto& nf : fan->minimal_nonfaces()) {
    Mono m(fan->ray_count(), 0);
    for (int r : nf) m[r] = 1;
    Series gen = Series::monomial(source, std::move(m), CoeffElem::one(f.params()));
    p.relations.push_back(gen.substitute(e.images, e.target));
  }
  return p;
}

// Z-lattice model of a quotient by a relation list, truncated at the context
// degree; supports exact membership and graded ranks. Coefficients must be
// plain integers.
class QuotientModel {
public:
  QuotientModel(SeriesCtxPtr ctx, const std::vector<Series>& relations)
      : ctx_(std::move(ctx)) {
    if (ctx_->params->size() != 0)
      throw UnsupportedError("quotient model: integer coefficients required");
    if (ctx_->fan)
      throw StructuralError("quotient model: free-ring context required");
    enumerate_columns();
    for (const auto& g : relations) {
      require_same_context(g.ctx(), ctx_, "quotient model");
      if (g.is_zero()) continue;
      int low = mono_degree(g.terms().begin()->first);
      std::vector<Mono> mults = monomials_up_to(ctx_->trunc - low);
      for (const auto& m : mults) {
        Series prod = g * Series::monomial(ctx_, m, CoeffElem::one(ctx_->params));
        SparseRow row = to_row(prod);
        if (!row.empty()) echelon_.insert(std::move(row));
      }
    }
  }

  const SeriesCtxPtr& ctx() const { return ctx_; }

  bool contains(const Series& f) const {
    require_same_context(f.ctx(), ctx_, "quotient model membership");
    return echelon_.reduces_to_zero(to_row(f));
  }

  // Rank over Z of the degree-d layer of the filtered quotient.
  std::size_t graded_rank(int d) const {
    if (d < 0 || d > ctx_->trunc) return 0;
    std::size_t monos = 0;
    for (const auto& m : columns_)
      if (mono_degree(m) == d) ++monos;
    std::size_t pivots = 0;
    for (const auto& [col, row] : echelon_.pivots())
      if (mono_degree(columns_[col]) == d) ++pivots;
    return monos - pivots;
  }

private:
  // Degree descending, graded-lex within a degree.
  void enumerate_columns() {
    const std::size_t k = ctx_->labels.size();
    std::vector<std::vector<Mono>> by_deg(ctx_->trunc + 1);
    Mono cur(k, 0);
    enumerate(cur, 0, 0, by_deg);
    for (int d = ctx_->trunc; d >= 0; --d) {
      std::sort(by_deg[d].begin(), by_deg[d].end());
      for (auto& m : by_deg[d]) {
        col_index_.emplace(m, columns_.size());
        columns_.push_back(std::move(m));
      }
    }
  }

  void enumerate(Mono& cur, std::size_t pos, int deg, std::vector<std::vector<Mono>>& out) {
    if (pos == cur.size()) {
      out[deg].push_back(cur);
      return;
    }
    for (int e = 0; deg + e <= ctx_->trunc; ++e) {
      cur[pos] = e;
      enumerate(cur, pos + 1, deg + e, out);
    }
    cur[pos] = 0;
  }

  std::vector<Mono> monomials_up_to(int maxdeg) const {
    std::vector<Mono> r;
    for (auto it = columns_.rbegin(); it != columns_.rend(); ++it)
      if (mono_degree(*it) <= maxdeg) r.push_back(*it);
    return r;
  }

  SparseRow to_row(const Series& f) const {
    SparseRow row;
    for (const auto& [m, c] : f.terms()) row[col_index_.at(m)] = c.as_int();
    return row;
  }

  SeriesCtxPtr ctx_;
  std::vector<Mono> columns_;
  std::map<Mono, std::size_t> col_index_;
  RowEchelon echelon_;
};

inline bool ideal_membership(const Series& f, const Presentation& p) {
  QuotientModel model(p.ctx, p.relations);
  return model.contains(f);
}

inline std::size_t graded_rank(const Presentation& p, int d) {
  QuotientModel model(p.ctx, p.relations);
  return model.graded_rank(d);
}

}  // namespace torfan
