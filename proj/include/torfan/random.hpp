#pragma once

#include <random>
#include <vector>

#include "torfan/series.hpp"

namespace torfan {

// Deterministic sample element: a handful of terms, each supported on a
// randomly chosen maximal cone. Raw engine draws only, so the stream is
// stable across standard library implementations.
inline Series random_face_series(const SeriesCtxPtr& ctx, std::mt19937_64& rng,
                                 int term_count, int max_deg) {
  if (!ctx->fan) throw StructuralError("random_face_series: fan context required");
  const Fan& fan = *ctx->fan;
  auto draw = [&rng](int n) { return static_cast<int>(rng() % static_cast<std::uint64_t>(n)); };
  std::vector<std::pair<Mono, CoeffElem>> terms;
  for (int t = 0; t < term_count; ++t) {
    const Cone& cone = fan.max_cone(draw(static_cast<int>(fan.max_cone_count())));
    Mono m(fan.ray_count(), 0);
    int deg = draw(max_deg + 1);
    for (int d = 0; d < deg && !cone.empty(); ++d) ++m[cone[draw(static_cast<int>(cone.size()))]];
    int c = draw(7) - 3;
    if (c == 0) c = 1;
    terms.emplace_back(std::move(m), CoeffElem::from_int(ctx->params, c));
  }
  return Series::from_terms(ctx, terms);
}

}  // namespace torfan
