#pragma once

#include <cctype>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "torfan/blowup.hpp"
#include "torfan/catalog.hpp"
#include "torfan/coeff.hpp"
#include "torfan/error.hpp"
#include "torfan/fan.hpp"
#include "torfan/fgl.hpp"
#include "torfan/json_io.hpp"
#include "torfan/numeric.hpp"
#include "torfan/piecewise.hpp"
#include "torfan/random.hpp"
#include "torfan/series.hpp"
#include "torfan/sr.hpp"

namespace torfan {

// Malformed command shape (bad flag value, wrong option count).
class UsageError : public Error {
public:
  using Error::Error;
};

// Exit codes: 0 success, 1 check failure, 2 usage error, 3 parse or
// validation error.
struct CommandRequest {
  std::string command;
  std::string fan_source;
  std::string fgl;  // empty: per-command default
  int trunc = 6;
  std::vector<std::pair<std::string, Int>> assignments;
  std::vector<std::string> elements;
  std::string format = "text";
  Cone center;                           // blowup
  Cone tau;                              // ordinary; empty: first maximal cone
  std::string mode = "polynomial";       // piecewise
  std::string pull_file;                 // blowup: element downstairs
  std::string push_file;                 // blowup: element upstairs
  int courant = -1;                      // piecewise: ray class instead of a file
  std::vector<std::vector<Int>> eval_points;  // piecewise
  bool ranks = false;                    // ordinary
  int samples = 20;                      // selftest
  std::uint64_t seed = 0;                // selftest
  std::optional<std::string> only;       // selftest catalog subset
  bool trusted = false;
};

struct CommandResult {
  int code = 0;
  std::string out;
  std::string err;
};

namespace cli_detail {

inline bool try_parse_int(const std::string& s, Int& out) {
  if (s.empty()) return false;
  std::size_t i = (s[0] == '+' || s[0] == '-') ? 1 : 0;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  out = Int(s);
  return true;
}

inline bool is_name(const std::string& s) {
  if (s.empty() || !std::isalpha(static_cast<unsigned char>(s[0]))) return false;
  for (char c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  return true;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  if (s.empty()) return out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i)
    if (i == s.size() || s[i] == sep) {
      out.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  return out;
}

inline Cone parse_index_list(const std::string& s, const char* what) {
  Cone out;
  for (const auto& tok : split(s, ',')) {
    Int n;
    if (!try_parse_int(tok, n) || n < 0 || n > 63)
      throw UsageError(std::string(what) + ": ray index list expected, got '" + s + "'");
    out.push_back(static_cast<int>(n));
  }
  if (out.empty()) throw UsageError(std::string(what) + ": empty index list");
  Cone sorted = out;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw UsageError(std::string(what) + ": repeated index in '" + s + "'");
  return out;
}

inline std::vector<Int> parse_point(const std::string& s) {
  std::vector<Int> out;
  for (const auto& tok : split(s, ',')) {
    Int n;
    if (!try_parse_int(tok, n))
      throw UsageError("eval: integer point expected, got '" + s + "'");
    out.push_back(std::move(n));
  }
  if (out.empty()) throw UsageError("eval: empty point");
  return out;
}

inline std::pair<std::string, Int> parse_assignment(const std::string& s) {
  auto eq = s.find('=');
  if (eq == std::string::npos || eq == 0)
    throw UsageError("specialize: 'name=integer' expected, got '" + s + "'");
  Int v;
  if (!try_parse_int(s.substr(eq + 1), v))
    throw UsageError("specialize: 'name=integer' expected, got '" + s + "'");
  return {s.substr(0, eq), std::move(v)};
}

inline std::string join_ints(const std::vector<int>& v) {
  std::ostringstream out;
  for (std::size_t i = 0; i < v.size(); ++i) out << (i ? "," : "") << v[i];
  return out.str();
}

inline std::string join_point(const std::vector<Int>& v) {
  std::ostringstream out;
  for (std::size_t i = 0; i < v.size(); ++i) out << (i ? "," : "") << v[i];
  return out.str();
}

}  // namespace cli_detail

inline bool is_catalog_name(const std::string& s) {
  return s == "p1" || s == "dp6" || s.rfind("pn:", 0) == 0 ||
         s.rfind("hirzebruch:", 0) == 0;
}

// Catalog selector or JSON file path; files are validated strictly unless
// trusted.
inline FanPtr parse_fan_source(const std::string& src, bool trusted) {
  if (src.empty()) throw UsageError("a fan source is required");
  if (is_catalog_name(src)) return catalog_fan(src);
  auto data = fan_from_json(load_json_file(src));
  return Fan::make(std::move(data), trusted ? Fan::Check::trusted : Fan::Check::strict);
}

// Selector grammar: additive | mult:<int-or-name> | mult:unit:<name> |
// lorentz:<int-or-name> | generic:<table file>.
inline FormalGroupLaw parse_fgl(const std::string& selector, int trunc) {
  if (selector == "additive")
    return FormalGroupLaw::additive(CoeffElem::empty_spec(), trunc);
  auto coeff_arg = [](const std::string& tok, bool invertible) -> CoeffElem {
    Int n;
    if (cli_detail::try_parse_int(tok, n)) {
      if (invertible && n != 1 && n != -1)
        throw ParseError("law selector: '" + tok + "' is not a unit");
      return CoeffElem::from_int(CoeffElem::empty_spec(), std::move(n));
    }
    if (!cli_detail::is_name(tok))
      throw ParseError("law selector: bad parameter name '" + tok + "'");
    auto spec = ParamSpec::make({tok}, invertible ? std::vector<std::string>{tok}
                                                  : std::vector<std::string>{});
    return CoeffElem::parameter(spec, tok);
  };
  if (selector.rfind("mult:unit:", 0) == 0)
    return FormalGroupLaw::multiplicative(coeff_arg(selector.substr(10), true), trunc);
  if (selector.rfind("mult:", 0) == 0)
    return FormalGroupLaw::multiplicative(coeff_arg(selector.substr(5), false), trunc);
  if (selector.rfind("lorentz:", 0) == 0)
    return FormalGroupLaw::lorentz(coeff_arg(selector.substr(8), false), trunc);
  if (selector.rfind("generic:", 0) == 0)
    return fgl_table_from_json(load_json_file(selector.substr(8)), trunc);
  throw ParseError("unknown formal group law selector '" + selector + "'");
}

namespace cli_detail {

// Coefficient-ring specialization from name=integer assignments: assigned
// parameters are dropped from the target, the rest map to themselves.
struct SpecializationPlan {
  ParamSpecPtr target;
  std::map<std::string, CoeffElem> assign;
  std::string describe;  // "v=1,w=2"
};

inline SpecializationPlan make_plan(const ParamSpecPtr& src,
                                    const std::vector<std::pair<std::string, Int>>& as) {
  SpecializationPlan plan;
  std::set<std::string> assigned;
  for (const auto& [name, value] : as) {
    if (!src->index_of(name))
      throw ParseError("specialize: '" + name + "' is not a coefficient parameter");
    if (!assigned.insert(name).second)
      throw UsageError("specialize: parameter '" + name + "' assigned twice");
    if (!plan.describe.empty()) plan.describe += ",";
    plan.describe += name + "=" + value.str();
  }
  std::vector<std::string> names, invertible;
  for (std::size_t i = 0; i < src->size(); ++i)
    if (!assigned.count(src->name(i))) {
      names.push_back(src->name(i));
      if (src->is_invertible(i)) invertible.push_back(src->name(i));
    }
  plan.target = ParamSpec::make(std::move(names), std::move(invertible));
  for (const auto& [name, value] : as)
    plan.assign.emplace(name, CoeffElem::from_int(plan.target, value));
  for (std::size_t i = 0; i < src->size(); ++i)
    if (!assigned.count(src->name(i)))
      plan.assign.emplace(src->name(i), CoeffElem::parameter(plan.target, src->name(i)));
  return plan;
}

// Metadata header; fields appear in a fixed order and only when set.
struct Meta {
  std::string command, fan, fgl, tau, center, mode, specialize;
  int n = -1;
  std::optional<std::string> only;
  std::optional<std::uint64_t> seed;
  std::optional<int> samples;

  std::string text() const {
    std::ostringstream out;
    out << "# torfan " << command;
    if (!fan.empty()) out << " fan=" << fan;
    if (!fgl.empty()) out << " fgl=" << fgl;
    if (n >= 0) out << " N=" << n;
    if (!tau.empty()) out << " tau=" << tau;
    if (!center.empty()) out << " center=" << center;
    if (!mode.empty()) out << " mode=" << mode;
    if (!specialize.empty()) out << " specialize=" << specialize;
    if (seed) out << " seed=" << *seed;
    if (samples) out << " samples=" << *samples;
    if (only) out << " only=" << *only;
    out << "\n";
    return out.str();
  }

  Json json() const {
    Json j{{"command", command}};
    if (!fan.empty()) j["fan"] = fan;
    if (!fgl.empty()) j["fgl"] = fgl;
    if (n >= 0) j["N"] = n;
    if (!tau.empty()) j["tau"] = tau;
    if (!center.empty()) j["center"] = center;
    if (!mode.empty()) j["mode"] = mode;
    if (!specialize.empty()) j["specialize"] = specialize;
    if (seed) j["seed"] = *seed;
    if (samples) j["samples"] = *samples;
    if (only) j["only"] = *only;
    return j;
  }
};

inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

inline std::string label_list(const std::vector<std::string>& labels) {
  std::ostringstream out;
  for (std::size_t i = 0; i < labels.size(); ++i) out << (i ? " " : "") << labels[i];
  return out.str();
}

inline std::string default_fgl(const CommandRequest& req) {
  if (!req.fgl.empty()) return req.fgl;
  if (req.command == "blowup") return "mult:v";
  if (req.command == "piecewise")
    return req.mode == "exponential" ? "mult:1" : "additive";
  return "additive";
}

inline Series load_element(const std::string& path, const SeriesCtxPtr& ctx) {
  return series_from_json(load_json_file(path), ctx);
}

inline int cmd_validate(const CommandRequest& req, std::ostringstream& out, bool json) {
  Meta meta;
  meta.command = "validate";
  meta.fan = req.fan_source;
  FanData data;
  if (is_catalog_name(req.fan_source))
    data = catalog_fan(req.fan_source)->data();
  else
    data = fan_from_json(load_json_file(req.fan_source));
  auto rep = validate_fan(data, !req.trusted);
  if (!rep.ok) {
    if (json) {
      out << dump(Json{{"meta", meta.json()}, {"ok", false}, {"problems", rep.problems}});
    } else {
      out << meta.text() << "ok: no\n";
      for (const auto& p : rep.problems) out << "problem: " << p << "\n";
    }
    return 3;
  }
  auto fan = Fan::make(std::move(data), Fan::Check::trusted);
  if (json) {
    Json nonfaces = Json::array();
    for (const auto& nf : fan->minimal_nonfaces()) nonfaces.push_back(nf);
    out << dump(Json{{"meta", meta.json()},
                     {"ok", true},
                     {"dim", fan->dim()},
                     {"rays", fan->ray_count()},
                     {"max_cones", fan->max_cone_count()},
                     {"minimal_nonfaces", nonfaces}});
  } else {
    out << meta.text() << "ok: yes\n"
        << "dim: " << fan->dim() << "\n"
        << "rays: " << fan->ray_count() << "\n"
        << "max_cones: " << fan->max_cone_count() << "\n"
        << "minimal_nonfaces: " << fan->minimal_nonfaces().size() << "\n";
  }
  return 0;
}

inline void render_presentation(const Presentation& p, const Meta& meta,
                                const std::vector<std::pair<int, std::size_t>>& ranks,
                                std::ostringstream& out, bool json) {
  if (json) {
    Json j{{"meta", meta.json()}, {"presentation", presentation_to_json(p)}};
    if (!ranks.empty()) {
      Json r = Json::array();
      for (const auto& [d, rank] : ranks) r.push_back(Json{{"degree", d}, {"rank", rank}});
      j["ranks"] = r;
    }
    out << dump(j);
    return;
  }
  out << meta.text() << "variables: " << label_list(p.ctx->labels) << "\n"
      << "relations: " << p.relations.size() << "\n";
  for (const auto& r : p.relations) out << "relation: " << r.str() << "\n";
  for (const auto& [d, rank] : ranks) out << "rank[" << d << "]: " << rank << "\n";
}

inline int cmd_model(const CommandRequest& req, std::ostringstream& out, bool json) {
  auto fan = parse_fan_source(req.fan_source, req.trusted);
  auto law = parse_fgl(default_fgl(req), req.trunc);
  Meta meta;
  meta.command = "model";
  meta.fan = req.fan_source;
  meta.fgl = law.describe();
  meta.n = req.trunc;
  auto p = equivariant_presentation(fan, law);
  if (!req.assignments.empty()) {
    auto plan = make_plan(law.params(), req.assignments);
    meta.specialize = plan.describe;
    for (auto& r : p.relations) r = r.specialize(plan.assign, plan.target);
    p.ctx = make_free_context(p.ctx->labels, plan.target, p.ctx->trunc);
    for (auto& r : p.relations) require_same_context(r.ctx(), p.ctx, "model specialize");
  }
  render_presentation(p, meta, {}, out, json);
  return 0;
}

inline int cmd_ordinary(const CommandRequest& req, std::ostringstream& out, bool json) {
  auto fan = parse_fan_source(req.fan_source, req.trusted);
  auto law = parse_fgl(default_fgl(req), req.trunc);
  Cone tau = req.tau.empty() ? fan->max_cone(0) : req.tau;
  std::sort(tau.begin(), tau.end());
  for (int r : tau)
    if (static_cast<std::size_t>(r) >= fan->ray_count())
      throw UsageError("ordinary: tau index " + std::to_string(r) + " out of range");
  Meta meta;
  meta.command = "ordinary";
  meta.fan = req.fan_source;
  meta.fgl = law.describe();
  meta.tau = join_ints(tau);
  meta.n = req.trunc;
  auto p = ordinary_presentation(fan, law, tau);
  if (!req.assignments.empty()) {
    auto plan = make_plan(law.params(), req.assignments);
    meta.specialize = plan.describe;
    for (auto& r : p.relations) r = r.specialize(plan.assign, plan.target);
    p.ctx = make_free_context(p.ctx->labels, plan.target, p.ctx->trunc);
    for (auto& r : p.relations) require_same_context(r.ctx(), p.ctx, "ordinary specialize");
  }
  std::vector<std::pair<int, std::size_t>> ranks;
  if (req.ranks) {
    QuotientModel model(p.ctx, p.relations);
    for (int d = 0; d <= req.trunc; ++d) ranks.emplace_back(d, model.graded_rank(d));
  }
  render_presentation(p, meta, ranks, out, json);
  return 0;
}

inline int cmd_pic(const CommandRequest& req, std::ostringstream& out, bool json) {
  auto fan = parse_fan_source(req.fan_source, req.trusted);
  Meta meta;
  meta.command = "pic";
  meta.fan = req.fan_source;
  auto p = picard_presentation(*fan);
  if (json) {
    Json torsion = Json::array();
    for (const auto& t : p.torsion) torsion.push_back(int_to_json(t));
    out << dump(Json{{"meta", meta.json()},
                     {"free_rank", p.free_rank},
                     {"torsion", torsion},
                     {"characters_inject", p.characters_inject}});
  } else {
    out << meta.text() << "free_rank: " << p.free_rank << "\n";
    if (p.torsion.empty()) {
      out << "torsion: none\n";
    } else {
      out << "torsion: ";
      for (std::size_t i = 0; i < p.torsion.size(); ++i)
        out << (i ? "," : "") << p.torsion[i];
      out << "\n";
    }
    out << "characters_inject: " << (p.characters_inject ? "yes" : "no") << "\n";
  }
  return 0;
}

inline int cmd_glue_check(const CommandRequest& req, std::ostringstream& out, bool json) {
  auto fan = parse_fan_source(req.fan_source, req.trusted);
  auto law = parse_fgl(default_fgl(req), req.trunc);
  Meta meta;
  meta.command = "glue-check";
  meta.fan = req.fan_source;
  meta.fgl = law.describe();
  meta.n = req.trunc;
  if (req.elements.size() != fan->max_cone_count())
    throw UsageError("glue-check: expected " + std::to_string(fan->max_cone_count()) +
                     " --element files, one per maximal cone, got " +
                     std::to_string(req.elements.size()));
  auto ctx = make_fan_context(fan, law.params(), req.trunc);
  std::vector<Series> tuple;
  for (const auto& path : req.elements) tuple.push_back(load_element(path, ctx));
  try {
    Series glued = glue_tuple(tuple);
    if (json) {
      out << dump(Json{{"meta", meta.json()},
                       {"sections", tuple.size()},
                       {"compatible", true},
                       {"glued", series_to_json(glued)}});
    } else {
      out << meta.text() << "sections: " << tuple.size() << "\n"
          << "compatible: yes\n"
          << "glued: " << glued.str() << "\n";
    }
    return 0;
  } catch (const IncompatibleTupleError& e) {
    if (json) {
      out << dump(Json{{"meta", meta.json()},
                       {"sections", tuple.size()},
                       {"compatible", false},
                       {"witness",
                        Json{{"cone_a", e.cone_a},
                             {"cone_b", e.cone_b},
                             {"monomial", e.monomial}}}});
    } else {
      out << meta.text() << "sections: " << tuple.size() << "\n"
          << "compatible: no\n"
          << "witness_cones: " << e.cone_a << "," << e.cone_b << "\n"
          << "witness_monomial: " << e.monomial << "\n";
    }
    return 1;
  }
}

inline int cmd_blowup(const CommandRequest& req, std::ostringstream& out, bool json) {
  auto fan = parse_fan_source(req.fan_source, req.trusted);
  auto law = parse_fgl(default_fgl(req), req.trunc);
  if (req.center.empty()) throw UsageError("blowup: --center is required");
  Cone center = req.center;
  std::sort(center.begin(), center.end());
  for (int r : center)
    if (static_cast<std::size_t>(r) >= fan->ray_count())
      throw UsageError("blowup: center index " + std::to_string(r) + " out of range");
  Meta meta;
  meta.command = "blowup";
  meta.fan = req.fan_source;
  meta.fgl = law.describe();
  meta.center = join_ints(center);
  meta.n = req.trunc;
  Blowup b = make_blowup(fan, center, law);
  const std::string exc_label = b.total()->label(b.exc_index());
  const bool recursive = center.size() >= 3;

  std::vector<std::pair<std::string, Series>> pull_images;
  for (int r : center) {
    Series xr = Series::variable(b.total_ctx(), r);
    Series xe = Series::variable(b.total_ctx(), b.exc_index());
    pull_images.emplace_back(fan->label(r), formal_sum(law, xr, xe));
  }
  std::vector<std::pair<int, Series>> powers;
  for (int t = 1; t <= req.trunc; ++t)
    powers.emplace_back(t, b.pushforward_monomial(std::vector<int>(center.size(), 0), t));
  std::optional<Series> pulled, pushed;
  if (!req.pull_file.empty()) pulled = b.pullback(load_element(req.pull_file, b.base_ctx()));
  if (!req.push_file.empty()) pushed = b.pushforward(load_element(req.push_file, b.total_ctx()));

  if (json) {
    Json jp = Json::array();
    for (const auto& [t, s] : powers)
      jp.push_back(Json{{"t", t}, {"value", series_to_json(s)}});
    Json ji = Json::object();
    for (const auto& [label, s] : pull_images) ji[label] = series_to_json(s);
    Json j{{"meta", meta.json()},
           {"exceptional", Json{{"label", exc_label}, {"index", b.exc_index()}}},
           {"total", fan_to_json(*b.total())},
           {"recursive", recursive},
           {"pullback_images", ji},
           {"pushforward_powers", jp}};
    if (pulled) j["pullback"] = series_to_json(*pulled);
    if (pushed) j["pushforward"] = series_to_json(*pushed);
    out << dump(j);
  } else {
    out << meta.text() << "exceptional_label: " << exc_label << "\n"
        << "exceptional_index: " << b.exc_index() << "\n"
        << "total_rays: " << b.total()->ray_count() << "\n"
        << "total_max_cones: " << b.total()->max_cone_count() << "\n";
    if (recursive)
      out << "note: center dimension exceeds 2; push-forward values are computed "
             "recursively from the strict-transform seeds\n";
    for (const auto& [label, s] : pull_images)
      out << "pullback[" << label << "]: " << s.str() << "\n";
    for (const auto& [t, s] : powers) {
      out << "pushforward[" << exc_label;
      if (t != 1) out << "^" << t;
      out << "]: " << s.str() << "\n";
    }
    if (pulled) out << "pullback: " << pulled->str() << "\n";
    if (pushed) out << "pushforward: " << pushed->str() << "\n";
  }
  return 0;
}

inline int cmd_specialize(const CommandRequest& req, std::ostringstream& out, bool json) {
  auto fan = parse_fan_source(req.fan_source, req.trusted);
  auto law = parse_fgl(default_fgl(req), req.trunc);
  if (req.elements.size() != 1)
    throw UsageError("specialize: exactly one --element file is required");
  auto plan = make_plan(law.params(), req.assignments);
  Meta meta;
  meta.command = "specialize";
  meta.fan = req.fan_source;
  meta.fgl = law.describe();
  meta.specialize = plan.describe;
  meta.n = req.trunc;
  auto ctx = make_fan_context(fan, law.params(), req.trunc);
  Series f = load_element(req.elements[0], ctx);
  Series g = f.specialize(plan.assign, plan.target);
  if (json) {
    out << dump(Json{{"meta", meta.json()}, {"result", series_to_json(g)}});
  } else {
    out << meta.text() << "result: " << g.str() << "\n";
  }
  return 0;
}

inline int cmd_piecewise(const CommandRequest& req, std::ostringstream& out, bool json) {
  auto fan = parse_fan_source(req.fan_source, req.trusted);
  if (req.mode != "polynomial" && req.mode != "exponential")
    throw UsageError("piecewise: --mode must be 'polynomial' or 'exponential'");
  const PwMode mode =
      req.mode == "polynomial" ? PwMode::polynomial : PwMode::exponential;
  auto law = parse_fgl(default_fgl(req), req.trunc);
  Meta meta;
  meta.command = "piecewise";
  meta.fan = req.fan_source;
  meta.fgl = law.describe();
  meta.mode = req.mode;
  meta.n = req.trunc;
  if ((req.courant >= 0) == !req.elements.empty())
    throw UsageError("piecewise: exactly one of --element and --courant is required");
  auto ctx = make_fan_context(fan, law.params(), req.trunc);
  Series f = Series::zero(ctx);
  if (req.courant >= 0) {
    if (static_cast<std::size_t>(req.courant) >= fan->ray_count())
      throw UsageError("piecewise: --courant ray index out of range");
    f = Series::variable(ctx, req.courant);
  } else {
    if (req.elements.size() != 1)
      throw UsageError("piecewise: exactly one --element file is required");
    f = load_element(req.elements[0], ctx);
  }
  PiecewiseFunc pw = to_piecewise(f, law, mode);
  auto rep = pw_compatibility(pw);
  std::vector<std::pair<std::string, std::string>> values;
  if (rep.ok)
    for (const auto& p : req.eval_points) values.emplace_back(join_point(p), pw_check_eval(pw, p).str());
  if (json) {
    Json j{{"meta", meta.json()},
           {"compatible", rep.ok},
           {"piecewise", piecewise_to_json(pw)}};
    if (!rep.ok) j["problems"] = rep.failures;
    if (!values.empty()) {
      Json vals = Json::array();
      for (const auto& [pt, val] : values)
        vals.push_back(Json{{"point", pt}, {"value", val}});
      j["values"] = vals;
    }
    out << dump(j);
  } else {
    out << meta.text() << "compatible: " << (rep.ok ? "yes" : "no") << "\n";
    if (!rep.ok)
      for (const auto& p : rep.failures) out << "problem: " << p << "\n";
    out << pw.str();
    for (const auto& [pt, val] : values) out << "value[" << pt << "]: " << val << "\n";
  }
  return rep.ok ? 0 : 1;
}

struct SelftestLog {
  std::vector<std::tuple<std::string, bool, std::string>> checks;
  int failed = 0;

  void run(const std::string& name, const std::function<void()>& body) {
    try {
      body();
      checks.emplace_back(name, true, "");
    } catch (const std::exception& e) {
      checks.emplace_back(name, false, e.what());
      ++failed;
    }
  }
};

inline void expect(bool ok, const std::string& msg) {
  if (!ok) throw Error(msg);
}

inline void selftest_fan_checks(SelftestLog& log, const std::string& name,
                                std::size_t ordinal, const CommandRequest& req) {
  const int n = req.trunc;
  auto fan = catalog_fan(name);
  log.run(name + " validate", [&] {
    auto rep = validate_fan(fan->data(), true);
    expect(rep.ok, rep.ok ? "" : rep.problems.front());
  });
  log.run(name + " pic", [&] {
    auto p = picard_presentation(*fan);
    expect(p.characters_inject, "character lattice does not inject");
    expect(p.torsion.empty(), "unexpected torsion");
    expect(p.free_rank == fan->ray_count() - static_cast<std::size_t>(fan->dim()),
           "free rank differs from rays minus dim");
  });
  log.run(name + " model", [&] {
    auto law = FormalGroupLaw::additive(CoeffElem::empty_spec(), n);
    auto p = equivariant_presentation(fan, law);
    expect(p.relations.size() == fan->minimal_nonfaces().size(),
           "one relation per minimal non-face expected");
    for (const auto& r : p.relations)
      expect(r.terms().size() == 1 && r.terms().begin()->second.is_one(),
             "relations must be monic monomials");
  });
  if (fan->dim() <= n)
    log.run(name + " ordinary", [&] {
      auto law = FormalGroupLaw::additive(CoeffElem::empty_spec(), n);
      auto p = ordinary_presentation(fan, law, fan->max_cone(0));
      QuotientModel model(p.ctx, p.relations);
      expect(model.graded_rank(0) == 1, "degree-0 rank must be 1");
      expect(model.graded_rank(fan->dim()) == 1, "top-degree rank must be 1");
      std::size_t sum = 0;
      for (int d = 0; d <= n; ++d) sum += model.graded_rank(d);
      expect(sum == fan->max_cone_count(),
             "total rank must equal the number of maximal cones");
      for (int d = fan->dim() + 1; d <= n; ++d)
        expect(model.graded_rank(d) == 0, "rank above the dimension must vanish");
    });
  log.run(name + " glue", [&] {
    std::mt19937_64 rng(req.seed * 1000003ull + ordinal);
    auto ctx = make_fan_context(fan, CoeffElem::empty_spec(), n);
    for (int i = 0; i < req.samples; ++i) {
      Series f = random_face_series(ctx, rng, 4, std::min(3, n));
      std::vector<Series> parts;
      for (std::size_t j = 0; j < fan->max_cone_count(); ++j)
        parts.push_back(restrict_to_cone(f, fan->max_cone(j)));
      expect(glue_tuple(parts) == f, "glued element differs from the original");
    }
  });
}

inline void selftest_global_checks(SelftestLog& log, const CommandRequest& req) {
  const int n = req.trunc;
  auto vspec = ParamSpec::make({"v"});
  CoeffElem v = CoeffElem::parameter(vspec, "v");
  log.run("fgl additive axioms", [&] {
    auto rep = check_fgl_axioms(FormalGroupLaw::additive(CoeffElem::empty_spec(), n));
    expect(rep.ok, rep.ok ? "" : rep.failures.front());
  });
  log.run("fgl multiplicative axioms", [&] {
    auto rep = check_fgl_axioms(FormalGroupLaw::multiplicative(v, n));
    expect(rep.ok, rep.ok ? "" : rep.failures.front());
  });
  log.run("fgl lorentz axioms", [&] {
    auto u2 = CoeffElem::parameter(ParamSpec::make({"u2"}), "u2");
    auto rep = check_fgl_axioms(FormalGroupLaw::lorentz(u2, n));
    expect(rep.ok, rep.ok ? "" : rep.failures.front());
  });
  log.run("fgl inverse identity", [&] {
    for (const auto& law :
         {FormalGroupLaw::multiplicative(v, n),
          FormalGroupLaw::lorentz(CoeffElem::parameter(ParamSpec::make({"u2"}), "u2"), n)}) {
      auto ctx = make_free_context({"z"}, law.params(), n);
      Series z = Series::variable(ctx, 0);
      expect(formal_sum(law, z, formal_inverse(law, z)).is_zero(),
             "z +_F chi(z) must vanish");
    }
  });
  log.run("fgl multiplicative inverse series", [&] {
    auto law = FormalGroupLaw::multiplicative(v, n);
    const auto& chi = law.chi_coeffs();
    for (int d = 1; d <= n; ++d)
      expect(chi[d] == -v.pow(d - 1), "chi coefficient must be -v^(d-1)");
  });
  log.run("blowup projective plane transfer", [&] {
    auto fan = catalog_fan("pn:2");
    auto law = FormalGroupLaw::multiplicative(v, n);
    Blowup b = make_blowup(fan, {0, 1}, law);
    Series xe = Series::variable(b.total_ctx(), b.exc_index());
    Mono m(3, 0);
    m[0] = m[1] = 1;
    expect(b.pushforward(xe) == Series::monomial(b.base_ctx(), m, v),
           "pushforward of the exceptional class must be v*x1*x2");
    Series f = Series::variable(b.base_ctx(), 2);
    Series g = Series::variable(b.total_ctx(), 0) * xe;
    auto rep = check_push_pull(b, f, g);
    expect(rep.ok, rep.ok ? "" : rep.failures.front());
  });
  log.run("piecewise courant values", [&] {
    auto fan = catalog_fan("dp6");
    for (std::size_t r = 0; r < fan->ray_count(); ++r) {
      auto phi = courant_function(fan, static_cast<int>(r));
      for (std::size_t r2 = 0; r2 < fan->ray_count(); ++r2) {
        Int want = r == r2 ? 1 : 0;
        expect(pw_check_eval(phi, fan->ray(r2)) ==
                   CoeffElem::from_int(CoeffElem::empty_spec(), want),
               "Courant function value at a ray must be the Kronecker delta");
      }
    }
  });
  log.run("piecewise ring homomorphism", [&] {
    auto fan = catalog_fan("dp6");
    auto ctx = make_fan_context(fan, CoeffElem::empty_spec(), n);
    std::mt19937_64 rng(req.seed * 7919ull + 42);
    auto add = FormalGroupLaw::additive(CoeffElem::empty_spec(), n);
    auto mult1 = FormalGroupLaw::multiplicative(
        CoeffElem::one(CoeffElem::empty_spec()), n);
    for (int i = 0; i < 5; ++i) {
      Series f = random_face_series(ctx, rng, 3, std::min(2, n / 2));
      Series g = random_face_series(ctx, rng, 3, std::min(2, n / 2));
      expect(to_piecewise(f * g, add, PwMode::polynomial) ==
                 to_piecewise(f, add, PwMode::polynomial) *
                     to_piecewise(g, add, PwMode::polynomial),
             "polynomial images must multiply");
      expect(to_piecewise(f * g, mult1, PwMode::exponential) ==
                 to_piecewise(f, mult1, PwMode::exponential) *
                     to_piecewise(g, mult1, PwMode::exponential),
             "exponential images must multiply");
    }
  });
}

inline int cmd_selftest(const CommandRequest& req, std::ostringstream& out, bool json) {
  Meta meta;
  meta.command = "selftest";
  meta.n = req.trunc;
  meta.only = req.only;
  meta.seed = req.seed;
  meta.samples = req.samples;
  std::vector<std::string> subset;
  if (req.only)
    subset = split(*req.only, ',');
  else
    subset = {"p1", "pn:2", "pn:3", "dp6", "hirzebruch:1"};
  for (const auto& name : subset)
    (void)catalog_fan(name);  // unknown names fail before any check runs
  SelftestLog log;
  for (std::size_t i = 0; i < subset.size(); ++i)
    selftest_fan_checks(log, subset[i], i, req);
  if (!req.only) selftest_global_checks(log, req);
  if (json) {
    Json checks = Json::array();
    for (const auto& [name, ok, detail] : log.checks) {
      Json c{{"name", name}, {"ok", ok}};
      if (!ok) c["detail"] = detail;
      checks.push_back(c);
    }
    out << dump(Json{{"meta", meta.json()},
                     {"checks", checks},
                     {"passed", log.checks.size() - log.failed},
                     {"failed", log.failed}});
  } else {
    out << meta.text();
    for (const auto& [name, ok, detail] : log.checks) {
      if (ok)
        out << "ok " << name << "\n";
      else
        out << "FAIL " << name << ": " << detail << "\n";
    }
    out << "checks: " << log.checks.size() << " passed: " << log.checks.size() - log.failed
        << " failed: " << log.failed << "\n";
  }
  return log.failed == 0 ? 0 : 1;
}

}  // namespace cli_detail

inline CommandResult run_command(const CommandRequest& req) {
  CommandResult res;
  bool json = false;
  std::ostringstream out;
  try {
    if (req.format == "json")
      json = true;
    else if (req.format != "text")
      throw UsageError("unknown output format '" + req.format + "'");
    if (req.trunc < 1) throw UsageError("truncation degree must be >= 1");
    using Handler = int (*)(const CommandRequest&, std::ostringstream&, bool);
    static const std::map<std::string, Handler> handlers = {
        {"validate", cli_detail::cmd_validate},
        {"model", cli_detail::cmd_model},
        {"ordinary", cli_detail::cmd_ordinary},
        {"pic", cli_detail::cmd_pic},
        {"glue-check", cli_detail::cmd_glue_check},
        {"blowup", cli_detail::cmd_blowup},
        {"specialize", cli_detail::cmd_specialize},
        {"piecewise", cli_detail::cmd_piecewise},
        {"selftest", cli_detail::cmd_selftest},
    };
    auto it = handlers.find(req.command);
    if (it == handlers.end()) throw UsageError("unknown command '" + req.command + "'");
    res.code = it->second(req, out, json);
    res.out = out.str();
    return res;
  } catch (const std::exception& e) {
    std::string kind = "internal";
    int code = 3;
    if (dynamic_cast<const UsageError*>(&e)) {
      kind = "usage";
      code = 2;
    } else if (dynamic_cast<const ParseError*>(&e)) {
      kind = "parse";
    } else if (dynamic_cast<const UnsupportedError*>(&e)) {
      kind = "unsupported";
    } else if (dynamic_cast<const StructuralError*>(&e)) {
      kind = "structural";
    } else if (dynamic_cast<const DomainError*>(&e)) {
      kind = "domain";
    }
    res.code = code;
    if (json) {
      res.out = cli_detail::dump(
          Json{{"error", Json{{"type", kind}, {"message", e.what()}}}});
    } else {
      res.err = std::string("error: ") + e.what() + "\n";
    }
    return res;
  }
}

}  // namespace torfan
