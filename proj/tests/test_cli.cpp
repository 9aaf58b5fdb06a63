#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "torfan/cli.hpp"

using namespace torfan;

namespace {

CommandRequest request(const std::string& command, const std::string& fan = "") {
  CommandRequest req;
  req.command = command;
  req.fan_source = fan;
  return req;
}

std::filesystem::path write_temp(const std::string& name, const std::string& body) {
  auto dir = std::filesystem::temp_directory_path() / "torfan_cli_tests";
  std::filesystem::create_directories(dir);
  auto path = dir / name;
  std::ofstream out(path);
  out << body;
  return path;
}

bool contains(const std::string& hay, const std::string& needle) {
  return hay.find(needle) != std::string::npos;
}

// restriction of 5 + 2 x_{x1} - x_{x2}^2 on the plane to the cone {a, b}
std::string p2_section(bool with_x1, bool with_x2) {
  std::string s = "[{\"monomial\": {}, \"coeff\": {\"terms\": [{\"int\": 5}]}}";
  if (with_x1) s += ", {\"monomial\": {\"x1\": 1}, \"coeff\": {\"terms\": [{\"int\": 2}]}}";
  if (with_x2) s += ", {\"monomial\": {\"x2\": 2}, \"coeff\": {\"terms\": [{\"int\": -1}]}}";
  return s + "]";
}

}  // namespace

TEST_CASE("fan json round trip") {
  for (const auto& name : {"p1", "pn:2", "pn:3", "dp6", "hirzebruch:3"}) {
    auto fan = catalog_fan(name);
    auto back = Fan::make(fan_from_json(fan_to_json(*fan)), Fan::Check::strict);
    CHECK(back->dim() == fan->dim());
    CHECK(back->rays() == fan->rays());
    CHECK(back->max_cones() == fan->max_cones());
    CHECK(back->labels() == fan->labels());
    CHECK(fan_to_json(*back) == fan_to_json(*fan));
  }
}

TEST_CASE("validate catalog fans") {
  auto res = run_command(request("validate", "dp6"));
  CHECK(res.code == 0);
  CHECK(contains(res.out, "# torfan validate fan=dp6"));
  CHECK(contains(res.out, "ok: yes"));
  CHECK(contains(res.out, "rays: 6"));
  CHECK(contains(res.out, "minimal_nonfaces: 9"));
}

TEST_CASE("validate fan files including broken ones") {
  auto good = write_temp("good_fan.json", R"({
    "dim": 2,
    "rays": [[1, 0], [0, 1], [-1, -1]],
    "max_cones": [[0, 1], [1, 2], [0, 2]]
  })");
  auto res = run_command(request("validate", good.string()));
  CHECK(res.code == 0);
  CHECK(contains(res.out, "ok: yes"));

  auto bad = write_temp("bad_fan.json", R"({
    "dim": 2,
    "rays": [[1, 0], [0, 2], [-1, -1]],
    "max_cones": [[0, 1], [1, 2], [0, 2]]
  })");
  res = run_command(request("validate", bad.string()));
  CHECK(res.code == 3);
  CHECK(contains(res.out, "ok: no"));
  CHECK(contains(res.out, "not primitive"));

  auto junk = write_temp("junk.json", "{");
  res = run_command(request("validate", junk.string()));
  CHECK(res.code == 3);
  CHECK(contains(res.err, "error:"));

  res = run_command(request("validate", "/nonexistent/fan.json"));
  CHECK(res.code == 3);
}

TEST_CASE("model output lists the Stanley-Reisner relations") {
  auto req = request("model", "dp6");
  auto res = run_command(req);
  CHECK(res.code == 0);
  CHECK(contains(res.out, "variables: L1 E3 L2 E1 L3 E2"));
  CHECK(contains(res.out, "relations: 9"));
  CHECK(contains(res.out, "relation: L1*L2"));
  CHECK(contains(res.out, "relation: E1*E2"));

  // identical requests give byte-identical output
  auto res2 = run_command(req);
  CHECK(res.out == res2.out);
  CHECK(res.code == res2.code);
}

TEST_CASE("model json output is well formed") {
  auto req = request("model", "pn:2");
  req.format = "json";
  req.fgl = "mult:v";
  auto res = run_command(req);
  REQUIRE(res.code == 0);
  auto j = Json::parse(res.out);
  CHECK(j["meta"]["command"] == "model");
  CHECK(j["meta"]["fgl"] == "mult:v");
  CHECK(j["meta"]["N"] == 6);
  CHECK(j["presentation"]["relations"].size() == 1);
  CHECK(j["presentation"]["variables"].size() == 3);
}

TEST_CASE("ordinary model command") {
  auto req = request("ordinary", "pn:2");
  req.fgl = "mult:v";
  req.assignments = {{"v", Int(1)}};
  req.tau = {0, 1};
  req.ranks = true;
  auto res = run_command(req);
  REQUIRE(res.code == 0);
  CHECK(contains(res.out, "specialize=v=1"));
  CHECK(contains(res.out, "variables: x3"));
  CHECK(contains(res.out, "relation: x3^3"));
  CHECK(contains(res.out, "rank[0]: 1"));
  CHECK(contains(res.out, "rank[1]: 1"));
  CHECK(contains(res.out, "rank[2]: 1"));
  CHECK(contains(res.out, "rank[3]: 0"));

  // tau must be full-dimensional and a cone
  req.tau = {0};
  CHECK(run_command(req).code == 3);
  req.tau = {0, 63};
  CHECK(run_command(req).code == 2);

  // ranks demand integer coefficients
  auto unspec = request("ordinary", "pn:2");
  unspec.fgl = "mult:v";
  unspec.ranks = true;
  CHECK(run_command(unspec).code == 3);
}

TEST_CASE("pic command") {
  auto res = run_command(request("pic", "dp6"));
  CHECK(res.code == 0);
  CHECK(contains(res.out, "free_rank: 4"));
  CHECK(contains(res.out, "torsion: none"));
  CHECK(contains(res.out, "characters_inject: yes"));

  auto req = request("pic", "hirzebruch:2");
  req.format = "json";
  auto j = Json::parse(run_command(req).out);
  CHECK(j["free_rank"] == 2);
  CHECK(j["torsion"].empty());
}

TEST_CASE("glue-check accepts a compatible tuple") {
  // sections of 5 + 2 x1 - x2^2 on the cones {1,2}, {0,2}, {0,1} of the plane
  auto a = write_temp("sec_12.json", p2_section(false, true));
  auto b = write_temp("sec_02.json", p2_section(true, false));
  auto c = write_temp("sec_01.json", p2_section(true, true));
  auto req = request("glue-check", "pn:2");
  req.elements = {a.string(), b.string(), c.string()};
  auto res = run_command(req);
  REQUIRE(res.code == 0);
  CHECK(contains(res.out, "compatible: yes"));
  CHECK(contains(res.out, "glued: 5 + 2*x1 - x2^2"));
}

TEST_CASE("glue-check rejects an incompatible tuple with a witness") {
  // section 0 picks up an extra x3 term, visible on the ray shared with cone 1
  auto a = write_temp(
      "bad_12.json",
      "[{\"monomial\": {}, \"coeff\": {\"terms\": [{\"int\": 5}]}},"
      " {\"monomial\": {\"x2\": 2}, \"coeff\": {\"terms\": [{\"int\": -1}]}},"
      " {\"monomial\": {\"x3\": 1}, \"coeff\": {\"terms\": [{\"int\": 1}]}}]");
  auto b = write_temp("bad_02.json", p2_section(true, false));
  auto c = write_temp("bad_01.json", p2_section(true, true));
  auto req = request("glue-check", "pn:2");
  req.elements = {a.string(), b.string(), c.string()};
  auto res = run_command(req);
  CHECK(res.code == 1);
  CHECK(contains(res.out, "compatible: no"));
  CHECK(contains(res.out, "witness_cones: 0,1"));
  CHECK(contains(res.out, "witness_monomial: x3"));

  req.format = "json";
  auto j = Json::parse(run_command(req).out);
  CHECK(j["compatible"] == false);
  CHECK(j["witness"]["cone_a"] == 0);
  CHECK(j["witness"]["cone_b"] == 1);

  // wrong section count is a usage error
  req.elements.pop_back();
  req.format = "text";
  CHECK(run_command(req).code == 2);
}

TEST_CASE("blowup command prints transfer tables") {
  auto req = request("blowup", "pn:2");
  req.center = {0, 1};
  auto res = run_command(req);
  REQUIRE(res.code == 0);
  CHECK(contains(res.out, "exceptional_label: E"));
  CHECK(contains(res.out, "pullback[x1]: E + x1 - v*x1*E"));
  CHECK(contains(res.out, "pushforward[E]: v*x1*x2"));
  CHECK(contains(res.out, "pushforward[E^2]:"));

  req.center = {0, 9};
  CHECK(run_command(req).code == 2);
  req.center = {0};
  CHECK(run_command(req).code == 3);

  // lorentz laws do not admit the transfer
  req = request("blowup", "pn:2");
  req.center = {0, 1};
  req.fgl = "lorentz:u2";
  CHECK(run_command(req).code == 3);
}

TEST_CASE("blowup pull and push files") {
  auto down = write_temp("down.json",
                         "[{\"monomial\": {\"x3\": 1}, \"coeff\": {\"terms\": [{\"int\": 1}]}}]");
  auto up = write_temp("up.json",
                       "[{\"monomial\": {\"E\": 1}, \"coeff\": {\"terms\": [{\"int\": 1}]}},"
                       " {\"monomial\": {\"x1\": 1, \"E\": 1},"
                       "  \"coeff\": {\"terms\": [{\"int\": 2}]}}]");
  auto req = request("blowup", "pn:2");
  req.center = {0, 1};
  req.pull_file = down.string();
  req.push_file = up.string();
  auto res = run_command(req);
  REQUIRE(res.code == 0);
  CHECK(contains(res.out, "pullback: x3"));
  CHECK(contains(res.out, "pushforward: (2 + v)*x1*x2"));
}

TEST_CASE("specialize command") {
  auto elem = write_temp(
      "spec_elem.json",
      "[{\"monomial\": {\"x1\": 1}, \"coeff\": {\"terms\": [{\"exps\": {\"v\": 1}, \"int\": 3}]}}]");
  auto req = request("specialize", "pn:2");
  req.fgl = "mult:v";
  req.assignments = {{"v", Int(2)}};
  req.elements = {elem.string()};
  auto res = run_command(req);
  REQUIRE(res.code == 0);
  CHECK(contains(res.out, "result: 6*x1"));

  // unknown parameter names are parse errors, duplicates usage errors
  req.assignments = {{"w", Int(2)}};
  CHECK(run_command(req).code == 3);
  req.assignments = {{"v", Int(2)}, {"v", Int(3)}};
  CHECK(run_command(req).code == 2);
}

TEST_CASE("piecewise command") {
  auto req = request("piecewise", "dp6");
  req.courant = 0;
  req.eval_points = {{Int(0), Int(1)}, {Int(1), Int(1)}, {Int(-1), Int(3)}};
  auto res = run_command(req);
  REQUIRE(res.code == 0);
  CHECK(contains(res.out, "compatible: yes"));
  CHECK(contains(res.out, "value[0,1]: 1"));
  CHECK(contains(res.out, "value[1,1]: 0"));
  CHECK(contains(res.out, "value[-1,3]: 3"));

  // exponential mode needs mult:1 and produces q-values
  req = request("piecewise", "dp6");
  req.mode = "exponential";
  req.fgl = "mult:1";
  req.courant = 0;
  req.eval_points = {{Int(0), Int(1)}};
  res = run_command(req);
  REQUIRE(res.code == 0);
  CHECK(contains(res.out, "value[0,1]: 1 - q"));

  // courant and element are mutually exclusive, one is required
  req = request("piecewise", "dp6");
  CHECK(run_command(req).code == 2);
  auto elem = write_temp("pw_elem.json",
                         "[{\"monomial\": {\"L1\": 1}, \"coeff\": {\"terms\": [{\"int\": 1}]}}]");
  req.elements = {elem.string()};
  req.courant = 0;
  CHECK(run_command(req).code == 2);

  req.courant = -1;
  res = run_command(req);
  CHECK(res.code == 0);

  // polynomial mode rejects non-additive laws
  req.fgl = "mult:1";
  CHECK(run_command(req).code == 3);
}

TEST_CASE("selftest command") {
  auto req = request("selftest");
  req.only = std::string("");
  auto res = run_command(req);
  CHECK(res.code == 0);
  CHECK(contains(res.out, "checks: 0"));

  req.only = std::string("dp6");
  res = run_command(req);
  CHECK(res.code == 0);
  CHECK(contains(res.out, "ok dp6 validate"));
  CHECK(contains(res.out, "ok dp6 glue"));
  CHECK(contains(res.out, "failed: 0"));

  req.only = std::string("dp6,zzz");
  CHECK(run_command(req).code == 3);
}

TEST_CASE("formal group law selectors") {
  auto req = request("model", "p1");
  for (const auto& fgl : {"additive", "mult:2", "mult:v", "mult:unit:beta", "lorentz:u2"}) {
    req.fgl = fgl;
    CAPTURE(fgl);
    CHECK(run_command(req).code == 0);
  }
  for (const auto& fgl : {"mult:", "mult:unit:", "lorentz:", "nope", "generic:/missing.json"}) {
    req.fgl = fgl;
    CAPTURE(fgl);
    CHECK(run_command(req).code == 3);
  }

  // generic law from a table file
  auto table = write_temp("table.json", R"({
    "N": 6,
    "params": {"names": ["a"], "invertible": []},
    "a": {"1,1": {"terms": [{"exps": {"a": 1}, "int": -1}]}}
  })");
  req.fgl = "generic:" + table.string();
  auto res = run_command(req);
  CHECK(res.code == 0);
  CHECK(contains(res.out, "fgl=generic"));
}

TEST_CASE("usage errors") {
  CHECK(run_command(request("frobnicate", "p1")).code == 2);

  auto req = request("model", "p1");
  req.format = "yaml";
  CHECK(run_command(req).code == 2);

  req = request("model", "p1");
  req.trunc = 0;
  CHECK(run_command(req).code == 2);

  // json error envelope
  req = request("model", "nosuchfan");
  req.format = "json";
  auto res = run_command(req);
  CHECK(res.code == 3);
  auto j = Json::parse(res.out);
  CHECK(j["error"]["type"] == "parse");
  CHECK(contains(j["error"]["message"].get<std::string>(), "nosuchfan"));
}

TEST_CASE("truncation is recorded and honored") {
  auto req = request("model", "pn:2");
  req.fgl = "mult:v";
  req.trunc = 3;
  auto res = run_command(req);
  CHECK(contains(res.out, "N=3"));

  // pushforward of E^t vanishes beyond the truncation degree
  req = request("blowup", "pn:2");
  req.center = {0, 1};
  req.trunc = 2;
  res = run_command(req);
  REQUIRE(res.code == 0);
  CHECK(contains(res.out, "pushforward[E^2]: -x1*x2"));
  CHECK_FALSE(contains(res.out, "pushforward[E^3]"));
}
