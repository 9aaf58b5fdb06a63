#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "torfan/cli.hpp"

namespace {

// Shared option storage; each subcommand registers only the flags it accepts.
struct Options {
  torfan::CommandRequest req;
  std::string tau, center, only;
  std::vector<std::string> assignments, eval_points;
  bool has_only = false;
};

void add_fan(CLI::App* cmd, Options& o) {
  cmd->add_option("--fan", o.req.fan_source, "catalog name (p1, pn:<n>, dp6, hirzebruch:<r>) or fan JSON file")
      ->required();
  cmd->add_flag("--trusted", o.req.trusted, "skip the pairwise convexity validation");
}

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--truncate,-N", o.req.trunc,
                  "truncation degree (default 6; env TORFAN_TRUNCATE)")
      ->envname("TORFAN_TRUNCATE")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--format", o.req.format, "output format: text or json")
      ->check(CLI::IsMember({"text", "json"}));
}

void add_fgl(CLI::App* cmd, Options& o, const char* fallback) {
  cmd->add_option("--fgl", o.req.fgl,
                  std::string("formal group law: additive | mult:<int-or-name> | "
                              "mult:unit:<name> | lorentz:<int-or-name> | "
                              "generic:<table file> (default ") +
                      fallback + ")");
}

void add_specialize(CLI::App* cmd, Options& o) {
  cmd->add_option("--specialize", o.assignments,
                  "parameter assignment name=integer (repeatable)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"algebraic models of oriented cohomology for smooth toric fans"};
  app.require_subcommand(1);
  Options o;

  auto* validate = app.add_subcommand("validate", "check fan well-formedness");
  add_fan(validate, o);
  add_common(validate, o);

  auto* model = app.add_subcommand("model", "equivariant presentation (Stanley-Reisner relations)");
  add_fan(model, o);
  add_common(model, o);
  add_fgl(model, o, "additive");
  add_specialize(model, o);

  auto* ordinary = app.add_subcommand("ordinary", "ordinary presentation after eliminating a chamber");
  add_fan(ordinary, o);
  add_common(ordinary, o);
  add_fgl(ordinary, o, "additive");
  add_specialize(ordinary, o);
  ordinary->add_option("--tau", o.tau,
                       "full-dimensional cone as ray indices i,j,... (default: first maximal cone)");
  ordinary->add_flag("--ranks", o.req.ranks, "print graded ranks (integer coefficients only)");

  auto* pic = app.add_subcommand("pic", "divisor class group presentation");
  add_fan(pic, o);
  add_common(pic, o);

  auto* glue = app.add_subcommand("glue-check", "glue per-cone sections or report a witness");
  add_fan(glue, o);
  add_common(glue, o);
  add_fgl(glue, o, "additive");
  glue->add_option("--element", o.req.elements,
                   "section JSON file, one per maximal cone in order (repeatable)");

  auto* blowup = app.add_subcommand("blowup", "star subdivision with pull-back and push-forward");
  add_fan(blowup, o);
  add_common(blowup, o);
  add_fgl(blowup, o, "mult:v");
  blowup->add_option("--center", o.center, "smooth center as ray indices i,j,...")->required();
  blowup->add_option("--pull", o.req.pull_file, "element JSON file downstairs to pull back");
  blowup->add_option("--push", o.req.push_file, "element JSON file upstairs to push forward");

  auto* specialize = app.add_subcommand("specialize", "apply coefficient assignments to an element");
  add_fan(specialize, o);
  add_common(specialize, o);
  add_fgl(specialize, o, "additive");
  add_specialize(specialize, o);
  specialize->add_option("--element", o.req.elements, "element JSON file")->required();

  auto* piecewise = app.add_subcommand("piecewise", "piecewise function comparison");
  add_fan(piecewise, o);
  add_common(piecewise, o);
  piecewise->add_option("--mode", o.req.mode, "polynomial or exponential (default polynomial)")
      ->check(CLI::IsMember({"polynomial", "exponential"}));
  add_fgl(piecewise, o, "additive for polynomial, mult:1 for exponential");
  piecewise->add_option("--element", o.req.elements, "element JSON file (integer coefficients)");
  piecewise->add_option("--courant", o.req.courant, "use the class of this ray instead of a file");
  piecewise->add_option("--eval", o.eval_points, "evaluation point p1,p2,... (repeatable)");

  auto* selftest = app.add_subcommand("selftest", "run the built-in catalog checks");
  add_common(selftest, o);
  selftest->add_option("--only", o.only, "comma-separated catalog subset (empty: no checks)");
  selftest->add_option("--seed", o.req.seed, "random seed for sampled checks");
  selftest->add_option("--samples", o.req.samples, "samples per randomized check")
      ->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  o.req.command = app.get_subcommands().front()->get_name();
  try {
    if (!o.tau.empty()) o.req.tau = torfan::cli_detail::parse_index_list(o.tau, "ordinary");
    if (!o.center.empty())
      o.req.center = torfan::cli_detail::parse_index_list(o.center, "blowup");
    for (const auto& a : o.assignments)
      o.req.assignments.push_back(torfan::cli_detail::parse_assignment(a));
    for (const auto& p : o.eval_points)
      o.req.eval_points.push_back(torfan::cli_detail::parse_point(p));
    if (selftest->count("--only") > 0) o.req.only = o.only;
  } catch (const torfan::UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  torfan::CommandResult res = torfan::run_command(o.req);
  std::cout << res.out;
  std::cerr << res.err;
  return res.code;
}
