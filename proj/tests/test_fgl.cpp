#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "torfan/fgl.hpp"

using namespace torfan;

namespace {

constexpr int N = 6;

// phi[k] multiplies z^k; phi[0] is ignored (all substitutions fix 0).
Series apply_poly(const std::vector<Int>& phi, const Series& s) {
  Series r = Series::zero(s.ctx());
  Series p = Series::constant(s.ctx(), Int(1));
  for (std::size_t k = 1; k < phi.size(); ++k) {
    p *= s;
    if (phi[k] != 0) r += p.scaled(CoeffElem::from_int(s.ctx()->params, phi[k]));
  }
  return r;
}

// Compositional inverse of z + b2 z^2 + ... over the integers, solved
// degree by degree; serves as an oracle independent of the library's chi.
std::vector<Int> invert_poly(const std::vector<Int>& phi, int trunc) {
  REQUIRE(phi.size() >= 2);
  REQUIRE(phi[1] == 1);
  auto ctx = make_free_context({"z"}, CoeffElem::empty_spec(), trunc);
  Series z = Series::variable(ctx, 0);
  Series phi_z = apply_poly(phi, z);
  std::vector<Int> psi{0, 1};
  for (int d = 2; d <= trunc; ++d) {
    psi.push_back(0);
    Series r = apply_poly(psi, phi_z);
    psi[d] = -r.coeff_of(Mono{d}).as_int();
  }
  return psi;
}

// Table of F(x, y) = psi(phi(x) + phi(y)): the additive law conjugated by
// phi, hence a formal group law for free.
FormalGroupLaw::Table conjugated_table(const std::vector<Int>& phi, int trunc) {
  auto psi = invert_poly(phi, trunc);
  auto ctx = make_free_context({"x", "y"}, CoeffElem::empty_spec(), trunc);
  Series s = apply_poly(phi, Series::variable(ctx, 0)) +
             apply_poly(phi, Series::variable(ctx, 1));
  Series t = apply_poly(psi, s);
  FormalGroupLaw::Table table;
  for (const auto& [m, c] : t.terms()) table.emplace(std::make_pair(m[0], m[1]), c);
  return table;
}

}  // namespace

TEST_CASE("additive law") {
  auto f = FormalGroupLaw::additive(CoeffElem::empty_spec(), N);
  auto ctx = make_free_context({"x", "y"}, f.params(), N);
  Series x = Series::variable(ctx, 0);
  Series y = Series::variable(ctx, 1);
  CHECK(formal_sum(f, x, y) == x + y);
  CHECK(formal_inverse(f, x) == -x);
  CHECK(int_multiple(f, 5, x) == x.scaled(CoeffElem::from_int(f.params(), 5)));
  CHECK(f.table().size() == 2);  // just the linear part
  CHECK(f.multiplicative_form());
  CHECK(f.mult_v().is_zero());
  CHECK(check_fgl_axioms(f).ok);
}

TEST_CASE("multiplicative law sum and inverse") {
  auto spec = ParamSpec::make({"v"}, {"v"});
  auto v = CoeffElem::parameter(spec, "v");
  auto f = FormalGroupLaw::multiplicative(v, N);
  auto ctx = make_free_context({"x", "y"}, spec, N);
  Series x = Series::variable(ctx, 0);
  Series y = Series::variable(ctx, 1);

  CHECK(formal_sum(f, x, y) == x + y - (x * y).scaled(v));
  CHECK(f.coeff(1, 1) == -v);
  CHECK(f.mult_v() == v);

  // chi(z) = -sum_{d>=1} v^{d-1} z^d
  const auto& chi = f.chi_coeffs();
  for (int d = 1; d <= N; ++d) CHECK(chi[d] == -v.pow(d - 1));
  CHECK(formal_sum(f, x, formal_inverse(f, x)).is_zero());

  CHECK(int_multiple(f, 2, x) == x + x - (x * x).scaled(v));
  CHECK(int_multiple(f, 0, x).is_zero());
  CHECK(int_multiple(f, -1, x) == formal_inverse(f, x));
  CHECK(check_fgl_axioms(f).ok);
}

TEST_CASE("lorentz law") {
  auto spec = ParamSpec::make({"u2"});
  auto u2 = CoeffElem::parameter(spec, "u2");
  auto f = FormalGroupLaw::lorentz(u2, N);

  for (int k = 1; 2 * k + 1 <= N; ++k) {
    CHECK(f.coeff(k + 1, k) == (-u2).pow(k));
    CHECK(f.coeff(k, k + 1) == (-u2).pow(k));
  }
  CHECK(f.coeff(1, 1).is_zero());
  CHECK(f.coeff(2, 2).is_zero());

  // F(x, y) (1 + u2 x y) = x + y holds exactly in the truncated ring.
  auto ctx = make_free_context({"x", "y"}, spec, N);
  Series x = Series::variable(ctx, 0);
  Series y = Series::variable(ctx, 1);
  Series one = Series::constant(ctx, Int(1));
  CHECK(formal_sum(f, x, y) * (one + (x * y).scaled(u2)) == x + y);

  CHECK(formal_sum(f, x, formal_inverse(f, x)).is_zero());
  CHECK(formal_inverse(f, x) == -x);  // chi is -z for the lorentz law
  CHECK(check_fgl_axioms(f).ok);
}

TEST_CASE("conjugated additive laws satisfy the axioms") {
  std::mt19937_64 rng(2026);
  for (int round = 0; round < 4; ++round) {
    std::vector<Int> phi{0, 1};
    for (int k = 2; k <= N; ++k)
      phi.push_back(Int(static_cast<long long>(rng() % 7)) - 3);
    auto table = conjugated_table(phi, N);
    auto f = FormalGroupLaw::generic(CoeffElem::empty_spec(), N, table, "conjugate");
    auto rep = check_fgl_axioms(f);
    CAPTURE(round, rep.failures);
    CHECK(rep.ok);

    // the law's chi agrees with the conjugation oracle psi(-phi(z))
    auto ctx = make_free_context({"z"}, CoeffElem::empty_spec(), N);
    Series z = Series::variable(ctx, 0);
    auto psi = invert_poly(phi, N);
    CHECK(formal_inverse(f, z) == apply_poly(psi, -apply_poly(phi, z)));

    // low-order inverse identities: chi_2 = a11, chi_3 = -a11^2
    const auto& chi = f.chi_coeffs();
    CHECK(chi[2] == f.coeff(1, 1));
    CHECK(chi[3] == -f.coeff(1, 1).pow(2));
  }
}

TEST_CASE("conjugated multiplicative law") {
  auto spec = ParamSpec::make({"v"});
  auto v = CoeffElem::parameter(spec, "v");
  auto mult = FormalGroupLaw::multiplicative(v, N);
  std::vector<Int> phi{0, 1, 2, -1, 0, 3, 1};
  auto psi = invert_poly(phi, N);

  auto ctx = make_free_context({"x", "y"}, spec, N);
  Series x = Series::variable(ctx, 0);
  Series y = Series::variable(ctx, 1);
  Series t = apply_poly(psi, formal_sum(mult, apply_poly(phi, x), apply_poly(phi, y)));
  FormalGroupLaw::Table table;
  for (const auto& [m, c] : t.terms()) table.emplace(std::make_pair(m[0], m[1]), c);
  auto f = FormalGroupLaw::generic(spec, N, table, "conjugated mult");

  auto rep = check_fgl_axioms(f);
  CAPTURE(rep.failures);
  CHECK(rep.ok);
  CHECK(f.eval(x, y) == t);
  CHECK_FALSE(f.multiplicative_form());

  Series z = Series::variable(make_free_context({"z"}, spec, N), 0);
  CHECK(formal_sum(f, z, formal_inverse(f, z)).is_zero());
}

TEST_CASE("axiom checker flags corrupted tables") {
  auto spec = CoeffElem::empty_spec();
  auto one = CoeffElem::one(spec);

  FormalGroupLaw::Table asym{{{1, 2}, one}};
  auto rep = check_fgl_axioms(FormalGroupLaw::generic(spec, N, asym));
  REQUIRE_FALSE(rep.ok);
  CHECK(rep.failures[0].find("commutativity") != std::string::npos);

  FormalGroupLaw::Table nonassoc{{{1, 2}, one}, {{2, 1}, one}};
  rep = check_fgl_axioms(FormalGroupLaw::generic(spec, N, nonassoc));
  REQUIRE_FALSE(rep.ok);
  CHECK(rep.failures[0].find("associativity") != std::string::npos);

  FormalGroupLaw::Table unitless{{{2, 0}, one}, {{0, 2}, one}};
  rep = check_fgl_axioms(FormalGroupLaw::generic(spec, N, unitless));
  REQUIRE_FALSE(rep.ok);
  CHECK(rep.failures[0].find("neutral") != std::string::npos);
}

TEST_CASE("table construction guards") {
  auto spec = CoeffElem::empty_spec();
  auto one = CoeffElem::one(spec);
  CHECK_THROWS_AS(FormalGroupLaw::generic(spec, N, {{{-1, 2}, one}}), DomainError);
  CHECK_THROWS_AS(FormalGroupLaw::generic(spec, N, {{{0, 0}, one}}), DomainError);

  // linear part that is not a unit leaves the formal inverse undefined
  auto two = CoeffElem::from_int(spec, 2);
  auto f = FormalGroupLaw::generic(spec, N, {{{1, 0}, two}, {{0, 1}, two}});
  CHECK_FALSE(f.has_inverse());
  Series z = Series::variable(make_free_context({"z"}, spec, N), 0);
  CHECK_THROWS_AS(formal_inverse(f, z), DomainError);
}

TEST_CASE("truncation drops table entries and series tails") {
  auto spec = ParamSpec::make({"v"});
  auto v = CoeffElem::parameter(spec, "v");
  auto f1 = FormalGroupLaw::multiplicative(v, 1);
  CHECK(f1.coeff(1, 1).is_zero());
  auto ctx = make_free_context({"x", "y"}, spec, 1);
  Series x = Series::variable(ctx, 0);
  Series y = Series::variable(ctx, 1);
  CHECK(formal_sum(f1, x, y) == x + y);

  // a law truncated below its host is rejected
  auto host = make_free_context({"z"}, spec, 4);
  CHECK_THROWS_AS(formal_inverse(f1, Series::variable(host, 0)), StructuralError);
}

TEST_CASE("formal inverse requires zero constant term") {
  auto f = FormalGroupLaw::additive(CoeffElem::empty_spec(), N);
  auto ctx = make_free_context({"z"}, f.params(), N);
  Series s = Series::variable(ctx, 0) + Series::constant(ctx, Int(1));
  CHECK_THROWS_AS(formal_inverse(f, s), DomainError);
}
