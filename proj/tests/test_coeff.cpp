#include <catch2/catch_amalgamated.hpp>

#include "torfan/coeff.hpp"

using namespace torfan;

namespace {

ParamSpecPtr uv_spec() { return ParamSpec::make({"u", "v"}, {"v"}); }

}  // namespace

TEST_CASE("param spec rejects bad names") {
  CHECK_THROWS_AS(ParamSpec::make({"a", "a"}), DomainError);
  CHECK_THROWS_AS(ParamSpec::make({""}), DomainError);
  CHECK_THROWS_AS(ParamSpec::make({"a"}, {"b"}), DomainError);
  auto s = uv_spec();
  CHECK(s->size() == 2);
  CHECK_FALSE(s->is_invertible(0));
  CHECK(s->is_invertible(1));
  CHECK(s->index_of("u") == 0);
  CHECK_FALSE(s->index_of("w").has_value());
}

TEST_CASE("ring axioms on sampled elements") {
  auto s = uv_spec();
  auto u = CoeffElem::parameter(s, "u");
  auto v = CoeffElem::parameter(s, "v");
  std::vector<CoeffElem> xs = {
      CoeffElem::zero(s),        CoeffElem::one(s),
      CoeffElem::from_int(s, -3), u,
      v,                          u * v - CoeffElem::from_int(s, 2),
      v.pow(-2) * u + v,          (u + v).pow(3)};
  for (const auto& a : xs)
    for (const auto& b : xs) {
      CHECK(a + b == b + a);
      CHECK(a * b == b * a);
      CHECK(a - a == CoeffElem::zero(s));
      for (const auto& c : xs) {
        CHECK((a + b) + c == a + (b + c));
        CHECK((a * b) * c == a * (b * c));
        CHECK(a * (b + c) == a * b + a * c);
      }
    }
}

TEST_CASE("negative exponents only on invertible parameters") {
  auto s = uv_spec();
  CHECK_NOTHROW(CoeffElem::monomial(s, {0, -2}, 1));
  CHECK_THROWS_AS(CoeffElem::monomial(s, {-1, 0}, 1), DomainError);
}

TEST_CASE("units and inverses") {
  auto s = uv_spec();
  auto v = CoeffElem::parameter(s, "v");
  auto u = CoeffElem::parameter(s, "u");
  CHECK(v.is_unit());
  CHECK((-v.pow(3)).is_unit());
  CHECK_FALSE(u.is_unit());
  CHECK_FALSE((v + v).is_unit());  // coefficient 2
  CHECK_FALSE(CoeffElem::zero(s).is_unit());
  CHECK(CoeffElem::one(s).is_unit());
  auto w = -v.pow(2);
  CHECK(w * w.unit_inverse() == CoeffElem::one(s));
  CHECK_THROWS_AS(u.unit_inverse(), DomainError);
  CHECK(v.pow(-3) * v.pow(3) == CoeffElem::one(s));
}

TEST_CASE("integer extraction") {
  auto s = uv_spec();
  CHECK(CoeffElem::from_int(s, 42).as_int() == 42);
  CHECK(CoeffElem::zero(s).as_int() == 0);
  CHECK_THROWS_AS(CoeffElem::parameter(s, "u").as_int(), DomainError);
}

TEST_CASE("mismatched specs are rejected") {
  auto a = CoeffElem::one(ParamSpec::make({"a"}));
  auto b = CoeffElem::one(ParamSpec::make({"b"}));
  CHECK_THROWS_AS(a + b, StructuralError);
  CHECK_THROWS_AS(a == b, StructuralError);
  // equal content counts, not pointer identity
  auto a2 = CoeffElem::one(ParamSpec::make({"a"}));
  CHECK(a == a2);
}

TEST_CASE("specialize is a ring homomorphism") {
  auto s = uv_spec();
  auto u = CoeffElem::parameter(s, "u");
  auto v = CoeffElem::parameter(s, "v");
  auto target = CoeffElem::empty_spec();
  std::map<std::string, CoeffElem> at{{"u", CoeffElem::from_int(target, 3)},
                                      {"v", CoeffElem::from_int(target, -1)}};
  auto f = u * v + v.pow(-2) - CoeffElem::from_int(s, 7);
  auto g = u - v;
  CHECK((f * g).specialize(at, target) == f.specialize(at, target) * g.specialize(at, target));
  CHECK((f + g).specialize(at, target) == f.specialize(at, target) + g.specialize(at, target));
  CHECK(f.specialize(at, target).as_int() == -3 + 1 - 7);

  // invertible parameters demand unit values
  std::map<std::string, CoeffElem> bad{{"u", CoeffElem::one(target)},
                                       {"v", CoeffElem::from_int(target, 2)}};
  CHECK_THROWS_AS((u * v).specialize(bad, target), DomainError);
  // occurring parameters demand a value
  std::map<std::string, CoeffElem> partial{{"u", CoeffElem::one(target)}};
  CHECK_THROWS_AS((u * v).specialize(partial, target), DomainError);
  CHECK(u.specialize(partial, target).as_int() == 1);
}

TEST_CASE("printing") {
  auto s = uv_spec();
  auto u = CoeffElem::parameter(s, "u");
  auto v = CoeffElem::parameter(s, "v");
  CHECK(CoeffElem::zero(s).str() == "0");
  CHECK(CoeffElem::from_int(s, -5).str() == "-5");
  CHECK((u * u * v - CoeffElem::from_int(s, 2)).str() == "-2 + u^2*v");
  CHECK((v.pow(-1) * CoeffElem::from_int(s, 3)).str() == "3*v^-1");
  CHECK((u - v).str() == "-v + u");  // terms sort by exponent vector
}
