#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>
#include <set>

#include "torfan/catalog.hpp"
#include "torfan/fan.hpp"
#include "torfan/intmat.hpp"

using namespace torfan;

namespace {

IntMat random_matrix(std::mt19937_64& rng, std::size_t r, std::size_t c) {
  IntMat m(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j)
      m(i, j) = Int(static_cast<long long>(rng() % 19)) - 9;
  return m;
}

// Geometric picture of a fan independent of ray order and labels: each
// maximal cone as the sorted set of its ray vectors, the list sorted.
std::vector<std::vector<std::vector<Int>>> cone_geometry(const Fan& fan) {
  std::vector<std::vector<std::vector<Int>>> out;
  for (const auto& c : fan.max_cones()) {
    std::vector<std::vector<Int>> cone;
    for (int r : c) cone.push_back(fan.ray(r));
    std::sort(cone.begin(), cone.end());
    out.push_back(std::move(cone));
  }
  std::sort(out.begin(), out.end());
  return out;
}

FanData quadrant_overlap() {
  FanData d;
  d.dim = 2;
  d.rays = {{1, 0}, {0, 1}, {1, 1}};
  d.max_cones = {{0, 1}, {2}};
  return d;
}

}  // namespace

TEST_CASE("smith normal form properties on random matrices") {
  std::mt19937_64 rng(11);
  for (int round = 0; round < 25; ++round) {
    std::size_t r = 1 + rng() % 5;
    std::size_t c = 1 + rng() % 5;
    IntMat m = random_matrix(rng, r, c);
    auto snf = smith_normal_form(m);
    REQUIRE(snf.U.rows() == r);
    REQUIRE(snf.V.rows() == c);
    Int du = det(snf.U);
    Int dv = det(snf.V);
    CHECK((du == 1 || du == -1));
    CHECK((dv == 1 || dv == -1));
    IntMat d = snf.U * m * snf.V;
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j)
        CHECK(d(i, j) == (i == j ? snf.diag[i] : Int(0)));
    for (std::size_t i = 0; i + 1 < snf.diag.size(); ++i) {
      CHECK(snf.diag[i] >= 0);
      if (snf.diag[i] != 0) CHECK(snf.diag[i + 1] % snf.diag[i] == 0);
      if (snf.diag[i] == 0) CHECK(snf.diag[i + 1] == 0);
    }
  }
}

TEST_CASE("smith normal form known values") {
  auto snf = smith_normal_form(IntMat::from_rows({{2, 4}, {6, 8}}));
  CHECK(snf.diag == std::vector<Int>{2, 4});
  snf = smith_normal_form(IntMat::from_rows({{1, 0}, {1, 2}}));
  CHECK(snf.diag == std::vector<Int>{1, 2});
  snf = smith_normal_form(IntMat::from_rows({{0, 0}, {0, 0}}));
  CHECK(snf.diag == std::vector<Int>{0, 0});
  CHECK(snf.rank() == 0);
}

TEST_CASE("determinant") {
  CHECK(det(IntMat::identity(4)) == 1);
  CHECK(det(IntMat::from_rows({{1, 2}, {3, 4}})) == -2);
  CHECK(det(IntMat::from_rows({{2, 0, 1}, {1, 1, 0}, {0, 3, 1}})) == 5);
  CHECK(det(IntMat::from_rows({{0, 1}, {1, 0}})) == -1);
  CHECK(det(IntMat::from_rows({{1, 1}, {2, 2}})) == 0);
}

TEST_CASE("unimodular inverse") {
  std::mt19937_64 rng(12);
  for (int round = 0; round < 10; ++round) {
    std::size_t n = 2 + rng() % 3;
    // product of random elementary row operations is unimodular
    IntMat m = IntMat::identity(n);
    for (int step = 0; step < 12; ++step) {
      std::size_t i = rng() % n;
      std::size_t j = rng() % n;
      if (i == j) continue;
      Int s = Int(static_cast<long long>(rng() % 5)) - 2;
      for (std::size_t k = 0; k < n; ++k) m(i, k) += s * m(j, k);
    }
    IntMat inv = unimodular_inverse(m);
    CHECK(m * inv == IntMat::identity(n));
    CHECK(inv * m == IntMat::identity(n));
  }
  CHECK_THROWS_AS(unimodular_inverse(IntMat::from_rows({{2, 0}, {0, 1}})), DomainError);
}

TEST_CASE("row echelon lattice membership") {
  RowEchelon e;
  e.insert(SparseRow{{0, 2}});
  e.insert(SparseRow{{0, 1}, {1, 1}});
  // lattice spanned by (2,0) and (1,1): (a,b) with a+b even
  CHECK(e.reduces_to_zero(SparseRow{{0, 1}, {1, 1}}));
  CHECK(e.reduces_to_zero(SparseRow{{1, 2}}));  // (0,2) = 2(1,1) - (2,0)
  CHECK(e.reduces_to_zero(SparseRow{{0, 3}, {1, 1}}));
  CHECK_FALSE(e.reduces_to_zero(SparseRow{{0, 1}}));
  CHECK_FALSE(e.reduces_to_zero(SparseRow{{1, 1}}));
  CHECK(e.pivot_count() == 2);
}

TEST_CASE("rational rank") {
  std::vector<SparseRow> rows{{{0, 1}, {1, 2}}, {{0, 2}, {1, 4}}, {{1, 1}}};
  CHECK(rational_rank(rows) == 2);
  CHECK(rational_rank({}) == 0);
  CHECK(rational_rank({SparseRow{}}) == 0);
}

TEST_CASE("fan validation failure modes") {
  auto failing = [](FanData d, const std::string& needle) {
    auto rep = validate_fan(d, true);
    CAPTURE(needle, rep.problems);
    REQUIRE_FALSE(rep.ok);
    bool found = false;
    for (const auto& p : rep.problems)
      if (p.find(needle) != std::string::npos) found = true;
    CHECK(found);
  };

  FanData base;
  base.dim = 2;
  base.rays = {{1, 0}, {0, 1}, {-1, -1}};
  base.max_cones = {{0, 1}, {1, 2}, {0, 2}};
  CHECK(validate_fan(base, true).ok);

  FanData d = base;
  d.rays[1] = {0, 0};
  failing(d, "is zero");

  d = base;
  d.rays[1] = {0, 2};
  failing(d, "not primitive");

  d = base;
  d.rays[2] = {1, 0};
  failing(d, "coincide");

  d = base;
  d.rays[2] = {1};
  failing(d, "wrong length");

  d = base;
  d.labels = {"a", "b"};
  failing(d, "label count");

  d = base;
  d.labels = {"a", "a", "b"};
  failing(d, "duplicate label");

  d = base;
  d.max_cones.clear();
  failing(d, "no maximal cones");

  d = base;
  d.max_cones[0] = {0, 7};
  failing(d, "references ray");

  d = base;
  d.max_cones[0] = {1, 1};
  failing(d, "repeats a ray");

  d = base;
  d.max_cones.push_back({1, 0});
  failing(d, "coincide");

  d = base;
  d.max_cones.push_back({2});
  failing(d, "is contained in");

  d = base;
  d.max_cones = {{0, 1}};
  failing(d, "lies in no maximal cone");

  d = base;
  d.rays[1] = {1, 2};
  d.max_cones = {{0, 1}, {1, 2}, {0, 2}};
  failing(d, "not generated by part of a lattice basis");
}

TEST_CASE("strict validation separates overlapping cones") {
  FanData d = quadrant_overlap();
  CHECK(validate_fan(d, false).ok);
  auto rep = validate_fan(d, true);
  REQUIRE_FALSE(rep.ok);
  CHECK(rep.problems[0].find("do not intersect in a common face") != std::string::npos);
  CHECK_THROWS_AS(Fan::make(quadrant_overlap()), DomainError);
  CHECK_NOTHROW(Fan::make(quadrant_overlap(), Fan::Check::trusted));
}

TEST_CASE("face recognition and minimal nonfaces") {
  auto fan = catalog_fan("dp6");
  CHECK(fan->dim() == 2);
  CHECK(fan->ray_count() == 6);
  CHECK(fan->max_cone_count() == 6);
  CHECK(fan->is_face({}));
  CHECK(fan->is_face({3}));
  CHECK(fan->is_face({0, 1}));
  CHECK(fan->is_face({1, 0}));
  CHECK_FALSE(fan->is_face({0, 2}));
  CHECK_FALSE(fan->is_face({0, 1, 2}));

  std::set<Cone> nf(fan->minimal_nonfaces().begin(), fan->minimal_nonfaces().end());
  std::set<Cone> expect{{0, 2}, {0, 3}, {0, 4}, {1, 3}, {1, 4}, {1, 5},
                        {2, 4}, {2, 5}, {3, 5}};
  CHECK(nf == expect);

  auto p2 = catalog_fan("pn:2");
  REQUIRE(p2->minimal_nonfaces().size() == 1);
  CHECK(p2->minimal_nonfaces()[0] == Cone{0, 1, 2});

  auto hz = catalog_fan("hirzebruch:3");
  std::set<Cone> hnf(hz->minimal_nonfaces().begin(), hz->minimal_nonfaces().end());
  CHECK(hnf == std::set<Cone>{{0, 2}, {1, 3}});
}

TEST_CASE("labels") {
  auto fan = catalog_fan("dp6");
  CHECK(fan->label(0) == "L1");
  CHECK(fan->ray_by_label("E2") == std::size_t{5});
  CHECK_FALSE(fan->ray_by_label("Z9").has_value());
  auto p2 = catalog_fan("pn:2");
  CHECK(p2->label(0) == "x1");  // default labels
  CHECK(p2->label(2) == "x3");
}

TEST_CASE("catalog selectors") {
  CHECK(catalog_fan("p1")->ray_count() == 2);
  CHECK(catalog_fan("pn:5")->ray_count() == 6);
  CHECK(catalog_fan("pn:5")->max_cone_count() == 6);
  CHECK(catalog_fan("hirzebruch:0")->minimal_nonfaces().size() == 2);
  CHECK_THROWS_AS(catalog_fan("pn:0"), ParseError);
  CHECK_THROWS_AS(catalog_fan("pn:17"), ParseError);
  CHECK_THROWS_AS(catalog_fan("pn:x"), ParseError);
  CHECK_THROWS_AS(catalog_fan("hirzebruch:-1"), ParseError);
  CHECK_THROWS_AS(catalog_fan("nope"), ParseError);
  // every catalog fan passes strict validation
  for (const auto& name : {"p1", "pn:1", "pn:4", "dp6", "hirzebruch:2"}) {
    auto fan = catalog_fan(name);
    CHECK(validate_fan(fan->data(), true).ok);
  }
}

TEST_CASE("dual bases") {
  auto fan = catalog_fan("dp6");
  // tau = (L1, E3): rays (0,1), (1,1); duals alpha_L1 = (-1,1), alpha_E3 = (1,0)
  IntMat a = dual_basis(*fan, {0, 1});
  REQUIRE(a.rows() == 2);
  CHECK(a(0, 0) == -1);
  CHECK(a(0, 1) == 1);
  CHECK(a(1, 0) == 1);
  CHECK(a(1, 1) == 0);

  // duality holds for every maximal cone of a few fans
  for (const auto& name : {"pn:3", "dp6", "hirzebruch:4"}) {
    auto f = catalog_fan(name);
    for (const auto& c : f->max_cones()) {
      IntMat m = dual_basis(*f, c);
      for (std::size_t i = 0; i < c.size(); ++i)
        for (std::size_t j = 0; j < c.size(); ++j) {
          Int s = 0;
          for (int l = 0; l < f->dim(); ++l) s += m(i, l) * f->ray(c[j])[l];
          CHECK(s == (i == j ? 1 : 0));
        }
    }
  }
  CHECK_THROWS_AS(dual_basis(*fan, {0, 2}), DomainError);
}

TEST_CASE("picard presentations") {
  auto p2 = picard_presentation(*catalog_fan("pn:2"));
  CHECK(p2.free_rank == 1);
  CHECK(p2.torsion.empty());
  CHECK(p2.characters_inject);

  auto dp6 = picard_presentation(*catalog_fan("dp6"));
  CHECK(dp6.free_rank == 4);
  CHECK(dp6.torsion.empty());
  CHECK(dp6.characters_inject);

  auto hz = picard_presentation(*catalog_fan("hirzebruch:7"));
  CHECK(hz.free_rank == 2);
  CHECK(hz.torsion.empty());

  // torsion example: two rays (1,0) and (1,2) as separate maximal cones
  FanData d;
  d.dim = 2;
  d.rays = {{1, 0}, {1, 2}};
  d.max_cones = {{0}, {1}};
  auto fan = Fan::make(std::move(d));
  auto pic = picard_presentation(*fan);
  CHECK(pic.free_rank == 0);
  CHECK(pic.torsion == std::vector<Int>{2});
  CHECK(pic.characters_inject);

  // coords sends the classes of a basis of characters to zero
  auto m = char_divisor_map(*catalog_fan("dp6"));
  for (std::size_t j = 0; j < 2; ++j) {
    std::vector<Int> divisor(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i) divisor[i] = m(i, j);
    auto coords = dp6.coords(divisor);
    for (const auto& c : coords) CHECK(c == 0);
  }
  // and distinguishes a ray divisor from zero
  std::vector<Int> e0{1, 0, 0, 0, 0, 0};
  bool all_zero = true;
  for (const auto& c : dp6.coords(e0))
    if (c != 0) all_zero = false;
  CHECK_FALSE(all_zero);
}

TEST_CASE("star subdivision") {
  auto p2 = catalog_fan("pn:2");
  auto [bl, idx] = star_subdivision(*p2, {0, 1}, "E");
  CHECK(idx == 3);
  CHECK(bl->ray_count() == 4);
  CHECK(bl->ray(3) == std::vector<Int>{1, 1});
  CHECK(bl->label(3) == "E");
  CHECK(bl->max_cone_count() == 4);
  CHECK(bl->is_face({0, 3}));
  CHECK(bl->is_face({1, 3}));
  CHECK_FALSE(bl->is_face({0, 1}));  // the center is subdivided away
  CHECK(validate_fan(bl->data(), true).ok);

  // blowing up all three fixed points of the plane gives the del Pezzo fan
  auto [one, i1] = star_subdivision(*p2, {0, 1});
  auto [two, i2] = star_subdivision(*one, {0, 2});
  auto [three, i3] = star_subdivision(*two, {1, 2});
  CHECK(cone_geometry(*three) == cone_geometry(*catalog_fan("dp6")));

  CHECK_THROWS_AS(star_subdivision(*p2, {0}), DomainError);
  CHECK_THROWS_AS(star_subdivision(*catalog_fan("dp6"), {0, 2}), DomainError);
  // resubdividing the same center hits the existing ray
  CHECK_THROWS_AS(star_subdivision(*bl, {0, 1}), DomainError);
}

TEST_CASE("default subdivision labels avoid collisions") {
  auto p2 = catalog_fan("pn:2");
  auto [bl, idx] = star_subdivision(*p2, {0, 1});
  CHECK(bl->label(idx) == "E");
  auto [bl2, idx2] = star_subdivision(*bl, {0, 3});
  CHECK(bl2->label(idx2) == "E1");
}
