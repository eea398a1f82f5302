#include <doctest.h>

#include "coppice/gen.hpp"
#include "coppice/linearize.hpp"

using namespace coppice;

namespace {
Collection c1(const FlowCat2& fc, int n) {
  return make_collection(fc.cat, {"M0", "M1"}, {{std::vector<std::string>(n + 1, "L")}});
}
FlowCat2 empty_sq(int d) { return gen_square_zero(BitMat(d, std::vector<int>(d, 0))); }
ModuliPoint pt(const std::string& id, const Collection& c, std::vector<std::string> in, const std::string& out, Rat e) {
  return ModuliPoint{id, c, EvalGrid{{{in}}, {out}}, e, std::nullopt};
}
}  // namespace

TEST_CASE("extraction counts points") {
  FlowCat2 fc = empty_sq(2);
  CHECK(extract_mu(fc, c1(fc, 1)).entries.empty());
  fc.add_point(pt("a", c1(fc, 1), {"b0"}, "b1", Rat(1)));
  auto t = extract_mu(fc, c1(fc, 1));
  REQUIRE(t.entries.size() == 1);
  CHECK(t.at(EvalGrid{{{{"b0"}}}, {"b1"}}) == NovElem::monomial(Rat(1)));
  fc.add_point(pt("b", c1(fc, 1), {"b0"}, "b1", Rat(1)));
  CHECK(extract_mu(fc, c1(fc, 1)).entries.empty());
}

TEST_CASE("square-zero differentials satisfy the relations") {
  CHECK(residual_report(check_a2(extract_all(gen_trivial()), {2, 3, 3}, EnergyCap::at(Rat(3)), Rat(1))) ==
        "0 residuals\n");
  for (std::uint64_t s = 0; s < 8; ++s) {
    FlowCat2 fc = gen_square_zero_seeded(s);
    MuFamily mus = extract_all(fc);
    CHECK(check_a_infty(mus, 3, fc.cap).empty());
    CHECK(check_a2(mus, fc.bounds, fc.cap, fc.epsilon).empty());
  }
}

TEST_CASE("a differential that does not square to zero") {
  FlowCat2 fc = empty_sq(3);
  fc.add_point(pt("a", c1(fc, 1), {"b0"}, "b1", Rat(1)));
  fc.add_point(pt("b", c1(fc, 1), {"b1"}, "b2", Rat(1)));
  MuFamily mus = extract_all(fc);
  auto rs = check_a_infty(mus, 1, fc.cap);
  REQUIRE(rs.size() == 1);
  CHECK(rs[0].collection == c1(fc, 1));
  CHECK(rs[0].evals.key() == "b0/b2");
  CHECK(*rs[0].value.valuation() == Rat(2));
  auto r2 = check_a2(mus, fc.bounds, fc.cap, fc.epsilon);
  REQUIRE(r2.size() == 1);
  CHECK(r2[0].value == rs[0].value);
  CHECK(residual_report(r2).find("1 residuals") != std::string::npos);
}

TEST_CASE("curvature must have positive valuation") {
  FlowCat2 fc = empty_sq(1);
  fc.add_point(pt("c", c1(fc, 0), {}, "b0", Rat(0)));
  MuFamily mus = extract_all(fc);
  CHECK_THROWS_AS(check_a2(mus, fc.bounds, fc.cap, fc.epsilon), NonConvergence);
  CHECK_THROWS_AS(check_a_infty(mus, 2, fc.cap), NonConvergence);
}

TEST_CASE("restriction to one pair of objects") {
  MuFamily t = restrict_linear(extract_all(gen_trivial()), "M", "M");
  CHECK(t.tensors.empty());
  FlowCat2 s2 = gen_strict_2cat(z2_strict_2cat());
  MuFamily v = restrict_linear(extract_all(s2), "pt", "pt");
  CHECK(v.tensors.size() == 2);  // columns I,I and G,G
  for (const auto& [k, tn] : v.tensors) CHECK(tn.collection.r() == 1);
}

TEST_CASE("fiber compatibility") {
  FlowCat2 fc = gen_square_zero_seeded(6);
  MuFamily mus = extract_all(fc);
  CHECK(check_fiber_compat_linear(mus, 1));
  CHECK(check_fiber_compat_linear(extract_all(product_extend(fc, 1)), 1));
  CHECK(check_fiber_compat_linear(extract_all(empty_sq(2)), 2));
  MuFamily bad = mus;
  bool perturbed = false;
  for (auto& [k, t] : bad.tensors)
    if (!perturbed && t.collection.a() == 2 && !t.entries.empty()) {
      auto& v = t.entries.begin()->second;
      v = nov_add(v, NovElem::monomial(Rat(3)));
      perturbed = true;
    }
  REQUIRE(perturbed);
  auto res = check_fiber_compat_detail(bad, 1);
  CHECK(!res.ok);
  CHECK(!res.locus.empty());
  CHECK_THROWS(check_fiber_compat_linear(mus, 3));
}

TEST_CASE("bifunctor identity") {
  FlowCat2 s2 = gen_strict_2cat(z2_strict_2cat());
  CHECK(bifunctor_identity_check(extract_all(s2), s2.cap).empty());
  FlowCat2 term = gen_strict_2cat(terminal_strict_2cat());
  CHECK(bifunctor_identity_check(extract_all(term), term.cap).empty());
  // figure-eight terms on either side of x cancel while mu_2 commutes
  FlowCat2 bent = s2;
  Collection f8 = make_collection(bent.cat, {"pt", "pt", "pt"}, {{{"I"}, {"I"}}});
  bent.add_point(ModuliPoint{"f8", f8, EvalGrid{{{{}, {}}}, {"u_I"}}, Rat(1), std::nullopt});
  CHECK(bifunctor_identity_check(extract_all(bent), bent.cap).empty());
  Collection col = make_collection(bent.cat, {"pt", "pt"}, {{{"I", "I", "I"}}});
  bent.add_point(ModuliPoint{"skew", col, EvalGrid{{{{"u_I", "e_I"}}}, {"e_I"}}, Rat(1), std::nullopt});
  auto res = bifunctor_identity_check(extract_all(bent), bent.cap);
  REQUIRE(!res.empty());
  CHECK(res.front().value == NovElem::monomial(Rat(2)));
}
