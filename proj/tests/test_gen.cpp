#include <algorithm>
#include <doctest.h>

#include "coppice/gen.hpp"
#include "oracles/oracles.hpp"

using namespace coppice;

TEST_CASE("trivial category") {
  FlowCat2 t = gen_trivial();
  CHECK(validate(t).empty());
  CHECK(t.sig.gens.size() == 1);
  CHECK(extract_all(t).tensors.empty());
  CHECK(validate(gen_trivial(true)).empty());
}

TEST_CASE("square-zero matrices") {
  for (std::uint64_t s = 0; s < 60; ++s) {
    const int d = 2 + static_cast<int>(s % 7);
    BitMat N = random_square_zero(s, d);
    REQUIRE(static_cast<int>(N.size()) == d);
    auto sq = oracle::int_square(N);
    for (const auto& row : sq)
      for (long x : row) CHECK(x % 2 == 0);
    CHECK(random_square_zero(s, d) == N);
  }
  CHECK(gen_square_zero(BitMat(2, std::vector<int>(2, 0))).points.empty());
  FlowCat2 e = gen_square_zero({{0, 0}, {1, 0}}, {{1, 1, 3}});
  REQUIRE(e.points.size() == 1);
  CHECK(e.edges.empty());
  auto mu = extract_all(e);
  REQUIRE(mu.tensors.size() == 1);
  CHECK(mu.tensors.begin()->second.at(EvalGrid{{{{"b0"}}}, {"b1"}}) == NovElem::monomial(Rat(1)));
  CHECK_THROWS_AS(gen_square_zero({{1, 0}, {0, 0}}), GenError);
  CHECK_THROWS_AS(gen_square_zero({{0, 1}}), GenError);
}

TEST_CASE("generators are deterministic") {
  for (std::uint64_t s : {3u, 9u, 20u}) CHECK(format_flowcat(gen_square_zero_seeded(s)) == format_flowcat(gen_square_zero_seeded(s)));
  GenSpec spec{"square_zero", "", 5, 0, default_bounds("square_zero")};
  CHECK(format_flowcat(generate(spec)) == format_flowcat(generate(spec)));
  CHECK(generate(spec).genspec == spec.str());
  CHECK(spec.str().find("family=square_zero") == 0);
  CHECK_THROWS_AS(generate(GenSpec{"nope", "", 0, 0, {}}), GenError);
}

TEST_CASE("algebras") {
  FlowCat2 z2 = gen_assoc_algebra(z2_group_algebra());
  CHECK(validate(z2).empty());
  CHECK(check_a_infty(extract_all(z2), 3, z2.cap).empty());
  CHECK(z2.points.count("p00001"));
  CHECK(z2.points.at("p00001").stratum.has_value());
  CHECK(validate(gen_assoc_algebra(idempotent_algebra())).empty());
  MultTable bad(2, std::vector<std::vector<int>>(2, std::vector<int>(2, 0)));
  bad[0][0][1] = 1;
  bad[1][0][0] = 1;
  CHECK_THROWS_AS(gen_assoc_algebra(bad), GenError);
}

TEST_CASE("strict 2-categories") {
  CHECK(z2_strict_2cat().axiom_problems().empty());
  CHECK(terminal_strict_2cat().axiom_problems().empty());
  FlowCat2 s2 = gen_strict_2cat(z2_strict_2cat());
  CHECK(validate(s2).empty());
  CHECK(check_a2(extract_all(s2), s2.bounds, s2.cap, s2.epsilon).empty());
  CHECK(validate(gen_strict_2cat(terminal_strict_2cat())).empty());

  Strict2Cat broken = z2_strict_2cat();
  broken.horiz[{"u_I", "u_I"}] = {"u_I"};
  auto bad = broken.axiom_problems();
  REQUIRE(!bad.empty());
  CHECK(std::any_of(bad.begin(), bad.end(), [](const std::string& m) { return m.find("interchange") != std::string::npos; }));
  CHECK_THROWS_AS(gen_strict_2cat(broken), GenError);
}

TEST_CASE("pairing rejects odd classes") {
  FlowCat2 fc = gen_square_zero(BitMat(3, std::vector<int>(3, 0)), {{1, 1, 3}});
  Collection col = make_collection(fc.cat, {"M0", "M1"}, {{{"L", "L"}}});
  fc.add_point(ModuliPoint{"q1", col, EvalGrid{{{{"b0"}}}, {"b1"}}, Rat(1), std::nullopt});
  fc.add_point(ModuliPoint{"q2", col, EvalGrid{{{{"b1"}}}, {"b2"}}, Rat(1), std::nullopt});
  auto pairs = all_fiber_pairs(fc, fc.cap);
  CHECK_THROWS_AS(pair_edges(fc, pairs, "e"), GenError);
}

TEST_CASE("mutations") {
  CHECK_THROWS_WITH_AS(mutate_break(gen_trivial(), 0), "no edges", GenError);
  FlowCat2 fc = gen_square_zero({{0, 0, 0, 0}, {1, 0, 0, 0}, {1, 0, 0, 0}, {0, 1, 1, 0}});
  for (std::uint64_t s = 0; s < 4; ++s) {
    Mutation m = mutate_break(fc, s);
    Report rep = validate(m.cat);
    CHECK(rep.cites("(b)"));
    CHECK(!m.cat.points.count(m.removed_point));
    Mutation again = mutate_break(fc, s);
    CHECK(format_flowcat(again.cat) == format_flowcat(m.cat));
  }
}
