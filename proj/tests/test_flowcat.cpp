#include <doctest.h>

#include "coppice/gen.hpp"
#include "oracles/oracles.hpp"

using namespace coppice;

namespace {
const BitMat diamond{{0, 0, 0, 0}, {1, 0, 0, 0}, {1, 0, 0, 0}, {0, 1, 1, 0}};  // u -> v1, v2 -> w

Collection ll(const FlowCat2& fc) { return make_collection(fc.cat, {"M0", "M1"}, {{{"L", "L"}}}); }

std::map<std::string, long> class_counts(const FlowCat2& fc) {
  std::map<std::string, long> out;
  for (const auto& fp : fiber_pairs(fc, ll(fc), fc.cap))
    if (fp.energy == Rat(2)) ++out[fp.evals.key()];
  return out;
}
}  // namespace

TEST_CASE("fiber pairs of square-zero categories count the integer square") {
  std::vector<BitMat> ns{diamond};
  for (std::uint64_t s = 0; s < 12; ++s) ns.push_back(random_square_zero(s, 2 + static_cast<int>(s % 7)));
  for (const auto& N : ns) {
    FlowCat2 fc = gen_square_zero(N);
    auto sq = oracle::int_square(N);
    auto got = class_counts(fc);
    long total = 0;
    for (std::size_t w = 0; w < N.size(); ++w)
      for (std::size_t u = 0; u < N.size(); ++u) {
        std::string key = "b" + std::to_string(u) + "/b" + std::to_string(w);
        CHECK(got[key] == sq[w][u]);
        total += sq[w][u];
      }
    // each class is paired off completely
    std::size_t a1_edges = 0;
    for (const auto& [id, e] : fc.edges) a1_edges += e.collection.a() == 1;
    CHECK(static_cast<long>(a1_edges) * 2 == total);
  }
}

TEST_CASE("no points, no pairs") {
  FlowCat2 fc = gen_square_zero(BitMat(3, std::vector<int>(3, 0)));
  CHECK(fc.points.empty());
  CHECK(fiber_pairs(fc, ll(fc), fc.cap).empty());
  CHECK(validate(fc).empty());
}

TEST_CASE("validation") {
  CHECK(validate(gen_trivial()).empty());
  FlowCat2 fc = gen_square_zero(diamond);
  CHECK(validate(fc).empty());
  REQUIRE(!fc.edges.empty());
  FlowCat2 cut = fc;
  cut.edges.erase(cut.edges.begin());
  Report rep = validate(cut);
  CHECK(rep.cites("(b)"));
  CHECK(rep.str().find("orphaned fiber pair") != std::string::npos);

  FlowCat2 neg = fc;
  neg.points.begin()->second.energy = Rat(-1);
  CHECK(!validate(neg).empty());

  FlowCat2 over = fc;
  over.points.begin()->second.energy = Rat(4);
  CHECK(!validate(over).empty());

  FlowCat2 bad_ev = fc;
  bad_ev.points.begin()->second.evals.beta = {"nope"};
  CHECK(!validate(bad_ev).empty());

  FlowCat2 curved = gen_square_zero(diamond);
  Collection c0 = make_collection(curved.cat, {"M0", "M1"}, {{{"L"}}});
  curved.add_point(ModuliPoint{"c1", c0, EvalGrid{{{{}}}, {"b0"}}, Rat(1, 2), std::nullopt});
  CHECK(validate(curved).cites("(c)"));
}

TEST_CASE("restriction") {
  FlowCat2 t = restrict_to_mor(gen_trivial(), "M", "M");
  CHECK(t.points.empty());
  CHECK(t.edges.empty());
  FlowCat2 s2 = gen_strict_2cat(z2_strict_2cat());
  FlowCat2 v = restrict_to_mor(s2, "pt", "pt");
  // vertical products: e.e, e.u, u.e on each of I and G
  CHECK(v.points.size() == 6);
  for (const auto& [id, p] : v.points) CHECK(p.collection.shape() == single_shape({2}));
  CHECK_THROWS(restrict_to_mor(s2, "pt", "nowhere"));
}

TEST_CASE("products") {
  FlowCat2 fc = gen_square_zero({{0, 0}, {1, 0}}, {{1, 2, 3}});
  REQUIRE(fc.points.size() == 2);  // one point and its square as a stacked product
  int products = 0;
  for (const auto& [id, p] : fc.points)
    if (p.collection.a() == 2) {
      ++products;
      CHECK(p.energy == Rat(2));
      CHECK(id == "p00001*p00001");
    }
  CHECK(products == 1);
  FlowCat2 sq = gen_square_zero(diamond);
  CHECK(validate(product_extend(sq, 1)).empty());
  CHECK(format_flowcat(product_extend(sq, 1)) == format_flowcat(sq));
  CHECK_THROWS(product_extend(sq, 3));
}

TEST_CASE("interchange files") {
  for (const FlowCat2& fc : {gen_trivial(), gen_strict_2cat(z2_strict_2cat()), gen_assoc_algebra(z2_group_algebra())}) {
    std::string text = format_flowcat(fc);
    CHECK(format_flowcat(parse_flowcat(text)) == text);
  }
  std::string text = format_flowcat(gen_square_zero(diamond));
  auto at = text.find("left=");
  REQUIRE(at != std::string::npos);
  auto end = text.find(' ', at);
  std::string missing = text;
  missing.replace(at, end - at, "left=p09999");
  try {
    parse_flowcat(missing);
    FAIL("accepted a dangling reference");
  } catch (const FlowCatError& e) {
    CHECK(std::string(e.what()).find("missing point id 'p09999'") != std::string::npos);
  }
  std::string extra = text;
  extra.replace(extra.find("energy=1"), 8, "energy=1 colour=red");
  CHECK_THROWS_AS(parse_flowcat(extra), FlowCatError);
  CHECK_THROWS_AS(parse_flowcat("format 1\nshape_max 1,1,1\ncap 3\nepsilon 1\nONEMORS\n"), FlowCatError);
  CHECK_THROWS_AS(parse_flowcat("format 2\n"), FlowCatError);
}
