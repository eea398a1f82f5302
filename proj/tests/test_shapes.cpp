#include <doctest.h>

#include "coppice/shapes.hpp"
#include "oracles/oracles.hpp"

using namespace coppice;

namespace {
OneCat interval() {
  OneCat c;
  c.add_object("M0");
  c.add_object("M1");
  c.add_object("M2");
  for (const char* m : {"M0", "M1", "M2"}) {
    c.add_mor(std::string("1_") + m, m, m);
    c.set_identity(m, std::string("1_") + m);
  }
  c.add_mor("f", "M0", "M1");
  c.add_mor("g", "M1", "M2");
  c.add_mor("fg", "M0", "M2");
  for (const char* m : {"M0", "M1", "M2"}) {
    std::string i = std::string("1_") + m;
    c.set_compose(i, i, i);
  }
  c.set_compose("1_M0", "f", "f");
  c.set_compose("f", "1_M1", "f");
  c.set_compose("1_M1", "g", "g");
  c.set_compose("g", "1_M2", "g");
  c.set_compose("f", "g", "fg");
  c.set_compose("1_M0", "fg", "fg");
  c.set_compose("fg", "1_M2", "fg");
  return c;
}
}  // namespace

TEST_CASE("shape text") {
  Shape s = Shape::parse_matrix(2, "1,0;0,1");
  CHECK(s.a() == 2);
  CHECK(s.mass() == 2);
  CHECK(s.str() == "r=2 n=1,0;0,1");
  CHECK_THROWS(Shape::parse_matrix(2, "1,0,1"));
  CHECK(ShapeMax::parse("2,3,4").str() == "2,3,4");
  CHECK(ShapeMax{1, 1, 2}.admits(single_shape({2})));
  CHECK(!ShapeMax{1, 1, 2}.admits(single_shape({3})));
}

TEST_CASE("compositions match stars and bars") {
  for (int m = 0; m <= 4; ++m)
    for (int b = 1; b <= 3; ++b) {
      CHECK(static_cast<long>(compositions({m}, b, true).size()) == oracle::compositions(m, b));
      long positive = m >= b ? oracle::compositions(m - b, b) : 0;
      CHECK(static_cast<long>(compositions({m}, b, false).size()) == positive);
    }
}

TEST_CASE("descriptor enumeration") {
  const EnergyCap cap = EnergyCap::at(Rat(2));
  std::set<std::string> t1;
  for (const auto& d : enum_desc(single_shape({2}), EnergyCap::at(Rat(3)), Rat(1)))
    if (d.type == 1) t1.insert(d.str());
  CHECK(t1 == std::set<std::string>{"T1(1,1,0,0)", "T1(1,1,1,0)", "T1(1,1,2,0)", "T1(1,1,0,1)", "T1(1,1,1,1)",
                                    "T1(1,1,0,2)"});
  std::vector<std::string> t3;
  for (const auto& d : enum_desc(Shape{2, {{1, 0}}}, cap, Rat(1)))
    if (d.type == 3) t3.push_back(d.str());
  CHECK(t3 == std::vector<std::string>{"T3(1;[1,0])", "T3(1;[0,0|1,0])", "T3(1;[1,0|0,0])"});
  for (const auto& d : enum_desc(Shape{2, {{2, 1}}}, cap, Rat(1))) CHECK(d.type != 2);
  CHECK(Desc::parse("T3(1;[1,0|0,1])").str() == "T3(1;[1,0|0,1])");
}

TEST_CASE("descriptor shapes") {
  for (int n = 1; n <= 4; ++n)
    for (int t = 0; t <= n; ++t) {
      auto [in, out] = desc_shapes(single_shape({n}), make_t1(1, 1, 0, t));
      CHECK(in == single_shape({n - t + 1}));
      CHECK(out == single_shape({t}));
    }
  auto [in, out] = desc_shapes(Shape{2, {{1, 1}}}, make_t3(1, {{1, 0}, {0, 1}}));
  CHECK(in == single_shape({2}));
  CHECK(out == Shape::parse_matrix(2, "1,0;0,1"));
  auto [in2, out2] = desc_shapes(Shape{3, {{4, 5, 6}}}, make_t2(0, 2, {{{4, 5}}}));
  CHECK(in2 == Shape{2, {{1, 6}}});
  CHECK(out2 == Shape{2, {{4, 5}}});
  CHECK(!desc_problem(single_shape({2}), make_t1(1, 1, 2, 1), DescMode::Equation).empty());
}

TEST_CASE("collections compose through the table") {
  OneCat c = interval();
  CHECK(c.check_axioms().empty());
  Collection one = make_collection(c, {"M0", "M1"}, {{{"f"}}});
  CHECK(one.bottom == std::vector<std::string>{"f"});
  CHECK(one.top == std::vector<std::string>{"f"});
  Collection two = make_collection(c, {"M0", "M1", "M2"}, {{{"f"}, {"g"}}});
  CHECK(two.bottom == std::vector<std::string>{"fg"});
  try {
    make_collection(c, {"M0", "M1"}, {{{"g"}}});
    FAIL("accepted a bad grid");
  } catch (const CollectionError& e) {
    CHECK(std::string(e.what()).find("(i=1,j=1,k=0)") != std::string::npos);
  }
  CHECK(parse_grid(format_grid(two.grid)) == two.grid);
}

TEST_CASE("free collections and descriptor collections") {
  auto [cat, L] = free_collection(Shape{2, {{1, 1}}});
  auto [in, out] = desc_collections(cat, L, make_t3(1, {{1, 0}, {0, 1}}));
  CHECK(in.grid[0][0].size() == 3);
  CHECK(in.grid[0][0][0] == "L1:0:1.L1:0:2");
  CHECK(out.shape() == Shape::parse_matrix(2, "1,0;0,1"));
  CHECK(glue_collections(cat, make_t3(1, {{1, 0}, {0, 1}}), in, out) == L);
  auto [c1, L1] = free_collection(single_shape({3}));
  auto [i1, o1] = desc_collections(c1, L1, make_t1(1, 1, 0, 3));
  CHECK(o1 == L1);
  CHECK(i1.grid[0][0].size() == 2);
}

TEST_CASE("evaluation gluing") {
  Shape s = single_shape({2});
  Desc d = make_t1(1, 1, 0, 1);
  EvalGrid in{{{{"p", "q"}}}, {"z"}};
  EvalGrid out{{{{"a"}}}, {"p"}};
  EvalGrid g = glue_evals(s, d, in, out);
  CHECK(g.alpha_str() == "a,q");
  CHECK(g.beta_str() == "z");
  EvalGrid bad{{{{"a"}}}, {"x"}};
  CHECK_THROWS_AS(glue_evals(s, d, in, bad), FiberError);
  CHECK(!try_glue_evals(s, d, in, bad));
}

TEST_CASE("two insertion orders agree") {
  Shape s = single_shape({4});
  // disjoint insertions
  CHECK(assoc_shape_commute(s, {{0, make_t1(1, 1, 0, 2)}, {0, make_t1(1, 1, 1, 2)}},
                            {{0, make_t1(1, 1, 2, 2)}, {0, make_t1(1, 1, 0, 2)}}));
  // an insertion within the insertion
  CHECK(assoc_shape_commute(s, {{0, make_t1(1, 1, 0, 3)}, {1, make_t1(1, 1, 0, 2)}},
                            {{0, make_t1(1, 1, 0, 2)}, {0, make_t1(1, 1, 0, 2)}}));
  CHECK(!assoc_shape_commute(s, {{0, make_t1(1, 1, 0, 3)}}, {{0, make_t1(1, 1, 1, 3)}}));
}
