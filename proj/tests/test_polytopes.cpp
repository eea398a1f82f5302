#include <doctest.h>

#include "coppice/polytopes.hpp"
#include "oracles/oracles.hpp"

using namespace coppice;

namespace {
std::vector<int> dims_of(const std::vector<Coppice>& cs) {
  std::vector<int> d;
  for (const auto& c : cs) d.push_back(w_dim(c));
  return d;
}
}  // namespace

TEST_CASE("small 2-associahedra") {
  CHECK(enum_w({0, 0}).size() == 1);
  auto w11 = enum_w({1, 1});
  CHECK(w11.size() == 3);
  CHECK(fvector(dims_of(w11)) == std::vector<int>{2, 1});
  CHECK(top_dim(single_shape({1, 1})) == 1);
  CHECK(top_dim(single_shape({0, 0, 0})) == 1);
  for (int n = 2; n <= 5; ++n) CHECK(top_dim(single_shape({n})) == n - 2);
  CHECK(euler_char(dims_of(enum_w({1, 1}))) == 1);
  CHECK(euler_char(dims_of(enum_w({1, 1, 1}))) == 1);
  CHECK(enum_w({1, 1, 1}).size() == 99);
  CHECK(enum_w({1}, true).empty());
}

TEST_CASE("fiber products over K_1 and K_2 are cartesian") {
  CHECK(enum_fiber(Shape{1, {{1}, {1}}}).size() == 1);
  CHECK(enum_fiber(Shape{2, {{1, 1}, {0, 0}}}).size() == 3);
  for (const auto& a : {IntVec{1, 1}, IntVec{2, 0}, IntVec{0, 2}, IntVec{2, 1}})
    for (const auto& b : {IntVec{1, 1}, IntVec{0, 1}, IntVec{1, 2}})
      CHECK(enum_fiber(Shape{2, {a, b}}).size() == enum_w(a).size() * enum_w(b).size());
}

TEST_CASE("forgetful map") {
  for (const auto& c : enum_w({1, 0, 1}))
    if (w_dim(c) == top_dim(single_shape({1, 0, 1}))) CHECK(forgetful(c) == PlanarTree::corolla(3));
  for (const auto& c : enum_w({3})) CHECK(forgetful(c).is_leaf());
  std::set<oracle::Face> img;
  for (const auto& c : enum_w({0, 0, 0})) img.insert(oracle::tree_face(forgetful(c).str()));
  CHECK(img == oracle::k_faces(3));
}

TEST_CASE("W(n) is K_n") {
  for (int n = 2; n <= 5; ++n) {
    auto iso = w_as_k_iso(n);
    CHECK(iso.size() == enum_k(n).size());
    std::set<std::string> img;
    for (const auto& [c, t] : iso) {
      img.insert(t.str());
      CHECK(w_dim(c) == t.dim());
    }
    CHECK(img.size() == iso.size());
  }
}

TEST_CASE("boundary strata") {
  auto b = boundary_strata(Shape{2, {{1, 1}}});
  CHECK(b.size() == 2);
  for (const auto& [d, c] : b) CHECK(d.type == 3);
  CHECK(boundary_strata(single_shape({3})).size() == 2);
  CHECK(boundary_strata(Shape{2, {{0, 0}}}).empty());
  std::set<std::string> vertices;
  for (const auto& c : enum_w({1, 1}))
    if (w_dim(c) == 0) vertices.insert(c.str());
  auto g = gamma_graft(make_t3(1, {{1, 0}, {0, 1}}), top_stratum(single_shape({2})), top_stratum(Shape::parse_matrix(2, "1,0;0,1")));
  CHECK(vertices.count(g.str()) == 1);
  auto p = gamma_graft(make_t1(1, 1, 0, 1), top_stratum(single_shape({2})), top_stratum(single_shape({1})));
  CHECK(p == top_stratum(single_shape({2})));
}

TEST_CASE("faces and stability") {
  for (const auto& c : enum_w({2, 1}))
    for (const auto& f : faces1(c)) {
      CHECK(w_dim(f) == w_dim(c) - 1);
      CHECK(is_stable(f));
    }
  CHECK(!stable_shape(single_shape({1})));
  CHECK(!stable_shape(single_shape({0, 0})));
  CHECK(stable_shape(single_shape({0, 0, 0})));
}

TEST_CASE("coppice text round-trips") {
  for (const auto& c : enum_fiber(Shape{2, {{1, 1}, {1, 0}}})) CHECK(Coppice::parse(c.str()) == c);
  CHECK_THROWS(Coppice::parse("(**):o[x"));
}

TEST_CASE("labelings and decompositions") {
  auto [cat, L] = free_collection(Shape{3, {{1, 1, 1}}});
  Coppice top = top_stratum(L.shape());
  auto lab = induced_labeling(cat, L, top);
  CHECK(labeling_problems(cat, L, top, lab).empty());
  CHECK(lab.seams.at("1/0") == L.grid[0][0]);
  auto dt = decomposition_shapes(cat, L, top);
  CHECK(dt.alpha.empty());
  CHECK(dt.rho.size() == 1);
  for (const auto& c : enum_w({1, 1, 1})) {
    auto l = induced_labeling(cat, L, c);
    CHECK(labeling_problems(cat, L, c, l).empty());
  }
  auto broken = lab;
  broken.seams.begin()->second.front() = "L1:0:2";
  CHECK(!labeling_problems(cat, L, top, broken).empty());

  auto [c2, L2] = free_collection(Shape{2, {{1, 1}}});
  for (const auto& c : enum_w({1, 1}))
    if (w_dim(c) == 0) {
      auto d = decomposition_shapes(c2, L2, c);
      REQUIRE(d.alpha.size() == 1);
      CHECK(d.alpha[0].shape() == single_shape({2}));
      REQUIRE(d.rho.size() == 1);
      CHECK(d.rho[0].shape().a() == 2);
    }
  auto [c1, L1] = free_collection(single_shape({3}));
  auto d1 = decomposition_shapes(c1, L1, top_stratum(L1.shape()));
  CHECK(d1.alpha.size() == 1);
  CHECK(d1.rho.empty());
}

TEST_CASE("associativity on a few strata") {
  for (const auto& n : {IntVec{4}, IntVec{1, 1, 1}, IntVec{2, 1}})
    for (const auto& c : enum_w(n))
      if (w_dim(c) == top_dim(single_shape(n)) - 2) CHECK(assoc_check(single_shape(n), c));
}

TEST_CASE("face poset export") {
  auto p = face_poset(single_shape({1, 1}));
  CHECK(p.strata.size() == 3);
  CHECK(p.covers.size() == 2);
  std::string dot = poset_dot(p, "W");
  CHECK(dot.rfind("digraph \"W\" {", 0) == 0);
  CHECK(dot.find("->") != std::string::npos);
  CHECK(poset_dot(p, "W") == dot);
}
