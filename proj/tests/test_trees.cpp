#include <doctest.h>

#include "coppice/trees.hpp"
#include "oracles/oracles.hpp"

using namespace coppice;

TEST_CASE("enum_k matches the dissection oracle") {
  CHECK(enum_k(2).size() == 1);
  CHECK(enum_k(3).size() == 3);
  CHECK(enum_k(4).size() == 11);
  for (int r = 2; r <= 6; ++r) {
    std::vector<int> dims;
    std::set<oracle::Face> got;
    for (const auto& t : enum_k(r)) {
      dims.push_back(t.dim());
      got.insert(oracle::tree_face(t.str()));
    }
    CHECK(got == oracle::k_faces(r));
    CHECK(fvector(dims) == oracle::k_fvector(r));
    CHECK(euler_char(dims) == 1);
  }
  std::vector<int> d4;
  for (const auto& t : enum_k(4)) d4.push_back(t.dim());
  CHECK(fvector(d4) == std::vector<int>{5, 5, 1});
}

TEST_CASE("grafting") {
  auto c2 = PlanarTree::corolla(2);
  CHECK(graft_k(c2, c2, 1).str() == "((**)*)");
  CHECK(graft_k(c2, c2, 2).str() == "(*(**))");
  auto t = PlanarTree::parse("((**)*)");
  CHECK(graft_k(PlanarTree::leaf(), t, 1) == t);
  CHECK(graft_k(t, PlanarTree::leaf(), 3) == t);
  CHECK_THROWS(graft_k(c2, c2, 3));
}

TEST_CASE("faces one dimension down") {
  for (int r = 2; r <= 5; ++r)
    for (const auto& t : enum_k(r)) {
      std::set<oracle::Face> got;
      for (const auto& f : k_faces1(t)) got.insert(oracle::tree_face(f.str()));
      CHECK(got == oracle::k_facets(r, oracle::tree_face(t.str())));
    }
}

TEST_CASE("tree text") {
  for (const char* s : {"*", "(**)", "((**)(***))"}) CHECK(PlanarTree::parse(s).str() == s);
  CHECK_THROWS(PlanarTree::parse("(*"));
  CHECK(PlanarTree::parse("(*(**))").dim() == 0);
  CHECK(!PlanarTree::parse("((*)*)").stable());
}
