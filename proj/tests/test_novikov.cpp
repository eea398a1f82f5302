#include <doctest.h>

#include "coppice/novikov.hpp"
#include "oracles/oracles.hpp"

using namespace coppice;

namespace {
NovElem P(const char* s) { return NovElem::parse(s); }
const EnergyCap inf = EnergyCap::unbounded();
}  // namespace

TEST_CASE("rationals parse and print in lowest terms") {
  CHECK(format_rat(parse_rat("4/6")) == "2/3");
  CHECK(format_rat(parse_rat("-3")) == "-3");
  CHECK(format_rat(parse_rat(" 5/1 ")) == "5");
  CHECK_THROWS(parse_rat("1/0"));
  CHECK_THROWS(parse_rat("x"));
  CHECK_THROWS(parse_rat(""));
}

TEST_CASE("addition cancels in characteristic 2") {
  CHECK(nov_add(P("T^{1}"), P("T^{1}")).is_zero());
  CHECK(nov_add(P("1 + T^{1}"), P("T^{1} + T^{2}")) == P("1 + T^{2}"));
  CHECK(nov_add(NovElem{}, P("T^{1/2}")) == P("T^{1/2}"));
}

TEST_CASE("multiplication") {
  CHECK(nov_mul(P("1 + T^{1}"), P("1 + T^{1}"), inf) == P("1 + T^{2}"));
  CHECK(nov_mul(P("T^{1/2}"), P("T^{1/2}"), inf) == P("T^{1}"));
  CHECK(nov_mul(nov_count({Rat(1), Rat(2)}), nov_count({Rat(1)}), inf) == P("T^{2} + T^{3}"));
  CHECK(nov_mul(P("1 + T^{2}"), P("1 + T^{2}"), EnergyCap::at(Rat(3))) == P("1"));
}

TEST_CASE("counting reduces multiplicities mod 2") {
  CHECK(nov_count({Rat(1), Rat(1), Rat(2)}) == P("T^{2}"));
  CHECK(nov_count({}).is_zero());
  CHECK(nov_count({Rat(1, 2), Rat(3, 2)}) == P("T^{1/2} + T^{3/2}"));
}

TEST_CASE("truncation is inclusive at the cap") {
  CHECK(nov_truncate(P("1 + T^{3}"), EnergyCap::at(Rat(2))) == NovElem::one());
  CHECK(nov_truncate(P("T^{2} + T^{4}"), EnergyCap::at(Rat(2))) == P("T^{2}"));
  CHECK(nov_truncate(P("T^{2} + T^{4}"), inf) == P("T^{2} + T^{4}"));
  CHECK(EnergyCap::at(Rat(3)).minus(Rat(1)).str() == "2");
  CHECK(inf.minus(Rat(1)).str() == "inf");
}

TEST_CASE("valuation") {
  CHECK(*nov_valuation(P("T^{1} + T^{2}")) == Rat(1));
  CHECK(!nov_valuation(NovElem{}));
  CHECK(*nov_valuation(P("1 + T^{1}")) == Rat(0));
}

TEST_CASE("text form round-trips and rejects non-canonical input") {
  for (const char* s : {"0", "1", "T^{1/3}", "1 + T^{2} + T^{7/2}"}) CHECK(P(s).str() == s);
  CHECK_THROWS(P("T^{0}"));
  CHECK_THROWS(P("T^{2} + T^{1}"));
  CHECK_THROWS(P("2T"));
}

TEST_CASE("products agree with the cartesian parity oracle") {
  std::vector<Rat> es{Rat(0), Rat(1, 2), Rat(1), Rat(3, 2), Rat(2), Rat(1, 3)};
  for (unsigned a = 0; a < 64; ++a)
    for (unsigned b = 0; b < 64; b += 7) {
      std::vector<Rat> A, B;
      for (unsigned k = 0; k < es.size(); ++k) {
        if (a >> k & 1) A.push_back(es[k]);
        if (b >> k & 1) B.push_back(es[(k + 2) % es.size()]);
      }
      CHECK(nov_mul(nov_count(A), nov_count(B), inf).exponents() == oracle::parity_product(A, B));
    }
}
