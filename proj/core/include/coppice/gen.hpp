#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "coppice/flowcat.hpp"
#include "coppice/linearize.hpp"

namespace coppice {

struct GenError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using BitMat = std::vector<std::vector<int>>;  // entries 0/1; N[row][col]

struct GenBounds {
  ShapeMax bounds{2, 3, 3};
  EnergyCap cap = EnergyCap::at(Rat(3));
  Rat epsilon{1};
};

// Group the fiber pairs of every collection by (evals, energy) and join
// them into edges by lexicographic pairing.  Throws on an odd class inside
// the verification range.
std::vector<ModuliEdge> pair_edges(const FlowCat2& fc, const std::map<std::string, std::vector<FiberPair>>& pairs,
                                   const std::string& id_prefix);

FlowCat2 gen_trivial(bool empty_signature = false, const GenBounds& b = {});

// N[v][u] = 1 iff N(u) contains v
FlowCat2 gen_square_zero(const BitMat& N, const GenBounds& b = {{1, 2, 3}});
BitMat random_square_zero(std::uint64_t seed, int dim);  // A o proj
FlowCat2 gen_square_zero_seeded(std::uint64_t seed, const GenBounds& b = {{1, 2, 3}});

// c[x][y][z] = 1 iff x*y contains z
using MultTable = std::vector<std::vector<std::vector<int>>>;
MultTable z2_group_algebra();
MultTable idempotent_algebra();
FlowCat2 gen_assoc_algebra(const MultTable& c, const GenBounds& b = {{1, 3, 4}});

// Finite strict 2-category over the two-element field.  2-morphism
// compositions are F2-linear combinations (sets) of basis generators.
struct Strict2Cat {
  OneCat one;
  std::map<std::pair<std::string, std::string>, std::vector<std::string>> basis;  // (L, L') -> generators
  std::map<std::pair<std::string, std::string>, std::set<std::string>> vert;      // x then y
  std::map<std::pair<std::string, std::string>, std::set<std::string>> horiz;     // x beside y
  std::map<std::string, std::string> unit;                                        // L -> identity 2-morphism

  std::vector<std::string> axiom_problems() const;
};

Strict2Cat z2_strict_2cat();
Strict2Cat terminal_strict_2cat();
FlowCat2 gen_strict_2cat(const Strict2Cat& s, const GenBounds& b = {{2, 3, 3}});

struct Mutation {
  FlowCat2 cat;
  std::string collection;  // orphan's class
  EvalGrid evals;
  Rat energy{0};
  std::string edge, removed_point;
};
Mutation mutate_break(const FlowCat2& fc, std::uint64_t seed);

// CLI-facing dispatch
struct GenSpec {
  std::string family;   // trivial | square_zero | assoc_algebra | strict_2cat
  std::string variant;  // assoc_algebra: z2 | idempotent; strict_2cat: z2 | terminal
  std::uint64_t seed = 0;
  int dim = 0;          // square_zero; 0 picks 2 + seed % 7
  GenBounds bounds;
  std::string str() const;
};
FlowCat2 generate(const GenSpec& spec);
GenBounds default_bounds(const std::string& family);

}  // namespace coppice
