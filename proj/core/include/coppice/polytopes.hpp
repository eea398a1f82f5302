#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "coppice/shapes.hpp"
#include "coppice/trees.hpp"

namespace coppice {

struct Comp;

// A seam vertex of a bubble tree: items in height order.
struct Seam {
  std::vector<Comp> items;
  bool operator==(const Seam&) const = default;
};

// A component vertex (or a marked point).  The seam-tree vertex of a
// component is implicit: the root sits at the root of the seam tree, items
// of a seam sit at that seam's vertex, a One component has one seam at its
// own vertex and a Multi component has one seam per child of its vertex.
struct Comp {
  enum Kind : std::uint8_t { Mark, One, Multi };
  Kind kind = Mark;
  std::vector<Seam> seams;

  static Comp mark() { return Comp{}; }
  static Comp one(std::vector<Comp> items);
  static Comp multi(std::vector<Seam> seams);
  int items() const;  // special points over all seams
  bool operator==(const Comp&) const = default;
};

// Serialized as "<seam tree>:<block>;<block>..." with "x" for a marked
// point, "o[a,b]" for a one-seam component and "m{a|b,c}" for a component
// over several seams.
struct Coppice {
  PlanarTree seam;
  std::vector<Comp> roots;

  int r() const { return seam.leaves(); }
  int a() const { return static_cast<int>(roots.size()); }
  Shape shape() const;
  std::string str() const;
  static Coppice parse(std::string_view text);
  bool operator==(const Coppice& o) const { return seam == o.seam && roots == o.roots; }
  bool operator<(const Coppice& o) const { return str() < o.str(); }
};

using TreePair = Coppice;  // a == 1

// empty when the coppice is structurally valid (possibly unstable)
std::string coppice_problem(const Coppice& c);
bool exceptional_block(int r, int mass);
bool stable_shape(const Shape& s);
bool is_stable(const Coppice& c);
int w_dim(const Coppice& c);
int top_dim(const Shape& s);
PlanarTree forgetful(const Coppice& c);
Coppice top_stratum(const Shape& s);

std::vector<Coppice> enum_fiber(const Shape& s);
std::vector<Coppice> enum_w(const IntVec& n, bool stable_only = false);
std::vector<Coppice> faces1(const Coppice& c);

PlanarTree w_to_k(const Coppice& c);
std::vector<std::pair<Coppice, PlanarTree>> w_as_k_iso(int n);

Coppice gamma_graft(const Desc& d, const Coppice& outer, const Coppice& inner);
std::vector<std::pair<Desc, Coppice>> boundary_strata(const Shape& s);

struct FacePoset {
  std::vector<Coppice> strata;
  std::vector<int> dims;
  std::vector<std::pair<int, int>> covers;  // (face, larger stratum)
};
FacePoset face_poset(const Shape& s);
std::string poset_dot(const FacePoset& p, const std::string& name);

// seam vertex id "j/q.p.q..." -> labels
struct Labeling {
  std::map<std::string, std::vector<std::string>> seams;
};
Labeling induced_labeling(const OneCat& cat, const Collection& L, const Coppice& c);
std::vector<std::string> labeling_problems(const OneCat& cat, const Collection& L, const Coppice& c,
                                           const Labeling& lab);

struct Decomposition {
  std::vector<Collection> alpha;  // per One component
  std::vector<Collection> rho;    // per internal seam-tree vertex
};
Decomposition decomposition_shapes(const OneCat& cat, const Collection& L, const Coppice& c);

struct AssocResult {
  bool ok = false;
  int chains = 0;
  std::string detail;
};
AssocResult assoc_check_detail(const Shape& s, const Coppice& c, int max_codim = 3);
bool assoc_check(const Shape& s, const Coppice& c, int max_codim = 3);

}  // namespace coppice
