#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace coppice {

// Planar rooted tree; a leaf has no kids.  Serialized as "*" for a leaf and
// "(" kids ")" otherwise.
struct PlanarTree {
  std::vector<PlanarTree> kids;

  static PlanarTree leaf() { return {}; }
  static PlanarTree corolla(int r);
  static PlanarTree parse(std::string_view text);

  bool is_leaf() const { return kids.empty(); }
  int leaves() const;
  int internal() const;
  int dim() const { return leaves() - 1 - internal(); }
  bool stable() const;  // every internal vertex has >= 2 kids
  std::string str() const;

  bool operator==(const PlanarTree& o) const { return kids == o.kids; }
  bool operator<(const PlanarTree& o) const { return str() < o.str(); }
};

std::vector<PlanarTree> enum_k(int r);
// inner replaces leaf number `slot` (1-based) of outer
PlanarTree graft_k(const PlanarTree& outer, const PlanarTree& inner, int slot);
// trees one dimension lower obtained by inserting one internal vertex
std::vector<PlanarTree> k_faces1(const PlanarTree& t);

int euler_char(const std::vector<int>& dims);
std::vector<int> fvector(const std::vector<int>& dims);  // counts by dim, ascending

}  // namespace coppice
