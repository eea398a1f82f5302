#pragma once

#include <compare>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "coppice/novikov.hpp"

namespace coppice {

using IntVec = std::vector<int>;
using IntMat = std::vector<IntVec>;

// (r, a, n) with n[j][i]; a == n.size().  a == 0 is a bare K_r.
struct Shape {
  int r = 1;
  IntMat n;

  int a() const { return static_cast<int>(n.size()); }
  int mass() const;
  int block_mass(int j) const;
  bool all_zero() const { return mass() == 0; }
  std::string str() const;  // "r=2 n=1,0;0,1"
  std::string matrix_str() const;  // "1,0;0,1"
  static Shape parse_matrix(int r, std::string_view text);
  auto operator<=>(const Shape&) const = default;
};

Shape single_shape(const IntVec& n);

struct ShapeMax {
  int r_max = 1;
  int a_max = 1;
  int mass_max = 1;
  std::string str() const;
  static ShapeMax parse(std::string_view text);  // "R,A,M"
  bool admits(const Shape& s) const;
  auto operator<=>(const ShapeMax&) const = default;
};

std::vector<Shape> shapes_within(const ShapeMax& bound);

struct Desc {
  int type = 1;
  int i = 0, j = 0, s = 0, t = 0;  // T1: i,j,s,t; T2: s,t; T3: j
  // T2: parts[j][l] has t entries; T3: parts[0][l] has r entries
  std::vector<IntMat> parts;

  int zero_parts() const;
  std::string str() const;
  static Desc parse(std::string_view text);
  auto operator<=>(const Desc&) const = default;
};

Desc make_t1(int i, int j, int s, int t);
Desc make_t2(int s, int t, std::vector<IntMat> parts);
Desc make_t3(int j, IntMat parts);

// Ordered lists of b vectors summing to v.
std::vector<IntMat> compositions(const IntVec& v, int b, bool allow_zero_parts);

enum class DescMode {
  Equation,  // b >= 1, zero parts allowed
  Boundary   // b^j = 0 allowed exactly on zero columns, no zero parts, stable
};

// Empty string when valid.
std::string desc_problem(const Shape& shape, const Desc& d, DescMode mode);
std::pair<Shape, Shape> desc_shapes(const Shape& shape, const Desc& d);

std::vector<Desc> enum_desc(const Shape& shape, const EnergyCap& cap, const Rat& epsilon);
std::vector<Desc> boundary_descs(const Shape& shape);

// 1-category with a finite composition table, or a free category on generators.
class OneCat {
 public:
  static OneCat free_on(const std::vector<std::string>& objects);

  void add_object(const std::string& obj);
  void add_mor(const std::string& id, const std::string& src, const std::string& tgt);
  void set_identity(const std::string& obj, const std::string& mor);
  // diagrammatic: f: A->B, g: B->C, h = f then g
  void set_compose(const std::string& f, const std::string& g, const std::string& h);

  bool has_object(const std::string& obj) const;
  bool has_mor(const std::string& id) const;
  std::string src(const std::string& id) const;
  std::string tgt(const std::string& id) const;
  std::optional<std::string> compose(const std::string& f, const std::string& g) const;
  std::string identity(const std::string& obj) const;

  const std::vector<std::string>& objects() const { return objects_; }
  const std::map<std::string, std::pair<std::string, std::string>>& mors() const { return mors_; }
  const std::map<std::pair<std::string, std::string>, std::string>& table() const { return table_; }
  const std::map<std::string, std::string>& identities() const { return ids_; }
  bool is_free() const { return free_; }

  // associativity and unit laws, exhaustively
  std::vector<std::string> check_axioms() const;

 private:
  bool free_ = false;
  std::vector<std::string> objects_;
  std::map<std::string, std::pair<std::string, std::string>> mors_;
  std::map<std::pair<std::string, std::string>, std::string> table_;
  std::map<std::string, std::string> ids_;
};

struct CollectionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Collection {
  std::vector<std::string> objects;                      // M_0..M_r
  std::vector<std::vector<std::vector<std::string>>> grid;  // [j][i][k]
  std::vector<std::string> bottom, top;                  // composed endpoints per block

  int r() const { return static_cast<int>(objects.size()) - 1; }
  int a() const { return static_cast<int>(grid.size()); }
  Shape shape() const;
  std::string objects_str() const;
  std::string grid_str() const;
  std::string key() const { return objects_str() + "/" + grid_str(); }
  bool operator==(const Collection& o) const { return objects == o.objects && grid == o.grid; }
  bool operator<(const Collection& o) const { return key() < o.key(); }
};

Collection make_collection(const OneCat& cat, std::vector<std::string> objects,
                           std::vector<std::vector<std::vector<std::string>>> grid);
std::vector<std::vector<std::vector<std::string>>> parse_grid(std::string_view text);
std::string format_grid(const std::vector<std::vector<std::vector<std::string>>>& grid);

// Symbolic collection over the free category: L^{j,k}_{(i-1)i} named "L<j>.<k>_<i>".
std::pair<OneCat, Collection> free_collection(const Shape& shape);

std::pair<Collection, Collection> desc_collections(const OneCat& cat, const Collection& L, const Desc& d);
Collection glue_collections(const OneCat& cat, const Desc& d, const Collection& in, const Collection& out);

// slots of evaluation grids
struct Slot {
  bool out = false;  // which factor (in = L', out = L'')
  bool beta = false;
  int j = 0, i = 0, k = 0;  // 1-based; for beta only j
  auto operator<=>(const Slot&) const = default;
  std::string str() const;
};

struct GlueIndex {
  std::vector<std::vector<std::vector<Slot>>> alpha;  // [j][i][k-1] of L
  std::vector<Slot> beta;                             // [j] of L
  std::vector<std::pair<Slot, Slot>> fiber;           // (in alpha slot, out beta slot)
};

GlueIndex glue_index(const Shape& shape, const Desc& d);

struct EvalGrid {
  std::vector<std::vector<std::vector<std::string>>> alpha;  // [j][i][k-1]
  std::vector<std::string> beta;
  std::string alpha_str() const;
  std::string beta_str() const;
  std::string key() const { return alpha_str() + "/" + beta_str(); }
  auto operator<=>(const EvalGrid&) const = default;
};

struct FiberError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Throws FiberError naming the slot when the fiber condition fails.
EvalGrid glue_evals(const Shape& shape, const Desc& d, const EvalGrid& in, const EvalGrid& out);
std::optional<EvalGrid> try_glue_evals(const Shape& shape, const Desc& d, const EvalGrid& in,
                                       const EvalGrid& out);

// Iterated decomposition of a collection into factors, with the induced
// wiring of evaluation slots.  Factor 0 is the starting collection; a step
// applied to factor f replaces it by the in-collection and appends the
// out-collection.
struct ChainStep {
  int factor = 0;
  Desc d;
};

struct Port {
  int factor = 0;
  Slot slot;
  auto operator<=>(const Port&) const = default;
};

struct Factorization {
  std::vector<Collection> factors;
  std::vector<std::pair<Slot, Port>> external;  // slot of the original collection -> port
  std::vector<std::pair<Port, Port>> internal;  // matched (in alpha, out beta)

  static Factorization start(const Collection& L);
  Factorization apply(const OneCat& cat, int factor, const Desc& d) const;
  // factors sorted by key, ports renumbered; throws if factor keys repeat
  Factorization canonical() const;
  bool operator==(const Factorization& o) const;
  std::string str() const;
};

bool assoc_shape_commute(const Shape& shape, const std::vector<ChainStep>& chain1,
                         const std::vector<ChainStep>& chain2);

}  // namespace coppice
