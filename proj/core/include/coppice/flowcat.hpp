#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "coppice/novikov.hpp"
#include "coppice/polytopes.hpp"
#include "coppice/shapes.hpp"

namespace coppice {

struct FlowCatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TwoMorGen {
  std::string id, src, tgt;  // src, tgt are parallel 1-morphisms
  bool operator==(const TwoMorGen&) const = default;
};

struct TwoMorSig {
  std::map<std::string, TwoMorGen> gens;

  void add(const std::string& id, const std::string& src, const std::string& tgt);
  bool has(const std::string& id) const { return gens.count(id) > 0; }
  // generators in 2Mor(src, tgt), sorted by id
  std::vector<std::string> between(const std::string& src, const std::string& tgt) const;
  bool operator==(const TwoMorSig&) const = default;
};

struct ModuliPoint {
  std::string id;
  Collection collection;
  EvalGrid evals;
  Rat energy{0};
  std::optional<Coppice> stratum;
};

struct Endpoint {
  Desc desc;
  std::string left, right;  // point ids in the in- and out-collection moduli
  std::optional<Coppice> stratum;
};

struct ModuliEdge {
  std::string id;
  Collection collection;
  EvalGrid evals;
  Rat energy{0};
  std::vector<Endpoint> ends;  // two, or none for a circle
  std::optional<Coppice> stratum;
};

struct FlowCat2 {
  OneCat cat;
  TwoMorSig sig;
  ShapeMax bounds;
  EnergyCap cap;
  Rat epsilon{1};
  std::string genspec;
  std::map<std::string, ModuliPoint> points;
  std::map<std::string, ModuliEdge> edges;

  // collection key -> point ids
  std::map<std::string, std::vector<std::string>> point_index() const;
  const ModuliPoint& point(const std::string& id) const;
  void add_point(ModuliPoint p);
  void add_edge(ModuliEdge e);
};

struct FiberPair {
  Endpoint end;
  Collection collection;  // the glued collection L
  EvalGrid evals;
  Rat energy{0};
};

std::vector<FiberPair> fiber_pairs(const FlowCat2& fc, const Collection& L, const EnergyCap& cap);
// all fiber pairs of all collections within bounds, keyed by collection key
std::map<std::string, std::vector<FiberPair>> all_fiber_pairs(const FlowCat2& fc, const EnergyCap& cap);

struct Violation {
  std::string clause;  // "(a)".."(d)", "bounds", "evals"
  std::string locus;
  std::string message;
  std::string str() const { return clause + " " + locus + ": " + message; }
};

struct Report {
  std::vector<Violation> entries;
  bool empty() const { return entries.empty(); }
  bool cites(const std::string& clause) const;
  std::string str() const;
};

std::string evals_problem(const FlowCat2& fc, const Collection& L, const EvalGrid& ev);
Report validate(const FlowCat2& fc);

FlowCat2 restrict_to_mor(const FlowCat2& fc, const std::string& m0, const std::string& m1);
FlowCat2 product_extend(const FlowCat2& fc, int rc);

FlowCat2 load_flowcat(const std::string& path);
FlowCat2 parse_flowcat(const std::string& text);
std::string format_flowcat(const FlowCat2& fc);
void save_flowcat(const FlowCat2& fc, const std::string& path);

// evaluation grid text against a known shape ("" is one empty column)
EvalGrid parse_evals(const Shape& s, const std::string& alpha, const std::string& beta);

}  // namespace coppice
