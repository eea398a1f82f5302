#pragma once

#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "coppice/flowcat.hpp"

namespace coppice {

struct NonConvergence : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NovTensor {
  Collection collection;
  std::map<EvalGrid, NovElem> entries;  // zero entries absent
  NovElem at(const EvalGrid& g) const;
};

struct MuFamily {
  std::shared_ptr<const OneCat> cat;
  std::shared_ptr<const TwoMorSig> sig;
  ShapeMax bounds;
  EnergyCap cap;
  Rat epsilon{1};
  std::map<std::string, NovTensor> tensors;  // by collection key

  const NovTensor* find(const std::string& key) const;
  void put(NovTensor t);
};

struct Residual {
  Collection collection;
  EvalGrid evals;
  NovElem value;
  std::vector<std::string> descs;  // contributing descriptors
  std::string str() const;
};

NovTensor extract_mu(const FlowCat2& fc, const Collection& L);
MuFamily extract_all(const FlowCat2& fc);

std::vector<Residual> check_a_infty(const MuFamily& mus, int n_max, const EnergyCap& cap);
std::vector<Residual> check_a2(const MuFamily& mus, const ShapeMax& bounds, const EnergyCap& cap, const Rat& epsilon);
MuFamily restrict_linear(const MuFamily& mus, const std::string& m0, const std::string& m1);

struct CompatResult {
  bool ok = true;
  std::string locus;
};
CompatResult check_fiber_compat_detail(const MuFamily& mus, int rc);
bool check_fiber_compat_linear(const MuFamily& mus, int rc);

std::vector<Residual> bifunctor_identity_check(const MuFamily& mus, const EnergyCap& cap);

std::string residual_report(const std::vector<Residual>& rs);

}  // namespace coppice
