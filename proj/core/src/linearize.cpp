#include "coppice/linearize.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace coppice {

NovElem NovTensor::at(const EvalGrid& g) const {
  auto it = entries.find(g);
  return it == entries.end() ? NovElem{} : it->second;
}

const NovTensor* MuFamily::find(const std::string& key) const {
  auto it = tensors.find(key);
  return it == tensors.end() ? nullptr : &it->second;
}

void MuFamily::put(NovTensor t) {
  for (auto it = t.entries.begin(); it != t.entries.end();)
    it = it->second.is_zero() ? t.entries.erase(it) : std::next(it);
  std::string k = t.collection.key();
  tensors[k] = std::move(t);
}

std::string Residual::str() const {
  std::string out = "collection " + collection.key() + " evals " + evals.key() + " value " + value.str() + " terms";
  for (const auto& d : descs) out += " " + d;
  return out;
}

std::string residual_report(const std::vector<Residual>& rs) {
  std::string out;
  for (const auto& r : rs) out += r.str() + "\n";
  out += std::to_string(rs.size()) + " residuals\n";
  return out;
}

NovTensor extract_mu(const FlowCat2& fc, const Collection& L) {
  NovTensor t{L, {}};
  std::map<EvalGrid, std::vector<Rat>> energies;
  const std::string key = L.key();
  for (const auto& [id, p] : fc.points)
    if (p.collection.key() == key) energies[p.evals].push_back(p.energy);
  for (auto& [g, es] : energies) {
    NovElem v = nov_truncate(nov_count(es), fc.cap);
    if (!v.is_zero()) t.entries[g] = v;
  }
  return t;
}

MuFamily extract_all(const FlowCat2& fc) {
  MuFamily m;
  m.cat = std::make_shared<OneCat>(fc.cat);
  m.sig = std::make_shared<TwoMorSig>(fc.sig);
  m.bounds = fc.bounds;
  m.cap = fc.cap;
  m.epsilon = fc.epsilon;
  std::map<std::string, std::map<EvalGrid, std::vector<Rat>>> acc;
  std::map<std::string, const Collection*> coll;
  for (const auto& [id, p] : fc.points) {
    std::string k = p.collection.key();
    coll[k] = &p.collection;
    acc[k][p.evals].push_back(p.energy);
  }
  for (auto& [k, byg] : acc) {
    NovTensor t{*coll[k], {}};
    for (auto& [g, es] : byg) t.entries[g] = nov_truncate(nov_count(es), fc.cap);
    m.put(std::move(t));
  }
  return m;
}

namespace {

void require_positive_curvature(const MuFamily& mus, const Rat& eps) {
  for (const auto& [k, t] : mus.tensors) {
    if (!t.collection.shape().all_zero()) continue;
    for (const auto& [g, v] : t.entries) {
      auto val = v.valuation();
      if (val && *val < eps)
        throw NonConvergence("zero-shape tensor at " + k + " has valuation " + format_rat(*val) + " below epsilon " +
                             format_rat(eps));
    }
  }
}

struct Acc {
  Collection collection;
  std::map<EvalGrid, NovElem> sums;
  std::map<EvalGrid, std::set<std::string>> descs;
};

std::vector<Residual> collect(std::map<std::string, Acc>& acc, const EnergyCap& visible) {
  std::vector<Residual> out;
  for (auto& [k, a] : acc)
    for (auto& [g, v] : a.sums) {
      NovElem t = nov_truncate(v, visible);
      if (t.is_zero()) continue;
      const auto& ds = a.descs[g];
      out.push_back(Residual{a.collection, g, t, std::vector<std::string>(ds.begin(), ds.end())});
    }
  return out;
}

}  // namespace

std::vector<Residual> check_a_infty(const MuFamily& mus, int n_max, const EnergyCap& cap) {
  require_positive_curvature(mus, mus.epsilon);
  std::vector<const NovTensor*> ts;
  for (const auto& [k, t] : mus.tensors)
    if (t.collection.r() == 1 && t.collection.a() == 1) ts.push_back(&t);
  std::map<std::string, Acc> acc;
  for (const NovTensor* outer : ts)
    for (const NovTensor* inner : ts) {
      const auto& oc = outer->collection.grid[0][0];
      const auto& ic = inner->collection.grid[0][0];
      const int m = static_cast<int>(oc.size()) - 1;
      const int t = static_cast<int>(ic.size()) - 1;
      if (m + t - 1 > n_max || m < 1) continue;
      if (outer->collection.objects != inner->collection.objects) continue;
      for (int s = 0; s < m; ++s) {
        if (ic.front() != oc[s] || ic.back() != oc[s + 1]) continue;
        std::vector<std::string> col(oc.begin(), oc.begin() + s + 1);
        col.insert(col.end(), ic.begin() + 1, ic.end());
        col.insert(col.end(), oc.begin() + s + 2, oc.end());
        Collection L = make_collection(*mus.cat, outer->collection.objects, {{col}});
        auto& a = acc.try_emplace(L.key(), Acc{L, {}, {}}).first->second;
        const std::string dname = make_t1(1, 1, s, t).str();
        for (const auto& [go, vo] : outer->entries)
          for (const auto& [gi, vi] : inner->entries) {
            if (go.alpha[0][0][s] != gi.beta[0]) continue;
            std::vector<std::string> in(go.alpha[0][0].begin(), go.alpha[0][0].begin() + s);
            in.insert(in.end(), gi.alpha[0][0].begin(), gi.alpha[0][0].end());
            in.insert(in.end(), go.alpha[0][0].begin() + s + 1, go.alpha[0][0].end());
            EvalGrid g{{{in}}, {go.beta[0]}};
            a.sums[g] = nov_add(a.sums[g], nov_mul(vo, vi, cap));
            a.descs[g].insert(dname);
          }
      }
    }
  return collect(acc, cap.minus(mus.epsilon));
}

std::vector<Residual> check_a2(const MuFamily& mus, const ShapeMax& bounds, const EnergyCap& cap, const Rat& epsilon) {
  require_positive_curvature(mus, epsilon);
  std::map<Shape, std::vector<const NovTensor*>> by_shape;
  for (const auto& [k, t] : mus.tensors) by_shape[t.collection.shape()].push_back(&t);
  std::map<std::string, Acc> acc;
  for (const Shape& s : shapes_within(bounds))
    for (const Desc& d : enum_desc(s, cap, epsilon)) {
      auto [sin, sout] = desc_shapes(s, d);
      auto in = by_shape.find(sin);
      auto ou = by_shape.find(sout);
      if (in == by_shape.end() || ou == by_shape.end()) continue;
      const std::string dname = d.str();
      for (const NovTensor* ti : in->second)
        for (const NovTensor* to : ou->second) {
          std::optional<Collection> L;
          try {
            L = glue_collections(*mus.cat, d, ti->collection, to->collection);
          } catch (const std::exception&) {
            continue;
          }
          auto& a = acc.try_emplace(L->key(), Acc{*L, {}, {}}).first->second;
          for (const auto& [gi, vi] : ti->entries)
            for (const auto& [go, vo] : to->entries) {
              auto g = try_glue_evals(s, d, gi, go);
              if (!g) continue;
              a.sums[*g] = nov_add(a.sums[*g], nov_mul(vi, vo, cap));
              a.descs[*g].insert(dname);
            }
        }
    }
  return collect(acc, cap.minus(epsilon));
}

MuFamily restrict_linear(const MuFamily& mus, const std::string& m0, const std::string& m1) {
  MuFamily out;
  out.cat = mus.cat;
  out.sig = mus.sig;
  out.bounds = ShapeMax{1, 1, mus.bounds.mass_max};
  out.cap = mus.cap;
  out.epsilon = mus.epsilon;
  for (const auto& [k, t] : mus.tensors)
    if (t.collection.r() == 1 && t.collection.a() == 1 && t.collection.objects == std::vector<std::string>{m0, m1})
      out.tensors.emplace(k, t);
  return out;
}

namespace {

Collection block_of(const OneCat& cat, const Collection& L, int j) {
  return make_collection(cat, L.objects, {L.grid[j]});
}

EvalGrid block_evals(const EvalGrid& g, int j) { return EvalGrid{{g.alpha[j]}, {g.beta[j]}}; }

}  // namespace

CompatResult check_fiber_compat_detail(const MuFamily& mus, int rc) {
  if (rc < 1 || rc > 2) throw std::invalid_argument("fiber compatibility needs r_c in {1,2}");
  const OneCat& cat = *mus.cat;
  // every stored stacked entry is the product of its blocks
  for (const auto& [k, t] : mus.tensors) {
    if (t.collection.r() != rc || t.collection.a() < 2) continue;
    for (const auto& [g, v] : t.entries) {
      NovElem prod = NovElem::one();
      for (int j = 0; j < t.collection.a(); ++j) {
        const NovTensor* b = mus.find(block_of(cat, t.collection, j).key());
        prod = nov_mul(prod, b ? b->at(block_evals(g, j)) : NovElem{}, mus.cap);
      }
      if (!(prod == v))
        return {false, "collection " + k + " evals " + g.key() + ": stored " + v.str() + ", blockwise product " + prod.str()};
    }
  }
  // every nonzero product of blocks is stored
  std::map<std::string, std::vector<const NovTensor*>> base;
  for (const auto& [k, t] : mus.tensors)
    if (t.collection.r() == rc && t.collection.a() == 1) base[t.collection.objects_str()].push_back(&t);
  using Entry = std::pair<const NovTensor*, std::map<EvalGrid, NovElem>::const_iterator>;
  for (const auto& [objs, ts] : base) {
    std::vector<Entry> entries;
    for (const NovTensor* t : ts)
      for (auto it = t->entries.begin(); it != t->entries.end(); ++it) entries.push_back({t, it});
    if (entries.empty()) continue;
    for (int a = 2; a <= mus.bounds.a_max; ++a) {
      std::vector<std::size_t> pick(a, 0);
      while (true) {
        std::vector<std::vector<std::vector<std::string>>> grid;
        EvalGrid g;
        NovElem prod = NovElem::one();
        Shape s;
        s.r = rc;
        for (auto x : pick) {
          const auto& [t, it] = entries[x];
          grid.push_back(t->collection.grid[0]);
          g.alpha.push_back(it->first.alpha[0]);
          g.beta.push_back(it->first.beta[0]);
          prod = nov_mul(prod, it->second, mus.cap);
          s.n.push_back(t->collection.shape().n[0]);
        }
        if (mus.bounds.admits(s) && !prod.is_zero()) {
          Collection L = make_collection(cat, entries[0].first->collection.objects, grid);
          const NovTensor* t = mus.find(L.key());
          NovElem stored = t ? t->at(g) : NovElem{};
          if (!(stored == prod))
            return {false, "collection " + L.key() + " evals " + g.key() + ": stored " + stored.str() +
                               ", blockwise product " + prod.str()};
        }
        std::size_t o = 0;
        while (o < pick.size() && ++pick[o] == entries.size()) pick[o++] = 0;
        if (o == pick.size()) break;
      }
    }
  }
  return {};
}

bool check_fiber_compat_linear(const MuFamily& mus, int rc) { return check_fiber_compat_detail(mus, rc).ok; }

std::vector<Residual> bifunctor_identity_check(const MuFamily& mus, const EnergyCap& cap) {
  const OneCat& cat = *mus.cat;
  const Rat eps = mus.epsilon;
  for (const auto& [k, t] : mus.tensors) {
    Shape s = t.collection.shape();
    if (s.r == 1 && s.a() == 1 && s.all_zero() && !t.entries.empty())
      throw std::invalid_argument("bifunctor identity needs vanishing disk curvature, found it at " + k);
  }
  require_positive_curvature(mus, eps);
  int budget = 0;
  if (cap.bounded()) {
    if (eps <= 0) throw std::invalid_argument("epsilon must be positive");
    Rat q = (*cap.value - eps) / eps;
    budget = q < 0 ? 0 : static_cast<int>(q.numerator() / q.denominator());
  }
  const EnergyCap visible = cap.minus(eps);
  auto tensor = [&](const std::vector<std::string>& objs, std::vector<std::vector<std::vector<std::string>>> grid)
      -> const NovTensor* {
    try {
      return mus.find(make_collection(cat, objs, std::move(grid)).key());
    } catch (const CollectionError&) {
      return nullptr;
    }
  };
  // output -> value of a single-block r=2 tensor with fixed inputs
  auto outputs = [](const NovTensor* t, const std::vector<std::vector<std::string>>& alpha) {
    std::map<std::string, NovElem> out;
    if (!t) return out;
    for (const auto& [g, v] : t->entries)
      if (g.alpha[0] == alpha) out[g.beta[0]] = v;
    return out;
  };
  std::vector<Residual> res;
  for (const auto& [k, t] : mus.tensors) {
    const Collection& L = t.collection;
    if (!(L.shape() == Shape{2, {{1, 0}}})) continue;
    const std::string l0 = L.grid[0][0][0], l1 = L.grid[0][0][1], l12 = L.grid[0][1][0];
    const std::string& m0 = L.objects[0];
    const std::string& m1 = L.objects[1];
    const std::string& m2 = L.objects[2];
    const NovTensor* mu1 = tensor({m0, m1}, {{{l0, l1}}});
    const NovTensor* fe_lo = tensor(L.objects, {{{l0}, {l12}}});
    const NovTensor* fe_hi = tensor(L.objects, {{{l1}, {l12}}});
    auto fe_before = outputs(fe_lo, {{}, {}});
    auto fe_after = outputs(fe_hi, {{}, {}});
    const std::string c_lo = L.bottom[0], c_hi = L.top[0];
    for (const auto& x : mus.sig->between(l0, l1)) {
      std::map<std::string, NovElem> acc;
      std::map<std::string, std::set<std::string>> terms;
      auto mu21_x = outputs(&t, {{x}, {}});
      // inner differential on the input
      if (mu1)
        for (const auto& [g, v] : mu1->entries) {
          if (g.alpha[0][0][0] != x) continue;
          for (const auto& [q, w] : outputs(&t, {{g.beta[0]}, {}})) {
            acc[q] = nov_add(acc[q], nov_mul(v, w, cap));
            terms[q].insert("T1(1,1,0,1)");
          }
        }
      // outer mu_b after b stacked blocks, one of them carrying x
      for (int b = 1; b <= budget + 1; ++b)
        for (int p = 1; p <= b; ++p) {
          std::vector<std::string> col(p, c_lo);
          col.insert(col.end(), b - p + 1, c_hi);
          const NovTensor* mub = tensor({m0, m2}, {{col}});
          if (!mub) continue;
          for (const auto& [g, v] : mub->entries) {
            NovElem prod = v;
            for (int l = 1; l <= b && !prod.is_zero(); ++l) {
              const auto& src = l < p ? fe_before : l == p ? mu21_x : fe_after;
              auto it = src.find(g.alpha[0][0][l - 1]);
              prod = it == src.end() ? NovElem{} : nov_mul(prod, it->second, cap);
            }
            if (prod.is_zero()) continue;
            const std::string& q = g.beta[0];
            acc[q] = nov_add(acc[q], prod);
            IntMat parts(b, IntVec{0, 0});
            parts[p - 1] = {1, 0};
            terms[q].insert(make_t3(1, parts).str());
          }
        }
      for (const auto& [q, v] : acc) {
        NovElem tv = nov_truncate(v, visible);
        if (tv.is_zero()) continue;
        EvalGrid g{{{{x}, {}}}, {q}};
        res.push_back(Residual{L, g, tv, std::vector<std::string>(terms[q].begin(), terms[q].end())});
      }
    }
  }
  return res;
}

}  // namespace coppice
