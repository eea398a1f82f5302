#include "coppice/gen.hpp"

#include <algorithm>
#include <cstdio>
#include <random>

namespace coppice {

namespace {

std::string numbered(const std::string& prefix, int k) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%05d", prefix.c_str(), k);
  return buf;
}

FlowCat2 skeleton(const GenBounds& b) {
  FlowCat2 fc;
  fc.bounds = b.bounds;
  fc.cap = b.cap;
  fc.epsilon = b.epsilon;
  return fc;
}

// objects M0, M1 with a single 1-morphism L between them
void interval_cat(FlowCat2& fc) {
  fc.cat.add_object("M0");
  fc.cat.add_object("M1");
  fc.cat.add_mor("1_M0", "M0", "M0");
  fc.cat.add_mor("1_M1", "M1", "M1");
  fc.cat.add_mor("L", "M0", "M1");
  fc.cat.set_identity("M0", "1_M0");
  fc.cat.set_identity("M1", "1_M1");
  fc.cat.set_compose("1_M0", "1_M0", "1_M0");
  fc.cat.set_compose("1_M1", "1_M1", "1_M1");
  fc.cat.set_compose("1_M0", "L", "L");
  fc.cat.set_compose("L", "1_M1", "L");
}

ModuliPoint r1_point(const FlowCat2& fc, const std::string& id, const std::vector<std::string>& col,
                     const std::vector<std::string>& in, const std::string& out, const Rat& e) {
  Collection L = make_collection(fc.cat, {fc.cat.src(col.front()), fc.cat.tgt(col.front())}, {{col}});
  return ModuliPoint{id, L, EvalGrid{{{in}}, {out}}, e, std::nullopt};
}

std::vector<int> widths_of(const FlowCat2& fc) {
  std::set<int> w;
  for (const auto& [id, p] : fc.points) w.insert(p.collection.r());
  std::vector<int> out;
  for (int r : w)
    if (r <= 2) out.push_back(r);
  return out;
}

FlowCat2 finish(FlowCat2 fc, bool strata) {
  const auto widths = widths_of(fc);
  for (int rc : widths) fc = product_extend(fc, rc);
  auto all = all_fiber_pairs(fc, fc.cap);
  std::map<std::string, std::vector<FiberPair>> single;
  for (auto& [k, list] : all)
    if (!list.empty() && list.front().collection.a() == 1) single[k] = list;
  auto edges = pair_edges(fc, single, "e");
  for (auto& e : edges) {
    if (strata) {
      bool all_labeled = !e.ends.empty();
      for (auto& en : e.ends) {
        const auto& lp = fc.point(en.left);
        const auto& rp = fc.point(en.right);
        if (lp.stratum && rp.stratum)
          en.stratum = gamma_graft(en.desc, *lp.stratum, *rp.stratum);
        else
          all_labeled = false;
      }
      if (all_labeled) e.stratum = top_stratum(e.collection.shape());
    }
    fc.add_edge(std::move(e));
  }
  for (int rc : widths) fc = product_extend(fc, rc);
  Report rep = validate(fc);
  if (!rep.empty()) throw GenError("generated category fails validation: " + rep.entries.front().str());
  return fc;
}

}  // namespace

std::vector<ModuliEdge> pair_edges(const FlowCat2& fc, const std::map<std::string, std::vector<FiberPair>>& pairs,
                                   const std::string& id_prefix) {
  using Key = std::tuple<std::string, std::string, Rat>;
  std::map<Key, std::vector<const FiberPair*>> classes;
  for (const auto& [k, list] : pairs)
    for (const auto& fp : list) classes[Key{k, fp.evals.key(), fp.energy}].push_back(&fp);
  const EnergyCap visible = fc.cap.minus(fc.epsilon);
  std::vector<ModuliEdge> out;
  int counter = 0;
  for (auto& [key, list] : classes) {
    std::sort(list.begin(), list.end(), [](const FiberPair* x, const FiberPair* y) {
      return std::make_tuple(x->end.desc.str(), x->end.left, x->end.right) <
             std::make_tuple(y->end.desc.str(), y->end.left, y->end.right);
    });
    if (list.size() % 2 && visible.admits(std::get<2>(key)))
      throw GenError("odd equation class at collection " + std::get<0>(key) + " evals " + std::get<1>(key) +
                     " energy " + format_rat(std::get<2>(key)));
    for (std::size_t x = 0; x + 1 < list.size(); x += 2) {
      const FiberPair& a = *list[x];
      const FiberPair& b = *list[x + 1];
      out.push_back(ModuliEdge{numbered(id_prefix, ++counter), a.collection, a.evals, a.energy, {a.end, b.end}, std::nullopt});
    }
  }
  return out;
}

FlowCat2 gen_trivial(bool empty_signature, const GenBounds& b) {
  FlowCat2 fc = skeleton(b);
  fc.genspec = empty_signature ? "family=trivial variant=empty" : "family=trivial";
  if (!empty_signature) {
    fc.cat.add_object("M");
    fc.cat.add_mor("1_M", "M", "M");
    fc.cat.set_identity("M", "1_M");
    fc.cat.set_compose("1_M", "1_M", "1_M");
    fc.sig.add("x", "1_M", "1_M");
  }
  return fc;
}

FlowCat2 gen_square_zero(const BitMat& N, const GenBounds& b) {
  const int d = static_cast<int>(N.size());
  for (const auto& row : N)
    if (static_cast<int>(row.size()) != d) throw GenError("square-zero matrix must be square");
  for (int w = 0; w < d; ++w)
    for (int u = 0; u < d; ++u) {
      int s = 0;
      for (int v = 0; v < d; ++v) s ^= N[w][v] & N[v][u];
      if (s) throw GenError("matrix does not square to zero mod 2");
    }
  FlowCat2 fc = skeleton(b);
  fc.genspec = "family=square_zero dim=" + std::to_string(d);
  interval_cat(fc);
  for (int x = 0; x < d; ++x) fc.sig.add("b" + std::to_string(x), "L", "L");
  int k = 0;
  for (int u = 0; u < d; ++u)
    for (int v = 0; v < d; ++v)
      if (N[v][u])
        fc.add_point(r1_point(fc, numbered("p", ++k), {"L", "L"}, {"b" + std::to_string(u)}, "b" + std::to_string(v), Rat(1)));
  return finish(std::move(fc), false);
}

namespace {

std::optional<BitMat> f2_inverse(BitMat m) {
  const int d = static_cast<int>(m.size());
  BitMat inv(d, std::vector<int>(d, 0));
  for (int x = 0; x < d; ++x) inv[x][x] = 1;
  for (int c = 0; c < d; ++c) {
    int piv = c;
    while (piv < d && !m[piv][c]) ++piv;
    if (piv == d) return std::nullopt;
    std::swap(m[piv], m[c]);
    std::swap(inv[piv], inv[c]);
    for (int r = 0; r < d; ++r)
      if (r != c && m[r][c])
        for (int k = 0; k < d; ++k) {
          m[r][k] ^= m[c][k];
          inv[r][k] ^= inv[c][k];
        }
  }
  return inv;
}

BitMat f2_mul(const BitMat& x, const BitMat& y) {
  const int d = static_cast<int>(x.size());
  BitMat z(d, std::vector<int>(d, 0));
  for (int r = 0; r < d; ++r)
    for (int k = 0; k < d; ++k)
      if (x[r][k])
        for (int c = 0; c < d; ++c) z[r][c] ^= y[k][c];
  return z;
}

}  // namespace

BitMat random_square_zero(std::uint64_t seed, int dim) {
  std::mt19937_64 rng(seed);
  const int k = dim / 2;
  BitMat N(dim, std::vector<int>(dim, 0));
  // proj keeps the first k coordinates, A maps them into the rest
  for (int v = k; v < dim; ++v)
    for (int u = 0; u < k; ++u) N[v][u] = static_cast<int>(rng() & 1);
  // random change of basis, so squares vanish mod 2 but not over Z
  while (true) {
    BitMat P(dim, std::vector<int>(dim, 0));
    for (auto& row : P)
      for (auto& e : row) e = static_cast<int>(rng() & 1);
    if (auto Pi = f2_inverse(P)) return f2_mul(f2_mul(P, N), *Pi);
  }
}

FlowCat2 gen_square_zero_seeded(std::uint64_t seed, const GenBounds& b) {
  FlowCat2 fc = gen_square_zero(random_square_zero(seed, 2 + static_cast<int>(seed % 7)), b);
  fc.genspec += " seed=" + std::to_string(seed);
  return fc;
}

MultTable z2_group_algebra() {
  // basis 1, g
  MultTable c(2, std::vector<std::vector<int>>(2, std::vector<int>(2, 0)));
  c[0][0][0] = c[0][1][1] = c[1][0][1] = c[1][1][0] = 1;
  return c;
}

MultTable idempotent_algebra() { return MultTable{{{1}}}; }

FlowCat2 gen_assoc_algebra(const MultTable& c, const GenBounds& b) {
  const int d = static_cast<int>(c.size());
  for (const auto& m : c) {
    if (static_cast<int>(m.size()) != d) throw GenError("multiplication table must be d x d x d");
    for (const auto& v : m)
      if (static_cast<int>(v.size()) != d) throw GenError("multiplication table must be d x d x d");
  }
  for (int x = 0; x < d; ++x)
    for (int y = 0; y < d; ++y)
      for (int z = 0; z < d; ++z)
        for (int w = 0; w < d; ++w) {
          int lhs = 0, rhs = 0;
          for (int v = 0; v < d; ++v) {
            lhs ^= c[x][y][v] & c[v][z][w];
            rhs ^= c[y][z][v] & c[x][v][w];
          }
          if (lhs != rhs) throw GenError("multiplication table is not associative");
        }
  FlowCat2 fc = skeleton(b);
  fc.genspec = "family=assoc_algebra dim=" + std::to_string(d);
  interval_cat(fc);
  for (int x = 0; x < d; ++x) fc.sig.add("a" + std::to_string(x), "L", "L");
  const Coppice top = top_stratum(single_shape({2}));
  int k = 0;
  for (int x = 0; x < d; ++x)
    for (int y = 0; y < d; ++y)
      for (int z = 0; z < d; ++z)
        if (c[x][y][z]) {
          auto p = r1_point(fc, numbered("p", ++k), {"L", "L", "L"}, {"a" + std::to_string(x), "a" + std::to_string(y)},
                            "a" + std::to_string(z), Rat(1));
          p.stratum = top;
          fc.add_point(std::move(p));
        }
  return finish(std::move(fc), true);
}

// ---------------------------------------------------------------- strict 2-categories

namespace {

using Vec = std::set<std::string>;

void toggle(Vec& acc, const Vec& add) {
  for (const auto& x : add)
    if (!acc.erase(x)) acc.insert(x);
}

struct TwoCalc {
  const Strict2Cat& s;
  std::map<std::string, std::pair<std::string, std::string>> ends;

  explicit TwoCalc(const Strict2Cat& c) : s(c) {
    for (const auto& [st, gens] : s.basis)
      for (const auto& g : gens) ends[g] = st;
  }
  static Vec table(const std::map<std::pair<std::string, std::string>, Vec>& t, const std::string& x, const std::string& y) {
    auto it = t.find({x, y});
    return it == t.end() ? Vec{} : it->second;
  }
  Vec vert(const Vec& X, const Vec& Y) const {
    Vec out;
    for (const auto& x : X)
      for (const auto& y : Y) toggle(out, table(s.vert, x, y));
    return out;
  }
  Vec horiz(const Vec& X, const Vec& Y) const {
    Vec out;
    for (const auto& x : X)
      for (const auto& y : Y) toggle(out, table(s.horiz, x, y));
    return out;
  }
};

}  // namespace

std::vector<std::string> Strict2Cat::axiom_problems() const {
  std::vector<std::string> bad = one.check_axioms();
  if (!bad.empty()) return bad;
  TwoCalc c(*this);
  std::set<std::string> seen;
  for (const auto& [st, gens] : basis) {
    if (!one.has_mor(st.first) || !one.has_mor(st.second) || one.src(st.first) != one.src(st.second) ||
        one.tgt(st.first) != one.tgt(st.second))
      bad.push_back("2-morphisms between non-parallel 1-morphisms " + st.first + "," + st.second);
    for (const auto& g : gens)
      if (!seen.insert(g).second) bad.push_back("duplicate generator " + g);
  }
  auto in = [&](const std::string& l, const std::string& l2, const Vec& v) {
    auto it = basis.find({l, l2});
    for (const auto& g : v)
      if (it == basis.end() || std::find(it->second.begin(), it->second.end(), g) == it->second.end()) return false;
    return true;
  };
  for (const auto& [l, st] : one.mors())
    if (!unit.count(l) || !in(l, l, {unit.at(l)})) bad.push_back("no identity 2-morphism on " + l);
  if (!bad.empty()) return bad;
  const auto& E = c.ends;
  for (const auto& [x, ex] : E)
    for (const auto& [y, ey] : E) {
      if (ex.second == ey.first && !in(ex.first, ey.second, c.vert({x}, {y})))
        bad.push_back("vertical composite " + x + "," + y + " has the wrong type");
      if (one.tgt(ex.first) == one.src(ey.first)) {
        auto lo = one.compose(ex.first, ey.first), hi = one.compose(ex.second, ey.second);
        if (!lo || !hi || !in(*lo, *hi, c.horiz({x}, {y}))) bad.push_back("horizontal composite " + x + "," + y + " has the wrong type");
      }
    }
  if (!bad.empty()) return bad;
  for (const auto& [x, ex] : E) {
    if (c.vert({unit.at(ex.first)}, {x}) != Vec{x} || c.vert({x}, {unit.at(ex.second)}) != Vec{x})
      bad.push_back("vertical unit law fails at " + x);
    const std::string ls = one.identity(one.src(ex.first)), lt = one.identity(one.tgt(ex.first));
    if (c.horiz({unit.at(ls)}, {x}) != Vec{x} || c.horiz({x}, {unit.at(lt)}) != Vec{x})
      bad.push_back("horizontal unit law fails at " + x);
  }
  for (const auto& [l0, e0] : one.mors())
    for (const auto& [l1, e1] : one.mors())
      if (e0.second == e1.first && c.horiz({unit.at(l0)}, {unit.at(l1)}) != Vec{unit.at(*one.compose(l0, l1))})
        bad.push_back("identity 2-morphisms do not compose horizontally at " + l0 + "," + l1);
  for (const auto& [x, ex] : E)
    for (const auto& [y, ey] : E)
      for (const auto& [z, ez] : E) {
        if (ex.second == ey.first && ey.second == ez.first &&
            c.vert(c.vert({x}, {y}), {z}) != c.vert({x}, c.vert({y}, {z})))
          bad.push_back("vertical associativity fails at " + x + "," + y + "," + z);
        if (one.tgt(ex.first) == one.src(ey.first) && one.tgt(ey.first) == one.src(ez.first) &&
            c.horiz(c.horiz({x}, {y}), {z}) != c.horiz({x}, c.horiz({y}, {z})))
          bad.push_back("horizontal associativity fails at " + x + "," + y + "," + z);
      }
  // interchange: (x.y)*(x2.y2) = (x*x2).(y*y2)
  for (const auto& [x, ex] : E)
    for (const auto& [y, ey] : E) {
      if (ex.second != ey.first) continue;
      for (const auto& [x2, ex2] : E)
        for (const auto& [y2, ey2] : E) {
          if (ex2.second != ey2.first || one.tgt(ex.first) != one.src(ex2.first)) continue;
          if (c.horiz(c.vert({x}, {y}), c.vert({x2}, {y2})) != c.vert(c.horiz({x}, {x2}), c.horiz({y}, {y2})))
            bad.push_back("interchange fails at " + x + "," + y + "," + x2 + "," + y2);
        }
    }
  return bad;
}

namespace {

void z2_one(OneCat& one, bool with_g) {
  one.add_object("pt");
  one.add_mor("I", "pt", "pt");
  one.set_identity("pt", "I");
  one.set_compose("I", "I", "I");
  if (with_g) {
    one.add_mor("G", "pt", "pt");
    one.set_compose("I", "G", "G");
    one.set_compose("G", "I", "G");
    one.set_compose("G", "G", "I");
  }
}

}  // namespace

Strict2Cat z2_strict_2cat() {
  Strict2Cat s;
  z2_one(s.one, true);
  // 2Mor(L, L) = F2[u]/(u^2) for L in {I, G}; nothing between I and G
  const std::vector<std::string> ls{"I", "G"};
  auto gen = [](char a, const std::string& l) { return std::string(1, a) + "_" + l; };
  auto prod = [](char a, char b) -> std::optional<char> {
    if (a == 'e') return b;
    if (b == 'e') return a;
    return std::nullopt;
  };
  for (const auto& l : ls) {
    s.basis[{l, l}] = {gen('e', l), gen('u', l)};
    s.unit[l] = gen('e', l);
  }
  for (const auto& l : ls)
    for (char a : {'e', 'u'})
      for (char b : {'e', 'u'}) {
        auto p = prod(a, b);
        s.vert[{gen(a, l), gen(b, l)}] = p ? Vec{gen(*p, l)} : Vec{};
        for (const auto& l2 : ls) s.horiz[{gen(a, l), gen(b, l2)}] = p ? Vec{gen(*p, *s.one.compose(l, l2))} : Vec{};
      }
  return s;
}

Strict2Cat terminal_strict_2cat() {
  Strict2Cat s;
  z2_one(s.one, false);
  s.basis[{"I", "I"}] = {"e_I"};
  s.unit["I"] = "e_I";
  s.vert[{"e_I", "e_I"}] = {"e_I"};
  s.horiz[{"e_I", "e_I"}] = {"e_I"};
  return s;
}

FlowCat2 gen_strict_2cat(const Strict2Cat& s, const GenBounds& b) {
  auto bad = s.axiom_problems();
  if (!bad.empty()) throw GenError("strict 2-category axioms fail: " + bad.front());
  FlowCat2 fc = skeleton(b);
  fc.genspec = "family=strict_2cat";
  fc.cat = s.one;
  for (const auto& [st, gens] : s.basis)
    for (const auto& g : gens) fc.sig.add(g, st.first, st.second);
  TwoCalc c(s);
  int k = 0;
  // vertical composition, energy 1
  for (const auto& [x, ex] : c.ends)
    for (const auto& [y, ey] : c.ends) {
      if (ex.second != ey.first) continue;
      for (const auto& z : c.vert({x}, {y}))
        fc.add_point(r1_point(fc, numbered("p", ++k), {ex.first, ex.second, ey.second}, {x, y}, z, Rat(1)));
    }
  // whiskering, energy 0
  if (b.bounds.r_max >= 2)
    for (const auto& [x, ex] : c.ends)
      for (const auto& [l, el] : s.one.mors()) {
        const std::string m0 = s.one.src(ex.first), m1 = s.one.tgt(ex.first);
        if (el.first == m1) {
          Collection L = make_collection(fc.cat, {m0, m1, el.second}, {{{ex.first, ex.second}, {l}}});
          for (const auto& z : c.horiz({x}, {s.unit.at(l)}))
            fc.add_point(ModuliPoint{numbered("p", ++k), L, EvalGrid{{{{x}, {}}}, {z}}, Rat(0), std::nullopt});
        }
        if (el.second == m0) {
          Collection L = make_collection(fc.cat, {el.first, m0, m1}, {{{l}, {ex.first, ex.second}}});
          for (const auto& z : c.horiz({s.unit.at(l)}, {x}))
            fc.add_point(ModuliPoint{numbered("p", ++k), L, EvalGrid{{{{}, {x}}}, {z}}, Rat(0), std::nullopt});
        }
      }
  return finish(std::move(fc), false);
}

// ---------------------------------------------------------------- mutations

Mutation mutate_break(const FlowCat2& fc, std::uint64_t seed) {
  const EnergyCap visible = fc.cap.minus(fc.epsilon);
  std::vector<std::pair<std::string, std::size_t>> cands;
  for (const auto& [id, e] : fc.edges)
    if (visible.admits(e.energy))
      for (std::size_t x = 0; x < e.ends.size(); ++x) cands.push_back({id, x});
  if (cands.empty()) throw GenError("no edges");
  for (std::size_t step = 0; step < cands.size(); ++step) {
    const auto& [eid, x] = cands[(seed + step) % cands.size()];
    const ModuliEdge& e = fc.edges.at(eid);
    const std::string victim = e.ends[x].left;
    Mutation m{fc, e.collection.key(), e.evals, e.energy, eid, victim};
    m.cat.points.erase(victim);
    for (auto& [id, ed] : m.cat.edges)
      ed.ends.erase(std::remove_if(ed.ends.begin(), ed.ends.end(),
                                   [&](const Endpoint& en) { return en.left == victim || en.right == victim; }),
                    ed.ends.end());
    Report rep = validate(m.cat);
    if (!rep.cites("(b)")) continue;
    MuFamily mus = extract_all(m.cat);
    auto res = check_a2(mus, m.cat.bounds, m.cat.cap, m.cat.epsilon);
    for (const auto& r : res)
      if (r.collection.key() == m.collection && r.evals == m.evals) {
        const auto& ex = r.value.exponents();
        if (std::find(ex.begin(), ex.end(), m.energy) != ex.end()) {
          m.cat.genspec = fc.genspec + " mutate_break=" + std::to_string(seed);
          return m;
        }
      }
  }
  throw GenError("no endpoint removal produces a visible residual");
}

// ---------------------------------------------------------------- dispatch

GenBounds default_bounds(const std::string& family) {
  if (family == "square_zero") return {{1, 2, 3}};
  if (family == "assoc_algebra") return {{1, 3, 4}};
  return {{2, 3, 3}};
}

std::string GenSpec::str() const {
  std::string out = "family=" + family;
  if (!variant.empty()) out += " variant=" + variant;
  out += " seed=" + std::to_string(seed);
  if (family == "square_zero") out += " dim=" + std::to_string(dim ? dim : 2 + static_cast<int>(seed % 7));
  out += " shape_max=" + bounds.bounds.str() + " cap=" + bounds.cap.str() + " epsilon=" + format_rat(bounds.epsilon);
  return out;
}

FlowCat2 generate(const GenSpec& spec) {
  FlowCat2 fc;
  if (spec.family == "trivial") {
    fc = gen_trivial(spec.variant == "empty", spec.bounds);
  } else if (spec.family == "square_zero") {
    int dim = spec.dim ? spec.dim : 2 + static_cast<int>(spec.seed % 7);
    fc = gen_square_zero(random_square_zero(spec.seed, dim), spec.bounds);
  } else if (spec.family == "assoc_algebra") {
    if (spec.variant.empty() || spec.variant == "z2")
      fc = gen_assoc_algebra(z2_group_algebra(), spec.bounds);
    else if (spec.variant == "idempotent")
      fc = gen_assoc_algebra(idempotent_algebra(), spec.bounds);
    else
      throw GenError("unknown algebra variant " + spec.variant);
  } else if (spec.family == "strict_2cat") {
    if (spec.variant.empty() || spec.variant == "z2")
      fc = gen_strict_2cat(z2_strict_2cat(), spec.bounds);
    else if (spec.variant == "terminal")
      fc = gen_strict_2cat(terminal_strict_2cat(), spec.bounds);
    else
      throw GenError("unknown 2-category variant " + spec.variant);
  } else {
    throw GenError("unknown family " + spec.family);
  }
  fc.genspec = spec.str();
  return fc;
}

}  // namespace coppice
