#include "coppice/flowcat.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <sstream>

namespace coppice {

void TwoMorSig::add(const std::string& id, const std::string& src, const std::string& tgt) {
  if (gens.count(id)) throw FlowCatError("duplicate 2-morphism generator " + id);
  gens[id] = TwoMorGen{id, src, tgt};
}

std::vector<std::string> TwoMorSig::between(const std::string& src, const std::string& tgt) const {
  std::vector<std::string> out;
  for (const auto& [id, g] : gens)
    if (g.src == src && g.tgt == tgt) out.push_back(id);
  return out;
}

std::map<std::string, std::vector<std::string>> FlowCat2::point_index() const {
  std::map<std::string, std::vector<std::string>> idx;
  for (const auto& [id, p] : points) idx[p.collection.key()].push_back(id);
  return idx;
}

const ModuliPoint& FlowCat2::point(const std::string& id) const {
  auto it = points.find(id);
  if (it == points.end()) throw FlowCatError("missing point id '" + id + "'");
  return it->second;
}

void FlowCat2::add_point(ModuliPoint p) {
  if (points.count(p.id) || edges.count(p.id)) throw FlowCatError("duplicate id " + p.id);
  std::string id = p.id;
  points.emplace(id, std::move(p));
}

void FlowCat2::add_edge(ModuliEdge e) {
  if (points.count(e.id) || edges.count(e.id)) throw FlowCatError("duplicate id " + e.id);
  std::string id = e.id;
  edges.emplace(id, std::move(e));
}

std::vector<FiberPair> fiber_pairs(const FlowCat2& fc, const Collection& L, const EnergyCap& cap) {
  std::vector<FiberPair> out;
  auto idx = fc.point_index();
  const Shape s = L.shape();
  for (const Desc& d : enum_desc(s, fc.cap, fc.epsilon)) {
    std::pair<Collection, Collection> parts;
    try {
      parts = desc_collections(fc.cat, L, d);
    } catch (const CollectionError&) {
      continue;
    }
    auto li = idx.find(parts.first.key());
    auto ri = idx.find(parts.second.key());
    if (li == idx.end() || ri == idx.end()) continue;
    for (const auto& lid : li->second)
      for (const auto& rid : ri->second) {
        const auto& lp = fc.points.at(lid);
        const auto& rp = fc.points.at(rid);
        Rat e = lp.energy + rp.energy;
        if (!cap.admits(e)) continue;
        auto g = try_glue_evals(s, d, lp.evals, rp.evals);
        if (!g) continue;
        out.push_back(FiberPair{Endpoint{d, lid, rid, std::nullopt}, L, *g, e});
      }
  }
  return out;
}

std::map<std::string, std::vector<FiberPair>> all_fiber_pairs(const FlowCat2& fc, const EnergyCap& cap) {
  std::map<Shape, std::vector<std::string>> by_shape;
  std::map<std::string, const Collection*> coll;
  auto idx = fc.point_index();
  for (const auto& [key, ids] : idx) {
    const Collection& c = fc.points.at(ids.front()).collection;
    coll[key] = &c;
    by_shape[c.shape()].push_back(key);
  }
  std::map<std::string, std::vector<FiberPair>> out;
  for (const Shape& s : shapes_within(fc.bounds))
    for (const Desc& d : enum_desc(s, fc.cap, fc.epsilon)) {
      auto [sin, sout] = desc_shapes(s, d);
      auto in = by_shape.find(sin);
      auto ou = by_shape.find(sout);
      if (in == by_shape.end() || ou == by_shape.end()) continue;
      for (const auto& lk : in->second)
        for (const auto& rk : ou->second) {
          std::optional<Collection> L;
          try {
            L = glue_collections(fc.cat, d, *coll[lk], *coll[rk]);
          } catch (const std::exception&) {
            continue;
          }
          for (const auto& lid : idx[lk])
            for (const auto& rid : idx[rk]) {
              const auto& lp = fc.points.at(lid);
              const auto& rp = fc.points.at(rid);
              Rat e = lp.energy + rp.energy;
              if (!cap.admits(e)) continue;
              auto g = try_glue_evals(s, d, lp.evals, rp.evals);
              if (!g) continue;
              out[L->key()].push_back(FiberPair{Endpoint{d, lid, rid, std::nullopt}, *L, *g, e});
            }
        }
    }
  return out;
}

bool Report::cites(const std::string& clause) const {
  return std::any_of(entries.begin(), entries.end(), [&](const Violation& v) { return v.clause == clause; });
}

std::string Report::str() const {
  std::string out;
  for (const auto& v : entries) out += v.str() + "\n";
  return out;
}

std::string evals_problem(const FlowCat2& fc, const Collection& L, const EvalGrid& ev) {
  if (static_cast<int>(ev.alpha.size()) != L.a() || static_cast<int>(ev.beta.size()) != L.a())
    return "evaluation grid has the wrong number of blocks";
  for (int j = 0; j < L.a(); ++j) {
    if (static_cast<int>(ev.alpha[j].size()) != L.r()) return "evaluation block " + std::to_string(j + 1) + " has the wrong width";
    for (int i = 0; i < L.r(); ++i) {
      const auto& col = L.grid[j][i];
      if (ev.alpha[j][i].size() + 1 != col.size())
        return "evaluation column (i=" + std::to_string(i + 1) + ",j=" + std::to_string(j + 1) + ") has the wrong length";
      for (std::size_t k = 0; k < ev.alpha[j][i].size(); ++k) {
        const std::string& g = ev.alpha[j][i][k];
        auto it = fc.sig.gens.find(g);
        if (it == fc.sig.gens.end() || it->second.src != col[k] || it->second.tgt != col[k + 1])
          return "alpha at (i=" + std::to_string(i + 1) + ",j=" + std::to_string(j + 1) + ",k=" + std::to_string(k + 1) +
                 ") is " + g + ", not a generator in 2Mor(" + col[k] + "," + col[k + 1] + ")";
      }
    }
    auto it = fc.sig.gens.find(ev.beta[j]);
    if (it == fc.sig.gens.end() || it->second.src != L.bottom[j] || it->second.tgt != L.top[j])
      return "beta of block " + std::to_string(j + 1) + " is " + ev.beta[j] + ", not a generator in 2Mor(" + L.bottom[j] +
             "," + L.top[j] + ")";
  }
  return "";
}

namespace {

std::string end_key(const std::string& lkey, const Endpoint& e) {
  return lkey + "|" + e.desc.str() + "|" + e.left + "|" + e.right;
}

std::set<std::string> face_closure(const Coppice& c) {
  std::set<std::string> seen;
  std::deque<Coppice> todo{c};
  while (!todo.empty()) {
    Coppice x = todo.front();
    todo.pop_front();
    for (auto& f : faces1(x))
      if (seen.insert(f.str()).second) todo.push_back(f);
  }
  return seen;
}

}  // namespace

Report validate(const FlowCat2& fc) {
  Report rep;
  auto add = [&](std::string clause, std::string locus, std::string msg) {
    rep.entries.push_back(Violation{std::move(clause), std::move(locus), std::move(msg)});
  };
  auto check_common = [&](const std::string& locus, const Collection& L, const EvalGrid& ev, const Rat& e,
                          const std::optional<Coppice>& stratum) {
    const Shape s = L.shape();
    if (!fc.bounds.admits(s)) add("bounds", locus, "shape " + s.str() + " exceeds shape_max " + fc.bounds.str());
    if (e < 0) add("bounds", locus, "negative energy " + format_rat(e));
    if (!fc.cap.admits(e)) add("bounds", locus, "energy " + format_rat(e) + " exceeds cap " + fc.cap.str());
    auto why = evals_problem(fc, L, ev);
    if (!why.empty()) add("evals", locus, why);
    if (stratum && !(stratum->shape() == s)) add("(d)", locus, "stratum " + stratum->str() + " has the wrong shape");
  };
  for (const auto& [id, p] : fc.points) {
    std::string locus = "point " + id;
    check_common(locus, p.collection, p.evals, p.energy, p.stratum);
    if (p.collection.shape().all_zero() && p.energy < fc.epsilon)
      add("(c)", locus, "zero-shape point with energy " + format_rat(p.energy) + " below epsilon " + format_rat(fc.epsilon));
  }
  const EnergyCap visible = fc.cap.minus(fc.epsilon);
  std::map<std::string, int> hits;
  for (const auto& [id, e] : fc.edges) {
    std::string locus = "edge " + id;
    check_common(locus, e.collection, e.evals, e.energy, e.stratum);
    if (!e.ends.empty() && e.ends.size() != 2)
      add("(b)", locus, "edge has " + std::to_string(e.ends.size()) + " endpoints, expected 0 or 2");
    const Shape s = e.collection.shape();
    std::optional<std::set<std::string>> closure;
    for (std::size_t x = 0; x < e.ends.size(); ++x) {
      const Endpoint& en = e.ends[x];
      std::string el = locus + " end " + std::to_string(x + 1) + " " + en.desc.str();
      if (!desc_problem(s, en.desc, DescMode::Equation).empty() && !desc_problem(s, en.desc, DescMode::Boundary).empty()) {
        add("(a)", el, "descriptor does not fit shape " + s.str());
        continue;
      }
      auto lp = fc.points.find(en.left);
      auto rp = fc.points.find(en.right);
      if (lp == fc.points.end() || rp == fc.points.end()) {
        add("(a)", el, "references missing point " + (lp == fc.points.end() ? en.left : en.right));
        continue;
      }
      auto [Lin, Lout] = desc_collections(fc.cat, e.collection, en.desc);
      if (!(lp->second.collection == Lin) || !(rp->second.collection == Lout)) {
        add("(a)", el, "endpoint points live over the wrong collections");
        continue;
      }
      EvalGrid g;
      try {
        g = glue_evals(s, en.desc, lp->second.evals, rp->second.evals);
      } catch (const FiberError& err) {
        add("(a)", el, err.what());
        continue;
      }
      if (!(g == e.evals)) add("(a)", el, "glued evaluations " + g.key() + " differ from edge evaluations " + e.evals.key());
      if (lp->second.energy + rp->second.energy != e.energy)
        add("(a)", el, "energies " + format_rat(lp->second.energy) + " + " + format_rat(rp->second.energy) +
                           " do not add up to " + format_rat(e.energy));
      if (visible.admits(e.energy)) ++hits[end_key(e.collection.key(), en)];
      // stratum labels
      std::optional<Coppice> glued;
      if (lp->second.stratum && rp->second.stratum) {
        try {
          glued = gamma_graft(en.desc, *lp->second.stratum, *rp->second.stratum);
        } catch (const std::exception& err) {
          add("(d)", el, std::string("stratum labels do not graft: ") + err.what());
        }
      }
      if (glued && en.stratum && !(*glued == *en.stratum))
        add("(d)", el, "endpoint stratum " + en.stratum->str() + " is not the grafted stratum " + glued->str());
      const std::optional<Coppice>& face = en.stratum ? en.stratum : glued;
      if (face && e.stratum) {
        if (!closure) closure = face_closure(*e.stratum);
        if (!closure->count(face->str()))
          add("(d)", el, "endpoint stratum " + face->str() + " is not a face of " + e.stratum->str());
      }
    }
  }
  auto pairs = all_fiber_pairs(fc, visible);
  std::set<std::string> known;
  for (const auto& [lkey, list] : pairs)
    for (const auto& fp : list) {
      std::string k = end_key(lkey, fp.end);
      known.insert(k);
      int h = hits.count(k) ? hits[k] : 0;
      std::string locus = "collection " + lkey + " " + fp.end.desc.str() + " " + fp.end.left + "," + fp.end.right;
      if (h == 0)
        add("(b)", locus, "orphaned fiber pair with evals " + fp.evals.key() + " and energy " + format_rat(fp.energy));
      else if (h > 1)
        add("(b)", locus, "fiber pair is hit by " + std::to_string(h) + " endpoints");
    }
  for (const auto& [k, h] : hits)
    if (!known.count(k)) add("(b)", "endpoint " + k, "endpoint is not a fiber pair within bounds");
  std::stable_sort(rep.entries.begin(), rep.entries.end(), [](const Violation& x, const Violation& y) {
    return std::tie(x.locus, x.clause, x.message) < std::tie(y.locus, y.clause, y.message);
  });
  return rep;
}

FlowCat2 restrict_to_mor(const FlowCat2& fc, const std::string& m0, const std::string& m1) {
  if (!fc.cat.has_object(m0) || !fc.cat.has_object(m1)) throw FlowCatError("unknown object in restriction");
  FlowCat2 out;
  out.cat = fc.cat;
  out.sig = fc.sig;
  out.bounds = ShapeMax{1, 1, fc.bounds.mass_max};
  out.cap = fc.cap;
  out.epsilon = fc.epsilon;
  out.genspec = fc.genspec;
  const std::vector<std::string> objs{m0, m1};
  auto keep = [&](const Collection& c) { return c.r() == 1 && c.a() == 1 && c.objects == objs; };
  for (const auto& [id, p] : fc.points)
    if (keep(p.collection)) out.points.emplace(id, p);
  for (const auto& [id, e] : fc.edges)
    if (keep(e.collection)) out.edges.emplace(id, e);
  return out;
}

namespace {

std::vector<std::string> split_ids(const std::string& id) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto pos = id.find('*', start);
    out.push_back(id.substr(start, pos == std::string::npos ? std::string::npos : pos - start));
    if (pos == std::string::npos) return out;
    start = pos + 1;
  }
}

std::string join_ids(const std::vector<std::string>& ids) {
  std::string out;
  for (std::size_t x = 0; x < ids.size(); ++x) {
    if (x) out += '*';
    out += ids[x];
  }
  return out;
}

}  // namespace

FlowCat2 product_extend(const FlowCat2& fc, int rc) {
  if (rc < 1 || rc > 2) throw FlowCatError("product_extend needs r_c in {1,2}");
  FlowCat2 out = fc;
  auto wide = [&](const Collection& c) { return c.r() == rc && c.a() >= 2; };
  for (auto it = out.points.begin(); it != out.points.end();)
    it = wide(it->second.collection) ? out.points.erase(it) : std::next(it);
  for (auto it = out.edges.begin(); it != out.edges.end();)
    it = wide(it->second.collection) ? out.edges.erase(it) : std::next(it);

  // single-block points and edges, grouped by objects
  std::map<std::string, std::vector<const ModuliPoint*>> base;
  std::map<std::string, std::vector<const ModuliEdge*>> base_edges;
  for (const auto& [id, p] : fc.points)
    if (p.collection.r() == rc && p.collection.a() == 1) base[p.collection.objects_str()].push_back(&p);
  for (const auto& [id, e] : fc.edges)
    if (e.collection.r() == rc && e.collection.a() == 1) base_edges[e.collection.objects_str()].push_back(&e);

  struct Factor {
    const Collection* c;
    const EvalGrid* ev;
    Rat energy;
    std::string id;
  };
  auto stack = [&](const std::vector<Factor>& fs, std::optional<Collection>& L, EvalGrid& ev, Rat& energy) {
    std::vector<std::vector<std::vector<std::string>>> grid;
    ev = EvalGrid{};
    energy = 0;
    for (const auto& f : fs) {
      grid.push_back(f.c->grid[0]);
      ev.alpha.push_back(f.ev->alpha[0]);
      ev.beta.push_back(f.ev->beta[0]);
      energy += f.energy;
    }
    Shape s;
    s.r = rc;
    for (const auto& blk : grid) {
      IntVec row;
      for (const auto& col : blk) row.push_back(static_cast<int>(col.size()) - 1);
      s.n.push_back(row);
    }
    if (!fc.bounds.admits(s) || !fc.cap.admits(energy)) return false;
    L = make_collection(fc.cat, fs.front().c->objects, grid);
    return true;
  };

  std::vector<ModuliEdge> pending;
  for (const auto& [objs, pts] : base) {
    for (int a = 2; a <= fc.bounds.a_max; ++a) {
      std::vector<std::size_t> pick(a, 0);
      while (true) {
        std::vector<Factor> fs;
        for (auto x : pick) fs.push_back(Factor{&pts[x]->collection, &pts[x]->evals, pts[x]->energy, pts[x]->id});
        std::optional<Collection> L;
        EvalGrid ev;
        Rat energy;
        if (stack(fs, L, ev, energy)) {
          std::vector<std::string> ids;
          for (const auto& f : fs) ids.push_back(f.id);
          out.add_point(ModuliPoint{join_ids(ids), *L, ev, energy, std::nullopt});
        }
        std::size_t o = 0;
        while (o < pick.size() && ++pick[o] == pts.size()) pick[o++] = 0;
        if (o == pick.size()) break;
      }
      // one edge factor at position p, points elsewhere
      auto eit = base_edges.find(objs);
      if (eit == base_edges.end()) continue;
      for (const ModuliEdge* e : eit->second)
        for (int p = 0; p < a; ++p) {
          std::vector<std::size_t> others(a - 1, 0);
          while (true) {
            std::vector<Factor> fs;
            std::vector<std::string> point_ids;
            for (int x = 0, o = 0; x < a; ++x) {
              if (x == p) {
                fs.push_back(Factor{&e->collection, &e->evals, e->energy, e->id});
              } else {
                const ModuliPoint* q = pts[others[o++]];
                fs.push_back(Factor{&q->collection, &q->evals, q->energy, q->id});
              }
              point_ids.push_back(fs.back().id);
            }
            std::optional<Collection> L;
            EvalGrid ev;
            Rat energy;
            if (stack(fs, L, ev, energy)) {
              ModuliEdge pe{join_ids(point_ids), *L, ev, energy, {}, std::nullopt};
              for (const Endpoint& en : e->ends) {
                Endpoint le;
                if (en.desc.type == 1) {
                  le.desc = make_t1(en.desc.i, p + 1, en.desc.s, en.desc.t);
                  auto ids = point_ids;
                  ids[p] = en.left;
                  le.left = join_ids(ids);
                  le.right = en.right;
                } else if (en.desc.type == 3) {
                  le.desc = make_t3(p + 1, en.desc.parts.at(0));
                  le.left = en.left;
                  std::vector<std::string> ids(point_ids.begin(), point_ids.begin() + p);
                  for (auto& x : split_ids(en.right)) ids.push_back(x);
                  ids.insert(ids.end(), point_ids.begin() + p + 1, point_ids.end());
                  le.right = join_ids(ids);
                } else {
                  throw FlowCatError("product_extend cannot lift " + en.desc.str());
                }
                pe.ends.push_back(le);
              }
              pending.push_back(std::move(pe));
            }
            std::size_t o = 0;
            while (o < others.size() && ++others[o] == pts.size()) others[o++] = 0;
            if (o == others.size()) break;
          }
        }
    }
  }
  for (auto& e : pending) out.add_edge(std::move(e));
  for (const auto& [id, e] : out.edges)
    for (const auto& en : e.ends)
      for (const auto* ref : {&en.left, &en.right})
        if (!out.points.count(*ref))
          throw FlowCatError("bounds are not closed under products: edge " + id + " needs missing point " + *ref);
  return out;
}

}  // namespace coppice
