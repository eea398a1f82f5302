#include "coppice/polytopes.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

namespace coppice {

Comp Comp::one(std::vector<Comp> items) {
  Comp c;
  c.kind = One;
  c.seams.push_back(Seam{std::move(items)});
  return c;
}

Comp Comp::multi(std::vector<Seam> seams) {
  Comp c;
  c.kind = Multi;
  c.seams = std::move(seams);
  return c;
}

int Comp::items() const {
  int p = 0;
  for (const auto& s : seams) p += static_cast<int>(s.items.size());
  return p;
}

namespace {

void comp_str(const Comp& c, std::string& out) {
  if (c.kind == Comp::Mark) {
    out += 'x';
    return;
  }
  auto seam_str = [&](const Seam& s) {
    for (std::size_t x = 0; x < s.items.size(); ++x) {
      if (x) out += ',';
      comp_str(s.items[x], out);
    }
  };
  if (c.kind == Comp::One) {
    out += "o[";
    seam_str(c.seams.at(0));
    out += ']';
  } else {
    out += "m{";
    for (std::size_t q = 0; q < c.seams.size(); ++q) {
      if (q) out += '|';
      seam_str(c.seams[q]);
    }
    out += '}';
  }
}

struct Parser {
  std::string_view s;
  std::size_t pos = 0;
  char peek() const { return pos < s.size() ? s[pos] : '\0'; }
  void expect(char ch) {
    if (peek() != ch) throw std::invalid_argument(std::string("expected '") + ch + "' at " + std::to_string(pos));
    ++pos;
  }
  std::vector<Comp> items(char close, char sep2) {
    std::vector<Comp> out;
    if (peek() == close || (sep2 && peek() == sep2)) return out;
    while (true) {
      out.push_back(comp());
      if (peek() == ',') {
        ++pos;
        continue;
      }
      return out;
    }
  }
  Comp comp() {
    char ch = peek();
    if (ch == 'x') {
      ++pos;
      return Comp::mark();
    }
    if (ch == 'o') {
      ++pos;
      expect('[');
      auto it = items(']', 0);
      expect(']');
      return Comp::one(std::move(it));
    }
    if (ch == 'm') {
      ++pos;
      expect('{');
      std::vector<Seam> seams;
      while (true) {
        seams.push_back(Seam{items('}', '|')});
        if (peek() == '|') {
          ++pos;
          continue;
        }
        break;
      }
      expect('}');
      return Comp::multi(std::move(seams));
    }
    throw std::invalid_argument("bad component at " + std::to_string(pos));
  }
};

int leaves_of(const PlanarTree* v) { return v->leaves(); }

// marks per global leaf index
void count_marks(const Comp& c, const PlanarTree* v, int lo, IntVec& mass);

void count_seam(const Seam& s, const PlanarTree* w, int lo, IntVec& mass) {
  for (const auto& it : s.items) {
    if (it.kind == Comp::Mark)
      ++mass.at(lo);
    else
      count_marks(it, w, lo, mass);
  }
}

void count_marks(const Comp& c, const PlanarTree* v, int lo, IntVec& mass) {
  if (c.kind == Comp::One) {
    count_seam(c.seams[0], v, lo, mass);
  } else if (c.kind == Comp::Multi) {
    int off = lo;
    for (std::size_t q = 0; q < c.seams.size() && q < v->kids.size(); ++q) {
      count_seam(c.seams[q], &v->kids[q], off, mass);
      off += leaves_of(&v->kids[q]);
    }
  }
}

std::string check_comp(const Comp& c, const PlanarTree* v);

std::string check_seam(const Seam& s, const PlanarTree* w) {
  for (const auto& it : s.items) {
    if (it.kind == Comp::Mark) {
      if (!w->is_leaf()) return "marked point on a seam over an internal seam-tree vertex";
    } else {
      auto why = check_comp(it, w);
      if (!why.empty()) return why;
    }
  }
  return "";
}

std::string check_comp(const Comp& c, const PlanarTree* v) {
  if (c.kind == Comp::Mark) return "marked point used as a component";
  if (c.kind == Comp::One) {
    if (c.seams.size() != 1) return "one-seam component with " + std::to_string(c.seams.size()) + " seams";
    return check_seam(c.seams[0], v);
  }
  if (v->is_leaf()) return "multi-seam component over a leaf";
  if (c.seams.size() != v->kids.size()) return "multi-seam component with wrong seam count";
  for (std::size_t q = 0; q < c.seams.size(); ++q) {
    auto why = check_seam(c.seams[q], &v->kids[q]);
    if (!why.empty()) return why;
  }
  return "";
}

bool comps_stable(const Comp& c) {
  if (c.kind == Comp::Mark) return true;
  int p = c.items();
  if (c.kind == Comp::One && p < 2) return false;
  if (c.kind == Comp::Multi && p < 1) return false;
  for (const auto& s : c.seams)
    for (const auto& it : s.items)
      if (!comps_stable(it)) return false;
  return true;
}

int comp_params(const Comp& c) {
  if (c.kind == Comp::Mark) return 0;
  int d = c.items() - (c.kind == Comp::One ? 2 : 1);
  for (const auto& s : c.seams)
    for (const auto& it : s.items) d += comp_params(it);
  return d;
}

Comp trivial_root(const PlanarTree& ts) {
  if (ts.is_leaf()) return Comp::one({});
  return Comp::multi(std::vector<Seam>(ts.kids.size()));
}

bool block_is_canonical_point(const Comp& root, const PlanarTree& ts, int mass) {
  if (mass == 0) return root == trivial_root(ts);
  if (ts.is_leaf() && mass == 1) return root == Comp::one({Comp::mark()});
  return false;
}

IntVec block_mass_vec(const Comp& root, const PlanarTree& ts) {
  IntVec m(ts.leaves(), 0);
  count_marks(root, &ts, 0, m);
  return m;
}

}  // namespace

Shape Coppice::shape() const {
  Shape s;
  s.r = r();
  for (const auto& root : roots) s.n.push_back(block_mass_vec(root, seam));
  return s;
}

std::string Coppice::str() const {
  std::string out = seam.str() + ":";
  for (std::size_t j = 0; j < roots.size(); ++j) {
    if (j) out += ';';
    comp_str(roots[j], out);
  }
  return out;
}

Coppice Coppice::parse(std::string_view text) {
  auto colon = text.find(':');
  if (colon == std::string_view::npos) throw std::invalid_argument("coppice needs ':'");
  Coppice c;
  c.seam = PlanarTree::parse(text.substr(0, colon));
  Parser p{text.substr(colon + 1)};
  if (!p.s.empty()) {
    while (true) {
      c.roots.push_back(p.comp());
      if (p.peek() == ';') {
        ++p.pos;
        continue;
      }
      break;
    }
  }
  if (p.pos != p.s.size()) throw std::invalid_argument("trailing characters in coppice");
  auto why = coppice_problem(c);
  if (!why.empty()) throw std::invalid_argument("malformed coppice: " + why);
  return c;
}

std::string coppice_problem(const Coppice& c) {
  if (!c.seam.stable()) return "seam tree has a vertex with one child";
  for (const auto& root : c.roots) {
    if (c.seam.is_leaf() && root.kind != Comp::One) return "root over a one-leaf seam tree must be a one-seam component";
    auto why = check_comp(root, &c.seam);
    if (!why.empty()) return why;
  }
  return "";
}

bool exceptional_block(int r, int mass) { return r == 1 && mass <= 1; }

bool stable_shape(const Shape& s) {
  for (int j = 0; j < s.a(); ++j)
    if (exceptional_block(s.r, s.block_mass(j))) return false;
  if (s.r <= 2 && s.a() >= 1 && s.all_zero()) return false;
  return s.a() >= 1;
}

bool is_stable(const Coppice& c) {
  if (!coppice_problem(c).empty()) return false;
  for (const auto& root : c.roots) {
    IntVec m = block_mass_vec(root, c.seam);
    int mass = std::accumulate(m.begin(), m.end(), 0);
    if (mass == 0 || exceptional_block(c.r(), mass)) {
      if (!block_is_canonical_point(root, c.seam, mass)) return false;
    } else if (!comps_stable(root)) {
      return false;
    }
  }
  return true;
}

int w_dim(const Coppice& c) {
  int d = c.seam.dim();
  for (const auto& root : c.roots) {
    IntVec m = block_mass_vec(root, c.seam);
    int mass = std::accumulate(m.begin(), m.end(), 0);
    if (mass == 0 || exceptional_block(c.r(), mass)) continue;
    d += comp_params(root);
  }
  return d;
}

PlanarTree forgetful(const Coppice& c) { return c.seam; }

Coppice top_stratum(const Shape& s) {
  Coppice c;
  c.seam = PlanarTree::corolla(s.r);
  for (int j = 0; j < s.a(); ++j) {
    if (s.r == 1) {
      c.roots.push_back(Comp::one(std::vector<Comp>(s.n[j][0], Comp::mark())));
    } else {
      std::vector<Seam> seams(s.r);
      for (int i = 0; i < s.r; ++i) seams[i].items.assign(s.n[j][i], Comp::mark());
      c.roots.push_back(Comp::multi(std::move(seams)));
    }
  }
  return c;
}

int top_dim(const Shape& s) { return w_dim(top_stratum(s)); }

// ---------------------------------------------------------------- enumeration

namespace {

class BubbleEnum {
 public:
  using Seq = std::vector<Comp>;

  std::vector<Seq> seqs(const PlanarTree* v, const IntVec& m) {
    auto key = std::make_pair(v, m);
    if (auto it = seq_memo_.find(key); it != seq_memo_.end()) return it->second;
    std::vector<Seq> out;
    if (std::all_of(m.begin(), m.end(), [](int x) { return x == 0; })) {
      out.push_back({});
    } else {
      for_each_sub(m, true, [&](const IntVec& w) {
        auto firsts = items(v, w);
        if (firsts.empty()) return;
        auto rests = seqs(v, diff(m, w));
        for (const auto& f : firsts)
          for (const auto& r : rests) {
            Seq s{f};
            s.insert(s.end(), r.begin(), r.end());
            out.push_back(std::move(s));
          }
      });
    }
    seq_memo_[key] = out;
    return out;
  }

  std::vector<Comp> items(const PlanarTree* v, const IntVec& w) {
    std::vector<Comp> out;
    if (v->is_leaf() && w[0] == 1) out.push_back(Comp::mark());
    auto o = ones(v, w);
    out.insert(out.end(), o.begin(), o.end());
    if (!v->is_leaf()) {
      auto mu = multis(v, w);
      out.insert(out.end(), mu.begin(), mu.end());
    }
    return out;
  }

  std::vector<Comp> ones(const PlanarTree* v, const IntVec& m) {
    auto key = std::make_pair(v, m);
    if (auto it = one_memo_.find(key); it != one_memo_.end()) return it->second;
    std::vector<Comp> out;
    for_each_sub(m, false, [&](const IntVec& w) {
      auto firsts = items(v, w);
      if (firsts.empty()) return;
      auto rests = seqs(v, diff(m, w));
      for (const auto& f : firsts)
        for (const auto& r : rests) {
          Seq s{f};
          s.insert(s.end(), r.begin(), r.end());
          out.push_back(Comp::one(std::move(s)));
        }
    });
    one_memo_[key] = out;
    return out;
  }

  std::vector<Comp> multis(const PlanarTree* v, const IntVec& m) {
    auto key = std::make_pair(v, m);
    if (auto it = multi_memo_.find(key); it != multi_memo_.end()) return it->second;
    std::vector<Comp> out;
    if (std::any_of(m.begin(), m.end(), [](int x) { return x > 0; })) {
      std::vector<std::vector<Seq>> per;
      int off = 0;
      for (const auto& kid : v->kids) {
        int cnt = kid.leaves();
        per.push_back(seqs(&kid, IntVec(m.begin() + off, m.begin() + off + cnt)));
        off += cnt;
      }
      std::vector<Seam> cur;
      std::function<void(std::size_t)> rec = [&](std::size_t q) {
        if (q == per.size()) {
          out.push_back(Comp::multi(cur));
          return;
        }
        for (const auto& s : per[q]) {
          cur.push_back(Seam{s});
          rec(q + 1);
          cur.pop_back();
        }
      };
      rec(0);
    }
    multi_memo_[key] = out;
    return out;
  }

 private:
  static IntVec diff(const IntVec& a, const IntVec& b) {
    IntVec d(a.size());
    for (std::size_t x = 0; x < a.size(); ++x) d[x] = a[x] - b[x];
    return d;
  }
  // nonzero w <= m; include w == m iff allow_full
  template <class F>
  static void for_each_sub(const IntVec& m, bool allow_full, F&& f) {
    IntVec w(m.size(), 0);
    while (true) {
      std::size_t o = 0;
      while (o < w.size() && w[o] == m[o]) w[o++] = 0;
      if (o == w.size()) return;
      ++w[o];
      if (!allow_full && w == m) continue;
      f(w);
    }
  }

  std::map<std::pair<const PlanarTree*, IntVec>, std::vector<Seq>> seq_memo_;
  std::map<std::pair<const PlanarTree*, IntVec>, std::vector<Comp>> one_memo_, multi_memo_;
};

}  // namespace

std::vector<Coppice> enum_fiber(const Shape& s) {
  if (s.r < 1) throw std::invalid_argument("enum_fiber needs r >= 1");
  std::vector<Coppice> out;
  for (const PlanarTree& ts : enum_k(s.r)) {
    BubbleEnum E;
    std::vector<std::vector<Comp>> options;
    for (int j = 0; j < s.a(); ++j) {
      int mass = s.block_mass(j);
      std::vector<Comp> opts;
      if (mass == 0) {
        opts.push_back(trivial_root(ts));
      } else if (exceptional_block(s.r, mass)) {
        opts.push_back(Comp::one({Comp::mark()}));
      } else if (ts.is_leaf()) {
        opts = E.ones(&ts, s.n[j]);
      } else {
        opts = E.multis(&ts, s.n[j]);
        auto o = E.ones(&ts, s.n[j]);
        opts.insert(opts.end(), o.begin(), o.end());
      }
      options.push_back(std::move(opts));
    }
    Coppice cur;
    cur.seam = ts;
    std::function<void(int)> rec = [&](int j) {
      if (j == s.a()) {
        out.push_back(cur);
        return;
      }
      for (const auto& c : options[j]) {
        cur.roots.push_back(c);
        rec(j + 1);
        cur.roots.pop_back();
      }
    };
    rec(0);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Coppice> enum_w(const IntVec& n, bool stable_only) {
  Shape s = single_shape(n);
  if (stable_only && !stable_shape(s)) return {};
  return enum_fiber(s);
}

// ---------------------------------------------------------------- moves

namespace {

struct CompRef {
  int block;
  std::vector<int> path;   // (seam, item) pairs
  std::vector<int> vpath;  // kid indices in the seam tree
  Comp::Kind kind;
};

void collect_refs(const Comp& c, int block, std::vector<int>& path, std::vector<int>& vpath, std::vector<CompRef>& out) {
  out.push_back(CompRef{block, path, vpath, c.kind});
  for (std::size_t q = 0; q < c.seams.size(); ++q) {
    if (c.kind == Comp::Multi) vpath.push_back(static_cast<int>(q));
    for (std::size_t p = 0; p < c.seams[q].items.size(); ++p) {
      const Comp& it = c.seams[q].items[p];
      if (it.kind == Comp::Mark) continue;
      path.push_back(static_cast<int>(q));
      path.push_back(static_cast<int>(p));
      collect_refs(it, block, path, vpath, out);
      path.pop_back();
      path.pop_back();
    }
    if (c.kind == Comp::Multi) vpath.pop_back();
  }
}

Comp& comp_at(Comp& root, const std::vector<int>& path) {
  Comp* cur = &root;
  for (std::size_t x = 0; x < path.size(); x += 2) cur = &cur->seams[path[x]].items[path[x + 1]];
  return *cur;
}

PlanarTree& vertex_at(PlanarTree& t, const std::vector<int>& vpath) {
  PlanarTree* cur = &t;
  for (int q : vpath) cur = &cur->kids[q];
  return *cur;
}

// cut seams into the bands given by q[l][o] = number of items of seam o in band l
std::vector<Comp> make_bands(const std::vector<Seam>& seams, const IntMat& q) {
  std::vector<Comp> bands;
  std::vector<int> pos(seams.size(), 0);
  for (const auto& row : q) {
    std::vector<Seam> bs(seams.size());
    for (std::size_t o = 0; o < seams.size(); ++o) {
      bs[o].items.assign(seams[o].items.begin() + pos[o], seams[o].items.begin() + pos[o] + row[o]);
      pos[o] += row[o];
    }
    bands.push_back(Comp::multi(std::move(bs)));
  }
  return bands;
}

IntVec seam_lengths(const std::vector<Seam>& seams, std::size_t from, std::size_t to) {
  IntVec lens;
  for (std::size_t o = from; o < to; ++o) lens.push_back(static_cast<int>(seams[o].items.size()));
  return lens;
}

}  // namespace

std::vector<Coppice> faces1(const Coppice& c) {
  std::vector<CompRef> refs;
  for (int j = 0; j < c.a(); ++j) {
    std::vector<int> path, vpath;
    collect_refs(c.roots[j], j, path, vpath, refs);
  }
  std::set<std::string> seen;
  std::vector<Coppice> out;
  auto emit = [&](Coppice&& x) {
    if (!is_stable(x)) return;
    if (seen.insert(x.str()).second) out.push_back(std::move(x));
  };
  // type 1: group a run of items into a new one-seam component
  for (const auto& ref : refs) {
    const Comp& host = comp_at(const_cast<Comp&>(c.roots[ref.block]), ref.path);
    const int p = host.items();
    for (std::size_t q = 0; q < host.seams.size(); ++q) {
      const int len = static_cast<int>(host.seams[q].items.size());
      for (int t = 2; t <= len; ++t) {
        if (host.kind == Comp::One && p - t + 1 < 2) continue;
        for (int s = 0; s + t <= len; ++s) {
          Coppice x = c;
          auto& items = comp_at(x.roots[ref.block], ref.path).seams[q].items;
          std::vector<Comp> run(items.begin() + s, items.begin() + s + t);
          items.erase(items.begin() + s, items.begin() + s + t);
          items.insert(items.begin() + s, Comp::one(std::move(run)));
          emit(std::move(x));
        }
      }
    }
  }
  // type 3: a multi-seam component splits into several stacked ones
  for (const auto& ref : refs) {
    if (ref.kind != Comp::Multi) continue;
    const Comp& host = comp_at(const_cast<Comp&>(c.roots[ref.block]), ref.path);
    IntVec lens = seam_lengths(host.seams, 0, host.seams.size());
    int total = std::accumulate(lens.begin(), lens.end(), 0);
    for (int b = 2; b <= total; ++b)
      for (const auto& q : compositions(lens, b, false)) {
        Coppice x = c;
        Comp& h = comp_at(x.roots[ref.block], ref.path);
        h = Comp::one(make_bands(h.seams, q));
        emit(std::move(x));
      }
  }
  // type 2: partial seam collision at an internal seam-tree vertex
  std::vector<std::vector<int>> vpaths;
  std::function<void(const PlanarTree&, std::vector<int>&)> walk = [&](const PlanarTree& v, std::vector<int>& vp) {
    if (v.kids.size() >= 3) vpaths.push_back(vp);
    for (std::size_t q = 0; q < v.kids.size(); ++q) {
      vp.push_back(static_cast<int>(q));
      walk(v.kids[q], vp);
      vp.pop_back();
    }
  };
  std::vector<int> vp0;
  walk(c.seam, vp0);
  for (const auto& vp : vpaths) {
    const int k = static_cast<int>(vertex_at(const_cast<PlanarTree&>(c.seam), vp).kids.size());
    std::vector<const CompRef*> at_rho;
    for (const auto& ref : refs)
      if (ref.kind == Comp::Multi && ref.vpath == vp) at_rho.push_back(&ref);
    for (int t = 2; t <= k - 1; ++t)
      for (int s = 0; s + t <= k; ++s) {
        std::vector<std::vector<IntMat>> options;
        for (const CompRef* ref : at_rho) {
          const Comp& h = comp_at(const_cast<Comp&>(c.roots[ref->block]), ref->path);
          IntVec lens = seam_lengths(h.seams, s, s + t);
          int total = std::accumulate(lens.begin(), lens.end(), 0);
          std::vector<IntMat> opts;
          if (total == 0) opts.push_back({});
          for (int b = 1; b <= total; ++b)
            for (auto& q : compositions(lens, b, false)) opts.push_back(q);
          options.push_back(std::move(opts));
        }
        std::vector<int> choice(options.size(), 0);
        while (true) {
          Coppice x = c;
          PlanarTree& rho = vertex_at(x.seam, vp);
          PlanarTree sigma;
          sigma.kids.assign(rho.kids.begin() + s, rho.kids.begin() + s + t);
          rho.kids.erase(rho.kids.begin() + s, rho.kids.begin() + s + t);
          rho.kids.insert(rho.kids.begin() + s, sigma);
          for (std::size_t a = 0; a < at_rho.size(); ++a) {
            Comp& h = comp_at(x.roots[at_rho[a]->block], at_rho[a]->path);
            std::vector<Seam> mid(h.seams.begin() + s, h.seams.begin() + s + t);
            Seam merged{make_bands(mid, options[a][choice[a]])};
            h.seams.erase(h.seams.begin() + s, h.seams.begin() + s + t);
            h.seams.insert(h.seams.begin() + s, merged);
          }
          emit(std::move(x));
          std::size_t a = 0;
          while (a < choice.size() && ++choice[a] == static_cast<int>(options[a].size())) choice[a++] = 0;
          if (a == choice.size()) break;
        }
      }
  }
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------- associahedra

namespace {

PlanarTree comp_to_tree(const Comp& c) {
  if (c.kind == Comp::Mark) return PlanarTree::leaf();
  PlanarTree t;
  for (const auto& it : c.seams.at(0).items) t.kids.push_back(comp_to_tree(it));
  return t;
}

}  // namespace

PlanarTree w_to_k(const Coppice& c) {
  if (c.r() != 1 || c.a() != 1) throw std::invalid_argument("w_to_k needs r = 1, a = 1");
  const Comp& root = c.roots[0];
  if (root.items() <= 1) return PlanarTree::leaf();
  return comp_to_tree(root);
}

std::vector<std::pair<Coppice, PlanarTree>> w_as_k_iso(int n) {
  std::vector<std::pair<Coppice, PlanarTree>> out;
  for (const auto& c : enum_w({n})) out.push_back({c, w_to_k(c)});
  return out;
}

// ---------------------------------------------------------------- grafting

namespace {

struct MarkReplacer {
  int leaf;
  std::map<int, Comp> repl;
  int counter = 0;

  void comp(Comp& c, const PlanarTree* v, int lo) {
    if (c.kind == Comp::One) {
      seam(c.seams[0], v, lo);
    } else if (c.kind == Comp::Multi) {
      int off = lo;
      for (std::size_t q = 0; q < c.seams.size(); ++q) {
        seam(c.seams[q], &v->kids[q], off);
        off += v->kids[q].leaves();
      }
    }
  }
  void seam(Seam& s, const PlanarTree* w, int lo) {
    for (auto& it : s.items) {
      if (it.kind == Comp::Mark) {
        if (lo == leaf) {
          auto f = repl.find(counter++);
          if (f != repl.end()) it = f->second;
        }
      } else {
        comp(it, w, lo);
      }
    }
  }
};

Shape glued_shape(const Desc& d, const Shape& in, const Shape& out) {
  Shape s;
  if (d.type == 1) {
    s = in;
    if (d.j < 1 || d.j > s.a() || d.i < 1 || d.i > s.r || out.a() != 1 || out.r != 1)
      throw std::invalid_argument("gamma_graft: shape mismatch for " + d.str());
    s.n[d.j - 1][d.i - 1] += out.n[0][0] - 1;
  } else if (d.type == 2) {
    s.r = in.r + d.t - 1;
    if (static_cast<int>(d.parts.size()) != in.a() || d.s >= in.r)
      throw std::invalid_argument("gamma_graft: shape mismatch for " + d.str());
    for (int j = 0; j < in.a(); ++j) {
      IntVec row(in.n[j].begin(), in.n[j].begin() + d.s);
      IntVec mid(d.t, 0);
      for (const auto& p : d.parts[j])
        for (int o = 0; o < d.t && o < static_cast<int>(p.size()); ++o) mid[o] += p[o];
      row.insert(row.end(), mid.begin(), mid.end());
      row.insert(row.end(), in.n[j].begin() + d.s + 1, in.n[j].end());
      s.n.push_back(row);
    }
  } else {
    const int b = static_cast<int>(d.parts.at(0).size());
    s.r = out.r;
    if (d.j < 1 || d.j - 1 + b > out.a()) throw std::invalid_argument("gamma_graft: shape mismatch for " + d.str());
    s.n.assign(out.n.begin(), out.n.begin() + (d.j - 1));
    IntVec sum(out.r, 0);
    for (int l = 0; l < b; ++l)
      for (int i = 0; i < out.r; ++i) sum[i] += out.n[d.j - 1 + l][i];
    s.n.push_back(sum);
    s.n.insert(s.n.end(), out.n.begin() + (d.j - 1 + b), out.n.end());
  }
  return s;
}

// a bubble carrying a single marked point is unstable and shrinks to the mark
void collapse_bubbles(Comp& c) {
  for (auto& sm : c.seams)
    for (auto& it : sm.items) {
      collapse_bubbles(it);
      if (it.kind == Comp::One && it.seams[0].items.size() == 1 && it.seams[0].items[0].kind == Comp::Mark)
        it = Comp::mark();
    }
}

}  // namespace

Coppice gamma_graft(const Desc& d, const Coppice& outer, const Coppice& inner) {
  const Shape sin = outer.shape(), sout = inner.shape();
  const Shape s = glued_shape(d, sin, sout);
  auto [ein, eout] = desc_shapes(s, d);
  if (!(ein == sin) || !(eout == sout))
    throw std::invalid_argument("gamma_graft: shapes " + sin.str() + " / " + sout.str() + " do not fit " + d.str());
  Coppice res;
  if (d.type == 1) {
    res = outer;
    MarkReplacer mr{d.i - 1, {{d.s, inner.roots[0]}}};
    mr.comp(res.roots[d.j - 1], &res.seam, 0);
  } else if (d.type == 2) {
    res.seam = graft_k(outer.seam, inner.seam, d.s + 1);
    int first = 0;
    for (int j = 0; j < outer.a(); ++j) {
      Comp root = outer.roots[j];
      const int b = static_cast<int>(d.parts[j].size());
      MarkReplacer mr{d.s, {}};
      for (int l = 0; l < b; ++l) mr.repl[l] = inner.roots[first + l];
      mr.comp(root, &outer.seam, 0);
      res.roots.push_back(std::move(root));
      first += b;
    }
  } else {
    const int b = static_cast<int>(d.parts[0].size());
    res.seam = inner.seam;
    res.roots.assign(inner.roots.begin(), inner.roots.begin() + (d.j - 1));
    Comp root = outer.roots[0];
    MarkReplacer mr{0, {}};
    for (int l = 0; l < b; ++l) mr.repl[l] = inner.roots[d.j - 1 + l];
    mr.comp(root, &outer.seam, 0);
    res.roots.push_back(std::move(root));
    res.roots.insert(res.roots.end(), inner.roots.begin() + (d.j - 1 + b), inner.roots.end());
  }
  for (auto& r : res.roots) collapse_bubbles(r);
  return res;
}

std::vector<std::pair<Desc, Coppice>> boundary_strata(const Shape& s) {
  std::vector<std::pair<Desc, Coppice>> out;
  for (const Desc& d : boundary_descs(s)) {
    auto [in, o] = desc_shapes(s, d);
    out.push_back({d, gamma_graft(d, top_stratum(in), top_stratum(o))});
  }
  return out;
}

FacePoset face_poset(const Shape& s) {
  FacePoset p;
  p.strata = enum_fiber(s);
  std::map<std::string, int> index;
  for (std::size_t x = 0; x < p.strata.size(); ++x) {
    index[p.strata[x].str()] = static_cast<int>(x);
    p.dims.push_back(w_dim(p.strata[x]));
  }
  for (std::size_t x = 0; x < p.strata.size(); ++x)
    for (const auto& f : faces1(p.strata[x])) {
      auto it = index.find(f.str());
      if (it == index.end()) throw std::logic_error("face " + f.str() + " is not an enumerated stratum");
      p.covers.push_back({it->second, static_cast<int>(x)});
    }
  std::sort(p.covers.begin(), p.covers.end());
  return p;
}

std::string poset_dot(const FacePoset& p, const std::string& name) {
  std::ostringstream o;
  o << "digraph \"" << name << "\" {\n  rankdir=BT;\n";
  for (std::size_t x = 0; x < p.strata.size(); ++x)
    o << "  s" << x << " [label=\"" << p.strata[x].str() << "\\ndim " << p.dims[x] << "\"];\n";
  for (const auto& [f, g] : p.covers) o << "  s" << f << " -> s" << g << ";\n";
  o << "}\n";
  return o.str();
}

// ---------------------------------------------------------------- labelings

namespace {

struct SeamRec {
  std::string key;
  const PlanarTree* w;
  int lo, cnt;
  int enter, exit;
  int block;
};

struct CompRec {
  int block;
  Comp::Kind kind;
  const PlanarTree* v;
  int lo;
  std::string parent_seam;  // empty for a root
  int pos;                  // item index in the parent seam
  std::vector<std::string> seams;
};

struct MarkRec {
  int idx, leaf, block;
};

struct LabelWalk {
  const OneCat& cat;
  const Collection& L;
  LabelWalk(const OneCat& c, const Collection& l) : cat(c), L(l) {}
  int block = 0;
  IntVec counters;
  int clock = 0;
  Labeling lab;
  std::vector<SeamRec> seams;
  std::vector<CompRec> comps;
  std::vector<MarkRec> marks;

  std::string label(int lo, int cnt) {
    std::string acc;
    for (int i = lo; i < lo + cnt; ++i) {
      const auto& col = L.grid.at(block).at(i);
      if (counters[i] >= static_cast<int>(col.size())) throw std::invalid_argument("labeling runs past a column");
      const std::string& m = col[counters[i]];
      if (i == lo) {
        acc = m;
      } else {
        auto c = cat.compose(acc, m);
        if (!c) throw std::invalid_argument("no consistent labeling: composite " + acc + "," + m + " undefined");
        acc = *c;
      }
    }
    return acc;
  }

  void comp(const Comp& c, const PlanarTree* v, int lo, const std::string& prefix, const std::string& parent, int pos) {
    CompRec rec{block, c.kind, v, lo, parent, pos, {}};
    std::size_t me = comps.size();
    comps.push_back(rec);
    int off = lo;
    for (std::size_t q = 0; q < c.seams.size(); ++q) {
      const PlanarTree* w = c.kind == Comp::One ? v : &v->kids[q];
      std::string key = prefix + std::to_string(q);
      comps[me].seams.push_back(key);
      seam(c.seams[q], w, off, key);
      if (c.kind == Comp::Multi) off += w->leaves();
    }
  }

  void seam(const Seam& s, const PlanarTree* w, int lo, const std::string& key) {
    const int cnt = w->leaves();
    SeamRec rec{key, w, lo, cnt, clock++, 0, block};
    auto& labels = lab.seams[key];
    labels.push_back(label(lo, cnt));
    for (std::size_t p = 0; p < s.items.size(); ++p) {
      const Comp& it = s.items[p];
      if (it.kind == Comp::Mark) {
        marks.push_back({clock++, lo, block});
        ++counters[lo];
      } else {
        comp(it, w, lo, key + "." + std::to_string(p) + ".", key, static_cast<int>(p));
      }
      labels.push_back(label(lo, cnt));
    }
    rec.exit = clock++;
    seams.push_back(rec);
  }

  void run(const Coppice& c) {
    for (int j = 0; j < c.a(); ++j) {
      block = j;
      counters.assign(c.r(), 0);
      comp(c.roots[j], &c.seam, 0, std::to_string(j + 1) + "/", "", 0);
    }
  }
};

std::string compose_list(const OneCat& cat, const std::vector<std::string>& ms) {
  std::string acc = ms.at(0);
  for (std::size_t x = 1; x < ms.size(); ++x) {
    auto c = cat.compose(acc, ms[x]);
    if (!c) return "";
    acc = *c;
  }
  return acc;
}

void check_shape_match(const Collection& L, const Coppice& c) {
  if (!(L.shape() == c.shape()))
    throw std::invalid_argument("collection shape " + L.shape().str() + " differs from coppice shape " + c.shape().str());
}

}  // namespace

Labeling induced_labeling(const OneCat& cat, const Collection& L, const Coppice& c) {
  check_shape_match(L, c);
  LabelWalk w(cat, L);
  w.run(c);
  auto bad = labeling_problems(cat, L, c, w.lab);
  if (!bad.empty()) throw std::invalid_argument("no consistent labeling: " + bad.front());
  return w.lab;
}

std::vector<std::string> labeling_problems(const OneCat& cat, const Collection& L, const Coppice& c,
                                           const Labeling& lab) {
  std::vector<std::string> bad;
  check_shape_match(L, c);
  LabelWalk w(cat, L);
  w.run(c);
  auto get = [&](const std::string& key) -> const std::vector<std::string>* {
    auto it = lab.seams.find(key);
    return it == lab.seams.end() ? nullptr : &it->second;
  };
  for (const auto& s : w.seams) {
    const auto* labels = get(s.key);
    if (!labels) {
      bad.push_back("seam " + s.key + " has no labels");
      continue;
    }
    if (labels->size() != w.lab.seams[s.key].size()) {
      bad.push_back("seam " + s.key + " has the wrong number of labels");
      continue;
    }
    for (const auto& m : *labels)
      if (!cat.has_mor(m) || cat.src(m) != L.objects[s.lo] || cat.tgt(m) != L.objects[s.lo + s.cnt])
        bad.push_back("seam " + s.key + " label " + m + " has the wrong endpoints");
  }
  if (!bad.empty()) return bad;
  // left-to-right neighbours with equal image, no marked point in between
  for (const auto& s1 : w.seams) {
    const SeamRec* next = nullptr;
    for (const auto& s2 : w.seams)
      if (s2.block == s1.block && s2.w == s1.w && s2.enter > s1.exit && (!next || s2.enter < next->enter)) next = &s2;
    if (!next) continue;
    bool mark_between = false;
    for (const auto& m : w.marks)
      if (m.block == s1.block && m.idx > s1.exit && m.idx < next->enter && m.leaf >= s1.lo && m.leaf < s1.lo + s1.cnt)
        mark_between = true;
    if (mark_between) continue;
    if (get(s1.key)->back() != get(next->key)->front())
      bad.push_back("seams " + s1.key + " and " + next->key + " do not match end to start");
  }
  // composition at component vertices
  for (const auto& cr : w.comps) {
    if (cr.parent_seam.empty()) continue;
    std::vector<std::string> bots, tops;
    for (const auto& k : cr.seams) {
      bots.push_back(get(k)->front());
      tops.push_back(get(k)->back());
    }
    const auto& parent = *get(cr.parent_seam);
    if (compose_list(cat, bots) != parent[cr.pos] || compose_list(cat, tops) != parent[cr.pos + 1])
      bad.push_back("composition condition fails at item " + std::to_string(cr.pos) + " of seam " + cr.parent_seam);
  }
  return bad;
}

Decomposition decomposition_shapes(const OneCat& cat, const Collection& L, const Coppice& c) {
  Labeling lab = induced_labeling(cat, L, c);
  LabelWalk w(cat, L);
  w.run(c);
  Decomposition dec;
  std::map<std::string, const SeamRec*> seam_by_key;
  for (const auto& s : w.seams) seam_by_key[s.key] = &s;
  for (const auto& cr : w.comps) {
    if (cr.kind != Comp::One) continue;
    const SeamRec* s = seam_by_key.at(cr.seams.at(0));
    dec.alpha.push_back(make_collection(cat, {L.objects[s->lo], L.objects[s->lo + s->cnt]}, {{lab.seams.at(s->key)}}));
  }
  std::function<void(const PlanarTree&, int)> walk = [&](const PlanarTree& v, int lo) {
    if (v.is_leaf()) return;
    std::vector<std::string> objs{L.objects[lo]};
    int off = lo;
    for (const auto& k : v.kids) {
      off += k.leaves();
      objs.push_back(L.objects[off]);
    }
    std::vector<std::vector<std::vector<std::string>>> grid;
    for (int j = 0; j < c.a(); ++j)
      for (const auto& cr : w.comps)
        if (cr.block == j && cr.kind == Comp::Multi && cr.v == &v) {
          std::vector<std::vector<std::string>> blk;
          for (const auto& k : cr.seams) blk.push_back(lab.seams.at(k));
          grid.push_back(blk);
        }
    dec.rho.push_back(make_collection(cat, objs, grid));
    off = lo;
    for (const auto& k : v.kids) {
      walk(k, off);
      off += k.leaves();
    }
  };
  walk(c.seam, 0);
  return dec;
}

// ---------------------------------------------------------------- associativity

namespace {

struct Step {
  Desc d;
  Coppice in, out;
};

struct ShapeData {
  std::vector<Coppice> strata;
  std::string top;
  int top_dim = 0;
  bool steps_ready = false;
  std::map<std::string, std::vector<Step>> steps;
};

std::map<Shape, ShapeData>& shape_cache() {
  static std::map<Shape, ShapeData> cache;
  return cache;
}

ShapeData& shape_data(const Shape& s) {
  auto& cache = shape_cache();
  auto it = cache.find(s);
  if (it != cache.end()) return it->second;
  ShapeData d;
  d.strata = enum_fiber(s);
  Coppice top = top_stratum(s);
  d.top = top.str();
  d.top_dim = w_dim(top);
  return cache.emplace(s, std::move(d)).first->second;
}

ShapeData& shape_steps(const Shape& s, int max_codim) {
  ShapeData& data = shape_data(s);
  if (data.steps_ready) return data;
  for (const Desc& d : boundary_descs(s)) {
    auto [sin, sout] = desc_shapes(s, d);
    // copies: the cache may rehash while recursing
    std::vector<Coppice> ins = shape_data(sin).strata, outs = shape_data(sout).strata;
    int tin = shape_data(sin).top_dim, tout = shape_data(sout).top_dim;
    for (const auto& x : ins) {
      int cin = tin - w_dim(x);
      if (cin + 1 > max_codim) continue;
      for (const auto& y : outs) {
        int cout = tout - w_dim(y);
        if (cin + cout + 1 > max_codim) continue;
        Coppice g = gamma_graft(d, x, y);
        data.steps[g.str()].push_back(Step{d, x, y});
      }
    }
  }
  data.steps_ready = true;
  return data;
}

struct ChainSearch {
  const OneCat& cat;
  int max_codim;
  ChainSearch(const OneCat& c, int m) : cat(c), max_codim(m) {}
  std::set<std::string> results;
  std::map<std::string, Factorization> witness;
  int chains = 0;
  std::string failure;

  void run(const Factorization& f, std::vector<Coppice>& strata) {
    for (std::size_t x = 0; x < strata.size(); ++x) {
      Shape s = f.factors[x].shape();
      ShapeData& data = shape_steps(s, max_codim);
      std::string key = strata[x].str();
      if (key == data.top) continue;
      auto it = data.steps.find(key);
      if (it == data.steps.end() || it->second.empty()) {
        failure = "no descriptor produces " + key + " in " + s.str();
        return;
      }
      auto steps = it->second;
      for (const auto& st : steps) {
        Factorization g = f.apply(cat, static_cast<int>(x), st.d);
        std::vector<Coppice> next = strata;
        next[x] = st.in;
        next.push_back(st.out);
        run(g, next);
      }
      return;
    }
    ++chains;
    std::string k = f.canonical().str();
    if (results.insert(k).second) witness.emplace(k, f);
  }
};

std::vector<std::string> split_r1(const Collection& c, const OneCat& cat) {
  std::vector<std::string> out;
  if (c.r() == 1 && c.a() > 1) {
    for (const auto& blk : c.grid) out.push_back(make_collection(cat, c.objects, {blk}).key());
  } else {
    out.push_back(c.key());
  }
  return out;
}

}  // namespace

AssocResult assoc_check_detail(const Shape& s, const Coppice& c, int max_codim) {
  AssocResult res;
  ShapeData& data = shape_data(s);
  int codim = data.top_dim - w_dim(c);
  if (codim > max_codim) {
    res.detail = "codimension " + std::to_string(codim) + " exceeds the configured bound";
    return res;
  }
  auto [cat, L] = free_collection(s);
  ChainSearch search(cat, max_codim);
  std::vector<Coppice> strata{c};
  search.run(Factorization::start(L), strata);
  res.chains = search.chains;
  if (!search.failure.empty()) {
    res.detail = search.failure;
    return res;
  }
  if (search.results.size() != 1) {
    res.detail = std::to_string(search.results.size()) + " distinct chain results";
    return res;
  }
  const Factorization& f = search.witness.begin()->second;
  std::vector<std::string> got, want;
  for (const auto& x : f.factors)
    for (auto& k : split_r1(x, cat)) got.push_back(k);
  Decomposition dec = decomposition_shapes(cat, L, c);
  for (const auto& x : dec.alpha) want.push_back(x.key());
  for (const auto& x : dec.rho) want.push_back(x.key());
  std::sort(got.begin(), got.end());
  std::sort(want.begin(), want.end());
  if (got != want) {
    res.detail = "chain factors differ from decomposition_shapes";
    return res;
  }
  res.ok = true;
  return res;
}

bool assoc_check(const Shape& s, const Coppice& c, int max_codim) { return assoc_check_detail(s, c, max_codim).ok; }

}  // namespace coppice
