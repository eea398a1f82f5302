#include "coppice/trees.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>

namespace coppice {

PlanarTree PlanarTree::corolla(int r) {
  if (r < 1) throw std::invalid_argument("corolla needs r >= 1");
  PlanarTree t;
  if (r == 1) return t;
  t.kids.assign(r, PlanarTree{});
  return t;
}

int PlanarTree::leaves() const {
  if (kids.empty()) return 1;
  int n = 0;
  for (const auto& k : kids) n += k.leaves();
  return n;
}

int PlanarTree::internal() const {
  if (kids.empty()) return 0;
  int n = 1;
  for (const auto& k : kids) n += k.internal();
  return n;
}

bool PlanarTree::stable() const {
  if (kids.empty()) return true;
  if (kids.size() < 2) return false;
  for (const auto& k : kids)
    if (!k.stable()) return false;
  return true;
}

std::string PlanarTree::str() const {
  if (kids.empty()) return "*";
  std::string s = "(";
  for (const auto& k : kids) s += k.str();
  return s + ")";
}

namespace {

PlanarTree parse_at(std::string_view text, std::size_t& pos) {
  if (pos >= text.size()) throw std::invalid_argument("truncated tree");
  if (text[pos] == '*') {
    ++pos;
    return {};
  }
  if (text[pos] != '(') throw std::invalid_argument("bad tree character at " + std::to_string(pos));
  ++pos;
  PlanarTree t;
  while (pos < text.size() && text[pos] != ')') t.kids.push_back(parse_at(text, pos));
  if (pos >= text.size()) throw std::invalid_argument("unclosed tree");
  ++pos;
  if (t.kids.empty()) throw std::invalid_argument("internal vertex without kids");
  return t;
}

void cartesian(const std::vector<std::vector<PlanarTree>>& opts, std::size_t x, PlanarTree& cur,
               std::vector<PlanarTree>& out) {
  if (x == opts.size()) {
    out.push_back(cur);
    return;
  }
  for (const auto& t : opts[x]) {
    cur.kids.push_back(t);
    cartesian(opts, x + 1, cur, out);
    cur.kids.pop_back();
  }
}

}  // namespace

PlanarTree PlanarTree::parse(std::string_view text) {
  std::size_t pos = 0;
  PlanarTree t = parse_at(text, pos);
  if (pos != text.size()) throw std::invalid_argument("trailing characters after tree");
  return t;
}

std::vector<PlanarTree> enum_k(int r) {
  if (r < 1) throw std::invalid_argument("enum_k needs r >= 1");
  static std::map<int, std::vector<PlanarTree>> memo;
  if (auto it = memo.find(r); it != memo.end()) return it->second;
  std::vector<PlanarTree> out;
  if (r == 1) {
    out.push_back(PlanarTree{});
  } else {
    // compositions of r into >= 2 positive parts
    std::vector<int> parts;
    std::function<void(int)> rec = [&](int rest) {
      if (rest == 0) {
        if (parts.size() < 2) return;
        std::vector<std::vector<PlanarTree>> opts;
        for (int p : parts) opts.push_back(enum_k(p));
        PlanarTree cur;
        cartesian(opts, 0, cur, out);
        return;
      }
      for (int p = 1; p <= rest; ++p) {
        parts.push_back(p);
        rec(rest - p);
        parts.pop_back();
      }
    };
    rec(r);
  }
  std::sort(out.begin(), out.end());
  memo[r] = out;
  return out;
}

namespace {

bool graft_rec(PlanarTree& t, const PlanarTree& inner, int& slot) {
  if (t.is_leaf()) {
    if (--slot == 0) {
      t = inner;
      return true;
    }
    return false;
  }
  for (auto& k : t.kids)
    if (graft_rec(k, inner, slot)) return true;
  return false;
}

void faces_rec(const PlanarTree& root, PlanarTree& v, std::vector<PlanarTree>& out) {
  const int k = static_cast<int>(v.kids.size());
  for (int t = 2; t <= k - 1; ++t)
    for (int s = 0; s + t <= k; ++s) {
      std::vector<PlanarTree> saved = v.kids;
      PlanarTree sigma;
      sigma.kids.assign(saved.begin() + s, saved.begin() + s + t);
      std::vector<PlanarTree> nk(saved.begin(), saved.begin() + s);
      nk.push_back(sigma);
      nk.insert(nk.end(), saved.begin() + s + t, saved.end());
      v.kids = nk;
      out.push_back(root);
      v.kids = saved;
    }
  for (auto& c : v.kids) faces_rec(root, c, out);
}

}  // namespace

PlanarTree graft_k(const PlanarTree& outer, const PlanarTree& inner, int slot) {
  if (slot < 1 || slot > outer.leaves()) throw std::out_of_range("graft slot out of range");
  PlanarTree t = outer;
  graft_rec(t, inner, slot);
  return t;
}

std::vector<PlanarTree> k_faces1(const PlanarTree& t) {
  PlanarTree copy = t;
  std::vector<PlanarTree> out;
  faces_rec(copy, copy, out);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

int euler_char(const std::vector<int>& dims) {
  int e = 0;
  for (int d : dims) e += (d % 2 == 0) ? 1 : -1;
  return e;
}

std::vector<int> fvector(const std::vector<int>& dims) {
  int top = -1;
  for (int d : dims) top = std::max(top, d);
  std::vector<int> f(top + 1, 0);
  for (int d : dims) ++f.at(d);
  return f;
}

}  // namespace coppice
