#pragma once

// Brute-force references used by the tests.  Nothing here calls into the
// library; trees are read from their printed form.

#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/rational.hpp>

namespace oracle {

using Interval = std::pair<int, int>;  // leaves lo..hi, 1-based inclusive
using Face = std::set<Interval>;

inline bool compatible(const Interval& x, const Interval& y) {
  if (x.second < y.first || y.second < x.first) return true;
  return (x.first <= y.first && y.second <= x.second) || (y.first <= x.first && x.second <= y.second);
}

// proper intervals of length 2..r-1; each nested-or-disjoint family is a
// face of K_r of dimension r - 2 - |family| (dissections of an (r+1)-gon)
inline std::vector<Interval> proper_intervals(int r) {
  std::vector<Interval> out;
  for (int lo = 1; lo <= r; ++lo)
    for (int hi = lo + 1; hi <= r; ++hi)
      if (hi - lo + 1 < r) out.push_back({lo, hi});
  return out;
}

inline void grow(const std::vector<Interval>& all, std::size_t from, Face& cur, std::set<Face>& out) {
  out.insert(cur);
  for (std::size_t x = from; x < all.size(); ++x) {
    bool ok = true;
    for (const auto& y : cur) ok = ok && compatible(all[x], y);
    if (!ok) continue;
    cur.insert(all[x]);
    grow(all, x + 1, cur, out);
    cur.erase(all[x]);
  }
}

inline std::set<Face> k_faces(int r) {
  std::set<Face> out;
  Face cur;
  grow(proper_intervals(r), 0, cur, out);
  return out;
}

inline int k_dim(int r, const Face& f) { return r < 2 ? 0 : r - 2 - static_cast<int>(f.size()); }

inline std::vector<int> k_fvector(int r) {
  std::vector<int> f(r < 2 ? 1 : r - 1, 0);
  for (const auto& x : k_faces(r)) ++f[k_dim(r, x)];
  return f;
}

// faces one dimension down: add one compatible interval
inline std::set<Face> k_facets(int r, const Face& f) {
  std::set<Face> out;
  for (const auto& x : proper_intervals(r)) {
    if (f.count(x)) continue;
    bool ok = true;
    for (const auto& y : f) ok = ok && compatible(x, y);
    if (ok) {
      Face g = f;
      g.insert(x);
      out.insert(g);
    }
  }
  return out;
}

// "*" is a leaf, "(...)" an internal vertex.  Returns the leaf intervals of
// the internal vertices other than the root.
inline Face tree_face(const std::string& s) {
  Face out;
  std::vector<int> open;
  int leaf = 0;
  for (std::size_t x = 0; x < s.size(); ++x) {
    if (s[x] == '*') {
      ++leaf;
    } else if (s[x] == '(') {
      open.push_back(leaf + 1);
    } else if (s[x] == ')') {
      int lo = open.back();
      open.pop_back();
      if (!open.empty()) out.insert({lo, leaf});
    } else {
      throw std::invalid_argument("bad tree text");
    }
  }
  return out;
}

inline int tree_leaves(const std::string& s) {
  int n = 0;
  for (char c : s) n += c == '*';
  return n;
}

// parity bookkeeping for Novikov elements
using Q = boost::rational<std::int64_t>;
inline std::vector<Q> parity(const std::vector<Q>& es) {
  std::map<Q, int> m;
  for (const auto& e : es) m[e] ^= 1;
  std::vector<Q> out;
  for (const auto& [e, b] : m)
    if (b) out.push_back(e);
  return out;
}

inline std::vector<Q> parity_product(const std::vector<Q>& a, const std::vector<Q>& b) {
  std::vector<Q> all;
  for (const auto& x : a)
    for (const auto& y : b) all.push_back(x + y);
  return parity(all);
}

// integer matrix square, N[row][col]
inline std::vector<std::vector<long>> int_square(const std::vector<std::vector<int>>& n) {
  const std::size_t d = n.size();
  std::vector<std::vector<long>> out(d, std::vector<long>(d, 0));
  for (std::size_t r = 0; r < d; ++r)
    for (std::size_t k = 0; k < d; ++k)
      for (std::size_t c = 0; c < d; ++c) out[r][c] += static_cast<long>(n[r][k]) * n[k][c];
  return out;
}

// compositions of m into b ordered nonnegative parts
inline long compositions(int m, int b) {
  if (b == 0) return m == 0;
  long c = 1;
  for (int x = 1; x <= b - 1; ++x) c = c * (m + x) / x;
  return c;
}

}  // namespace oracle
