#include "coppice/shapes.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

namespace coppice {

namespace {

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

int to_int(std::string_view s) {
  if (s.empty()) throw std::invalid_argument("empty integer");
  int v = 0;
  bool neg = false;
  std::size_t pos = 0;
  if (s[0] == '-') {
    neg = true;
    pos = 1;
  }
  if (pos == s.size()) throw std::invalid_argument("bad integer '" + std::string(s) + "'");
  for (; pos < s.size(); ++pos) {
    if (s[pos] < '0' || s[pos] > '9') throw std::invalid_argument("bad integer '" + std::string(s) + "'");
    v = v * 10 + (s[pos] - '0');
  }
  return neg ? -v : v;
}

std::string join_ints(const IntVec& v, char sep = ',') {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += sep;
    out += std::to_string(v[i]);
  }
  return out;
}

IntVec parse_ints(std::string_view s) {
  IntVec v;
  for (auto p : split(s, ',')) v.push_back(to_int(p));
  return v;
}

int vsum(const IntVec& v) { return std::accumulate(v.begin(), v.end(), 0); }

// prefix sums of parts in coordinate o: C[l] = sum of parts[0..l)[o]
int cum(const IntMat& parts, int l, int o) {
  int c = 0;
  for (int x = 0; x < l; ++x) c += parts[x][o];
  return c;
}

}  // namespace

// ---------------------------------------------------------------- Shape

int Shape::mass() const {
  int m = 0;
  for (const auto& row : n) m += vsum(row);
  return m;
}

int Shape::block_mass(int j) const { return vsum(n[j]); }

std::string Shape::matrix_str() const {
  std::string out;
  for (std::size_t j = 0; j < n.size(); ++j) {
    if (j) out += ';';
    out += join_ints(n[j]);
  }
  return out;
}

std::string Shape::str() const { return "r=" + std::to_string(r) + " n=" + matrix_str(); }

Shape Shape::parse_matrix(int r, std::string_view text) {
  Shape s;
  s.r = r;
  if (text.empty()) return s;
  for (auto blk : split(text, ';')) {
    IntVec row = parse_ints(blk);
    if (static_cast<int>(row.size()) != r)
      throw std::invalid_argument("block '" + std::string(blk) + "' does not have r=" + std::to_string(r) +
                                  " entries");
    for (int x : row)
      if (x < 0) throw std::invalid_argument("negative entry in shape");
    s.n.push_back(row);
  }
  return s;
}

Shape single_shape(const IntVec& n) {
  Shape s;
  s.r = static_cast<int>(n.size());
  s.n = {n};
  return s;
}

std::string ShapeMax::str() const {
  return std::to_string(r_max) + "," + std::to_string(a_max) + "," + std::to_string(mass_max);
}

ShapeMax ShapeMax::parse(std::string_view text) {
  IntVec v = parse_ints(text);
  if (v.size() != 3 || v[0] < 1 || v[1] < 1 || v[2] < 0)
    throw std::invalid_argument("shape-max must be R,A,M with R,A >= 1, M >= 0");
  return ShapeMax{v[0], v[1], v[2]};
}

bool ShapeMax::admits(const Shape& s) const {
  return s.r >= 1 && s.r <= r_max && s.a() >= 1 && s.a() <= a_max && s.mass() <= mass_max;
}

namespace {

void vectors_with_sum_at_most(int r, int budget, IntVec& cur, std::vector<IntVec>& out) {
  if (static_cast<int>(cur.size()) == r) {
    out.push_back(cur);
    return;
  }
  for (int x = 0; x <= budget; ++x) {
    cur.push_back(x);
    vectors_with_sum_at_most(r, budget - x, cur, out);
    cur.pop_back();
  }
}

void stack_blocks(const std::vector<IntVec>& rows, int a, int budget, IntMat& cur, std::vector<IntMat>& out) {
  if (static_cast<int>(cur.size()) == a) {
    out.push_back(cur);
    return;
  }
  for (const auto& row : rows) {
    int m = vsum(row);
    if (m > budget) continue;
    cur.push_back(row);
    stack_blocks(rows, a, budget - m, cur, out);
    cur.pop_back();
  }
}

}  // namespace

std::vector<Shape> shapes_within(const ShapeMax& bound) {
  std::vector<Shape> out;
  for (int r = 1; r <= bound.r_max; ++r) {
    std::vector<IntVec> rows;
    IntVec cur;
    vectors_with_sum_at_most(r, bound.mass_max, cur, rows);
    for (int a = 1; a <= bound.a_max; ++a) {
      std::vector<IntMat> mats;
      IntMat m;
      stack_blocks(rows, a, bound.mass_max, m, mats);
      for (auto& mat : mats) out.push_back(Shape{r, mat});
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------- Desc

int Desc::zero_parts() const {
  int z = 0;
  for (const auto& blk : parts)
    for (const auto& p : blk)
      if (vsum(p) == 0) ++z;
  return z;
}

namespace {

std::string parts_str(const IntMat& blk) {
  std::string out = "[";
  for (std::size_t l = 0; l < blk.size(); ++l) {
    if (l) out += '|';
    out += join_ints(blk[l]);
  }
  return out + "]";
}

IntMat parse_parts(std::string_view s) {
  if (s.size() < 2 || s.front() != '[' || s.back() != ']')
    throw std::invalid_argument("bad part list '" + std::string(s) + "'");
  s = s.substr(1, s.size() - 2);
  IntMat blk;
  if (s.empty()) return blk;
  for (auto p : split(s, '|')) blk.push_back(parse_ints(p));
  return blk;
}

}  // namespace

std::string Desc::str() const {
  std::ostringstream o;
  if (type == 1) {
    o << "T1(" << i << ',' << j << ',' << s << ',' << t << ')';
  } else if (type == 2) {
    o << "T2(" << s << ',' << t;
    for (const auto& blk : parts) o << ';' << parts_str(blk);
    o << ')';
  } else {
    o << "T3(" << j << ';' << parts_str(parts.at(0)) << ')';
  }
  return o.str();
}

Desc Desc::parse(std::string_view text) {
  if (text.size() < 4 || text[0] != 'T' || text[2] != '(' || text.back() != ')')
    throw std::invalid_argument("bad descriptor '" + std::string(text) + "'");
  std::string_view body = text.substr(3, text.size() - 4);
  Desc d;
  d.type = text[1] - '0';
  if (d.type == 1) {
    IntVec v = parse_ints(body);
    if (v.size() != 4) throw std::invalid_argument("T1 needs 4 fields");
    d.i = v[0];
    d.j = v[1];
    d.s = v[2];
    d.t = v[3];
  } else if (d.type == 2) {
    auto fields = split(body, ';');
    IntVec st = parse_ints(fields[0]);
    if (st.size() != 2) throw std::invalid_argument("T2 needs s,t");
    d.s = st[0];
    d.t = st[1];
    for (std::size_t x = 1; x < fields.size(); ++x) d.parts.push_back(parse_parts(fields[x]));
  } else if (d.type == 3) {
    auto fields = split(body, ';');
    if (fields.size() != 2) throw std::invalid_argument("T3 needs j;[parts]");
    d.j = to_int(fields[0]);
    d.parts.push_back(parse_parts(fields[1]));
  } else {
    throw std::invalid_argument("unknown descriptor type in '" + std::string(text) + "'");
  }
  if (d.str() != text) throw std::invalid_argument("non-canonical descriptor '" + std::string(text) + "'");
  return d;
}

Desc make_t1(int i, int j, int s, int t) {
  Desc d;
  d.type = 1;
  d.i = i;
  d.j = j;
  d.s = s;
  d.t = t;
  return d;
}

Desc make_t2(int s, int t, std::vector<IntMat> parts) {
  Desc d;
  d.type = 2;
  d.s = s;
  d.t = t;
  d.parts = std::move(parts);
  return d;
}

Desc make_t3(int j, IntMat parts) {
  Desc d;
  d.type = 3;
  d.j = j;
  d.parts = {std::move(parts)};
  return d;
}

namespace {

void comps_rec(const IntVec& rest, int b, bool allow_zero, IntMat& cur, std::vector<IntMat>& out) {
  if (b == 0) {
    if (vsum(rest) == 0) out.push_back(cur);
    return;
  }
  // enumerate w <= rest
  IntVec w(rest.size(), 0);
  while (true) {
    if (allow_zero || vsum(w) > 0) {
      IntVec next(rest.size());
      for (std::size_t o = 0; o < rest.size(); ++o) next[o] = rest[o] - w[o];
      cur.push_back(w);
      comps_rec(next, b - 1, allow_zero, cur, out);
      cur.pop_back();
    }
    std::size_t o = 0;
    while (o < w.size() && w[o] == rest[o]) w[o++] = 0;
    if (o == w.size()) break;
    ++w[o];
  }
}

}  // namespace

std::vector<IntMat> compositions(const IntVec& v, int b, bool allow_zero_parts) {
  std::vector<IntMat> out;
  IntMat cur;
  comps_rec(v, b, allow_zero_parts, cur, out);
  return out;
}

std::string desc_problem(const Shape& shape, const Desc& d, DescMode mode) {
  const int r = shape.r, a = shape.a();
  auto part_ok = [&](const IntMat& blk, const IntVec& target, std::size_t width) -> std::string {
    IntVec sum(width, 0);
    for (const auto& p : blk) {
      if (p.size() != width) return "part has wrong length";
      for (std::size_t o = 0; o < width; ++o) {
        if (p[o] < 0) return "negative part entry";
        sum[o] += p[o];
      }
      if (mode == DescMode::Boundary && vsum(p) == 0) return "zero part in boundary descriptor";
    }
    if (sum != target) return "parts do not sum to the block";
    return "";
  };
  if (d.type == 1) {
    if (d.i < 1 || d.i > r || d.j < 1 || d.j > a) return "T1 index out of range";
    int nij = shape.n[d.j - 1][d.i - 1];
    if (d.s < 0 || d.t < 0 || d.s + d.t > nij) return "T1 requires s,t >= 0 and s+t <= n";
    if (mode == DescMode::Boundary) {
      if (d.t < 2) return "boundary T1 requires t >= 2";
      if (r == 1 && nij - d.t + 1 < 2) return "boundary T1 leaves an unstable outer sphere";
    }
    return "";
  }
  if (d.type == 2) {
    if (r < 3) return "T2 requires r >= 3";
    if (d.s < 0 || d.t < 2 || d.t > r - 1 || d.s + d.t > r) return "T2 requires 2 <= t <= r-1, s+t <= r";
    if (static_cast<int>(d.parts.size()) != a) return "T2 needs one part list per block";
    for (int j = 0; j < a; ++j) {
      IntVec target(shape.n[j].begin() + d.s, shape.n[j].begin() + d.s + d.t);
      const auto& blk = d.parts[j];
      if (mode == DescMode::Equation && blk.empty()) return "T2 block has no parts";
      if (mode == DescMode::Boundary && blk.empty() != (vsum(target) == 0))
        return "boundary T2 block has b=0 exactly on zero columns";
      auto why = part_ok(blk, target, d.t);
      if (!why.empty()) return "T2 block " + std::to_string(j + 1) + ": " + why;
    }
    return "";
  }
  if (d.type == 3) {
    if (r < 2) return "T3 requires r >= 2";
    if (d.j < 1 || d.j > a) return "T3 block out of range";
    if (d.parts.size() != 1) return "T3 needs one part list";
    const auto& blk = d.parts[0];
    if (blk.empty()) return "T3 needs b >= 1";
    if (mode == DescMode::Boundary && blk.size() < 2) return "boundary T3 requires b >= 2";
    return part_ok(blk, shape.n[d.j - 1], r);
  }
  return "unknown descriptor type";
}

std::pair<Shape, Shape> desc_shapes(const Shape& shape, const Desc& d) {
  // Equation mode is the weaker check except for b^j = 0, which only
  // boundary descriptors use.
  auto why = desc_problem(shape, d, DescMode::Equation);
  if (!why.empty() && !desc_problem(shape, d, DescMode::Boundary).empty())
    throw std::invalid_argument("invalid descriptor " + d.str() + " for " + shape.str() + ": " + why);
  Shape in = shape, out;
  if (d.type == 1) {
    in.n[d.j - 1][d.i - 1] -= d.t - 1;
    out.r = 1;
    out.n = {{d.t}};
  } else if (d.type == 2) {
    in.r = shape.r - d.t + 1;
    out.r = d.t;
    for (int j = 0; j < shape.a(); ++j) {
      IntVec row(shape.n[j].begin(), shape.n[j].begin() + d.s);
      row.push_back(static_cast<int>(d.parts[j].size()));
      row.insert(row.end(), shape.n[j].begin() + d.s + d.t, shape.n[j].end());
      in.n[j] = row;
      for (const auto& p : d.parts[j]) out.n.push_back(p);
    }
  } else {
    const auto& blk = d.parts[0];
    in.r = 1;
    in.n = {{static_cast<int>(blk.size())}};
    out.r = shape.r;
    out.n.assign(shape.n.begin(), shape.n.begin() + (d.j - 1));
    out.n.insert(out.n.end(), blk.begin(), blk.end());
    out.n.insert(out.n.end(), shape.n.begin() + d.j, shape.n.end());
  }
  return {in, out};
}

namespace {

int zero_budget(const EnergyCap& cap, const Rat& epsilon) {
  if (!cap.bounded()) return 0;
  if (epsilon <= 0) throw std::invalid_argument("epsilon must be positive when the cap is bounded");
  // include z zero parts iff z*eps <= cap - eps
  Rat q = (*cap.value - epsilon) / epsilon;
  if (q < 0) return 0;
  return static_cast<int>(q.numerator() / q.denominator());
}

void t2_blocks(const Shape& shape, int s, int t, int j, int budget, std::vector<IntMat>& cur,
               std::vector<std::vector<IntMat>>& out) {
  if (j == shape.a()) {
    out.push_back(cur);
    return;
  }
  IntVec target(shape.n[j].begin() + s, shape.n[j].begin() + s + t);
  int m = vsum(target);
  for (int b = 1; b <= m + budget; ++b) {
    for (auto& blk : compositions(target, b, budget > 0)) {
      int z = 0;
      for (auto& p : blk)
        if (vsum(p) == 0) ++z;
      if (z > budget) continue;
      cur.push_back(blk);
      t2_blocks(shape, s, t, j + 1, budget - z, cur, out);
      cur.pop_back();
    }
  }
}

}  // namespace

std::vector<Desc> enum_desc(const Shape& shape, const EnergyCap& cap, const Rat& epsilon) {
  const int budget = zero_budget(cap, epsilon);
  std::vector<Desc> out;
  for (int j = 1; j <= shape.a(); ++j)
    for (int i = 1; i <= shape.r; ++i) {
      int nij = shape.n[j - 1][i - 1];
      for (int t = 0; t <= nij; ++t)
        for (int s = 0; s + t <= nij; ++s) out.push_back(make_t1(i, j, s, t));
    }
  if (shape.r >= 3)
    for (int t = 2; t <= shape.r - 1; ++t)
      for (int s = 0; s + t <= shape.r; ++s) {
        std::vector<std::vector<IntMat>> all;
        std::vector<IntMat> cur;
        t2_blocks(shape, s, t, 0, budget, cur, all);
        for (auto& p : all) out.push_back(make_t2(s, t, std::move(p)));
      }
  if (shape.r >= 2)
    for (int j = 1; j <= shape.a(); ++j) {
      const IntVec& target = shape.n[j - 1];
      int m = vsum(target);
      for (int b = 1; b <= m + budget; ++b)
        for (auto& blk : compositions(target, b, budget > 0)) {
          int z = 0;
          for (auto& p : blk)
            if (vsum(p) == 0) ++z;
          if (z <= budget) out.push_back(make_t3(j, blk));
        }
    }
  return out;
}

std::vector<Desc> boundary_descs(const Shape& shape) {
  std::vector<Desc> out;
  for (int j = 1; j <= shape.a(); ++j)
    for (int i = 1; i <= shape.r; ++i) {
      int nij = shape.n[j - 1][i - 1];
      for (int t = 2; t <= nij; ++t)
        for (int s = 0; s + t <= nij; ++s) {
          Desc d = make_t1(i, j, s, t);
          if (desc_problem(shape, d, DescMode::Boundary).empty()) out.push_back(d);
        }
    }
  if (shape.r >= 3)
    for (int t = 2; t <= shape.r - 1; ++t)
      for (int s = 0; s + t <= shape.r; ++s) {
        std::vector<std::vector<IntMat>> all{{}};
        for (int j = 0; j < shape.a(); ++j) {
          IntVec target(shape.n[j].begin() + s, shape.n[j].begin() + s + t);
          int m = vsum(target);
          std::vector<IntMat> options;
          if (m == 0)
            options.push_back({});
          else
            for (int b = 1; b <= m; ++b)
              for (auto& blk : compositions(target, b, false)) options.push_back(blk);
          std::vector<std::vector<IntMat>> next;
          for (auto& pre : all)
            for (auto& opt : options) {
              auto x = pre;
              x.push_back(opt);
              next.push_back(std::move(x));
            }
          all = std::move(next);
        }
        for (auto& p : all) out.push_back(make_t2(s, t, std::move(p)));
      }
  if (shape.r >= 2)
    for (int j = 1; j <= shape.a(); ++j) {
      int m = shape.block_mass(j - 1);
      for (int b = 2; b <= m; ++b)
        for (auto& blk : compositions(shape.n[j - 1], b, false)) out.push_back(make_t3(j, blk));
    }
  return out;
}

// ---------------------------------------------------------------- OneCat

OneCat OneCat::free_on(const std::vector<std::string>& objects) {
  OneCat c;
  c.free_ = true;
  for (const auto& o : objects) c.add_object(o);
  return c;
}

void OneCat::add_object(const std::string& obj) {
  if (has_object(obj)) throw std::invalid_argument("duplicate object " + obj);
  objects_.push_back(obj);
  if (free_) {
    mors_["1_" + obj] = {obj, obj};
    ids_[obj] = "1_" + obj;
  }
}

void OneCat::add_mor(const std::string& id, const std::string& src, const std::string& tgt) {
  if (!has_object(src) || !has_object(tgt)) throw std::invalid_argument("1-morphism " + id + " has unknown endpoint");
  if (mors_.count(id)) throw std::invalid_argument("duplicate 1-morphism " + id);
  if (free_ && id.find('.') != std::string::npos) throw std::invalid_argument("generator names may not contain '.'");
  mors_[id] = {src, tgt};
}

void OneCat::set_identity(const std::string& obj, const std::string& mor) {
  auto it = mors_.find(mor);
  if (it == mors_.end() || it->second.first != obj || it->second.second != obj)
    throw std::invalid_argument("identity " + mor + " is not an endomorphism of " + obj);
  ids_[obj] = mor;
}

void OneCat::set_compose(const std::string& f, const std::string& g, const std::string& h) {
  if (!has_mor(f) || !has_mor(g) || !has_mor(h)) throw std::invalid_argument("compose entry with unknown 1-morphism");
  if (tgt(f) != src(g)) throw std::invalid_argument("compose entry " + f + "," + g + " not composable");
  if (src(h) != src(f) || tgt(h) != tgt(g)) throw std::invalid_argument("compose result " + h + " has wrong endpoints");
  table_[{f, g}] = h;
}

bool OneCat::has_object(const std::string& obj) const {
  return std::find(objects_.begin(), objects_.end(), obj) != objects_.end();
}

bool OneCat::has_mor(const std::string& id) const {
  if (mors_.count(id)) return true;
  if (!free_) return false;
  auto parts = split(id, '.');
  if (parts.size() < 2) return false;
  for (std::size_t x = 0; x < parts.size(); ++x) {
    auto it = mors_.find(std::string(parts[x]));
    if (it == mors_.end() || it->first.rfind("1_", 0) == 0) return false;
    if (x && mors_.at(std::string(parts[x - 1])).second != it->second.first) return false;
  }
  return true;
}

std::string OneCat::src(const std::string& id) const {
  auto it = mors_.find(id);
  if (it != mors_.end()) return it->second.first;
  if (free_ && has_mor(id)) return mors_.at(id.substr(0, id.find('.'))).first;
  throw std::invalid_argument("unknown 1-morphism " + id);
}

std::string OneCat::tgt(const std::string& id) const {
  auto it = mors_.find(id);
  if (it != mors_.end()) return it->second.second;
  if (free_ && has_mor(id)) return mors_.at(id.substr(id.rfind('.') + 1)).second;
  throw std::invalid_argument("unknown 1-morphism " + id);
}

std::optional<std::string> OneCat::compose(const std::string& f, const std::string& g) const {
  if (!has_mor(f) || !has_mor(g) || tgt(f) != src(g)) return std::nullopt;
  if (free_) {
    if (f.rfind("1_", 0) == 0) return g;
    if (g.rfind("1_", 0) == 0) return f;
    return f + "." + g;
  }
  auto it = table_.find({f, g});
  if (it == table_.end()) return std::nullopt;
  return it->second;
}

std::string OneCat::identity(const std::string& obj) const {
  auto it = ids_.find(obj);
  if (it == ids_.end()) throw std::invalid_argument("no identity for " + obj);
  return it->second;
}

std::vector<std::string> OneCat::check_axioms() const {
  std::vector<std::string> bad;
  if (free_) return bad;
  for (const auto& o : objects_)
    if (!ids_.count(o)) bad.push_back("no identity for object " + o);
  for (const auto& [f, ef] : mors_)
    for (const auto& [g, eg] : mors_) {
      if (ef.second != eg.first) continue;
      if (!table_.count({f, g})) bad.push_back("composite " + f + "," + g + " missing");
    }
  if (!bad.empty()) return bad;
  for (const auto& [f, ef] : mors_) {
    if (ids_.count(ef.first) && compose(ids_.at(ef.first), f) != f) bad.push_back("left unit fails at " + f);
    if (ids_.count(ef.second) && compose(f, ids_.at(ef.second)) != f) bad.push_back("right unit fails at " + f);
    for (const auto& [g, eg] : mors_) {
      if (ef.second != eg.first) continue;
      std::string fg = *compose(f, g);
      for (const auto& [h, eh] : mors_) {
        if (eg.second != eh.first) continue;
        if (compose(fg, h) != compose(f, *compose(g, h))) bad.push_back("associativity fails at " + f + "," + g + "," + h);
      }
    }
  }
  return bad;
}

// ---------------------------------------------------------------- Collection

Shape Collection::shape() const {
  Shape s;
  s.r = r();
  for (const auto& blk : grid) {
    IntVec row;
    for (const auto& col : blk) row.push_back(static_cast<int>(col.size()) - 1);
    s.n.push_back(row);
  }
  return s;
}

std::string Collection::objects_str() const {
  std::string out;
  for (std::size_t x = 0; x < objects.size(); ++x) {
    if (x) out += ',';
    out += objects[x];
  }
  return out;
}

std::string format_grid(const std::vector<std::vector<std::vector<std::string>>>& grid) {
  std::string out;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    if (j) out += '|';
    for (std::size_t i = 0; i < grid[j].size(); ++i) {
      if (i) out += ';';
      for (std::size_t k = 0; k < grid[j][i].size(); ++k) {
        if (k) out += ',';
        out += grid[j][i][k];
      }
    }
  }
  return out;
}

std::vector<std::vector<std::vector<std::string>>> parse_grid(std::string_view text) {
  std::vector<std::vector<std::vector<std::string>>> g;
  if (text.empty()) return g;
  for (auto blk : split(text, '|')) {
    std::vector<std::vector<std::string>> b;
    for (auto col : split(blk, ';')) {
      std::vector<std::string> c;
      if (!col.empty())
        for (auto e : split(col, ',')) c.emplace_back(e);
      b.push_back(std::move(c));
    }
    g.push_back(std::move(b));
  }
  return g;
}

std::string Collection::grid_str() const { return format_grid(grid); }

Collection make_collection(const OneCat& cat, std::vector<std::string> objects,
                           std::vector<std::vector<std::vector<std::string>>> grid) {
  Collection L;
  if (objects.size() < 2) throw CollectionError("a collection needs at least two objects");
  for (const auto& o : objects)
    if (!cat.has_object(o)) throw CollectionError("unknown object " + o);
  L.objects = std::move(objects);
  L.grid = std::move(grid);
  const int r = L.r();
  for (int j = 0; j < L.a(); ++j) {
    if (static_cast<int>(L.grid[j].size()) != r)
      throw CollectionError("block " + std::to_string(j + 1) + " has " + std::to_string(L.grid[j].size()) +
                            " columns, expected " + std::to_string(r));
    std::string bot, top;
    for (int i = 0; i < r; ++i) {
      const auto& col = L.grid[j][i];
      if (col.empty()) throw CollectionError("empty column at (i=" + std::to_string(i + 1) + ",j=" + std::to_string(j + 1) + ")");
      for (std::size_t k = 0; k < col.size(); ++k) {
        std::string cell = "(i=" + std::to_string(i + 1) + ",j=" + std::to_string(j + 1) + ",k=" + std::to_string(k) + ")";
        if (!cat.has_mor(col[k])) throw CollectionError("unknown 1-morphism " + col[k] + " at " + cell);
        if (cat.src(col[k]) != L.objects[i] || cat.tgt(col[k]) != L.objects[i + 1])
          throw CollectionError("endpoint mismatch at " + cell + ": " + col[k] + " is not " + L.objects[i] + "->" +
                                L.objects[i + 1]);
      }
      if (i == 0) {
        bot = col.front();
        top = col.back();
      } else {
        auto b = cat.compose(bot, col.front());
        auto t = cat.compose(top, col.back());
        if (!b || !t) throw CollectionError("composite undefined in block " + std::to_string(j + 1));
        bot = *b;
        top = *t;
      }
    }
    L.bottom.push_back(bot);
    L.top.push_back(top);
  }
  return L;
}

std::pair<OneCat, Collection> free_collection(const Shape& shape) {
  std::vector<std::string> objs;
  for (int i = 0; i <= shape.r; ++i) objs.push_back("M" + std::to_string(i));
  OneCat cat = OneCat::free_on(objs);
  std::vector<std::vector<std::vector<std::string>>> grid(shape.a());
  for (int j = 0; j < shape.a(); ++j)
    for (int i = 0; i < shape.r; ++i) {
      std::vector<std::string> col;
      for (int k = 0; k <= shape.n[j][i]; ++k) {
        std::string g = "L" + std::to_string(j + 1) + ":" + std::to_string(k) + ":" + std::to_string(i + 1);
        cat.add_mor(g, objs[i], objs[i + 1]);
        col.push_back(g);
      }
      grid[j].push_back(col);
    }
  Collection L = make_collection(cat, objs, grid);
  return {std::move(cat), std::move(L)};
}

namespace {

std::string compose_all(const OneCat& cat, const std::vector<std::string>& ms) {
  std::string acc = ms.at(0);
  for (std::size_t x = 1; x < ms.size(); ++x) {
    auto c = cat.compose(acc, ms[x]);
    if (!c) throw CollectionError("composite " + acc + "," + ms[x] + " undefined");
    acc = *c;
  }
  return acc;
}

}  // namespace

std::pair<Collection, Collection> desc_collections(const OneCat& cat, const Collection& L, const Desc& d) {
  const Shape shape = L.shape();
  desc_shapes(shape, d);  // validates
  using Grid = std::vector<std::vector<std::vector<std::string>>>;
  const int r = L.r(), a = L.a();
  if (d.type == 1) {
    Grid gin = L.grid;
    const auto& col = L.grid[d.j - 1][d.i - 1];
    std::vector<std::string> cin(col.begin(), col.begin() + d.s + 1);
    cin.insert(cin.end(), col.begin() + d.s + d.t, col.end());
    gin[d.j - 1][d.i - 1] = cin;
    Grid gout{{std::vector<std::string>(col.begin() + d.s, col.begin() + d.s + d.t + 1)}};
    return {make_collection(cat, L.objects, gin),
            make_collection(cat, {L.objects[d.i - 1], L.objects[d.i]}, gout)};
  }
  if (d.type == 2) {
    std::vector<std::string> oin(L.objects.begin(), L.objects.begin() + d.s + 1);
    oin.insert(oin.end(), L.objects.begin() + d.s + d.t, L.objects.end());
    std::vector<std::string> oout(L.objects.begin() + d.s, L.objects.begin() + d.s + d.t + 1);
    Grid gin(a), gout;
    for (int j = 0; j < a; ++j) {
      const auto& parts = d.parts[j];
      const int b = static_cast<int>(parts.size());
      for (int i = 0; i < d.s; ++i) gin[j].push_back(L.grid[j][i]);
      std::vector<std::string> mid;
      for (int c = 0; c <= b; ++c) {
        std::vector<std::string> ms;
        for (int o = 0; o < d.t; ++o) ms.push_back(L.grid[j][d.s + o][cum(parts, c, o)]);
        mid.push_back(compose_all(cat, ms));
      }
      gin[j].push_back(mid);
      for (int i = d.s + d.t; i < r; ++i) gin[j].push_back(L.grid[j][i]);
      for (int l = 0; l < b; ++l) {
        std::vector<std::vector<std::string>> blk;
        for (int o = 0; o < d.t; ++o) {
          const auto& col = L.grid[j][d.s + o];
          blk.emplace_back(col.begin() + cum(parts, l, o), col.begin() + cum(parts, l + 1, o) + 1);
        }
        gout.push_back(blk);
      }
    }
    return {make_collection(cat, oin, gin), make_collection(cat, oout, gout)};
  }
  const auto& parts = d.parts[0];
  const int b = static_cast<int>(parts.size());
  const auto& blk = L.grid[d.j - 1];
  std::vector<std::string> col;
  for (int c = 0; c <= b; ++c) {
    std::vector<std::string> ms;
    for (int i = 0; i < r; ++i) ms.push_back(blk[i][cum(parts, c, i)]);
    col.push_back(compose_all(cat, ms));
  }
  Grid gin{{col}};
  Grid gout(L.grid.begin(), L.grid.begin() + (d.j - 1));
  for (int l = 0; l < b; ++l) {
    std::vector<std::vector<std::string>> nb;
    for (int i = 0; i < r; ++i) nb.emplace_back(blk[i].begin() + cum(parts, l, i), blk[i].begin() + cum(parts, l + 1, i) + 1);
    gout.push_back(nb);
  }
  gout.insert(gout.end(), L.grid.begin() + d.j, L.grid.end());
  return {make_collection(cat, {L.objects.front(), L.objects.back()}, gin), make_collection(cat, L.objects, gout)};
}

Collection glue_collections(const OneCat& cat, const Desc& d, const Collection& in, const Collection& out) {
  using Grid = std::vector<std::vector<std::vector<std::string>>>;
  auto concat_blocks = [](const Grid& g, int first, int count, int width) {
    std::vector<std::vector<std::string>> cols(width);
    for (int l = 0; l < count; ++l)
      for (int o = 0; o < width; ++o) {
        const auto& src = g.at(first + l).at(o);
        cols[o].insert(cols[o].end(), src.begin() + (l ? 1 : 0), src.end());
      }
    return cols;
  };
  std::vector<std::string> objs;
  Grid grid;
  if (d.type == 1) {
    if (d.j < 1 || d.j > in.a() || d.i < 1 || d.i > in.r() || out.a() != 1 || out.r() != 1)
      throw CollectionError("T1 gluing: shapes do not match");
    objs = in.objects;
    grid = in.grid;
    const auto& col = in.grid[d.j - 1][d.i - 1];
    if (static_cast<int>(col.size()) < d.s + 2) throw CollectionError("T1 gluing: column too short");
    std::vector<std::string> c(col.begin(), col.begin() + d.s);
    c.insert(c.end(), out.grid[0][0].begin(), out.grid[0][0].end());
    c.insert(c.end(), col.begin() + d.s + 2, col.end());
    grid[d.j - 1][d.i - 1] = c;
  } else if (d.type == 2) {
    if (d.s + 1 >= static_cast<int>(in.objects.size()) || out.r() != d.t)
      throw CollectionError("T2 gluing: shapes do not match");
    objs.assign(in.objects.begin(), in.objects.begin() + d.s + 1);
    objs.insert(objs.end(), out.objects.begin() + 1, out.objects.end() - 1);
    objs.insert(objs.end(), in.objects.begin() + d.s + 1, in.objects.end());
    int first = 0;
    for (int j = 0; j < in.a(); ++j) {
      int b = static_cast<int>(d.parts.at(j).size());
      if (b == 0) throw CollectionError("T2 gluing needs b >= 1 in every block");
      std::vector<std::vector<std::string>> blk(in.grid[j].begin(), in.grid[j].begin() + d.s);
      if (first + b > out.a()) throw CollectionError("T2 gluing: too few out blocks");
      auto mid = concat_blocks(out.grid, first, b, d.t);
      blk.insert(blk.end(), mid.begin(), mid.end());
      blk.insert(blk.end(), in.grid[j].begin() + d.s + 1, in.grid[j].end());
      grid.push_back(blk);
      first += b;
    }
  } else {
    int b = static_cast<int>(d.parts.at(0).size());
    if (d.j < 1 || d.j + b - 1 > out.a()) throw CollectionError("T3 gluing: shapes do not match");
    objs = out.objects;
    grid.assign(out.grid.begin(), out.grid.begin() + (d.j - 1));
    grid.push_back(concat_blocks(out.grid, d.j - 1, b, out.r()));
    grid.insert(grid.end(), out.grid.begin() + (d.j - 1 + b), out.grid.end());
  }
  Collection L = make_collection(cat, objs, grid);
  if (!desc_problem(L.shape(), d, DescMode::Equation).empty()) throw CollectionError("glued shape rejects " + d.str());
  auto [cin, cout] = desc_collections(cat, L, d);
  if (!(cin == in) || !(cout == out)) throw CollectionError("collections do not glue along " + d.str());
  return L;
}

// ---------------------------------------------------------------- gluing index

std::string Slot::str() const {
  std::string side = out ? "out " : "in ";
  if (beta) return side + "beta(j=" + std::to_string(j) + ")";
  return side + "alpha(i=" + std::to_string(i) + ",j=" + std::to_string(j) + ",k=" + std::to_string(k) + ")";
}

namespace {

Slot aslot(bool out, int j, int i, int k) { return Slot{out, false, j, i, k}; }
Slot bslot(bool out, int j) { return Slot{out, true, j, 0, 0}; }

}  // namespace

GlueIndex glue_index(const Shape& shape, const Desc& d) {
  desc_shapes(shape, d);
  GlueIndex g;
  const int r = shape.r, a = shape.a();
  g.alpha.resize(a);
  for (int j = 1; j <= a; ++j) {
    g.alpha[j - 1].resize(r);
    for (int i = 1; i <= r; ++i)
      for (int k = 1; k <= shape.n[j - 1][i - 1]; ++k) {
        Slot sl;
        if (d.type == 1) {
          if (i != d.i || j != d.j || k <= d.s)
            sl = aslot(false, j, i, k);
          else if (k <= d.s + d.t)
            sl = aslot(true, 1, 1, k - d.s);
          else
            sl = aslot(false, j, i, k - d.t + 1);
        } else if (d.type == 2) {
          if (i <= d.s) {
            sl = aslot(false, j, i, k);
          } else if (i <= d.s + d.t) {
            const int o = i - d.s - 1;
            const auto& parts = d.parts[j - 1];
            int first = 0;
            for (int x = 0; x < j - 1; ++x) first += static_cast<int>(d.parts[x].size());
            int l = 0;
            while (!(cum(parts, l, o) < k && k <= cum(parts, l + 1, o))) ++l;
            sl = aslot(true, first + l + 1, o + 1, k - cum(parts, l, o));
          } else {
            sl = aslot(false, j, i - d.t + 1, k);
          }
        } else {
          const int b = static_cast<int>(d.parts[0].size());
          if (j < d.j) {
            sl = aslot(true, j, i, k);
          } else if (j > d.j) {
            sl = aslot(true, j + b - 1, i, k);
          } else {
            const auto& parts = d.parts[0];
            int l = 0;
            while (!(cum(parts, l, i - 1) < k && k <= cum(parts, l + 1, i - 1))) ++l;
            sl = aslot(true, d.j + l, i, k - cum(parts, l, i - 1));
          }
        }
        g.alpha[j - 1][i - 1].push_back(sl);
      }
    if (d.type == 3) {
      const int b = static_cast<int>(d.parts[0].size());
      g.beta.push_back(j < d.j ? bslot(true, j) : j == d.j ? bslot(false, 1) : bslot(true, j + b - 1));
    } else {
      g.beta.push_back(bslot(false, j));
    }
  }
  if (d.type == 1) {
    g.fiber.push_back({aslot(false, d.j, d.i, d.s + 1), bslot(true, 1)});
  } else if (d.type == 2) {
    int first = 0;
    for (int j = 1; j <= a; ++j) {
      int b = static_cast<int>(d.parts[j - 1].size());
      for (int k = 1; k <= b; ++k) g.fiber.push_back({aslot(false, j, d.s + 1, k), bslot(true, first + k)});
      first += b;
    }
  } else {
    const int b = static_cast<int>(d.parts[0].size());
    for (int k = 1; k <= b; ++k) g.fiber.push_back({aslot(false, 1, 1, k), bslot(true, d.j + k - 1)});
  }
  return g;
}

std::string EvalGrid::alpha_str() const { return format_grid(alpha); }

std::string EvalGrid::beta_str() const {
  std::string out;
  for (std::size_t j = 0; j < beta.size(); ++j) {
    if (j) out += ',';
    out += beta[j];
  }
  return out;
}

namespace {

const std::string* eval_at(const Slot& s, const EvalGrid& in, const EvalGrid& out) {
  const EvalGrid& g = s.out ? out : in;
  if (s.beta) {
    if (s.j < 1 || s.j > static_cast<int>(g.beta.size())) return nullptr;
    return &g.beta[s.j - 1];
  }
  if (s.j < 1 || s.j > static_cast<int>(g.alpha.size())) return nullptr;
  const auto& blk = g.alpha[s.j - 1];
  if (s.i < 1 || s.i > static_cast<int>(blk.size())) return nullptr;
  const auto& col = blk[s.i - 1];
  if (s.k < 1 || s.k > static_cast<int>(col.size())) return nullptr;
  return &col[s.k - 1];
}

std::string glue_evals_impl(const Shape& shape, const Desc& d, const EvalGrid& in, const EvalGrid& out,
                            EvalGrid& res) {
  GlueIndex g = glue_index(shape, d);
  for (const auto& [sa, sb] : g.fiber) {
    const std::string* x = eval_at(sa, in, out);
    const std::string* y = eval_at(sb, in, out);
    if (!x) return "missing slot " + sa.str();
    if (!y) return "missing slot " + sb.str();
    if (*x != *y) return "fiber condition fails: " + sa.str() + "=" + *x + " but " + sb.str() + "=" + *y;
  }
  res.alpha.assign(shape.a(), {});
  res.beta.clear();
  for (int j = 0; j < shape.a(); ++j) {
    res.alpha[j].resize(shape.r);
    for (int i = 0; i < shape.r; ++i)
      for (const auto& sl : g.alpha[j][i]) {
        const std::string* x = eval_at(sl, in, out);
        if (!x) return "missing slot " + sl.str();
        res.alpha[j][i].push_back(*x);
      }
    const std::string* y = eval_at(g.beta[j], in, out);
    if (!y) return "missing slot " + g.beta[j].str();
    res.beta.push_back(*y);
  }
  return "";
}

}  // namespace

EvalGrid glue_evals(const Shape& shape, const Desc& d, const EvalGrid& in, const EvalGrid& out) {
  EvalGrid res;
  auto why = glue_evals_impl(shape, d, in, out, res);
  if (!why.empty()) throw FiberError(why);
  return res;
}

std::optional<EvalGrid> try_glue_evals(const Shape& shape, const Desc& d, const EvalGrid& in, const EvalGrid& out) {
  EvalGrid res;
  if (!glue_evals_impl(shape, d, in, out, res).empty()) return std::nullopt;
  return res;
}

// ---------------------------------------------------------------- factorizations

Factorization Factorization::start(const Collection& L) {
  Factorization f;
  f.factors.push_back(L);
  const Shape s = L.shape();
  for (int j = 1; j <= s.a(); ++j) {
    for (int i = 1; i <= s.r; ++i)
      for (int k = 1; k <= s.n[j - 1][i - 1]; ++k) f.external.push_back({aslot(false, j, i, k), Port{0, aslot(false, j, i, k)}});
    f.external.push_back({bslot(false, j), Port{0, bslot(false, j)}});
  }
  return f;
}

Factorization Factorization::apply(const OneCat& cat, int factor, const Desc& d) const {
  const Collection& C = factors.at(factor);
  auto [cin, cout] = desc_collections(cat, C, d);
  GlueIndex g = glue_index(C.shape(), d);
  Factorization res = *this;
  const int fresh = static_cast<int>(factors.size());
  res.factors[factor] = cin;
  res.factors.push_back(cout);
  auto remap = [&](Port& p) {
    if (p.factor != factor) return;
    Slot s = p.slot.beta ? g.beta.at(p.slot.j - 1) : g.alpha.at(p.slot.j - 1).at(p.slot.i - 1).at(p.slot.k - 1);
    p.factor = s.out ? fresh : factor;
    s.out = false;
    p.slot = s;
  };
  for (auto& e : res.external) remap(e.second);
  for (auto& e : res.internal) {
    remap(e.first);
    remap(e.second);
  }
  for (auto [sa, sb] : g.fiber) {
    sa.out = false;
    sb.out = false;
    res.internal.push_back({Port{factor, sa}, Port{fresh, sb}});
  }
  return res;
}

Factorization Factorization::canonical() const {
  std::vector<int> order(factors.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<std::string> keys;
  for (const auto& c : factors) keys.push_back(c.key());
  std::sort(order.begin(), order.end(), [&](int x, int y) { return keys[x] < keys[y]; });
  for (std::size_t x = 1; x < order.size(); ++x)
    if (keys[order[x]] == keys[order[x - 1]]) throw std::logic_error("repeated factor " + keys[order[x]]);
  std::vector<int> rank(factors.size());
  for (std::size_t x = 0; x < order.size(); ++x) rank[order[x]] = static_cast<int>(x);
  Factorization res;
  for (int x : order) res.factors.push_back(factors[x]);
  for (auto e : external) {
    e.second.factor = rank[e.second.factor];
    res.external.push_back(e);
  }
  for (auto e : internal) {
    e.first.factor = rank[e.first.factor];
    e.second.factor = rank[e.second.factor];
    res.internal.push_back(e);
  }
  std::sort(res.external.begin(), res.external.end());
  std::sort(res.internal.begin(), res.internal.end());
  return res;
}

bool Factorization::operator==(const Factorization& o) const {
  Factorization x = canonical(), y = o.canonical();
  return x.factors == y.factors && x.external == y.external && x.internal == y.internal;
}

std::string Factorization::str() const {
  Factorization c = canonical();
  std::ostringstream os;
  for (std::size_t x = 0; x < c.factors.size(); ++x) os << "F" << x << " " << c.factors[x].key() << "\n";
  for (const auto& [s, p] : c.external) os << s.str() << " -> F" << p.factor << " " << p.slot.str() << "\n";
  for (const auto& [p, q] : c.internal)
    os << "F" << p.factor << " " << p.slot.str() << " ~ F" << q.factor << " " << q.slot.str() << "\n";
  return os.str();
}

bool assoc_shape_commute(const Shape& shape, const std::vector<ChainStep>& chain1,
                         const std::vector<ChainStep>& chain2) {
  try {
    auto [cat, L] = free_collection(shape);
    Factorization f1 = Factorization::start(L), f2 = f1;
    for (const auto& st : chain1) f1 = f1.apply(cat, st.factor, st.d);
    for (const auto& st : chain2) f2 = f2.apply(cat, st.factor, st.d);
    return f1 == f2;
  } catch (const std::exception&) {
    return false;
  }
}

}  // namespace coppice
