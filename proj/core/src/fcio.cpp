#include <algorithm>
#include <fstream>
#include <sstream>

#include "coppice/flowcat.hpp"

namespace coppice {

namespace {

std::vector<std::string> split_keep(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string::npos ? std::string::npos : pos - start));
    if (pos == std::string::npos) return out;
    start = pos + 1;
  }
}

std::vector<std::string> words(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> w;
  std::string x;
  while (in >> x) w.push_back(x);
  return w;
}

bool bad_token(const std::string& s) {
  return s.empty() || s.find_first_of(" \t,;|=*") != std::string::npos;
}

std::string strat_field(const std::optional<Coppice>& c) { return c ? " stratum=" + c->str() : ""; }

std::string body(const Collection& c, const EvalGrid& ev, const Rat& e) {
  return "objects=" + c.objects_str() + " grid=" + c.grid_str() + " alpha=" + ev.alpha_str() + " beta=" + ev.beta_str() +
         " energy=" + format_rat(e);
}

}  // namespace

EvalGrid parse_evals(const Shape& s, const std::string& alpha, const std::string& beta) {
  EvalGrid ev;
  auto blocks = split_keep(alpha, '|');
  if (static_cast<int>(blocks.size()) != s.a()) throw FlowCatError("alpha has " + std::to_string(blocks.size()) + " blocks, expected " + std::to_string(s.a()));
  for (const auto& b : blocks) {
    auto cols = split_keep(b, ';');
    if (static_cast<int>(cols.size()) != s.r) throw FlowCatError("alpha block has " + std::to_string(cols.size()) + " columns, expected " + std::to_string(s.r));
    std::vector<std::vector<std::string>> blk;
    for (const auto& c : cols) blk.push_back(c.empty() ? std::vector<std::string>{} : split_keep(c, ','));
    ev.alpha.push_back(std::move(blk));
  }
  ev.beta = split_keep(beta, ',');
  if (static_cast<int>(ev.beta.size()) != s.a()) throw FlowCatError("beta has the wrong number of entries");
  return ev;
}

std::string format_flowcat(const FlowCat2& fc) {
  if (fc.cat.is_free()) throw FlowCatError("free categories are not serialized");
  std::ostringstream o;
  o << "format 1\n";
  o << "shape_max " << fc.bounds.str() << "\n";
  o << "cap " << fc.cap.str() << "\n";
  o << "epsilon " << format_rat(fc.epsilon) << "\n";
  if (!fc.genspec.empty()) o << "genspec " << fc.genspec << "\n";
  o << "OBJECTS\n";
  for (const auto& x : fc.cat.objects()) o << x << "\n";
  o << "ONEMORS\n";
  for (const auto& [id, st] : fc.cat.mors()) o << "mor " << id << " " << st.first << " " << st.second << "\n";
  for (const auto& x : fc.cat.objects())
    if (fc.cat.identities().count(x)) o << "id " << x << " " << fc.cat.identities().at(x) << "\n";
  for (const auto& [fg, h] : fc.cat.table()) o << "comp " << fg.first << " " << fg.second << " " << h << "\n";
  o << "TWOMOR_GENERATORS\n";
  for (const auto& [id, g] : fc.sig.gens) o << "gen " << id << " " << g.src << " " << g.tgt << "\n";
  o << "POINTS\n";
  for (const auto& [id, p] : fc.points) o << "point " << id << " " << body(p.collection, p.evals, p.energy) << strat_field(p.stratum) << "\n";
  o << "EDGES\n";
  for (const auto& [id, e] : fc.edges) {
    o << "edge " << id << " " << body(e.collection, e.evals, e.energy) << strat_field(e.stratum) << "\n";
    auto ends = e.ends;
    std::sort(ends.begin(), ends.end(), [](const Endpoint& x, const Endpoint& y) {
      return std::make_tuple(x.desc.str(), x.left, x.right) < std::make_tuple(y.desc.str(), y.left, y.right);
    });
    for (const auto& en : ends)
      o << "end desc=" << en.desc.str() << " left=" << en.left << " right=" << en.right << strat_field(en.stratum) << "\n";
  }
  return o.str();
}

FlowCat2 parse_flowcat(const std::string& text) {
  FlowCat2 fc;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  const std::vector<std::string> order{"HEADER", "OBJECTS", "ONEMORS", "TWOMOR_GENERATORS", "POINTS", "EDGES"};
  std::size_t section = 0;
  bool have_format = false, have_bounds = false, have_cap = false, have_eps = false;
  std::string last_edge;
  std::vector<std::pair<int, std::string>> refs;  // (line, point id)
  auto fail = [&](const std::string& msg) -> void { throw FlowCatError("line " + std::to_string(lineno) + ": " + msg); };

  auto fields = [&](const std::vector<std::string>& w, std::size_t from, const std::vector<std::string>& required,
                    const std::vector<std::string>& optional) {
    std::map<std::string, std::string> f;
    for (std::size_t x = from; x < w.size(); ++x) {
      auto eq = w[x].find('=');
      if (eq == std::string::npos) fail("expected key=value, got '" + w[x] + "'");
      std::string k = w[x].substr(0, eq);
      if (std::find(required.begin(), required.end(), k) == required.end() &&
          std::find(optional.begin(), optional.end(), k) == optional.end())
        fail("unknown field '" + k + "'");
      if (f.count(k)) fail("repeated field '" + k + "'");
      f[k] = w[x].substr(eq + 1);
    }
    for (const auto& k : required)
      if (!f.count(k)) fail("missing field '" + k + "'");
    return f;
  };
  auto moduli_body = [&](const std::map<std::string, std::string>& f, Collection& c, EvalGrid& ev, Rat& e,
                         std::optional<Coppice>& st) {
    try {
      c = make_collection(fc.cat, split_keep(f.at("objects"), ','), parse_grid(f.at("grid")));
      ev = parse_evals(c.shape(), f.at("alpha"), f.at("beta"));
      e = parse_rat(f.at("energy"));
      if (f.count("stratum")) st = Coppice::parse(f.at("stratum"));
    } catch (const std::exception& err) {
      fail(err.what());
    }
  };

  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto sec = std::find(order.begin(), order.end(), line);
    if (sec != order.end() && sec != order.begin()) {
      std::size_t idx = static_cast<std::size_t>(sec - order.begin());
      if (idx != section + 1) fail("section " + line + " out of order");
      if (section == 0 && !(have_format && have_bounds && have_cap && have_eps)) fail("incomplete header");
      section = idx;
      continue;
    }
    auto w = words(line);
    const std::string& kw = w[0];
    try {
      if (section == 0) {
        if (kw == "genspec") {
          fc.genspec = line.substr(line.find(' ') == std::string::npos ? line.size() : line.find(' ') + 1);
          continue;
        }
        if (w.size() != 2) fail("header line needs one value");
        if (kw == "format") {
          if (w[1] != "1") fail("unsupported format version " + w[1]);
          have_format = true;
        } else if (kw == "shape_max") {
          fc.bounds = ShapeMax::parse(w[1]);
          have_bounds = true;
        } else if (kw == "cap") {
          fc.cap = w[1] == "inf" ? EnergyCap::unbounded() : EnergyCap::at(parse_rat(w[1]));
          have_cap = true;
        } else if (kw == "epsilon") {
          fc.epsilon = parse_rat(w[1]);
          have_eps = true;
        } else {
          fail("unknown header field '" + kw + "'");
        }
      } else if (section == 1) {
        if (w.size() != 1 || bad_token(kw)) fail("bad object name");
        fc.cat.add_object(kw);
      } else if (section == 2) {
        if (kw == "mor" && w.size() == 4) {
          if (bad_token(w[1])) fail("bad 1-morphism id");
          fc.cat.add_mor(w[1], w[2], w[3]);
        } else if (kw == "id" && w.size() == 3) {
          fc.cat.set_identity(w[1], w[2]);
        } else if (kw == "comp" && w.size() == 4) {
          fc.cat.set_compose(w[1], w[2], w[3]);
        } else {
          fail("unknown 1-morphism record");
        }
      } else if (section == 3) {
        if (kw != "gen" || w.size() != 4) fail("unknown generator record");
        if (bad_token(w[1])) fail("bad generator id");
        if (!fc.cat.has_mor(w[2]) || !fc.cat.has_mor(w[3])) fail("generator " + w[1] + " has unknown 1-morphisms");
        if (fc.cat.src(w[2]) != fc.cat.src(w[3]) || fc.cat.tgt(w[2]) != fc.cat.tgt(w[3]))
          fail("generator " + w[1] + " between non-parallel 1-morphisms");
        fc.sig.add(w[1], w[2], w[3]);
      } else if (section == 4) {
        if (kw != "point" || w.size() < 2) fail("unknown point record");
        auto f = fields(w, 2, {"objects", "grid", "alpha", "beta", "energy"}, {"stratum"});
        ModuliPoint p;
        p.id = w[1];
        if (p.id.empty() || p.id.find_first_of(" \t,;|=") != std::string::npos) fail("bad point id");
        moduli_body(f, p.collection, p.evals, p.energy, p.stratum);
        fc.add_point(std::move(p));
      } else {
        if (kw == "edge") {
          if (w.size() < 2) fail("edge needs an id");
          auto f = fields(w, 2, {"objects", "grid", "alpha", "beta", "energy"}, {"stratum"});
          ModuliEdge e;
          e.id = w[1];
          moduli_body(f, e.collection, e.evals, e.energy, e.stratum);
          last_edge = e.id;
          fc.add_edge(std::move(e));
        } else if (kw == "end") {
          if (last_edge.empty()) fail("endpoint before any edge");
          auto f = fields(w, 1, {"desc", "left", "right"}, {"stratum"});
          Endpoint en;
          en.desc = Desc::parse(f["desc"]);
          en.left = f["left"];
          en.right = f["right"];
          if (f.count("stratum")) en.stratum = Coppice::parse(f["stratum"]);
          refs.push_back({lineno, en.left});
          refs.push_back({lineno, en.right});
          fc.edges.at(last_edge).ends.push_back(std::move(en));
        } else {
          fail("unknown edge record");
        }
      }
    } catch (const FlowCatError&) {
      throw;
    } catch (const std::exception& err) {
      fail(err.what());
    }
  }
  if (section != order.size() - 1) throw FlowCatError("line " + std::to_string(lineno) + ": missing sections");
  for (const auto& [ln, id] : refs)
    if (!fc.points.count(id))
      throw FlowCatError("line " + std::to_string(ln) + ": endpoint references missing point id '" + id + "'");
  return fc;
}

FlowCat2 load_flowcat(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FlowCatError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_flowcat(buf.str());
}

void save_flowcat(const FlowCat2& fc, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FlowCatError("cannot write " + path);
  out << format_flowcat(fc);
}

}  // namespace coppice
