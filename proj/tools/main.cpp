#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "coppice/gen.hpp"
#include "coppice/linearize.hpp"
#include "coppice/polytopes.hpp"

using namespace coppice;

namespace {

struct Opts {
  int r = 0;
  std::string n, shape_max, cap, epsilon, in, out, family, variant;
  std::uint64_t seed = 0;
  int dim = 0;
  bool fvector = false, stable_only = false;
};

struct Usage : std::runtime_error {
  using std::runtime_error::runtime_error;
};

IntVec parse_row(const std::string& s) {
  IntVec v;
  if (s.empty()) return v;
  std::stringstream in(s);
  std::string x;
  while (std::getline(in, x, ',')) v.push_back(std::stoi(x));
  return v;
}

Shape shape_arg(const Opts& o) {
  if (o.n.empty()) throw Usage("--n is required");
  if (o.n.find(';') == std::string::npos && o.r == 0) return single_shape(parse_row(o.n));
  if (o.r <= 0) throw Usage("--r is required for a stacked shape");
  return Shape::parse_matrix(o.r, o.n);
}

EnergyCap cap_arg(const std::string& s, const EnergyCap& dflt) {
  if (s.empty()) return dflt;
  return s == "inf" ? EnergyCap::unbounded() : EnergyCap::at(parse_rat(s));
}

void emit(const Opts& o, const std::string& text) {
  if (o.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(o.out, std::ios::binary);
  if (!f) throw FlowCatError("cannot write " + o.out);
  f << text;
}

void print_fvector(const std::vector<int>& dims) {
  auto f = fvector(dims);
  for (std::size_t x = 0; x < f.size(); ++x) std::cout << (x ? " " : "") << f[x];
  std::cout << "\n";
}

int k_enum(const Opts& o) {
  if (o.r < 1) throw Usage("--r must be positive");
  auto ts = enum_k(o.r);
  std::vector<int> dims;
  for (const auto& t : ts) dims.push_back(t.dim());
  if (o.fvector) {
    print_fvector(dims);
    return 0;
  }
  for (const auto& t : ts) std::cout << t.dim() << " " << t.str() << "\n";
  return 0;
}

int strata_out(const Opts& o, const std::vector<Coppice>& cs) {
  std::vector<int> dims;
  for (const auto& c : cs) dims.push_back(w_dim(c));
  if (o.fvector) {
    print_fvector(dims);
    return 0;
  }
  for (std::size_t x = 0; x < cs.size(); ++x) std::cout << dims[x] << " " << cs[x].str() << "\n";
  return 0;
}

int w_enum(const Opts& o) {
  if (o.n.find(';') != std::string::npos) throw Usage("w enum takes a single block");
  return strata_out(o, enum_w(parse_row(o.n), o.stable_only));
}

int fiber_enum(const Opts& o) {
  Shape s = shape_arg(o);
  auto cs = enum_fiber(s);
  if (o.stable_only) {
    std::vector<Coppice> keep;
    for (auto& c : cs)
      if (is_stable(c)) keep.push_back(c);
    cs = keep;
  }
  return strata_out(o, cs);
}

int desc_cmd(const Opts& o) {
  Shape s = shape_arg(o);
  EnergyCap cap = cap_arg(o.cap, EnergyCap::at(Rat(3)));
  Rat eps = o.epsilon.empty() ? Rat(1) : parse_rat(o.epsilon);
  for (const auto& d : enum_desc(s, cap, eps)) {
    auto [in, out] = desc_shapes(s, d);
    std::cout << d.str() << " in=" << in.str() << " out=" << out.str() << "\n";
  }
  return 0;
}

FlowCat2 input(const Opts& o) {
  if (o.in.empty()) throw Usage("--in is required");
  return load_flowcat(o.in);
}

int validate_cmd(const Opts& o) {
  Report rep = validate(input(o));
  std::cout << rep.str();
  if (!rep.str().empty() && rep.str().back() != '\n') std::cout << "\n";
  std::cout << rep.entries.size() << " violations\n";
  return rep.empty() ? 0 : 1;
}

int mu_cmd(const Opts& o) {
  MuFamily mus = extract_all(input(o));
  std::ostringstream s;
  for (const auto& [k, t] : mus.tensors) {
    s << "collection " << k << "\n";
    for (const auto& [g, v] : t.entries) s << "  " << g.alpha_str() << " -> " << g.beta_str() << " : " << v.str() << "\n";
  }
  emit(o, s.str());
  return 0;
}

int check_cmd(const std::string& which, const Opts& o) {
  FlowCat2 fc = input(o);
  EnergyCap cap = cap_arg(o.cap, fc.cap);
  if (!o.epsilon.empty()) fc.epsilon = parse_rat(o.epsilon);
  MuFamily mus = extract_all(fc);
  if (which == "compat") {
    bool ok = true;
    for (int rc : {1, 2}) {
      auto res = check_fiber_compat_detail(mus, rc);
      std::cout << "r_c=" << rc << " " << (res.ok ? "ok" : "fails at " + res.locus) << "\n";
      ok = ok && res.ok;
    }
    return ok ? 0 : 1;
  }
  std::vector<Residual> rs;
  if (which == "a2")
    rs = check_a2(mus, fc.bounds, cap, fc.epsilon);
  else if (which == "ainf")
    rs = check_a_infty(mus, fc.bounds.mass_max, cap);
  else
    rs = bifunctor_identity_check(mus, cap);
  std::cout << residual_report(rs);
  return rs.empty() ? 0 : 1;
}

int gen_cmd(const Opts& o) {
  FlowCat2 fc;
  if (o.family == "break") {
    Mutation m = mutate_break(input(o), o.seed);
    std::cerr << "removed point " << m.removed_point << " from edge " << m.edge << " at " << m.collection << " "
              << m.evals.key() << " energy " << format_rat(m.energy) << "\n";
    fc = m.cat;
  } else {
    GenSpec spec;
    spec.family = o.family;
    spec.variant = o.variant;
    spec.seed = o.seed;
    spec.dim = o.dim;
    spec.bounds = default_bounds(o.family);
    if (!o.shape_max.empty()) spec.bounds.bounds = ShapeMax::parse(o.shape_max);
    spec.bounds.cap = cap_arg(o.cap, spec.bounds.cap);
    if (!o.epsilon.empty()) spec.bounds.epsilon = parse_rat(o.epsilon);
    fc = generate(spec);
  }
  emit(o, format_flowcat(fc));
  return 0;
}

int dot_cmd(const Opts& o) {
  Shape s = shape_arg(o);
  emit(o, poset_dot(face_poset(s), "W"));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"coppice: 2-associahedra and flow-category toolkit"};
  app.require_subcommand(1);
  Opts o;
  std::function<int()> job;

  auto add_n = [&](CLI::App* c) {
    c->add_option("--r", o.r, "number of seams");
    c->add_option("--n", o.n, "marked points, rows split by ';'");
  };
  auto add_io = [&](CLI::App* c) {
    c->add_option("--in", o.in, "input interchange file");
    c->add_option("--cap", o.cap, "energy cap p/q or inf");
    c->add_option("--epsilon", o.epsilon, "minimal energy p/q");
  };

  auto* k = app.add_subcommand("k", "associahedra");
  k->require_subcommand(1);
  auto* ke = k->add_subcommand("enum", "strata of K_r");
  ke->add_option("--r", o.r, "leaves")->required();
  ke->add_flag("--fvector", o.fvector);
  ke->callback([&] { job = [&] { return k_enum(o); }; });

  auto* w = app.add_subcommand("w", "2-associahedra");
  w->require_subcommand(1);
  auto* we = w->add_subcommand("enum", "strata of W_n");
  we->add_option("--n", o.n, "marked points per seam")->required();
  we->add_flag("--fvector", o.fvector);
  we->add_flag("--stable-only", o.stable_only);
  we->callback([&] { job = [&] { return w_enum(o); }; });

  auto* f = app.add_subcommand("fiber", "fiber products over K_r");
  f->require_subcommand(1);
  auto* fe = f->add_subcommand("enum", "coppices of a shape");
  add_n(fe);
  fe->add_flag("--fvector", o.fvector);
  fe->add_flag("--stable-only", o.stable_only);
  fe->callback([&] { job = [&] { return fiber_enum(o); }; });

  auto* d = app.add_subcommand("desc", "boundary descriptors of a shape");
  add_n(d);
  d->add_option("--cap", o.cap);
  d->add_option("--epsilon", o.epsilon);
  d->callback([&] { job = [&] { return desc_cmd(o); }; });

  auto* v = app.add_subcommand("validate", "check a flow category file");
  v->add_option("--in", o.in)->required();
  v->callback([&] { job = [&] { return validate_cmd(o); }; });

  auto* mu = app.add_subcommand("mu", "extract linear operations");
  mu->add_option("--in", o.in)->required();
  mu->add_option("--out", o.out);
  mu->callback([&] { job = [&] { return mu_cmd(o); }; });

  auto* chk = app.add_subcommand("check", "quadratic relations");
  chk->require_subcommand(1);
  for (std::string which : {"ainf", "a2", "compat", "bifunctor"}) {
    auto* c = chk->add_subcommand(which);
    add_io(c);
    c->callback([&, which] { job = [&, which] { return check_cmd(which, o); }; });
  }

  auto* g = app.add_subcommand("gen", "generate a flow category");
  g->add_option("family", o.family, "trivial | square_zero | assoc_algebra | strict_2cat | break")
      ->required()
      ->check(CLI::IsMember({"trivial", "square_zero", "assoc_algebra", "strict_2cat", "break"}));
  g->add_option("--variant", o.variant);
  g->add_option("--seed", o.seed);
  g->add_option("--dim", o.dim);
  g->add_option("--shape-max", o.shape_max);
  g->add_option("--cap", o.cap);
  g->add_option("--epsilon", o.epsilon);
  g->add_option("--in", o.in, "input for break");
  g->add_option("--out", o.out);
  g->callback([&] { job = [&] { return gen_cmd(o); }; });

  auto* ex = app.add_subcommand("export", "export formats");
  ex->require_subcommand(1);
  auto* dot = ex->add_subcommand("dot", "face poset of W as DOT");
  add_n(dot);
  dot->add_option("--out", o.out);
  dot->callback([&] { job = [&] { return dot_cmd(o); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  try {
    return job();
  } catch (const Usage& e) {
    std::cerr << "usage: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
