#include "cli.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "report.hpp"
#include "slitcarpet/geodesics.hpp"
#include "slitcarpet/measure.hpp"
#include "slitcarpet/modulus.hpp"
#include "slitcarpet/render.hpp"
#include "slitcarpet/symmetry.hpp"

namespace slitcarpet::cli {

namespace {

/// Input the user got wrong, reported with exit status 2.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Options {
  int level = 0;
  std::optional<int> grid;
  std::uint64_t seed = 1;
  std::optional<double> tol;
  std::string out;

  // geometry and measure
  std::string p;
  std::string q;
  std::string mode = "level";
  bool with_path = false;
  double radius = 0.25;
  int samples = 100;
  std::string radii = "0.5,0.25,0.125";
  std::string ambient = "S2";

  // modulus
  std::string dir = "LR";
  std::string family = "lr";
  int k = 1;

  // group
  bool table = false;
  std::string validate;
  std::string a;
  std::string b;
  bool inverse = false;
  std::string h;
  std::string element;
  int random = 0;
  int bits = 4;

  // verify
  std::string check;
  int pairs = 1000;
  int count = 100;
  int depth = 0;

  // render
  std::string eta;
  std::string potential;
  std::string levels = "0.125,0.25,0.375,0.5,0.625,0.75,0.875";
  int check_samples = 0;
};

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string part;
  std::istringstream in(text);
  while (std::getline(in, part, sep)) {
    part.erase(0, part.find_first_not_of(' '));
    part.erase(part.find_last_not_of(' ') + 1);
    if (!part.empty()) parts.push_back(part);
  }
  return parts;
}

std::vector<double> parse_reals(const std::string& text, const char* flag) {
  std::vector<double> values;
  for (const auto& part : split(text, ',')) {
    try {
      values.push_back(Coord::parse(part).value());
    } catch (const std::exception&) {
      throw UsageError(fmt::format("{}: '{}' is not a number", flag, part));
    }
  }
  if (values.empty()) throw UsageError(fmt::format("{}: expected a comma-separated list", flag));
  return values;
}

CarpetPoint point_option(const std::string& text, const char* flag) {
  if (text.empty()) throw UsageError(fmt::format("{} is required", flag));
  try {
    return parse_point(text);
  } catch (const std::exception& e) {
    throw UsageError(fmt::format("{}: {}", flag, e.what()));
  }
}

std::string point_string(const CarpetPoint& p) {
  std::string s = p.x.to_string() + "," + p.y.to_string();
  if (p.side) s += std::string(",") + to_char(*p.side);
  if (p.copy) s += std::string(",") + to_char(*p.copy);
  return s;
}

Ambient ambient_option(const std::string& text) {
  if (text == "S2") return Ambient::S2;
  if (text == "DS2") return Ambient::DS2;
  throw UsageError(fmt::format("--ambient: expected S2 or DS2, got '{}'", text));
}

modulus::Direction direction_option(const std::string& text) {
  if (text == "LR") return modulus::Direction::LR;
  if (text == "TB") return modulus::Direction::TB;
  throw UsageError(fmt::format("--dir: expected LR or TB, got '{}'", text));
}

symmetry::QSElement element_option(const std::string& text, const char* flag) {
  if (text.empty() || text == "h0") return {symmetry::IsometryElement::identity(), symmetry::h0()};
  if (text == "id") return {};
  try {
    return symmetry::QSElement::parse(text);
  } catch (const std::exception& e) {
    throw UsageError(fmt::format("{}: {}", flag, e.what()));
  }
}

// The elements a verify command runs over: --random n seeded elements, or
// the single --element (default (id, h0)).
std::vector<symmetry::QSElement> elements_option(const Options& o) {
  if (o.random < 0) throw UsageError("--random must be non-negative");
  if (o.random == 0) return {element_option(o.element, "--element")};
  std::mt19937_64 rng(o.seed);
  std::vector<symmetry::QSElement> out;
  for (int k = 0; k < o.random; ++k) out.push_back(symmetry::random_element(rng, o.bits));
  return out;
}

int grid_or(const Options& o, int offset) { return o.grid.value_or(o.level + offset); }

// ------------------------------------------------------------------ commands

Report run_build(const Options& o) {
  const SlitSchedule s = SlitSchedule::up_to(o.level);
  Report r("build");
  r.record({{"level", o.level}, {"slits", s.size()}});
  for (const Slit& slit : s.slits()) {
    r.record({{"generation", slit.generation},
              {"i", slit.i},
              {"j", slit.j},
              {"x", slit.x().to_string()},
              {"y_lo", slit.y_lo().to_string()},
              {"y_hi", slit.y_hi().to_string()}});
  }
  return r;
}

void path_records(Report& r, const geodesics::Polyline& path) {
  for (const CarpetPoint& v : path.vertices) r.record({{"vertex", point_string(v)}});
}

Report run_dist(const Options& o) {
  const CarpetPoint p = point_option(o.p, "--p");
  const CarpetPoint q = point_option(o.q, "--q");
  Report r("dist");
  if (o.mode == "level" || o.mode == "double") {
    const bool dbl = o.mode == "double";
    const auto res = dbl ? geodesics::distance_double(o.level, p, q) : geodesics::distance_level(o.level, p, q);
    r.record({{"level", o.level}, {"mode", o.mode}, {"p", point_string(p)}, {"q", point_string(q)}});
    r.record({{"d", res.length}});
    if (o.with_path) path_records(r, res.path);
  } else if (o.mode == "limit") {
    const auto lim = geodesics::distance_limit(p, q, o.level);
    r.record({{"n_max", o.level}, {"mode", o.mode}, {"p", point_string(p)}, {"q", point_string(q)}});
    for (const auto& [n, d] : lim.sequence) r.record({{"n", n}, {"d", d}});
    r.record({{"final_gap", lim.final_gap}, {"nondecreasing", lim.nondecreasing}});
    if (!lim.nondecreasing) r.fail("distance sequence decreases");
  } else {
    throw UsageError(fmt::format("--mode: expected level, double or limit, got '{}'", o.mode));
  }
  return r;
}

Report run_ball(const Options& o) {
  const CarpetPoint p = point_option(o.p, "--p");
  const int g = grid_or(o, 6);
  const double mass = measure::ball_mass(o.level, p, o.radius, g, ambient_option(o.ambient));
  Report r("ball");
  r.record({{"level", o.level}, {"grid", g}, {"p", point_string(p)}, {"r", o.radius}});
  r.record({{"mass", mass}, {"ratio", mass / (o.radius * o.radius)}});
  return r;
}

Report run_scan_ahlfors(const Options& o) {
  const auto radii = parse_reals(o.radii, "--radii");
  const int g = grid_or(o, 5);
  const auto rep = measure::ahlfors_scan(o.level, o.samples, radii, g, o.seed, ambient_option(o.ambient));
  Report r("scan-ahlfors");
  r.record({{"level", o.level}, {"grid", g}, {"samples", o.samples}, {"seed", o.seed}});
  r.record({{"c_upper", rep.c_upper}, {"c_lower", rep.c_lower}, {"constant", rep.constant()}});
  const double bound = o.tol.value_or(measure::kAhlforsConstant);
  if (rep.constant() > bound) r.fail(fmt::format("constant {} above {}", rep.constant(), bound));
  return r;
}

Report run_scan_porosity(const Options& o) {
  const auto radii = parse_reals(o.radii, "--radii");
  const auto rep = measure::porosity_scan(o.level, o.samples, radii, o.seed);
  Report r("scan-porosity");
  r.record({{"level", o.level}, {"samples", o.samples}, {"seed", o.seed}});
  r.record({{"worst", rep.worst}, {"flagged", rep.flagged}, {"total", rep.samples.size()}});
  const double bound = o.tol.value_or(measure::kPorosityConstant);
  if (rep.worst > bound) r.fail(fmt::format("ratio {} above {}", rep.worst, bound));
  return r;
}

Report run_check_incl(const Options& o) {
  const CarpetPoint p = point_option(o.p, "--p");
  const int g = grid_or(o, 6);
  const auto w = measure::incl_check(o.level, p, o.radius, g);
  Report r("check-incl");
  r.record({{"level", o.level}, {"grid", g}, {"p", point_string(p)}, {"r", o.radius}});
  r.record({{"q", point_string(w.q)}, {"scale", w.scale}, {"radius", w.radius}, {"checked", w.checked},
            {"verified", w.verified}});
  if (!w.verified) r.fail("ball around the witness leaves the projected ball");
  return r;
}

Report run_check_cover(const Options& o) {
  const CarpetPoint p = point_option(o.p, "--p");
  const int g = grid_or(o, 5);
  const auto c = measure::covering_check(o.level, p, o.radius, g);
  Report r("check-cover");
  r.record({{"level", o.level}, {"grid", g}, {"p", point_string(p)}, {"r", o.radius}});
  r.record({{"count", c.count}, {"radius", c.radius}, {"covered", c.covered}});
  for (const CarpetPoint& centre : c.centres) r.record({{"centre", point_string(centre)}});
  if (c.count > measure::kCoveringConstant) r.fail(fmt::format("{} balls needed", c.count));
  return r;
}

Report run_conductance(const Options& o) {
  const int g = grid_or(o, 6);
  const auto d = direction_option(o.dir);
  const double c = modulus::conductance(o.level, g, d, o.tol.value_or(1e-10));
  Report r("conductance");
  r.record({{"level", o.level}, {"grid", g}, {"dir", o.dir}});
  r.record({{"conductance", c}, {"resistance", 1.0 / c}});
  return r;
}

Report run_modulus(const Options& o) {
  static const std::map<std::string, modulus::FamilyKind> kinds{{"lr", modulus::FamilyKind::connect_lr},
                                                                {"tb", modulus::FamilyKind::connect_tb},
                                                                {"osc", modulus::FamilyKind::oscillation},
                                                                {"vertical", modulus::FamilyKind::vertical}};
  const auto kind = kinds.find(o.family);
  if (kind == kinds.end()) throw UsageError(fmt::format("--family: unknown family '{}'", o.family));
  const int g = grid_or(o, 3);
  const auto m = modulus::modulus_direct({kind->second, o.k}, o.level, g, o.tol.value_or(1e-3));
  Report r("modulus");
  r.record({{"level", o.level}, {"grid", g}, {"family", o.family}, {"k", o.k}});
  r.record({{"lower", m.lower}, {"upper", m.upper}, {"shortest", m.shortest}, {"paths", m.paths},
            {"iterations", m.iterations}});
  if (kind->second == modulus::FamilyKind::vertical) {
    const auto b = modulus::vertical_family_bounds(o.level, g);
    r.record({{"bound_lower", b.lower}, {"bound_upper", b.upper}});
  }
  if (kind->second == modulus::FamilyKind::oscillation) {
    const auto nv = modulus::modulus_upper_nonvertical(o.k, o.level, g);
    r.record({{"m", nv.m}, {"bound_upper", nv.bound}});
  }
  return r;
}

Report run_group(const Options& o) {
  Report r("group");
  if (o.table) {
    const auto t = symmetry::isometry_table(ambient_option(o.ambient));
    r.record({{"ambient", o.ambient}, {"order", t.elements.size()}, {"abelian", t.abelian},
              {"involutive", t.involutive}});
    for (std::size_t a = 0; a < t.elements.size(); ++a) {
      std::string row;
      for (int c : t.product[a]) row += (row.empty() ? "" : ",") + t.elements[c].bits();
      r.record({{"row", t.elements[a].bits()}, {"name", t.elements[a].name()}, {"products", row}});
    }
  } else if (!o.validate.empty()) {
    symmetry::LFunction h;
    try {
      h = symmetry::LFunction::parse(o.validate);
    } catch (const std::exception& e) {
      throw UsageError(fmt::format("--validate: {}", e.what()));
    }
    const int depth = std::max(o.depth, h.exponent() + 5);
    const auto v = symmetry::validate_L(h, depth);
    r.record({{"depth", depth}, {"valid", v.valid}, {"lip", v.lip.to_string()}});
    if (!v.valid) r.fail(fmt::format("{} at {}", v.reason, v.violation ? v.violation->to_string() : "?"));
  } else if (!o.a.empty()) {
    const auto a = element_option(o.a, "--a");
    symmetry::QSElement result;
    if (o.inverse) {
      result = symmetry::qs_inverse(a);
    } else {
      result = symmetry::qs_compose(a, element_option(o.b, "--b"));
    }
    r.record({{"operation", o.inverse ? "inverse" : "compose"}, {"result", result.to_string()}});
  } else {
    throw UsageError("group needs one of --table, --validate or --a");
  }
  return r;
}

Report run_shear(const Options& o) {
  const CarpetPoint p = point_option(o.p, "--p");
  symmetry::QSElement g;
  if (!o.h.empty()) {
    try {
      g.shear = symmetry::LFunction::parse(o.h);
    } catch (const std::exception& e) {
      throw UsageError(fmt::format("--function: {}", e.what()));
    }
    if (!g.shear.in_group()) throw UsageError("--function: shear violates the dyadic constraints");
  } else {
    g = element_option(o.element, "--element");
  }
  validate_point(p, o.level, Ambient::DS2);
  Report r("shear");
  r.record({{"element", g.to_string()}, {"p", point_string(p)}});
  r.record({{"image", point_string(symmetry::qs_apply(g, p))}});
  return r;
}

Report run_verify(const Options& o) {
  Report r("verify");
  const auto elements = elements_option(o);
  r.record({{"check", o.check}, {"level", o.level}, {"elements", elements.size()}, {"seed", o.seed}});
  if (o.check == "cohopf") {
    for (const auto& g : elements) {
      const auto rep = symmetry::cohopf_check(g, o.level);
      r.record({{"element", g.to_string()}, {"slits", rep.slits}, {"ok", rep.ok}});
      if (!rep.ok) r.fail(rep.failure);
    }
  } else if (o.check == "bilip") {
    const double tol = o.tol.value_or(0.05);
    for (const auto& g : elements) {
      const auto rep = symmetry::bilipschitz_estimate(g, o.level, o.pairs, o.seed);
      r.record({{"element", g.to_string()}, {"pairs", rep.pairs}, {"max_ratio", rep.max_ratio},
                {"min_ratio", rep.min_ratio}, {"bound", rep.bound}});
      if (!rep.within(tol)) r.fail("distance ratio outside the bound");
    }
  } else if (o.check == "verttovert") {
    const auto curves = symmetry::sample_vertical_curves(o.level, o.count, o.seed);
    for (const auto& g : elements) {
      const bool ok = symmetry::verttovert_check(g, curves);
      r.record({{"element", g.to_string()}, {"curves", curves.size()}, {"vertical", ok}});
      if (!ok) r.fail("a vertical curve lost its verticality");
    }
  } else {
    throw UsageError(fmt::format("verify: unknown check '{}'", o.check));
  }
  return r;
}

}  // namespace

CarpetPoint parse_point(const std::string& text) {
  const auto parts = split(text, ',');
  if (parts.size() < 2 || parts.size() > 4) throw std::invalid_argument("expected x,y[,L|R][,F|B]");
  CarpetPoint p{Coord::parse(parts[0]), Coord::parse(parts[1]), std::nullopt, std::nullopt};
  for (std::size_t k = 2; k < parts.size(); ++k) {
    const std::string& tag = parts[k];
    if (tag == "L" && !p.side) {
      p.side = Side::left;
    } else if (tag == "R" && !p.side) {
      p.side = Side::right;
    } else if (tag == "F" && !p.copy) {
      p.copy = Copy::front;
    } else if (tag == "B" && !p.copy) {
      p.copy = Copy::back;
    } else {
      throw std::invalid_argument(fmt::format("bad tag '{}'", tag));
    }
  }
  return p;
}

namespace {

void emit(const Options& o, const std::string& text, std::ostream& out) {
  if (o.out.empty()) {
    out << text;
    return;
  }
  std::ofstream file(o.out, std::ios::binary);
  if (!file) throw UsageError(fmt::format("--out: cannot open '{}'", o.out));
  file << text;
}

int run_render(const Options& o, std::ostream& out) {
  render::RenderSpec spec;
  spec.level = o.level;
  if (!o.eta.empty()) spec.widths = parse_reals(o.eta, "--eta");
  try {
    render::validate(spec);
  } catch (const std::invalid_argument& e) {
    throw UsageError(fmt::format("--eta: {}", e.what()));
  }
  render::Overlay overlay;
  std::optional<modulus::LaplaceSolution> solution;
  if (!o.p.empty() || !o.q.empty()) {
    const auto path = geodesics::distance_level(o.level, point_option(o.p, "--p"), point_option(o.q, "--q"));
    overlay.paths.push_back(path.path);
  }
  if (!o.potential.empty()) {
    solution = modulus::laplace_solve(o.level, grid_or(o, 5),
                                      modulus::BoundarySpec::connecting(direction_option(o.potential)));
    overlay.field = &solution->potential;
    overlay.levels = parse_reals(o.levels, "--levels");
  }
  const std::string svg = render::render_svg(spec, overlay);
  if (o.check_samples <= 0) {
    emit(o, svg, out);
    return kSuccess;
  }
  // with --check the SVG needs a file and the report goes to the terminal
  if (o.out.empty()) throw UsageError("--check needs --out for the SVG");
  emit(o, svg, out);
  Report r("render");
  const auto inj = render::check_injective(spec, o.check_samples);
  const auto exp = render::lens_expansion(spec, o.level + 5);
  r.record({{"level", o.level}, {"samples", inj.samples}, {"injective", inj.injective}});
  r.record({{"max_expansion", exp.max_ratio}, {"min_expansion", exp.min_ratio}});
  if (!inj.injective) r.fail(inj.failure);
  out << r.str();
  return r.failed() ? kAssertionFailed : kSuccess;
}

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--level", o.level, "Carpet level n")->check(CLI::Range(0, 30));
  sub->add_option("--grid", o.grid, "Grid exponent g (step 2^-g)")->check(CLI::Range(0, 16));
  sub->add_option("--seed", o.seed, "Random seed");
  sub->add_option("--tol", o.tol, "Tolerance or bound used by the command");
  sub->add_option("--out", o.out, "Write the output to this file");
}

}  // namespace

int cli_dispatch(std::span<const std::string> argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app("Slit carpet geometry, measure, modulus and symmetry toolkit", "slitcarpet");
  app.require_subcommand(1);
  std::map<CLI::App*, std::function<Report()>> handlers;
  CLI::App* render_cmd = nullptr;

  auto command = [&](const char* name, const char* help, std::function<Report()> run) {
    CLI::App* sub = app.add_subcommand(name, help);
    add_common(sub, o);
    if (run) handlers[sub] = std::move(run);
    return sub;
  };

  command("build", "Export the slit schedule", [&] { return run_build(o); });

  auto* dist = command("dist", "Distance between two points", [&] { return run_dist(o); });
  dist->add_option("--p", o.p, "First point x,y[,L|R][,F|B]");
  dist->add_option("--q", o.q, "Second point");
  dist->add_option("--mode", o.mode, "level, double or limit");
  dist->add_flag("--path", o.with_path, "Also print the geodesic");

  auto* ball = command("ball", "Mass of a ball", [&] { return run_ball(o); });
  ball->add_option("--p", o.p, "Centre");
  ball->add_option("--radius", o.radius, "Radius");
  ball->add_option("--ambient", o.ambient, "S2 or DS2");

  auto* ahlfors = command("scan-ahlfors", "Ahlfors regularity scan", [&] { return run_scan_ahlfors(o); });
  ahlfors->add_option("--samples", o.samples, "Number of random centres")->check(CLI::Range(1, 100000));
  ahlfors->add_option("--radii", o.radii, "Comma-separated radii");
  ahlfors->add_option("--ambient", o.ambient, "S2 or DS2");

  auto* porosity = command("scan-porosity", "Porosity scan", [&] { return run_scan_porosity(o); });
  porosity->add_option("--samples", o.samples, "Number of random centres")->check(CLI::Range(1, 100000));
  porosity->add_option("--radii", o.radii, "Comma-separated radii");

  auto* incl = command("check-incl", "Ball inclusion witness", [&] { return run_check_incl(o); });
  incl->add_option("--p", o.p, "Centre");
  incl->add_option("--radius", o.radius, "Radius");

  auto* cover = command("check-cover", "Covering count of a projected ball", [&] { return run_check_cover(o); });
  cover->add_option("--p", o.p, "Centre");
  cover->add_option("--radius", o.radius, "Radius");

  auto* cond = command("conductance", "Effective conductance", [&] { return run_conductance(o); });
  cond->add_option("--dir", o.dir, "LR or TB");

  auto* mod = command("modulus", "Direct grid modulus of a curve family", [&] { return run_modulus(o); });
  mod->add_option("--family", o.family, "lr, tb, osc or vertical");
  mod->add_option("--k", o.k, "Oscillation parameter")->check(CLI::Range(1, 64));

  auto* group = command("group", "Isometry tables and group arithmetic", [&] { return run_group(o); });
  group->add_option("--ambient", o.ambient, "S2 or DS2");
  group->add_flag("--table", o.table, "Print the multiplication table");
  group->add_option("--validate", o.validate, "Validate a shear function 'N v0 ... v_2^N'");
  group->add_option("--depth", o.depth, "Validation depth");
  group->add_option("--a", o.a, "Element 'rvf N v0 ...', 'id' or 'h0'");
  group->add_option("--b", o.b, "Second element for compose");
  group->add_flag("--inverse", o.inverse, "Invert --a instead of composing");

  auto* shear = command("shear", "Apply a group element to a point", [&] { return run_shear(o); });
  shear->add_option("--p", o.p, "Point of the double");
  shear->add_option("--function", o.h, "Shear function 'N v0 ... v_2^N'");
  shear->add_option("--element", o.element, "Group element");

  auto* verify = command("verify", "Group checks", [&] { return run_verify(o); });
  verify->add_option("check", o.check, "cohopf, bilip or verttovert")->required();
  verify->add_option("--element", o.element, "Group element (default: the tent shear)");
  verify->add_option("--random", o.random, "Use this many seeded random elements instead");
  verify->add_option("--bits", o.bits, "Bits of the random shears")->check(CLI::Range(1, 12));
  verify->add_option("--pairs", o.pairs, "Point pairs for bilip")->check(CLI::Range(1, 1000000));
  verify->add_option("--count", o.count, "Sampled curves for verttovert")->check(CLI::Range(1, 100000));

  render_cmd = command("render", "SVG of the opened carpet", nullptr);
  render_cmd->add_option("--eta", o.eta, "Lens widths per generation, comma-separated");
  render_cmd->add_option("--p", o.p, "Geodesic overlay from this point");
  render_cmd->add_option("--q", o.q, "... to this point");
  render_cmd->add_option("--potential", o.potential, "Level sets of the LR or TB potential");
  render_cmd->add_option("--levels", o.levels, "Potential levels, comma-separated");
  render_cmd->add_option("--check", o.check_samples, "Check injectivity on an (N+1)^2 grid");

  std::vector<const char*> args;
  args.reserve(argv.size());
  for (const auto& a : argv) args.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(args.size()), args.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsageError;
  }

  CLI::App* chosen = app.get_subcommands().front();
  try {
    if (chosen == render_cmd) return run_render(o, out);
    const Report report = handlers.at(chosen)();
    emit(o, report.str(), out);
    return report.failed() ? kAssertionFailed : kSuccess;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::invalid_argument& e) {
    err << "invalid input: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::out_of_range& e) {
    err << "invalid input: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kAssertionFailed;
  }
}

}  // namespace slitcarpet::cli
