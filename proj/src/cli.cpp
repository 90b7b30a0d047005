#include "confdim/cli.hpp"

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <sstream>

#include "confdim/critical_exponent.hpp"
#include "confdim/cutpoints.hpp"
#include "confdim/generators.hpp"
#include "confdim/modulus.hpp"
#include "confdim/nerve.hpp"
#include "confdim/space.hpp"

namespace confdim {

namespace {

std::shared_ptr<spdlog::logger> logger() {
  static std::shared_ptr<spdlog::logger> log = [] {
    auto l = spdlog::stderr_color_st("confdim");
    l->set_pattern("[%l] %v");
    l->set_level(spdlog::level::warn);
    if (const char* env = std::getenv("CONFDIM_LOG")) l->set_level(spdlog::level::from_str(env));
    return l;
  }();
  return log;
}

std::string fmt12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

nlohmann::json read_json_arg(const std::string& arg) {
  if (!arg.empty() && arg.front() == '{') return nlohmann::json::parse(arg);
  std::ifstream in(arg);
  if (!in) throw std::runtime_error("cannot read " + arg);
  return nlohmann::json::parse(in);
}

FiniteMetricSpace load(const RunConfig& c) {
  if (!c.space_path.empty() && !c.generate.empty()) throw std::invalid_argument("give either --space or --generate");
  if (!c.space_path.empty()) return load_space(c.space_path);
  if (!c.generate.empty()) return generate(generator_spec_from_json(read_json_arg(c.generate)));
  throw std::invalid_argument("no space: pass --space <file> or --generate <spec>");
}

struct Loaded {
  FiniteMetricSpace space;
  NetHierarchy hierarchy;
};

Loaded load_with_hierarchy(const RunConfig& c) {
  FiniteMetricSpace space = load(c);
  validate_metric(space, c.seed);
  NetHierarchy h = build_net_hierarchy(space, c.a, c.depth);
  if (!h.warning.empty()) logger()->warn("{}", h.warning);
  logger()->info("{} points, hierarchy depth {}", space.size(), h.depth());
  return {std::move(space), std::move(h)};
}

ScanOptions scan_options(const RunConfig& c) {
  ScanOptions o;
  o.p_grid = parse_p_grid(c.p_grid_text);
  o.n_max = c.n_max;
  o.balls_per_scale = c.balls_per_scale;
  o.tol = c.tol;
  o.workers = c.workers;
  return o;
}

nlohmann::json nets_summary(const Loaded& l) {
  nlohmann::json levels = nlohmann::json::array();
  for (int i = 0; i <= l.hierarchy.depth(); ++i) {
    levels.push_back({{"level", i},
                      {"radius", l.hierarchy.radius(i)},
                      {"centers", l.hierarchy.levels[static_cast<std::size_t>(i)].size()}});
  }
  nlohmann::json doc{{"points", l.space.size()},
                     {"base", l.hierarchy.base},
                     {"requested_depth", l.hierarchy.requested_depth},
                     {"depth", l.hierarchy.depth()},
                     {"truncated", l.hierarchy.truncated},
                     {"warning", l.hierarchy.warning},
                     {"levels", levels},
                     {"doubling_constant", estimate_doubling_constant(l.space, l.hierarchy)}};
  if (l.hierarchy.depth() >= 0) {
    const NerveGraph finest = build_nerve(l.space, build_covering(l.space, l.hierarchy, l.hierarchy.depth()));
    const auto comps = components(finest, std::vector<char>(finest.vertex_count(), 0));
    doc["finest_nerve"] = {
        {"vertices", finest.vertex_count()}, {"edges", finest.edge_count()}, {"components", comps.size()}};
    if (comps.size() > 1) logger()->warn("finest nerve has {} components", comps.size());
  }
  return doc;
}

struct BoundOutcome {
  nlohmann::json doc;
  bool ok = true;
};

BoundOutcome bound_runs(const RunConfig& c, const Loaded& l, bool skip_infeasible) {
  const PointId z = c.center.value_or(0);
  const int n = c.n.value_or(l.hierarchy.depth() - c.k);
  BoundOutcome out;
  out.doc = nlohmann::json::array();
  for (int m : c.m) {
    BoundCheck bc;
    try {
      bc = build_theorem_weight(l.space, l.hierarchy, z, c.k, n, m);
    } catch (const InfeasibleScale& e) {
      if (!skip_infeasible) throw;
      out.doc.push_back({{"m", m}, {"feasible", false}, {"max_feasible_m", e.max_feasible_m()}});
      continue;
    }
    ModulusOptions mo;
    mo.tol = c.tol;
    const ModulusResult mod = compute_modulus(bc.family(l.space), c.p, mo);
    nlohmann::json j = to_json(bc, {c.p});
    j["feasible"] = true;
    j["modulus"] = mod.value;
    j["modulus_lower_bound"] = mod.lower_bound;
    j["modulus_within_bound"] = mod.lower_bound <= bc.vol_p(c.p) * (1.0 + 1e-6);
    out.ok = out.ok && bc.admissible && j["modulus_within_bound"].get<bool>();
    out.doc.push_back(std::move(j));
  }
  return out;
}

void emit(const RunConfig& c, std::ostream& fallback, const std::string& text) {
  if (c.out.empty()) {
    fallback << text;
    return;
  }
  std::ofstream f(c.out, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + c.out);
  f << text;
}

void emit_json(const RunConfig& c, std::ostream& fallback, nlohmann::json doc) {
  doc["config"] = config_echo(c);
  emit(c, fallback, doc.dump(2) + "\n");
}

int run_impl(const RunConfig& c, std::ostream& out) {
  const std::string& cmd = c.subcommand;
  if (cmd == "generate") {
    if (c.generate.empty()) throw std::invalid_argument("generate needs --generate <spec>");
    const GeneratorSpec spec = generator_spec_from_json(read_json_arg(c.generate));
    FiniteMetricSpace space = generate(spec);
    nlohmann::json doc = space.to_json();
    doc["generator"] = to_json(spec);
    emit_json(c, out, doc);
    return kExitOk;
  }
  if (cmd == "nets") {
    emit_json(c, out, nets_summary(load_with_hierarchy(c)));
    return kExitOk;
  }
  if (cmd == "modulus") {
    const Loaded l = load_with_hierarchy(c);
    const int n = c.n.value_or(1);
    if (c.k < 0 || c.k + n > l.hierarchy.depth()) {
      throw std::invalid_argument("levels k = " + std::to_string(c.k) + ", k + n = " + std::to_string(c.k + n) +
                                  " exceed the hierarchy depth " + std::to_string(l.hierarchy.depth()));
    }
    const PointId center = c.center.value_or(l.hierarchy.levels[static_cast<std::size_t>(c.k)].front());
    auto nerve = std::make_shared<const NerveGraph>(
        build_nerve(l.space, build_covering(l.space, l.hierarchy, c.k + n)));
    const CurveFamily fam = annulus_family(l.space, l.hierarchy, nerve, center, c.k);
    ModulusOptions mo;
    mo.tol = c.tol;
    nlohmann::json doc{{"center", center}, {"k", c.k}, {"n", n}};
    try {
      doc["result"] = to_json(compute_modulus(fam, c.p, mo), true);
      doc["converged"] = true;
    } catch (const ModulusNonConvergence& e) {
      logger()->warn("{}", e.what());
      doc["result"] = to_json(e.best(), true);
      doc["converged"] = false;
    }
    if (c.p == 1.0) {
      const MinCutModulus mc = modulus_p1_mincut(fam);
      doc["min_cut"] = {{"infinite", mc.infinite}, {"value", mc.value}, {"cut", mc.cut}};
    }
    emit_json(c, out, doc);
    return kExitOk;
  }
  if (cmd == "scan") {
    const Loaded l = load_with_hierarchy(c);
    const ScanResult sc = scan(l.space, l.hierarchy, scan_options(c));
    std::string text;
    const nlohmann::json echo = config_echo(c);
    for (const auto& [key, value] : echo.items()) text += "# " + key + "=" + value.dump() + "\n";
    text += to_csv(sc);
    emit(c, out, text);
    return kExitOk;
  }
  if (cmd == "pc") {
    const Loaded l = load_with_hierarchy(c);
    const ScanResult sc = scan(l.space, l.hierarchy, scan_options(c));
    nlohmann::json doc = to_json(estimate_pc(sc, default_decay_threshold(c.a)));
    doc["complete"] = sc.complete;
    doc["depth"] = l.hierarchy.depth();
    emit_json(c, out, doc);
    return kExitOk;
  }
  if (cmd == "uws") {
    const Loaded l = load_with_hierarchy(c);
    const UwsReport rep = check_uws(l.space, l.hierarchy, c.c_max, {}, c.workers);
    emit_json(c, out, to_json(rep));
    return rep.passes() ? kExitOk : kExitVerdictFailure;
  }
  if (cmd == "ws") {
    const Loaded l = load_with_hierarchy(c);
    const WsReport rep = check_ws(l.space, l.hierarchy, c.budgets, c.workers);
    emit_json(c, out, to_json(rep));
    return rep.decreasing ? kExitOk : kExitVerdictFailure;
  }
  if (cmd == "bound") {
    const Loaded l = load_with_hierarchy(c);
    const BoundOutcome b = bound_runs(c, l, false);
    emit_json(c, out, {{"checks", b.doc}});
    return b.ok ? kExitOk : kExitVerdictFailure;
  }
  if (cmd == "all") {
    const Loaded l = load_with_hierarchy(c);
    nlohmann::json doc;
    doc["nets"] = nets_summary(l);
    const ScanResult sc = scan(l.space, l.hierarchy, scan_options(c));
    doc["scan"] = nlohmann::json::array();
    for (const auto& e : sc.entries) {
      doc["scan"].push_back({{"p", e.p}, {"n", e.n}, {"k", e.k}, {"M", e.value}, {"balls_sampled", e.balls_sampled}});
    }
    if (sc.ns.size() >= 3) doc["pc"] = to_json(estimate_pc(sc, default_decay_threshold(c.a)));
    const UwsReport uws = check_uws(l.space, l.hierarchy, c.c_max, {}, c.workers);
    nlohmann::json uws_doc = to_json(uws);
    uws_doc.erase("probes");
    doc["uws"] = uws_doc;
    const WsReport ws = check_ws(l.space, l.hierarchy, c.budgets, c.workers);
    doc["ws"] = to_json(ws);
    const BoundOutcome b = bound_runs(c, l, true);
    doc["bound"] = b.doc;
    emit_json(c, out, doc);
    return uws.passes() && ws.decreasing && b.ok ? kExitOk : kExitVerdictFailure;
  }
  throw std::invalid_argument("unknown subcommand '" + cmd + "'");
}

}  // namespace

std::vector<double> parse_p_grid(const std::string& text) {
  double lo = 0.0;
  double step = 0.0;
  double hi = 0.0;
  char c1 = 0;
  char c2 = 0;
  std::istringstream in(text);
  in.imbue(std::locale::classic());
  if (!(in >> lo >> c1 >> step >> c2 >> hi) || c1 != ':' || c2 != ':' || !(in >> std::ws).eof()) {
    throw std::invalid_argument("p grid must look like lo:step:hi, got '" + text + "'");
  }
  if (!(step > 0.0) || hi < lo) throw std::invalid_argument("p grid needs step > 0 and hi >= lo");
  const auto count = static_cast<long>(std::floor((hi - lo) / step + 1e-9)) + 1;
  if (count > 10000) throw std::invalid_argument("p grid has too many points");
  std::vector<double> out;
  for (long i = 0; i < count; ++i) {
    // Round to 12 significant digits so 1.0 + 3 * 0.1 prints as 1.3.
    out.push_back(std::stod(fmt12(lo + static_cast<double>(i) * step)));
  }
  return out;
}

RunConfig parse_args(int argc, const char* const* argv, bool* help_requested, std::string* help_text) {
  RunConfig c;
  CLI::App app{"Combinatorial modulus and cut-point diagnostics for finite metric spaces", "confdim"};
  app.add_option("subcommand", c.subcommand, "generate | nets | modulus | scan | pc | uws | ws | bound | all")
      ->required();
  app.add_option("--space", c.space_path, "space JSON file");
  app.add_option("--generate", c.generate, "generator spec (file or inline JSON)");
  app.add_option("--a", c.a, "net scale base")->check(CLI::PositiveNumber);
  app.add_option("--depth", c.depth, "requested hierarchy depth")->check(CLI::NonNegativeNumber);
  app.add_option("--p-grid", c.p_grid_text, "exponent grid lo:step:hi");
  app.add_option("--n-max", c.n_max, "largest relative scale n");
  app.add_option("--balls-per-scale", c.balls_per_scale, "balls sampled per level, 0 for all");
  app.add_option("--C-max", c.c_max, "UWS cut size bound");
  app.add_option("--m", c.m, "annulus counts")->delimiter(',');
  app.add_option("--p", c.p, "exponent");
  app.add_option("--tol", c.tol, "relative duality gap");
  app.add_option("--out", c.out, "output path (default stdout)");
  app.add_option("--seed", c.seed, "seed for sampled checks");
  app.add_option("--workers", c.workers, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--center", c.center, "center point id");
  app.add_option("--k", c.k, "base level");
  app.add_option("--n", c.n, "relative scale");
  app.add_option("--budgets", c.budgets, "WS budgets")->delimiter(',');
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    if (help_requested) *help_requested = true;
    if (help_text) *help_text = app.help();
    return c;
  } catch (const CLI::ParseError& e) {
    throw std::invalid_argument(e.what());
  }
  if (help_requested) *help_requested = false;
  return c;
}

nlohmann::json config_echo(const RunConfig& c) {
  nlohmann::json j{{"subcommand", c.subcommand},
                   {"space", c.space_path},
                   {"generate", c.generate},
                   {"a", c.a},
                   {"depth", c.depth},
                   {"p_grid", c.p_grid_text},
                   {"n_max", c.n_max},
                   {"balls_per_scale", c.balls_per_scale},
                   {"C_max", c.c_max},
                   {"m", c.m},
                   {"p", c.p},
                   {"tol", c.tol},
                   {"seed", c.seed},
                   {"workers", c.workers},
                   {"k", c.k},
                   {"budgets", c.budgets}};
  j["center"] = c.center ? nlohmann::json(*c.center) : nlohmann::json(nullptr);
  j["n"] = c.n ? nlohmann::json(*c.n) : nlohmann::json(nullptr);
  return j;
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    return run_impl(config, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
}

}  // namespace confdim
