// kisin: command-line front end for the solver, HN and height engines.
#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kisin/appendix.hpp"
#include "kisin/cm_combinatorics.hpp"
#include "kisin/heights.hpp"
#include "kisin/hn.hpp"
#include "kisin/io.hpp"
#include "kisin/line_solver.hpp"
#include "kisin/lubin_tate.hpp"

using namespace kisin;
using io::json;

namespace {

constexpr int kSchemaVersion = 1;
constexpr int kExitOk = 0, kExitUsage = 1, kExitMismatch = 2, kExitPrecision = 3;

struct Common {
  std::uint64_t p = 0;
  int n = 1;
  int case_id = 0;
  std::string lambda;
  std::int64_t disc = 0;
  std::string preset;
  std::string fixture;
  int corank = 0;
  std::int64_t precision = 0;
  bool json_out = false;
  bool csv_out = false;
  bool emit_fixture = false;
  std::string desc;
  int r = 0;
  int h = 0;
  std::string phi;
};

std::vector<int> parse_ints(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) throw InvalidInput("empty entry in list '" + s + "'");
    std::size_t pos = 0;
    const int v = std::stoi(tok, &pos);
    if (pos != tok.size()) throw InvalidInput("bad integer '" + tok + "'");
    out.push_back(v);
  }
  return out;
}

SurfaceKernelSpec kernel_spec(const Common& c) {
  if (c.lambda.empty()) return balanced_kernel(c.n);
  const auto l = parse_ints(c.lambda);
  if (l.size() != 3) throw InvalidInput("--lambda takes three values a,b,c");
  return make_surface_kernel(c.n, {l[0], l[1], l[2]});
}

json set_json(const std::set<std::int64_t>& s) { return json(std::vector<std::int64_t>(s.begin(), s.end())); }

FiniteKisinModule load_module(const Common& c) {
  if (!c.fixture.empty()) {
    std::ifstream in(c.fixture);
    if (!in) throw InvalidInput("cannot open fixture " + c.fixture);
    return io::module_from_fixture(json::parse(in));
  }
  if (c.p == 0) throw InvalidInput("--p is required with --preset");
  if (c.preset == "h2-level2")
    return ramified_frobenius_matrix(make_ramified_preset(c.p, 2, 2), standard_ramified_type(2), UnitChoice::One,
                                     c.precision);
  if (c.preset == "h4-cyclic") return cyclic_h4_preset(c.p, c.precision);
  throw InvalidInput("unknown preset '" + c.preset + "' (h2-level2, h4-cyclic)");
}

json module_summary(const FiniteKisinModule& m) {
  return json{{"p", m.field().p()},
              {"f", m.field().f()},
              {"h", m.rank()},
              {"e", m.eisenstein_degree()},
              {"precision", m.precision()},
              {"det_valuation", det_valuation(m).value()}};
}

json report(const std::string& command, json inputs) {
  return json{{"schema_version", kSchemaVersion}, {"command", command}, {"inputs", std::move(inputs)}};
}

int cmd_verify_appendix(const Common& c, json& out) {
  if (c.p != 2 && c.p != 5) throw InvalidInput("verify-appendix: --p must be 2 or 5");
  out = report("verify-appendix", {{"p", c.p}, {"precision", c.precision}});
  const auto res = verify_appendix(c.p, {}, c.precision);
  const FiniteKisinModule m = cyclic_h4_preset(c.p, c.precision);
  out["module"] = module_summary(m);
  json verdicts = json::array();
  bool ok = true;
  for (const auto& r : res) {
    verdicts.push_back({{"corank", r.corank},
                        {"comparison", r.exact ? "equal" : "subset"},
                        {"expected", set_json(r.claimed)},
                        {"computed", set_json(r.computed)},
                        {"hodge_values", set_json(hodge_values(m, r.corank, r.computed))},
                        {"pass", r.pass}});
    ok = ok && r.pass;
  }
  out["verdicts"] = verdicts;
  out["pass"] = ok;
  return ok ? kExitOk : kExitMismatch;
}

int cmd_table(const Common& c, json& out, std::string& csv) {
  if (!is_prime(c.p)) throw InvalidInput("table-nine-cases: --p must be prime");
  if (c.n < 0) throw InvalidInput("table-nine-cases: --n must be >= 0");
  const SurfaceKernelSpec spec = kernel_spec(c);
  out = report("table-nine-cases", {{"p", c.p}, {"n", c.n}, {"lambda", spec.lambdas}});
  json rows = json::array();
  std::ostringstream cs;
  cs << "case,qualifier,coefficient,min,max\n";
  for (int k = 1; k <= 9; ++k) {
    if (k == 9 && !case9_prime(c.p)) {
      rows.push_back({{"case", k}, {"available", false}, {"reason", "p must be 2 or 1 mod 4"}});
      cs << k << ",unavailable,,,\n";
      continue;
    }
    const HeightDelta d = surface_delta(k, c.p, spec);
    json row = io::height_delta_json(d);
    row["case"] = k;
    row["available"] = true;
    rows.push_back(row);
    cs << k << ',' << qualifier_name(d.qualifier) << ',' << d.coefficient.get_str() << ',';
    if (d.qualifier == HeightDelta::Qualifier::Range) cs << d.range_min.get_str() << ',' << d.range_max.get_str();
    else cs << ',';
    cs << '\n';
  }
  out["outputs"] = rows;
  csv = cs.str();
  return kExitOk;
}

int cmd_lines(const Common& c, json& out) {
  const FiniteKisinModule m = load_module(c);
  const int h = m.rank();
  const int corank = c.corank ? c.corank : h - 1;
  if (corank < 1 || corank >= h) throw InvalidInput("lines: --corank must lie in [1, h-1]");
  out = report("lines", {{"preset", c.preset}, {"fixture", c.fixture}, {"p", c.p}, {"corank", corank},
                         {"precision", c.precision}});
  out["module"] = module_summary(m);
  if (c.emit_fixture) out["fixture"] = io::fixture_json(m);
  const int r = h - corank;
  SolverOptions opt;
  opt.witness_precision = 64;
  if (r >= 2 && r <= h - 2) opt.accept = [h, r](const std::vector<TruncSeries>& x) { return is_decomposable(x, h, r); };
  const auto lines = enumerate_lines(wedge_power(m, r), opt);
  json ws = json::array();
  for (const auto& l : lines) {
    json gen = json::array();
    for (const auto& g : l.generator) gen.push_back(io::series_json(g));
    ws.push_back({{"mu", l.mu.value()},
                  {"first_nonzero", l.first_nonzero},
                  {"first_valuation", l.first_valuation},
                  {"pivot", l.pivot},
                  {"slope", io::rational_json(submodule_slope(m, l.mu.value(), r))},
                  {"hodge_exponent", hodge_exponent_of_subgroup(m, l.mu).value()},
                  {"generator", gen}});
  }
  out["outputs"] = {{"mu_set", set_json(mu_set(lines))}, {"witnesses", ws}};
  return kExitOk;
}

int cmd_hn(const Common& c, json& out) {
  const FiniteKisinModule m = load_module(c);
  out = report("hn", {{"preset", c.preset}, {"fixture", c.fixture}, {"p", c.p}, {"precision", c.precision}});
  out["module"] = module_summary(m);
  const auto dr = degree_rank(m);
  SolverOptions opt;
  opt.witness_precision = 64;
  const SubmoduleCensus census = submodule_census(m, opt);
  const auto ss = is_semistable(m, census);
  const auto poly = module_hn_polygon(m, census);
  json bp = json::array();
  for (const auto& [x, y] : poly.breakpoints) bp.push_back({{"rank", x}, {"degree", io::rational_json(y)}});
  json levels = json::array();
  for (const auto& lv : slope_levels(m, census))
    levels.push_back({{"corank", lv.corank},
                      {"equal_slope_mu", lv.equal_mu},
                      {"equal_slope_first_nonzero", lv.equal_first_nonzero},
                      {"strictly_greater", lv.strictly_greater},
                      {"smaller", lv.smaller}});
  json outputs{{"degree", io::rational_json(dr.degree)},
               {"rank", dr.rank},
               {"slope", io::rational_json(slope(dr))},
               {"semistable", ss.semistable},
               {"polygon", bp},
               {"levels", levels}};
  if (ss.violation) outputs["violation"] = {{"corank", ss.violation->first}, {"mu", ss.violation->second}};
  out["outputs"] = outputs;
  return kExitOk;
}

int cmd_delta_surface(const Common& c, json& out) {
  if (c.case_id < 1 || c.case_id > 9) throw InvalidInput("delta-surface: --case must be 1..9");
  const SurfaceKernelSpec spec = kernel_spec(c);
  out = report("delta-surface", {{"case", c.case_id}, {"p", c.p}, {"n", c.n}, {"lambda", spec.lambdas}});
  out["outputs"] = io::height_delta_json(surface_delta(c.case_id, c.p, spec));
  return kExitOk;
}

int cmd_delta_elliptic(const Common& c, json& out) {
  if (c.n < 1) throw InvalidInput("delta-elliptic: --n must be >= 1");
  out = report("delta-elliptic", {{"disc", c.disc}, {"n", c.n}});
  const auto fac = factorize(static_cast<std::uint64_t>(c.n));
  json rows = json::array();
  for (const auto& d : elliptic_delta(c.disc, fac)) {
    json row = io::height_delta_json(d);
    row["r_p"] = fac.at(d.prime);
    row["chi"] = kronecker_symbol(d.prime, c.disc);
    rows.push_back(row);
  }
  out["outputs"] = rows;
  return kExitOk;
}

int cmd_delta_general(const Common& c, json& out) {
  std::ifstream in(c.desc);
  if (!in) throw InvalidInput("cannot open descriptor " + c.desc);
  const json dj = json::parse(in);
  out = report("delta-general", {{"desc", dj}, {"r", c.r}, {"p", c.p}});
  out["outputs"] = io::height_delta_json(general_delta_bound(io::descriptor_from_json(dj), c.r, c.p));
  return kExitOk;
}

int cmd_weights(const Common& c, json& out) {
  const auto phi_v = parse_ints(c.phi);
  const CMTypeLocal t = make_cm_type(c.p, c.h, std::set<int>(phi_v.begin(), phi_v.end()));
  out = report("weights", {{"p", c.p}, {"h", c.h}, {"phi", phi_v}, {"lambda", c.lambda}});
  json w = json::object();
  for (const auto& [k, v] : reflex_weights(t)) w[std::to_string(k)] = io::integer_json(v);
  json ks = json::array();
  for (int k = 1; k < c.h; ++k) {
    const auto ms = min_subset_sum(reflex_weights(t), k);
    ks.push_back({{"k", k},
                  {"min_sum", io::integer_json(ms.value)},
                  {"subset", ms.subset},
                  {"hodge_p_torsion", io::rational_json(hodge_val_unram_p_torsion(t, k))}});
  }
  json outputs{{"weights", w}, {"heights", ks}};
  if (!c.lambda.empty()) {
    const KernelType kt = make_kernel_type(parse_ints(c.lambda));
    outputs["hodge_full"] = io::rational_json(hodge_val_unram_full(t, kt));
  }
  out["outputs"] = outputs;
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kisin module solver and Faltings height variation engine"};
  app.require_subcommand(1);
  Common c;

  auto* va = app.add_subcommand("verify-appendix", "compare submodule valuations of the cyclic h=4 preset with the claimed sets");
  va->add_option("--p", c.p, "prime (2 or 5)")->required();
  va->add_option("--precision", c.precision, "series precision (0: default bound)");
  va->add_flag("--json", c.json_out);

  auto* tb = app.add_subcommand("table-nine-cases", "height variation for all nine surface cases");
  tb->add_option("--p", c.p)->required();
  tb->add_option("--n", c.n)->required();
  tb->add_option("--lambda", c.lambda, "kernel tuple a,b,c for cases 8-9 (default: balanced)");
  auto* fmt = tb->add_option_group("format");
  fmt->add_flag("--json", c.json_out);
  fmt->add_flag("--csv", c.csv_out);
  fmt->require_option(0, 1);

  auto* ln = app.add_subcommand("lines", "saturated phi-stable lines of a preset or its exterior powers");
  auto* hn = app.add_subcommand("hn", "slope, semistability and HN polygon of a preset");
  for (auto* sc : {ln, hn}) {
    auto* src = sc->add_option_group("source");
    src->add_option("--preset", c.preset, "h2-level2 or h4-cyclic");
    src->add_option("--fixture", c.fixture, "matrix fixture JSON");
    src->require_option(1);
    sc->add_option("--p", c.p);
    sc->add_option("--precision", c.precision);
    sc->add_flag("--json", c.json_out);
  }
  ln->add_option("--corank", c.corank, "submodule corank (default h-1: lines in M)");
  ln->add_flag("--emit-fixture", c.emit_fixture, "include the matrix fixture in the report");

  auto* ds = app.add_subcommand("delta-surface", "height variation for one surface case");
  ds->add_option("--case", c.case_id)->required();
  ds->add_option("--p", c.p)->required();
  ds->add_option("--n", c.n)->required();
  ds->add_option("--lambda", c.lambda);
  ds->add_flag("--json", c.json_out);

  auto* de = app.add_subcommand("delta-elliptic", "per-prime height variation for a CM elliptic curve");
  de->add_option("--disc", c.disc)->required();
  de->add_option("--n", c.n)->required();
  de->add_flag("--json", c.json_out);

  auto* dg = app.add_subcommand("delta-general", "lower bound from a splitting descriptor");
  dg->add_option("--desc", c.desc)->required()->check(CLI::ExistingFile);
  dg->add_option("--r", c.r)->required();
  dg->add_option("--p", c.p)->required();
  dg->add_flag("--json", c.json_out);

  auto* wt = app.add_subcommand("weights", "reflex weights and unramified Hodge valuations");
  wt->add_option("--p", c.p)->required();
  wt->add_option("--height", c.h, "height h of the CM type")->required();
  wt->add_option("--phi", c.phi, "CM type, e.g. 1,2")->required();
  wt->add_option("--lambda", c.lambda, "kernel type lambda_1,...,lambda_h");
  wt->add_flag("--json", c.json_out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  const auto t0 = std::chrono::steady_clock::now();
  json out;
  std::string csv;
  int rc = kExitOk;
  try {
    if (*va) rc = cmd_verify_appendix(c, out);
    else if (*tb) rc = cmd_table(c, out, csv);
    else if (*ln) rc = cmd_lines(c, out);
    else if (*hn) rc = cmd_hn(c, out);
    else if (*ds) rc = cmd_delta_surface(c, out);
    else if (*de) rc = cmd_delta_elliptic(c, out);
    else if (*dg) rc = cmd_delta_general(c, out);
    else if (*wt) rc = cmd_weights(c, out);
  } catch (const PrecisionExhausted& e) {
    std::cerr << "precision exhausted: " << e.what() << '\n';
    return kExitPrecision;
  } catch (const InvalidInput& e) {
    std::cerr << "usage: " << e.what() << '\n';
    return kExitUsage;
  } catch (const json::exception& e) {
    std::cerr << "usage: bad JSON: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConsistencyError& e) {
    std::cerr << "consistency check failed: " << e.what() << '\n';
    return kExitMismatch;
  }
  if (*tb && c.csv_out) {
    std::cout << csv;
    return rc;
  }
  out["timing_ms"] = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  std::cout << out.dump(2) << '\n';
  return rc;
}
