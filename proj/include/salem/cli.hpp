#pragma once

// Command-line front end. Exit codes: 0 success / certified, 1 verification
// failure, 2 usage or precondition error, 3 I/O or schema error.

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "salem/ap_verifier.hpp"
#include "salem/cantor_tree.hpp"
#include "salem/discrete_ap.hpp"
#include "salem/fourier.hpp"
#include "salem/regularity.hpp"
#include "salem/report_json.hpp"
#include "salem/svg.hpp"
#include "salem/tree_io.hpp"

namespace salem::cli {

enum ExitCode : int { kOk = 0, kVerificationFailed = 1, kUsage = 2, kIo = 3 };

struct RunConfig {
  std::string subcommand;
  bool json_errors = false;

  // behrend / build
  std::string variant;
  std::uint64_t m = 0;
  std::string base;
  std::optional<double> t;
  std::uint64_t depth = 0;
  std::uint64_t levels = 0;
  std::uint64_t seed = 0;
  std::uint64_t threshold = 0;
  bool no_translations = false;

  // analysis
  std::string tree_path;
  std::optional<std::uint64_t> level;
  std::int64_t k_min = 1;
  std::int64_t k_max = 0;
  std::int64_t k_cap = kDefaultKCap;
  std::optional<double> sigma;
  std::uint64_t seeds = 1;
  std::string radii = "dyadic";
  std::uint64_t grid = 256;
  bool line = false;
  double epsilon = 0.2;

  // uniformity-demo
  std::uint64_t n_min = 2;
  std::uint64_t n_max = 14;
  std::uint64_t random_n_max = 20;
  std::uint64_t samples = 2000;

  // outputs
  std::string out_path;
  std::string svg_path;
  std::string dump_path;
};

namespace detail {

inline std::vector<std::uint64_t> parse_list(const std::string& s) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos)
      throw PreconditionError("malformed integer list '" + s + "'");
    out.push_back(std::stoull(tok));
  }
  return out;
}

inline void write_output(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw SchemaError("cannot open '" + path + "' for writing");
  f << text;
  if (!f) throw SchemaError("write failed for '" + path + "'");
}

// Per-run seeds for multi-seed experiments: base, base + 1, ...
inline std::uint64_t run_seed(std::uint64_t base, std::uint64_t i) { return base + i; }

inline MeasureTree reseeded(const MeasureTree& tree, std::uint64_t seed) {
  return build_tree(tree.schedule(), seed, tree.depth());
}

inline std::size_t level_or_depth(const RunConfig& cfg, const MeasureTree& tree) {
  const std::size_t n = cfg.level ? *cfg.level : tree.depth();
  require(n <= tree.depth(), "--level exceeds the tree depth");
  return n;
}

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

inline int cmd_behrend(const RunConfig& cfg, std::ostream& out) {
  require(cfg.m >= 5, "behrend needs --m >= 5");
  const std::uint64_t mp = cfg.m / 5;
  const BehrendSet xp = behrend_sphere(mp, cfg.threshold ? cfg.threshold : 64);
  const ResidueSet x = double_embed(xp.elements, cfg.m);
  const auto prop = property_ii_oracle(x);
  nlohmann::json j{{"m", cfg.m},
                   {"m_prime", mp},
                   {"x_prime", xp.elements},
                   {"method", to_string(xp.method)},
                   {"x", to_json(x)},
                   {"x_prime_ap_free", is_ap_free(xp.elements)},
                   {"property_ii", prop.holds},
                   {"size", x.size()},
                   {"log_density", x.size() > 0 ? std::log(static_cast<double>(x.size())) /
                                                      std::log(static_cast<double>(cfg.m))
                                                : 0.0}};
  if (xp.method == SearchMethod::Heuristic)
    j["sphere"] = {{"digit_base", xp.digit_base}, {"digit_count", xp.digit_count}, {"norm", xp.norm}};
  write_output(cfg.out_path, j.dump(2) + "\n", out);
  return prop.holds && is_ap_free(xp.elements) ? kOk : kVerificationFailed;
}

inline int cmd_build(const RunConfig& cfg, std::ostream& out) {
  const std::uint64_t levels = std::max(cfg.levels, cfg.depth);
  require(levels >= 1, "build needs --depth or --levels >= 1");
  Schedule schedule;
  if (cfg.variant == "A") {
    require(cfg.t.has_value(), "variant A needs --t");
    require(cfg.m >= 2, "variant A needs --m >= 2");
    BaseSet x;
    if (!cfg.base.empty()) {
      x = {ResidueSet(cfg.m, parse_list(cfg.base)), SearchMethod::Exhaustive};
    } else {
      require(cfg.m >= 5, "variant A without --base needs --m >= 5");
      const BehrendSet xp = behrend_sphere(cfg.m / 5);
      x = {double_embed(xp.elements, cfg.m), xp.method};
    }
    schedule = schedule_a(cfg.m, x, *cfg.t, levels);
  } else {
    require(!cfg.t.has_value(), "--t applies to variant A only");
    if (cfg.variant == "B") {
      schedule = schedule_b(levels, cfg.threshold ? cfg.threshold : 25);
    } else {
      require(cfg.m >= 2 && !cfg.base.empty(), "variant custom needs --m and --base");
      const BaseSet b{ResidueSet(cfg.m, parse_list(cfg.base)), SearchMethod::Exhaustive};
      schedule = Schedule::custom(std::vector<BaseSet>(levels, b));
    }
  }
  const MeasureTree tree = build_tree(schedule, cfg.seed, cfg.depth);
  write_output(cfg.out_path, save_tree_string(tree, !cfg.no_translations), out);
  return kOk;
}

inline int cmd_fourier(const RunConfig& cfg, std::ostream& out) {
  const MeasureTree tree = load_tree(cfg.tree_path);
  const std::size_t n = level_or_depth(cfg, tree);
  const std::int64_t hi = cfg.k_max ? cfg.k_max : 1024;
  require(cfg.k_min <= hi, "--k-min must not exceed --k-max");
  require(hi - cfg.k_min + 1 <= cfg.k_cap, "frequency range exceeds --k-cap");
  const FourierCoeffs c = mu_hat_range(tree, n, cfg.k_min, hi);
  std::ostringstream ss;
  write_coefficients_csv(c, ss);
  write_output(cfg.out_path, ss.str(), out);
  return kOk;
}

inline int cmd_decay(const RunConfig& cfg, std::ostream& out) {
  const MeasureTree base = load_tree(cfg.tree_path);
  const std::size_t n = level_or_depth(cfg, base);
  const std::int64_t hi = cfg.k_max ? cfg.k_max : (std::int64_t{1} << 16) - 1;
  require(hi <= cfg.k_cap, "--k-max exceeds --k-cap");
  require(cfg.seeds >= 1, "--seeds must be >= 1");
  std::optional<double> target = cfg.sigma ? cfg.sigma : base.schedule().t();
  nlohmann::json runs = nlohmann::json::array();
  std::vector<double> sigmas;
  std::optional<DecayProfile> first;
  for (std::uint64_t i = 0; i < cfg.seeds; ++i) {
    const MeasureTree tree = cfg.seeds == 1 ? base : reseeded(base, run_seed(base.seed(), i));
    const DecayProfile p = decay_profile(mu_hat_range(tree, n, 1, hi), cfg.k_min);
    nlohmann::json r = to_json(p);
    r["seed"] = tree.seed();
    runs.push_back(std::move(r));
    if (!p.flat_zero) sigmas.push_back(p.sigma_hat);
    if (!first) first = p;
  }
  nlohmann::json j;
  if (cfg.seeds == 1) {
    j = runs[0];
  } else {
    j = {{"runs", std::move(runs)},
         {"median_sigma_hat", sigmas.empty() ? nlohmann::json(nullptr) : nlohmann::json(median(sigmas))}};
  }
  if (!cfg.svg_path.empty()) write_output(cfg.svg_path, emit_svg(*first, target), out);
  write_output(cfg.out_path, j.dump(2) + "\n", out);
  return kOk;
}

inline int cmd_increments(const RunConfig& cfg, std::ostream& out) {
  const MeasureTree base = load_tree(cfg.tree_path);
  require(cfg.sigma.has_value(), "increments needs --sigma");
  require(base.depth() >= 1, "increments needs a tree of depth >= 1");
  const std::size_t n = cfg.level ? *cfg.level : base.depth() - 1;
  require(cfg.seeds >= 1, "--seeds must be >= 1");
  if (cfg.seeds == 1) {
    const IncrementReport r = increment_scan(base, n, *cfg.sigma, cfg.k_cap);
    write_output(cfg.out_path, to_json(r).dump(2) + "\n", out);
    return kOk;
  }
  nlohmann::json runs = nlohmann::json::array();
  std::uint64_t with_exceedance = 0;
  IncrementBound bound;
  for (std::uint64_t i = 0; i < cfg.seeds; ++i) {
    const MeasureTree tree = reseeded(base, run_seed(base.seed(), i));
    const IncrementReport r = increment_scan(tree, n, *cfg.sigma, cfg.k_cap);
    bound = r.bound;
    with_exceedance += r.exceedances > 0;
    nlohmann::json jr = to_json(r, false);
    jr["seed"] = tree.seed();
    runs.push_back(std::move(jr));
  }
  nlohmann::json j{{"runs", std::move(runs)},
                   {"seeds", cfg.seeds},
                   {"exceedance_frequency",
                    static_cast<double>(with_exceedance) / static_cast<double>(cfg.seeds)},
                   {"union_proxy", bound.union_proxy}};
  write_output(cfg.out_path, j.dump(2) + "\n", out);
  return kOk;
}

inline int cmd_regularity(const RunConfig& cfg, std::ostream& out) {
  const MeasureTree tree = load_tree(cfg.tree_path);
  const std::size_t n = level_or_depth(cfg, tree);
  const Schedule& s = tree.schedule();
  const double t = cfg.t ? *cfg.t : (s.t() ? *s.t() : 1.0);
  std::vector<Rational> radii;
  if (cfg.radii == "dyadic") {
    radii = dyadic_radii(resolution_floor(s, n));
  } else {
    std::stringstream ss(cfg.radii);
    std::string tok;
    while (std::getline(ss, tok, ',')) radii.push_back(parse_rational(tok));
  }
  ScanOptions opt;
  opt.circle = !cfg.line;
  opt.grid_points = cfg.grid;
  opt.dump = !cfg.dump_path.empty();
  const RegularityReport rep = frostman_scan(tree, n, t, radii, opt);
  nlohmann::json j = to_json(rep);
  bool ok = rep.upper_within_reference.value_or(true) && rep.lower_within_reference.value_or(true);
  if (s.variant() == Variant::TheoremB && n >= 1) {
    const TheoremBReport b = theorem_b_mass_check(tree, 1, n, cfg.epsilon, cfg.grid);
    j["theorem_b"] = to_json(b);
    ok = ok && b.all_within_bound;
  }
  if (opt.dump) {
    std::ostringstream csv;
    csv << "x,r,mass,ratio\n";
    for (const auto& smp : rep.samples)
      csv << rational_string(smp.x) << ',' << rational_string(smp.r) << ','
          << rational_string(smp.mass) << ',' << salem::detail::fmt(smp.ratio) << '\n';
    write_output(cfg.dump_path, csv.str(), out);
  }
  if (!cfg.svg_path.empty()) write_output(cfg.svg_path, emit_svg(rep), out);
  write_output(cfg.out_path, j.dump(2) + "\n", out);
  return ok ? kOk : kVerificationFailed;
}

inline int cmd_verify_ap(const RunConfig& cfg, std::ostream& out) {
  const MeasureTree base = load_tree(cfg.tree_path);
  const std::size_t n = level_or_depth(cfg, base);
  require(cfg.seeds >= 1, "--seeds must be >= 1");
  if (cfg.seeds == 1) {
    const ApCertificate c = ap_report(base, n, !cfg.line);
    write_output(cfg.out_path, to_json(c).dump(2) + "\n", out);
    return c.certified ? kOk : kVerificationFailed;
  }
  nlohmann::json runs = nlohmann::json::array();
  bool all = true;
  for (std::uint64_t i = 0; i < cfg.seeds; ++i) {
    const MeasureTree tree = reseeded(base, run_seed(base.seed(), i));
    const ApCertificate c = ap_report(tree, n, !cfg.line);
    all = all && c.certified;
    nlohmann::json jr = to_json(c);
    jr["seed"] = tree.seed();
    runs.push_back(std::move(jr));
  }
  nlohmann::json j{{"runs", std::move(runs)}, {"certified", all}};
  write_output(cfg.out_path, j.dump(2) + "\n", out);
  return all ? kOk : kVerificationFailed;
}

inline int cmd_uniformity(const RunConfig& cfg, std::ostream& out) {
  require(cfg.n_min >= 2, "--n-min must be >= 2");
  require(cfg.n_max <= 20, "--n-max must be <= 20");
  nlohmann::json exhaustive = nlohmann::json::array(), random = nlohmann::json::array();
  std::uint64_t violations = 0;
  for (std::uint64_t n = cfg.n_min; n <= cfg.n_max; ++n) {
    const auto tally = uniformity_exhaustive(n);
    violations += tally.violations;
    exhaustive.push_back(to_json(tally));
  }
  for (std::uint64_t n = cfg.n_min; n <= cfg.random_n_max && cfg.samples > 0; ++n) {
    const auto tally = uniformity_random(n, cfg.samples, cfg.seed);
    violations += tally.violations;
    random.push_back(to_json(tally));
  }
  nlohmann::json j{{"exhaustive", std::move(exhaustive)},
                   {"random", std::move(random)},
                   {"violations", violations}};
  write_output(cfg.out_path, j.dump(2) + "\n", out);
  return violations == 0 ? kOk : kVerificationFailed;
}

}  // namespace detail

inline std::string error_line(bool json, int code, const std::string& msg) {
  if (json) return nlohmann::json{{"error", msg}, {"exit_code", code}}.dump() + "\n";
  return "error: " + msg + "\n";
}

/// Parses `args` (without the program name) and runs the subcommand.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  cfg.json_errors = std::find(args.begin(), args.end(), "--json") != args.end();

  CLI::App app{"Random Cantor-series measures: construction, AP certification and decay diagnostics",
               "salem"};
  app.require_subcommand(1);
  app.add_flag("--json", cfg.json_errors, "Print errors as single-line JSON");

  auto* behrend = app.add_subcommand("behrend", "Doubled Behrend set in Z/mZ with oracle stats");
  behrend->add_option("--m", cfg.m, "Modulus m (the integer set lives in {1..floor(m/5)})")->required();
  behrend->add_option("--threshold", cfg.threshold, "Exhaustive search threshold for m'");
  behrend->add_option("--out", cfg.out_path, "Output JSON path (default stdout)");

  auto* build = app.add_subcommand("build", "Build a random tree and write its JSON");
  build->add_option("--variant", cfg.variant, "A, B or custom")
      ->required()
      ->check(CLI::IsMember({"A", "B", "custom"}));
  build->add_option("--m", cfg.m, "Base M (variants A and custom)");
  build->add_option("--base", cfg.base, "Base set, comma separated residues mod M");
  build->add_option("--t", cfg.t, "Target dimension (variant A)");
  build->add_option("--depth", cfg.depth, "Realized depth")->required();
  build->add_option("--levels", cfg.levels, "Schedule length (default: depth)");
  build->add_option("--seed", cfg.seed, "Random seed");
  build->add_option("--threshold", cfg.threshold, "Exhaustive threshold for variant B base sets");
  build->add_flag("--no-translations", cfg.no_translations, "Omit translations; re-derive on load");
  build->add_option("--out", cfg.out_path, "Output path (default stdout)");

  auto add_tree = [&](CLI::App* sc) {
    sc->add_option("--tree", cfg.tree_path, "Tree JSON file")->required();
    sc->add_option("--out", cfg.out_path, "Output path (default stdout)");
  };

  auto* fourier = app.add_subcommand("fourier", "Fourier coefficients as CSV");
  add_tree(fourier);
  fourier->add_option("--level", cfg.level, "Level n (default: tree depth)");
  fourier->add_option("--k-min", cfg.k_min, "Smallest frequency");
  fourier->add_option("--k-max", cfg.k_max, "Largest frequency (default 1024)");
  fourier->add_option("--k-cap", cfg.k_cap, "Frequency budget");

  auto* decay = app.add_subcommand("decay", "Dyadic decay profile, optional SVG");
  add_tree(decay);
  decay->add_option("--level", cfg.level, "Level n (default: tree depth)");
  decay->add_option("--k-min", cfg.k_min, "Lowest band start");
  decay->add_option("--k-max", cfg.k_max, "Largest frequency (default 65535)");
  decay->add_option("--k-cap", cfg.k_cap, "Frequency budget");
  decay->add_option("--sigma", cfg.sigma, "Target exponent for the SVG envelope (default t)");
  decay->add_option("--seeds", cfg.seeds, "Number of seeds (derived from the tree seed)");
  decay->add_option("--svg", cfg.svg_path, "SVG output path");

  auto* inc = app.add_subcommand("increments", "Martingale increment scan");
  add_tree(inc);
  inc->add_option("--level", cfg.level, "Level n; scans n -> n+1 (default: depth - 1)");
  inc->add_option("--sigma", cfg.sigma, "Exponent sigma")->required();
  inc->add_option("--k-cap", cfg.k_cap, "Frequency cap");
  inc->add_option("--seeds", cfg.seeds, "Number of seeds (derived from the tree seed)");

  auto* reg = app.add_subcommand("regularity", "Frostman / Ahlfors ball-mass scan");
  add_tree(reg);
  reg->add_option("--level", cfg.level, "Level n (default: tree depth)");
  reg->add_option("--t", cfg.t, "Exponent t (default: schedule t, else 1)");
  reg->add_option("--radii", cfg.radii, "'dyadic' or comma separated rationals");
  reg->add_option("--grid", cfg.grid, "Stratified grid points");
  reg->add_option("--epsilon", cfg.epsilon, "Epsilon for the variant B trend");
  reg->add_flag("--line", cfg.line, "Real-line balls instead of the circle");
  reg->add_option("--dump", cfg.dump_path, "CSV of (x, r, mass, ratio) rows");
  reg->add_option("--svg", cfg.svg_path, "SVG output path");

  auto* ver = app.add_subcommand("verify-ap", "Finite-depth 3-AP certificate");
  add_tree(ver);
  ver->add_option("--depth,--level", cfg.level, "Level to scan (default: tree depth)");
  ver->add_flag("--line", cfg.line, "Real-line progressions only");
  ver->add_option("--seeds", cfg.seeds, "Number of seeds (derived from the tree seed)");

  auto* uni = app.add_subcommand("uniformity-demo", "Fourier uniformity versus 3-APs in Z/nZ");
  uni->add_option("--n-min", cfg.n_min, "Smallest modulus in both sweeps");
  uni->add_option("--n-max", cfg.n_max, "Exhaustive sweep up to n");
  uni->add_option("--random-n-max", cfg.random_n_max, "Random sweep up to n");
  uni->add_option("--samples", cfg.samples, "Random subsets per n");
  uni->add_option("--seed", cfg.seed, "Random seed");
  uni->add_option("--out", cfg.out_path, "Output path (default stdout)");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << error_line(cfg.json_errors, kUsage, e.what());
    return kUsage;
  }

  try {
    if (*behrend) return detail::cmd_behrend(cfg, out);
    if (*build) return detail::cmd_build(cfg, out);
    if (*fourier) return detail::cmd_fourier(cfg, out);
    if (*decay) return detail::cmd_decay(cfg, out);
    if (*inc) return detail::cmd_increments(cfg, out);
    if (*reg) return detail::cmd_regularity(cfg, out);
    if (*ver) return detail::cmd_verify_ap(cfg, out);
    if (*uni) return detail::cmd_uniformity(cfg, out);
  } catch (const PreconditionError& e) {
    err << error_line(cfg.json_errors, kUsage, e.what());
    return kUsage;
  } catch (const SchemaError& e) {
    err << error_line(cfg.json_errors, kIo, e.what());
    return kIo;
  } catch (const std::exception& e) {
    err << error_line(cfg.json_errors, kIo, e.what());
    return kIo;
  }
  return kUsage;
}

inline int run(int argc, char** argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, out, err);
}

}  // namespace salem::cli
