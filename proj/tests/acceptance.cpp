// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "salem/ap_verifier.hpp"
#include "salem/cli.hpp"
#include "salem/fourier.hpp"
#include "salem/regularity.hpp"
#include "salem/tree_io.hpp"

using namespace salem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Criterion {
  int id;
  std::string title;
  double limit_seconds;
  std::function<Outcome()> run;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

Schedule fixture_a() {
  return schedule_a(25, {ResidueSet(25, {2, 4, 8, 10}), SearchMethod::Exhaustive}, 0.4, 8);
}

Schedule bad_schedule() {
  return Schedule::custom(std::vector<BaseSet>(3, {ResidueSet(10, {0, 1, 2}), SearchMethod::Exhaustive}));
}

Outcome oracle_equivalence() {
  oracle::RealizabilityTable table;
  std::size_t subsets = 0, disagreements = 0, unstable = 0;
  for (std::uint64_t m = 2; m <= 8; ++m) {
    for (std::uint64_t a = 0; a < m; ++a)
      for (std::uint64_t b = 0; b < m; ++b)
        for (std::uint64_t c = 0; c < m; ++c)
          if (table.feasible(a, b, c, m, 8) != table.feasible(a, b, c, m, 16)) ++unstable;
    for (std::uint64_t mask = 0; mask < (1u << m); ++mask) {
      std::vector<std::uint64_t> el;
      for (std::uint64_t i = 0; i < m; ++i)
        if (mask >> i & 1) el.push_back(i);
      ++subsets;
      if (property_ii_oracle(ResidueSet(m, el)).holds != oracle::property_ii_by_points(el, m, table))
        ++disagreements;
    }
  }
  return {disagreements == 0 && unstable == 0,
          std::to_string(subsets) + " subsets, " + std::to_string(disagreements) +
              " disagreements, grid 8 vs 16 unstable triples: " + std::to_string(unstable)};
}

Outcome behrend_pipeline() {
  Outcome o;
  for (std::uint64_t m : {25, 50, 100}) {
    const auto xp = behrend_sphere(m / 5);
    const auto x = double_embed(xp.elements, m);
    std::vector<std::uint64_t> doubled;
    for (auto e : xp.elements) doubled.push_back(2 * e);
    const bool ok = property_ii_oracle(x).holds && is_ap_free(xp.elements) &&
                    is_ap_free(std::vector<std::uint64_t>(x.elements().begin(), x.elements().end())) &&
                    std::vector<std::uint64_t>(x.elements().begin(), x.elements().end()) == doubled &&
                    x.size() == xp.elements.size();
    o.pass = o.pass && ok;
    o.detail += "m=" + std::to_string(m) + " |X|=" + std::to_string(x.size()) + " log|X|/log m=" +
                fmt("%.3f", std::log(static_cast<double>(x.size())) / std::log(static_cast<double>(m))) +
                (ok ? "" : " FAILED") + "; ";
  }
  return o;
}

Outcome ap_certification() {
  std::size_t triples = 0, failing_nodes = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto tree = build_tree(fixture_a(), seed, 4);
    const auto nodes = node_certificates(tree);
    failing_nodes += nodes.failures.size();
    for (std::size_t n = 0; n <= 4; ++n) triples += cross_cell_scan(tree, n).size();
  }
  return {triples == 0 && failing_nodes == 0,
          "10 seeds, levels 0..4: " + std::to_string(triples) + " feasible triples, " +
              std::to_string(failing_nodes) + " failing nodes"};
}

Outcome negative_control() {
  const auto tree = build_tree(bad_schedule(), 1, 2);
  const auto nodes = node_certificates(tree);
  const auto scan = cross_cell_scan(tree, 1);
  const auto path = (std::filesystem::temp_directory_path() / "salem_acceptance_bad.json").string();
  save_tree(tree, path);
  std::ostringstream out, err;
  const int code = cli::run({"verify-ap", "--tree", path}, out, err);
  std::filesystem::remove(path);
  return {!nodes.all_pass && !scan.empty() && code == 1,
          "node failures=" + std::to_string(nodes.failures.size()) + ", depth-1 triples=" +
              std::to_string(scan.size()) + ", verify-ap exit=" + std::to_string(code)};
}

Outcome fourier_exactness() {
  std::vector<MeasureTree> trees;
  for (std::uint64_t seed = 0; seed < 3; ++seed) trees.push_back(build_tree(fixture_a(), seed, 4));
  trees.push_back(build_tree(schedule_b(12), 5, 12));
  trees.push_back(MeasureTree::realize(
      Schedule::custom({{ResidueSet(4, {0, 2}), SearchMethod::Exhaustive}}), 0, 1,
      [](const NodePath&, std::uint64_t) { return 0; }));
  double zero = 0, herm = 0, modul = 0, quad = 0;
  std::size_t quad_points = 0;
  std::mt19937_64 rng(2024);
  for (const auto& tree : trees) {
    for (std::size_t n = 0; n <= tree.depth(); ++n) {
      const auto mu = level_intervals(tree, n);
      const SpectralEvaluator ev(mu);
      zero = std::max(zero, std::abs(ev(0) - 1.0));
      for (std::int64_t k = 1; k <= 200; ++k) herm = std::max(herm, std::abs(ev(-k) - std::conj(ev(k))));
      if (mu.cells() <= 64 && mu.denominator < BigInt(1) << 40) {
        std::vector<std::uint64_t> offs;
        for (const auto& c : mu.offsets) offs.push_back(static_cast<std::uint64_t>(c));
        for (std::int64_t k = -32; k <= 32; ++k, ++quad_points)
          quad = std::max(quad, std::abs(ev(k) - oracle::fourier_by_quadrature(
                                                      offs, static_cast<std::uint64_t>(mu.denominator), k)));
      }
    }
    const SpectralEvaluator top(level_intervals(tree, tree.depth()));
    const auto q = static_cast<std::int64_t>(top.denominator());
    for (int i = 0; i < 100; ++i) {
      const std::int64_t k = static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(2 * q - 1)) - (q - 1);
      std::int64_t ell = static_cast<std::int64_t>(rng() % 201) - 100;
      if (ell == 0) ell = 1;
      modul = std::max(modul, modulation_check(top, k, ell));
    }
  }
  return {zero <= 1e-12 && herm <= 1e-12 && modul <= 1e-9 && quad <= 1e-8,
          "max |mu(0)-1|=" + fmt("%.2e", zero) + ", hermitian=" + fmt("%.2e", herm) +
              ", modulation=" + fmt("%.2e", modul) + ", quadrature=" + fmt("%.2e", quad) + " over " +
              std::to_string(quad_points) + " points"};
}

Outcome decay_trend() {
  const double t = 0.4;
  std::vector<double> sigmas;
  bool top_ok = true;
  std::string per_seed;
  for (std::uint64_t seed = 42; seed < 47; ++seed) {
    const auto tree = build_tree(fixture_a(), seed, 5);
    const auto p = decay_profile(mu_hat_range(tree, 5, 1, 100000), 1);
    sigmas.push_back(p.sigma_hat);
    const auto& top = p.bands.back();
    const double mid = 0.5 * static_cast<double>(top.lo + top.hi);
    const bool ok = top.sup <= 5 * p.c_hat * std::pow(mid, -p.sigma_hat / 2);
    top_ok = top_ok && ok;
    per_seed += fmt("%.3f", p.sigma_hat) + (ok ? "" : "(top band above envelope)") + " ";
  }
  std::sort(sigmas.begin(), sigmas.end());
  const double med = sigmas[2];
  const bool in_window = med >= t / 2 - 0.25 && med <= t / 2 + 0.35;
  return {in_window && top_ok, "median sigma_hat=" + fmt("%.4f", med) + " in [" + fmt("%.2f", t / 2 - 0.25) +
                                   ", " + fmt("%.2f", t / 2 + 0.35) + "]; per seed: " + per_seed};
}

Outcome increment_diagnostics() {
  const double sigma = 0.4;
  std::size_t with_exceedance = 0, total_exceedances = 0;
  double proxy = 0;
  bool strict_ok = true;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto tree = build_tree(fixture_a(), seed, 3);
    const auto rep = increment_scan(tree, 2, sigma);
    proxy = rep.bound.union_proxy;
    if (rep.coverage < 1.0) strict_ok = false;
    with_exceedance += rep.exceedances > 0;
    total_exceedances += rep.exceedances;
    if (rep.bound.union_proxy < 0.01 && rep.exceedances > 0) strict_ok = false;
  }
  const double freq = static_cast<double>(with_exceedance) / 100.0;
  const bool ok = strict_ok && freq <= std::max(proxy, 0.05) + 0.05;
  return {ok, "union-bound proxy=" + fmt("%.4g", proxy) + ", seeds with an exceedance=" +
                  fmt("%.2f", freq) + ", total exceedances=" + std::to_string(total_exceedances) +
                  ", threshold Q_3^-0.2=" + fmt("%.4f", std::pow(15625.0, -0.2))};
}

Outcome ahlfors_constants() {
  double c_up = 0, c_lo = 1e300;
  bool ok = true;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto tree = build_tree(fixture_a(), seed, 4);
    const auto rep = frostman_scan(tree, 4, 0.4, dyadic_radii(resolution_floor(tree.schedule(), 4)));
    ok = ok && *rep.upper_within_reference && *rep.lower_within_reference;
    c_up = std::max(c_up, rep.c_upper);
    c_lo = std::min(c_lo, rep.c_lower);
  }
  return {ok, "10 seeds: C_upper=" + fmt("%.4f", c_up) + " <= 51, C_lower=" + fmt("%.4f", c_lo) +
                  " >= " + fmt("%.4f", std::pow(25.0, -0.4) / 4)};
}

Outcome theorem_b_bound() {
  bool ok = true;
  std::string worst;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto tree = build_tree(schedule_b(12), seed, 12);
    const auto rep = theorem_b_mass_check(tree, 4, 12, 0.2);
    ok = ok && rep.all_within_bound;
    if (seed == 0)
      for (const auto& l : rep.levels)
        worst += std::to_string(l.level) + ":" + rational_string(l.max_mass) + "<=" +
                 rational_string(l.bound) + " ";
  }
  return {ok, "5 seeds, levels 4..12; seed 0: " + worst};
}

Outcome uniformity_demo_sweep() {
  std::uint64_t violations = 0;
  std::string where;
  for (std::uint64_t n = 2; n <= 20; ++n) {
    std::uint64_t v = 0;
    if (n <= 14) v += uniformity_exhaustive(n).violations;
    v += uniformity_random(n, 2000, 1).violations;
    if (v) where += " n=" + std::to_string(n) + ":" + std::to_string(v);
    violations += v;
  }
  std::string detail = std::to_string(violations) + " subsets satisfy the condition without a 3-AP";
  if (violations) detail += " (" + where.substr(1) + "; A = Z/2Z has no three distinct residues)";
  return {violations == 0, detail};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "oracle equivalence, all subsets of Z/mZ, m <= 8", 30, oracle_equivalence},
      {2, "doubled Behrend sets for m = 25, 50, 100", 5, behrend_pipeline},
      {3, "finite-depth AP certificate, fixture depth 4, 10 seeds", 10, ap_certification},
      {4, "negative control X = {0,1,2} mod 10", 10, negative_control},
      {5, "Fourier exactness", 60, fourier_exactness},
      {6, "decay trend, fixture depth 5, k <= 1e5, 5 seeds", 120, decay_trend},
      {7, "increment diagnostics n = 2 -> 3, 100 seeds", 120, increment_diagnostics},
      {8, "Ahlfors constants, fixture depth 4", 30, ahlfors_constants},
      {9, "variant B mass bound, depth 12", 60, theorem_b_bound},
      {10, "uniformity implies 3-AP in Z/nZ", 120, uniformity_demo_sweep},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs <= c.limit_seconds;
    const bool pass = o.pass && in_time;
    failed += !pass;
    std::printf("[%s] %2d %s: %s (%.1fs%s)\n", pass ? "PASS" : "FAIL", c.id, c.title.c_str(),
                o.detail.c_str(), secs, in_time ? "" : ", over time limit");
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed ? 1 : 0;
}
