#include <gtest/gtest.h>

#include <cstdlib>
#include <numbers>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "salem/fourier.hpp"

using namespace salem;

namespace {

Schedule fixture_schedule(std::size_t levels = 8) {
  return schedule_a(25, {ResidueSet(25, {2, 4, 8, 10}), SearchMethod::Exhaustive}, 0.4, levels);
}

// depth-1 measure on [0,1/4) and [2/4,3/4)
MeasureTree two_of_four() {
  const auto s = Schedule::custom({{ResidueSet(4, {0, 2}), SearchMethod::Exhaustive}});
  return MeasureTree::realize(s, 0, 1, [](const NodePath&, std::uint64_t) { return 0; });
}

class ThreadsGuard {
 public:
  explicit ThreadsGuard(const char* v) { setenv("SALEM_THREADS", v, 1); }
  ~ThreadsGuard() { unsetenv("SALEM_THREADS"); }
};

}  // namespace

TEST(IntervalFt, Examples) {
  EXPECT_NEAR(std::abs(interval_ft(0, 1, 0) - std::complex<double>(1, 0)), 0, 1e-15);
  EXPECT_NEAR(std::abs(interval_ft(0, 1, 3)), 0, 1e-15);
  const auto v = interval_ft(0, 2, 1);
  EXPECT_NEAR(v.real(), 0, 1e-15);
  EXPECT_NEAR(v.imag(), -1 / std::numbers::pi, 1e-15);
  EXPECT_THROW(interval_ft(2, 2, 1), PreconditionError);
}

TEST(IntervalFt, HugeDenominatorKeepsPhase) {
  // c/Q = 1/3 with Q = 3 * 10^30: the integral is (1/Q) e(k(2c+1)/2Q) sinc
  const BigInt q = BigInt(3) * boost::multiprecision::pow(BigInt(10), 30);
  const BigInt c = q / 3;
  for (std::int64_t k : {1, 7, 1000003}) {
    const auto v = interval_ft(c, q, k) * q.convert_to<double>();
    const double angle = -2 * std::numbers::pi * static_cast<double>(k % 3) / 3.0;
    EXPECT_NEAR(v.real(), std::cos(angle), 1e-12) << k;
    EXPECT_NEAR(v.imag(), std::sin(angle), 1e-12) << k;
  }
}

TEST(MuHat, Examples) {
  const auto tree = two_of_four();
  EXPECT_NEAR(std::abs(mu_hat(tree, 1, 0) - 1.0), 0, 1e-15);
  EXPECT_NEAR(std::abs(mu_hat(tree, 1, 1)), 0, 1e-15);
  const auto v = mu_hat(tree, 1, 2);
  EXPECT_NEAR(v.real(), 0, 1e-15);
  EXPECT_NEAR(v.imag(), -2 / std::numbers::pi, 1e-15);
  EXPECT_THROW(mu_hat(tree, 2, 0), PreconditionError);
}

TEST(MuHat, ZeroFrequencyIsOne) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto a = build_tree(fixture_schedule(), seed, 4);
    const auto b = build_tree(schedule_b(16), seed, 16);
    for (std::size_t n = 0; n <= 4; ++n) EXPECT_NEAR(std::abs(mu_hat(a, n, 0) - 1.0), 0, 1e-12);
    for (std::size_t n = 0; n <= 16; n += 4) EXPECT_NEAR(std::abs(mu_hat(b, n, 0) - 1.0), 0, 1e-12);
  }
}

TEST(MuHat, BigDenominatorPath) {
  // Q = 10007^5 > 2^61 forces the big-integer path; 32 cells keep the
  // reference sum exact enough to compare at 1e-13
  std::vector<BaseSet> levels(5, {ResidueSet(10007, {0, 2}), SearchMethod::Exhaustive});
  const auto tree = build_tree(Schedule::custom(levels), 4, 5);
  const auto mu = level_intervals(tree, 5);
  ASSERT_GT(2 * mu.denominator, BigInt(1) << 62);
  const SpectralEvaluator ev(mu);
  for (std::int64_t k : {1LL, 2LL, 3LL, 17LL, 1000LL, -999LL, 123456789012345LL}) {
    std::complex<double> sum = 0;
    const BigInt two_q = 2 * mu.denominator;
    for (const auto& c : mu.offsets) {
      BigInt r = (BigInt(k) * (2 * c + 1)) % two_q;
      if (r < 0) r += two_q;
      const double frac = static_cast<double>(BigFloat(r) / BigFloat(two_q));
      sum += std::polar(1.0, -2 * std::numbers::pi * frac);
    }
    const double u = std::numbers::pi * static_cast<double>(BigFloat(k) / BigFloat(mu.denominator));
    const std::complex<double> expect = sum * (std::sin(u) / u) / static_cast<double>(mu.cells());
    EXPECT_NEAR(std::abs(ev(k) - expect), 0, 1e-13) << k;
  }
}

TEST(MuHat, AgreesWithQuadrature) {
  std::vector<MeasureTree> trees;
  trees.push_back(build_tree(fixture_schedule(), 1, 1));
  trees.push_back(build_tree(fixture_schedule(), 2, 3));
  trees.push_back(build_tree(schedule_b(12), 3, 12));
  trees.push_back(two_of_four());
  for (const auto& tree : trees) {
    for (std::size_t n = 0; n <= tree.depth(); ++n) {
      const auto mu = level_intervals(tree, n);
      if (mu.cells() > 64) continue;
      std::vector<std::uint64_t> offs;
      for (const auto& c : mu.offsets) offs.push_back(static_cast<std::uint64_t>(c));
      const auto q = static_cast<std::uint64_t>(mu.denominator);
      const SpectralEvaluator ev(mu);
      for (std::int64_t k = -32; k <= 32; ++k)
        EXPECT_NEAR(std::abs(ev(k) - oracle::fourier_by_quadrature(offs, q, k)), 0, 1e-8)
            << "n=" << n << " k=" << k;
    }
  }
}

TEST(MuHatBatch, Examples) {
  const auto tree = build_tree(fixture_schedule(), 3, 3);
  const std::vector<std::int64_t> zero{0};
  const auto z = mu_hat_batch(tree, 3, zero);
  ASSERT_EQ(z.values.size(), 1u);
  EXPECT_NEAR(std::abs(z.values[0].value - 1.0), 0, 1e-12);

  std::mt19937_64 rng(5);
  std::vector<std::int64_t> ks;
  for (int i = 0; i < 100; ++i) ks.push_back(static_cast<std::int64_t>(rng() % 2000001) - 1000000);
  const auto batch = mu_hat_batch(tree, 3, ks);
  for (const auto& c : batch.values) {
    const auto single = mu_hat(tree, 3, c.k);
    EXPECT_EQ(single.real(), c.value.real());
    EXPECT_EQ(single.imag(), c.value.imag());
  }

  const auto sym = mu_hat_range(tree, 3, -50, 50);
  for (std::int64_t k = 1; k <= 50; ++k) {
    const auto pos = sym.values[static_cast<std::size_t>(50 + k)].value;
    const auto neg = sym.values[static_cast<std::size_t>(50 - k)].value;
    EXPECT_NEAR(std::abs(pos - std::conj(neg)), 0, 1e-12);
  }
}

TEST(MuHatBatch, SortsAndDeduplicates) {
  const auto tree = two_of_four();
  const std::vector<std::int64_t> ks{5, -1, 5, 0};
  const auto out = mu_hat_batch(tree, 1, ks);
  ASSERT_EQ(out.values.size(), 3u);
  EXPECT_EQ(out.values[0].k, -1);
  EXPECT_EQ(out.values[2].k, 5);
}

TEST(MuHatBatch, ParallelEqualsSerial) {
  const auto tree = build_tree(schedule_b(18), 8, 18);
  std::vector<std::int64_t> ks;
  for (std::int64_t k = -3000; k <= 3000; k += 7) ks.push_back(k);
  FourierCoeffs serial, parallel;
  {
    ThreadsGuard g("1");
    serial = mu_hat_batch(tree, 18, ks);
  }
  {
    ThreadsGuard g("4");
    parallel = mu_hat_batch(tree, 18, ks);
  }
  ASSERT_EQ(serial.values.size(), parallel.values.size());
  for (std::size_t i = 0; i < serial.values.size(); ++i) {
    EXPECT_EQ(serial.values[i].value.real(), parallel.values[i].value.real());
    EXPECT_EQ(serial.values[i].value.imag(), parallel.values[i].value.imag());
  }
}

TEST(CoefficientsCsv, Format) {
  const auto c = mu_hat_range(two_of_four(), 1, 0, 2);
  std::ostringstream os;
  write_coefficients_csv(c, os);
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "k,re,im,abs");
  std::getline(in, line);
  EXPECT_EQ(line.rfind("0,1,", 0), 0u) << line;
  int rows = 1;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 3);
}

TEST(DecayProfile, FlatZeroForLebesgue) {
  const auto tree = build_tree(Schedule::uniform({4, 4, 4, 4}), 0, 4);
  const auto c = mu_hat_range(tree, 4, 0, 255);
  const auto p = decay_profile(c, 1);
  EXPECT_TRUE(p.flat_zero);
  EXPECT_EQ(p.fitted_bands, 0u);
}

TEST(DecayProfile, SyntheticPowerLaw) {
  FourierCoeffs c;
  for (std::int64_t k = 1; k < 1 << 12; ++k)
    c.values.push_back({k, std::complex<double>(std::pow(static_cast<double>(k), -0.25), 0)});
  // band sups sit at the left endpoints 2^b, so the fit is exact
  const auto p = decay_profile(c, 1);
  EXPECT_NEAR(p.sigma_hat, 0.5, 1e-6);
  EXPECT_NEAR(p.c_hat, 1.0, 1e-6);
  EXPECT_EQ(p.bands.size(), 12u);
}

TEST(DecayProfile, ErrorsAndExclusions) {
  FourierCoeffs few;
  for (std::int64_t k = 1; k < 4; ++k) few.values.push_back({k, 1.0});
  EXPECT_THROW(decay_profile(few, 1), PreconditionError);

  FourierCoeffs gaps;
  for (std::int64_t k = 1; k < 64; ++k)
    gaps.values.push_back({k, (k >= 8 && k < 16) ? 0.0 : 1.0 / static_cast<double>(k)});
  const auto p = decay_profile(gaps, 1);
  EXPECT_EQ(p.bands.size(), 6u);
  EXPECT_EQ(p.fitted_bands, 5u);
  EXPECT_FALSE(p.bands[3].in_fit);
}

TEST(DecayProfile, FixtureDecays) {
  const auto tree = build_tree(fixture_schedule(), 42, 5);
  const auto c = mu_hat_range(tree, 5, 1, 1 << 15);
  const auto p = decay_profile(c, 1);
  EXPECT_FALSE(p.flat_zero);
  EXPECT_GT(p.sigma_hat, 0.0);
}

TEST(ModulationCheck, Examples) {
  const auto tree = two_of_four();
  for (std::int64_t ell : {1, -1, 5}) EXPECT_LE(modulation_check(tree, 1, 0, ell), 1e-9);
  EXPECT_LE(modulation_check(tree, 1, 1, 1), 1e-9);
  EXPECT_THROW(modulation_check(tree, 1, 4, 1), PreconditionError);
  EXPECT_THROW(modulation_check(tree, 1, 1, 0), PreconditionError);
}

TEST(ModulationCheck, RandomOnFixture) {
  const auto tree = build_tree(fixture_schedule(), 42, 4);
  const SpectralEvaluator ev(level_intervals(tree, 4));
  const auto q = static_cast<std::int64_t>(ev.denominator());
  std::mt19937_64 rng(1);
  for (int i = 0; i < 100; ++i) {
    const std::int64_t k = static_cast<std::int64_t>(rng() % (2 * q - 1)) - (q - 1);
    std::int64_t ell = static_cast<std::int64_t>(rng() % 2001) - 1000;
    if (ell == 0) ell = 1;
    EXPECT_LE(modulation_check(ev, k, ell), 1e-9) << k << " " << ell;
  }
}

TEST(Hoeffding, Examples) {
  EXPECT_NEAR(hoeffding_bound(2 * 3.0 * std::sqrt(5.0), 3.0, 5), 4 * std::exp(-1.0), 1e-12);
  EXPECT_NEAR(hoeffding_bound(4.0, 1.0, 1), 4 * std::exp(-4.0), 1e-15);
  EXPECT_NEAR(hoeffding_bound(1e-9, 1.0, 1), 4.0, 1e-12);
  EXPECT_THROW(hoeffding_bound(0.0, 1.0, 1), PreconditionError);
}

TEST(IncrementBound, UniformSchedule) {
  const auto s = Schedule::uniform({3, 3, 3, 3});
  const double sigma = 0.7;
  for (std::size_t n = 0; n < 3; ++n) {
    const double p = std::pow(3.0, n), q = std::pow(3.0, n);
    const double expect = 4 * std::exp(-p * std::pow(q, -sigma) * std::pow(3.0, -sigma) / 16);
    EXPECT_NEAR(increment_bound(s, n, sigma).per_k, expect, 1e-14);
  }
}

TEST(IncrementBound, FixtureDirectFormula) {
  const auto s = fixture_schedule();
  const double sigma = 0.4;
  const double e = 16.0 * 16.0 * std::pow(625.0, -sigma) / (16.0 * std::pow(25.0, 2 + sigma));
  const double expect = 4 * std::exp(-e);
  const auto b = increment_bound(s, 2, sigma);
  EXPECT_GT(b.per_k, 0.0);
  EXPECT_NEAR(b.per_k / expect, 1.0, 1e-10);
  EXPECT_NEAR(b.exponent / e, 1.0, 1e-10);
  EXPECT_EQ(b.union_proxy, 1.0);
}

TEST(IncrementBound, MonotoneInSigma) {
  const auto s = fixture_schedule();
  for (std::size_t n = 0; n < 6; ++n) {
    double prev = 0;
    for (double sigma = 0.05; sigma < 2; sigma += 0.05) {
      const double v = increment_bound(s, n, sigma).per_k;
      EXPECT_GE(v, prev);
      prev = v;
    }
  }
}

TEST(IncrementBound, AstronomicalQ) {
  const auto s = schedule_b(200);
  const auto b = increment_bound(s, 199, 0.5);
  EXPECT_TRUE(std::isfinite(b.per_k));
  EXPECT_NEAR(b.per_k, 4.0, 1e-6);  // exponent underflows to ~0
}

TEST(IncrementScan, UniformTreeHasNoExceedances) {
  const auto tree = build_tree(Schedule::uniform({5, 5, 5}), 0, 3);
  const auto rep = increment_scan(tree, 1, 0.5);
  EXPECT_EQ(rep.exceedances, 0u);
  EXPECT_LE(rep.max_increment, 1e-12);
  EXPECT_EQ(rep.k_limit, 24);
  EXPECT_EQ(rep.increments.size(), 48u);
  EXPECT_DOUBLE_EQ(rep.coverage, 1.0);
}

TEST(IncrementScan, UnprunedLevelRefinesExactly) {
  const auto s = Schedule::custom({{ResidueSet(25, {2, 4, 8, 10}), SearchMethod::Exhaustive},
                                   {ResidueSet::full(7), SearchMethod::Exhaustive}});
  const auto tree = build_tree(s, 3, 2);
  const auto rep = increment_scan(tree, 1, 0.4);
  EXPECT_LE(rep.max_increment, 1e-12);
  EXPECT_EQ(rep.exceedances, 0u);
}

TEST(IncrementScan, CapAndCoverage) {
  const auto tree = build_tree(fixture_schedule(), 42, 3);
  const auto rep = increment_scan(tree, 2, 0.4, 1000);
  EXPECT_EQ(rep.k_limit, 1000);
  EXPECT_EQ(rep.increments.size(), 2000u);
  EXPECT_NEAR(rep.coverage, 1000.0 / 15624.0, 1e-15);
  EXPECT_NEAR(rep.threshold, std::pow(15625.0, -0.2), 1e-15);
  EXPECT_LE(rep.exceedances, rep.increments.size());
  EXPECT_THROW(increment_scan(tree, 3, 0.4), PreconditionError);
}

TEST(TailEnvelope, Examples) {
  const auto s = fixture_schedule();
  EXPECT_NEAR(tail_envelope(s, 0.4, 0), 4.0, 1e-15);
  EXPECT_NEAR(tail_envelope(s, 0.4, 3), 4 * std::pow(25.0, -3 * 0.4 / 2), 1e-14);
  double prev = 5;
  for (std::size_t n1 = 0; n1 <= 8; ++n1) {
    const double v = tail_envelope(s, 0.4, n1);
    EXPECT_LE(v, prev);
    prev = v;
  }
}
