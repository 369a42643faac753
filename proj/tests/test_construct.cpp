#include "densitylab/densitylab.hpp"

#include <gtest/gtest.h>

using namespace densitylab;

namespace {

/// Literal oscillator for interior targets: ones until rho >= upper, then
/// zeros until rho <= lower, starting with ones at n = 0.
std::string literal_oscillation(Rational lower, Rational upper, Index n) {
  std::string out;
  bool rising = true;
  Index count = 0;
  for (Index k = 0; k < n; ++k) {
    bool bit = rising;
    out.push_back(bit ? '1' : '0');
    count += bit ? 1 : 0;
    Rational rho(static_cast<std::int64_t>(count), static_cast<std::int64_t>(k + 1));
    if (rising && rho >= upper) rising = false;
    else if (!rising && rho <= lower) rising = true;
  }
  return out;
}

}  // namespace

TEST(Prescribed, HalfIsAlternating) {
  auto s = build_prescribed_density(Rational(1, 2), Rational(1, 2));
  EXPECT_EQ(prefix(s, 8), "01010101");
  for (Index k = 1; k <= 500; ++k) EXPECT_EQ(partial_density(s, 2 * k).value(), Rational(1, 2));
}

TEST(Prescribed, SpecialCases) {
  EXPECT_EQ(prefix(build_prescribed_density(Rational(0), Rational(0)), 5000),
            prefix(squares(), 5000));
  EXPECT_EQ(prefix(build_prescribed_density(Rational(1), Rational(1)), 5000),
            prefix(complement(squares()), 5000));
}

TEST(Prescribed, ParameterErrors) {
  EXPECT_THROW(build_prescribed_density(Rational(2, 3), Rational(1, 3)), ParameterError);
  EXPECT_THROW(build_prescribed_density(Rational(-1, 3), Rational(1, 3)), ParameterError);
  EXPECT_THROW(build_prescribed_density(Rational(1, 3), Rational(4, 3)), ParameterError);
  EXPECT_THROW(parse_set("prescribed:2/3:1/3"), ParameterError);
}

TEST(Prescribed, BeattyFloorDifference) {
  for (auto d : {Rational(1, 4), Rational(2, 7), Rational(5, 9), Rational(99, 100)}) {
    auto s = build_prescribed_density(d, d);
    const auto p = d.numerator(), q = d.denominator();
    for (std::int64_t n = 0; n < 3000; ++n)
      ASSERT_EQ(s(static_cast<Index>(n)), ((n + 1) * p) / q - (n * p) / q != 0);
  }
}

TEST(Prescribed, BeattyDiscrepancyBelowOne) {
  auto s = build_prescribed_density(Rational(1, 4), Rational(1, 4));
  Index count = 0;
  for (Index n = 1; n <= 10000; ++n) {
    count += s(n - 1) ? 1 : 0;
    ASSERT_TRUE(count == n / 4 || count == (n + 3) / 4) << n;
    // |count - n/4| < 1  <=>  |4 count - n| < 4
    ASSERT_LT(std::llabs(static_cast<long long>(4 * count) - static_cast<long long>(n)), 4);
    ASSERT_EQ(partial_density(s, n).count, count);
  }
}

TEST(Prescribed, InteriorOscillationMatchesLiteralRule) {
  for (auto [lo, hi] : {std::pair{Rational(1, 3), Rational(2, 3)},
                        std::pair{Rational(1, 10), Rational(1, 2)},
                        std::pair{Rational(1, 4), Rational(3, 4)}}) {
    auto s = build_prescribed_density(lo, hi);
    ASSERT_EQ(prefix(s, 50000), literal_oscillation(lo, hi, 50000));
  }
}

TEST(Prescribed, OneThirdTwoThirdsProfile) {
  auto s = build_prescribed_density(Rational(1, 3), Rational(2, 3));
  auto e = estimate_limits(density_profile(s, geometric_schedule(1 << 20)));
  EXPECT_GE(to_double(e.lower_est), 0.31);
  EXPECT_LE(to_double(e.lower_est), 0.36);
  EXPECT_GE(to_double(e.upper_est), 0.63);
  EXPECT_LE(to_double(e.upper_est), 0.69);
}

TEST(Prescribed, ZeroOneOscillatesWidely) {
  auto s = build_prescribed_density(Rational(0), Rational(1));
  auto e = estimate_limits(density_profile(s, geometric_schedule(1 << 20)));
  EXPECT_LE(to_double(e.lower_est), 0.2);
  EXPECT_GE(to_double(e.upper_est), 0.8);
}

TEST(Prescribed, CounterMatchesBits) {
  for (auto [lo, hi] : {std::pair{Rational(1, 3), Rational(2, 3)},
                        std::pair{Rational(0), Rational(1, 2)},
                        std::pair{Rational(1, 2), Rational(1)}}) {
    auto s = build_prescribed_density(lo, hi);
    Index c = 0;
    for (Index n = 1; n <= 20000; ++n) {
      c += s(n - 1) ? 1 : 0;
      ASSERT_EQ(s.count_below(n), c);
    }
  }
}

TEST(Prescribed, InfiniteAndCoInfinite) {
  for (auto [lo, hi] : {std::pair{Rational(0), Rational(1)}, std::pair{Rational(0), Rational(0)},
                        std::pair{Rational(1), Rational(1)}, std::pair{Rational(1, 3), Rational(2, 3)},
                        std::pair{Rational(1, 2), Rational(1)}}) {
    auto s = build_prescribed_density(lo, hi);
    // Members and non-members keep appearing. At targets 0 and 1 whole phases are
    // single-valued and grow by a factor of up to k + 2, hence the wide window.
    for (Index start : {Index{1} << 12, Index{1} << 16, Index{1} << 19}) {
      Index window = 7 * start;
      Index c = s.count_below(start + window) - s.count_below(start);
      EXPECT_GT(c, 0u) << s.label();
      EXPECT_LT(c, window) << s.label();
    }
  }
}

TEST(OscillationSchedule, PhasesTerminateAndGrow) {
  auto sched = oscillation_schedule(Rational(1, 3), Rational(2, 3), 1 << 20);
  ASSERT_GE(sched.boundaries.size(), 10u);
  for (std::size_t i = 1; i < sched.boundaries.size(); ++i)
    ASSERT_LT(sched.boundaries[i - 1], sched.boundaries[i]);
  for (std::size_t i = 0; i < sched.targets.size(); ++i) {
    ASSERT_GE(sched.targets[i], 0);
    ASSERT_LE(sched.targets[i], 1);
    if (i > 0) {
      ASSERT_NE(sched.targets[i], sched.targets[i - 1]);
    }
  }
  EXPECT_GT(sched.growth_factor, 1);
  EXPECT_THROW(oscillation_schedule(Rational(1, 2), Rational(1, 2), 100), ParameterError);
}

TEST(OscillationSchedule, BoundariesHitTargets) {
  auto s = build_prescribed_density(Rational(1, 3), Rational(2, 3));
  auto sched = oscillation_schedule(Rational(1, 3), Rational(2, 3), 1 << 16);
  for (std::size_t i = 0; i < sched.boundaries.size(); ++i) {
    Rational rho = partial_density(s, sched.boundaries[i]).value();
    if (i % 2 == 0) ASSERT_GE(rho, Rational(2, 3));
    else ASSERT_LE(rho, Rational(1, 3));
  }
}
