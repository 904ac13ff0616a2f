#include "topodyn/entropy.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace topodyn;

namespace {

DynSystem golden_rotation() {
  return make_system(circle_rotation_descriptor(kGoldenAlphaText));
}
DynSystem full2() { return make_system(full_shift_descriptor(2)); }
DynSystem golden_mean() { return make_system(golden_mean_sft_descriptor()); }
DynSystem sturmian() {
  return make_system(sturmian_descriptor(kGoldenAlphaText));
}

// Brute-force oracle for the separation quantity: literal max over shifts.
double dyn_distance_brute(const DynSystem& sys, const Point& x, const Point& y,
                          long n) {
  double best = 0;
  for (long k = 0; k < n; ++k)
    best = std::max(best, sys.distance(sys.iterate(x, k), sys.iterate(y, k)));
  return best;
}

TEST(DynDistance, RotationCollapsesToDistance) {
  DynSystem rot = golden_rotation();
  Point x(TorusPoint(0.2)), y(TorusPoint(0.55));
  for (long n : {1L, 5L, 50L})
    EXPECT_EQ(dyn_distance(rot, x, y, n), rot.distance(x, y));
}

TEST(DynDistance, FullShiftFirstDiffAtFive) {
  DynSystem sys = full2();
  Point x = sys.point_from_word({1, 1, 1, 1, 1, 1}, 16);
  Point y = sys.point_from_word({1, 1, 1, 1, 2, 1}, 16);
  EXPECT_EQ(dyn_distance(sys, x, y, 5), 0.5);
  EXPECT_EQ(dyn_distance(sys, x, y, 5), dyn_distance_brute(sys, x, y, 5));
  EXPECT_EQ(dyn_distance(sys, x, y, 1), sys.distance(x, y));
}

TEST(DynDistance, MatchesBruteForceOnRandomWords) {
  DynSystem sys = full2();
  std::mt19937_64 rng(3);
  for (int t = 0; t < 200; ++t) {
    Word a(20), b(20);
    for (std::size_t i = 0; i < 20; ++i) {
      a[i] = static_cast<Symbol>(1 + (rng() & 1));
      b[i] = static_cast<Symbol>(1 + (rng() & 1));
    }
    Point x = sys.point_from_word(a, 40), y = sys.point_from_word(b, 40);
    long n = 1 + static_cast<long>(rng() % 12);
    EXPECT_EQ(dyn_distance(sys, x, y, n), dyn_distance_brute(sys, x, y, n));
  }
}

TEST(SeparatedSet, CircleGridAllKept) {
  DynSystem rot = golden_rotation();
  auto net = rot.build_net(0.25);
  auto cert = separated_set(rot, net, 1, 0.2);
  EXPECT_EQ(cert.points.size(), 4u);
  EXPECT_TRUE(cert.spanning_ok);
  EXPECT_TRUE(verify_separation_certificate(rot, cert));
}

TEST(SeparatedSet, FullShiftThreePrefixWindowTwo) {
  DynSystem sys = full2();
  auto net = sys.build_net(0.125);  // all 3-prefixes
  auto cert = separated_set(sys, net, 2, 0.25);
  // (2, 2^-2)-separation distinguishes the first 2+2-1 = 3 symbols.
  EXPECT_EQ(cert.points.size(), 8u);
  EXPECT_TRUE(cert.spanning_ok);
  EXPECT_TRUE(verify_separation_certificate(sys, cert));
}

TEST(SeparatedSet, EpsAboveDiameterKeepsOne) {
  DynSystem rot = golden_rotation();
  auto net = rot.build_net(0.25);
  EXPECT_EQ(separated_set(rot, net, 1, 0.5).points.size(), 1u);
  DynSystem sys = full2();
  EXPECT_EQ(separated_set(sys, sys.build_net(0.25), 3, 1.0).points.size(), 1u);
}

TEST(SeparatedSet, GreedySpanningDualityRandom) {
  DynSystem sys = golden_rotation();
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 50; ++t) {
    std::vector<Point> cands;
    int k = 3 + static_cast<int>(rng() % 40);
    for (int i = 0; i < k; ++i) cands.push_back(Point(TorusPoint(u(rng))));
    double eps = 0.02 + 0.3 * u(rng);
    auto cert = separated_set(sys, cands, 1 + static_cast<long>(rng() % 5), eps);
    EXPECT_TRUE(cert.spanning_ok);
    EXPECT_TRUE(verify_separation_certificate(sys, cert));
  }
}

TEST(CountExact, FullShiftPowers) {
  DynSystem sys = full2();
  EXPECT_EQ(separated_count_exact(sys, 5, 1), 32u);
  for (long n = 1; n <= 16; ++n)
    EXPECT_EQ(separated_count_exact(sys, n, 1), 1ull << n);
}

TEST(CountExact, GoldenMeanFibonacci) {
  DynSystem sys = golden_mean();
  EXPECT_EQ(separated_count_exact(sys, 4, 1), 8u);
  // Counts match direct enumeration (Fibonacci growth).
  for (long len = 2; len <= 12; ++len) {
    auto words = sys.language().enumerate_words(static_cast<std::size_t>(len));
    EXPECT_EQ(separated_count_exact(sys, len, 1), words.size());
  }
}

TEST(CountExact, SturmianComplexity) {
  DynSystem sys = sturmian();
  EXPECT_EQ(separated_count_exact(sys, 4, 1), 5u);
  EXPECT_EQ(separated_count_exact(sys, 10, 3), 13u);  // (n+m-1)+1
}

TEST(CountExact, RejectsTorus) {
  EXPECT_THROW(separated_count_exact(golden_rotation(), 4, 1),
               UnsupportedSystemError);
}

TEST(ExactVsGreedy, AgreeOnSubshifts) {
  for (DynSystem sys : {full2(), golden_mean(), sturmian()}) {
    for (long n : {2L, 4L}) {
      for (int m : {1, 2}) {
        double eps = std::ldexp(1.0, -m);
        std::size_t len = static_cast<std::size_t>(n + m - 1);
        std::vector<Point> cands;
        for (const auto& w : sys.language().enumerate_words(len))
          cands.push_back(sys.point_from_word(w, len + 16));
        auto cert = separated_set(sys, cands, n, eps);
        EXPECT_EQ(cert.points.size(), separated_count_exact(sys, n, m))
            << kind_name(sys.kind()) << " n=" << n << " m=" << m;
        EXPECT_TRUE(cert.spanning_ok);
      }
    }
  }
}

TEST(Estimate, FullShiftSlopeIsLn2) {
  DynSystem sys = full2();
  std::vector<long> ns;
  for (long n = 1; n <= 16; ++n) ns.push_back(n);
  auto e = eps_entropy_estimate(sys, {}, 0.5, ns);
  EXPECT_TRUE(e.exact);
  EXPECT_NEAR(e.slope, std::log(2.0), 1e-9);
  EXPECT_NEAR(e.endpoint, std::log(2.0), 1e-12);
}

TEST(Estimate, RotationSlopeTiny) {
  DynSystem rot = golden_rotation();
  auto net = rot.build_net(0.02);
  std::vector<long> ns;
  for (long n = 20; n <= 200; n += 20) ns.push_back(n);
  for (double eps : {0.05, 0.1}) {
    auto e = eps_entropy_estimate(rot, net, eps, ns);
    EXPECT_LE(std::fabs(e.slope), 1e-3) << eps;
    EXPECT_GE(e.slope, -1e-12);
  }
}

TEST(Estimate, SturmianSlopeSmall) {
  DynSystem sys = sturmian();
  std::vector<long> ns;
  for (long n = 20; n <= 200; n += 20) ns.push_back(n);
  auto e = eps_entropy_estimate(sys, {}, 0.5, ns);
  EXPECT_TRUE(e.exact);
  EXPECT_LT(e.slope, std::log(201.0) / 200.0);
  EXPECT_LT(e.slope, 0.027);
  EXPECT_GE(e.slope, 0.0);
}

TEST(Estimate, CountsMonotoneInEps) {
  DynSystem sys = golden_mean();
  std::vector<long> ns{2, 4, 6, 8};
  auto fine = eps_entropy_estimate(sys, {}, 0.25, ns);
  auto coarse = eps_entropy_estimate(sys, {}, 0.5, ns);
  for (std::size_t i = 0; i < ns.size(); ++i)
    EXPECT_GE(fine.counts[i], coarse.counts[i]);
}

TEST(Gamma, FullShiftExpansiveSingleton) {
  DynSystem sys = full2();
  Point x = sys.point_from_word({1, 2, 1}, 64);
  auto net = sys.build_net(0.125, 64);
  auto g = gamma_set_probe(sys, x, 0.5, 32, net, {1, 2, 3});
  EXPECT_TRUE(g.exact_singleton);
  EXPECT_EQ(g.members.size(), 1u);
  EXPECT_EQ(g.estimate.slope, 0.0);
}

TEST(Gamma, RotationBallAndZeroEstimate) {
  DynSystem rot = golden_rotation();
  auto net = rot.build_net(0.02);
  Point x(TorusPoint(0.0));
  std::vector<long> ns{10, 20, 30, 40};
  auto g = gamma_set_probe(rot, x, 0.1, 100, net, ns);
  for (const auto& y : g.members) EXPECT_LT(rot.distance(x, y), 0.1);
  EXPECT_FALSE(g.members.empty());
  EXPECT_LE(g.estimate.slope, 1e-3);
}

TEST(Gamma, SkewStaysInFirstCoordinateBall) {
  DynSystem sys = make_system(skew_product_descriptor(kGoldenAlphaText));
  auto net = sys.build_net(0.05);
  Point x(TorusPoint(0.0, 0.0));
  std::vector<long> ns{10, 20, 30};
  auto g = gamma_set_probe(sys, x, 0.05, 50, net, ns);
  ASSERT_FALSE(g.members.empty());
  for (const auto& y : g.members) {
    // Staying 0.05-close for 50 steps pins the first coordinate hard: its
    // offset drifts into the second coordinate linearly.
    EXPECT_LT(circle_dist(y.torus().coords[0], 0.0), 0.05);
  }
  EXPECT_LE(g.estimate.slope, 1e-3);
}

TEST(HStar, SubshiftExpansiveCertificate) {
  for (DynSystem sys : {full2(), golden_mean(), sturmian()}) {
    auto net = sys.build_net(0.25, 64);
    auto r = h_star_probe(sys, 0.5, net, 32, net, {1, 2, 3});
    EXPECT_EQ(r.value, 0.0);
    EXPECT_EQ(r.certificate, "expansive");
  }
}

TEST(HStar, RotationSmall) {
  DynSystem rot = golden_rotation();
  auto net = rot.build_net(0.05);
  std::vector<long> ns{10, 20, 30, 40};
  auto r = h_star_probe(rot, 0.1, {net[0], net[3]}, 60, net, ns);
  EXPECT_LE(r.value, 1e-3);
  EXPECT_EQ(r.certificate, "sampled");
}

TEST(HStar, FullShiftAtEpsilonOneSeesEverything) {
  DynSystem sys = full2();
  auto net = sys.build_net(1.0 / 32.0, 64);  // all 5-prefixes
  std::vector<long> ns{1, 2, 3, 4};
  auto r = h_star_probe(sys, 1.0, {net[0]}, 16, net, ns);
  EXPECT_NEAR(r.value, std::log(2.0), 1e-9);
}

TEST(BoundCombine, SumsAndChecksDomain) {
  EXPECT_EQ(entropy_bound_combine(std::log(2.0), 0.0), std::log(2.0));
  EXPECT_NEAR(entropy_bound_combine(0.3, 0.2), 0.5, 1e-15);
  EXPECT_THROW(entropy_bound_combine(-0.1, 0.0), DomainError);
}

TEST(BoundCombine, FullShiftExactConsistency) {
  // h(X,f) <= h(X,f,eps) + h*(f,eps), both sides exact at eps = 1/2.
  DynSystem sys = full2();
  std::vector<long> ns{4, 8, 12};
  auto e = eps_entropy_estimate(sys, {}, 0.5, ns);
  auto net = sys.build_net(0.25, 64);
  auto hs = h_star_probe(sys, 0.5, net, 32, net, ns);
  double bound = entropy_bound_combine(e.slope, hs.value);
  EXPECT_GE(bound + 1e-12, std::log(2.0));
}

TEST(BoundCombine, GoldenMeanConsistency) {
  // Exact value ln((1+sqrt 5)/2); the regression over a deep window carries
  // only the o(1) bias of the count recurrence, well under 1e-6.
  DynSystem sys = golden_mean();
  std::vector<long> ns{20, 25, 30, 35, 40};
  auto e = eps_entropy_estimate(sys, {}, 0.5, ns);
  auto net = sys.build_net(0.25, 64);
  auto hs = h_star_probe(sys, 0.5, net, 32, net, ns);
  double bound = entropy_bound_combine(e.slope, hs.value);
  EXPECT_GE(bound + 1e-6, std::log((1.0 + std::sqrt(5.0)) / 2.0));
}

}  // namespace
