#include "topodyn/system.hpp"

#include <gtest/gtest.h>

#include <random>

#include "topodyn/arcs.hpp"

using namespace topodyn;

namespace {

DynSystem golden_rotation() {
  return make_system(circle_rotation_descriptor(kGoldenAlphaText));
}

DynSystem quarter_rotation() {
  return make_system(circle_rotation_descriptor("1/4"));
}

DynSystem full2() { return make_system(full_shift_descriptor(2)); }

DynSystem golden_mean() { return make_system(golden_mean_sft_descriptor()); }

DynSystem sturmian() {
  return make_system(sturmian_descriptor(kGoldenAlphaText));
}

DynSystem skew(const char* alpha = "1/4") {
  return make_system(skew_product_descriptor(alpha));
}

TEST(Descriptor, RoundTripsLosslessly) {
  for (const SystemDescriptor& d :
       {circle_rotation_descriptor(kGoldenAlphaText),
        circle_rotation_descriptor("1/4"), skew_product_descriptor("0.25"),
        full_shift_descriptor(2), golden_mean_sft_descriptor(),
        sturmian_descriptor(kGoldenAlphaText)}) {
    SystemDescriptor back = parse_descriptor(serialize_descriptor(d));
    EXPECT_EQ(back, d) << serialize_descriptor(d);
  }
}

TEST(Descriptor, ProductRoundTrip) {
  SystemDescriptor d;
  d.kind = SystemKind::product;
  d.factors = {circle_rotation_descriptor("1/3"),
               circle_rotation_descriptor(kGoldenAlphaText)};
  SystemDescriptor back = parse_descriptor(serialize_descriptor(d));
  EXPECT_EQ(back, d);
}

TEST(Descriptor, RejectsUnknownKeys) {
  EXPECT_THROW(parse_descriptor("kind = full_shift\nsymbols = 2\nwhat = 1\n"),
               ParseError);
  EXPECT_THROW(parse_descriptor("symbols = 2\n"), ParseError);
  EXPECT_THROW(parse_descriptor("kind = full_shift\nkind = sft\n"), ParseError);
}

TEST(MakeSystem, ConstructorExamples) {
  DynSystem rot = golden_rotation();
  EXPECT_FALSE(rot.symbolic_exact());
  EXPECT_TRUE(rot.isometry());

  DynSystem shift = full2();
  EXPECT_TRUE(shift.symbolic_exact());
  EXPECT_EQ(shift.alphabet_size(), 2);
}

TEST(MakeSystem, GoldenMeanThreeWordsExcludeForbidden) {
  // Independent enumeration: 3-words over {1,2} avoiding "11".
  std::vector<Word> brute;
  for (Symbol a : {1, 2})
    for (Symbol b : {1, 2})
      for (Symbol c : {1, 2}) {
        Word w{a, b, c};
        bool bad = false;
        for (std::size_t i = 0; i + 1 < w.size(); ++i)
          if (w[i] == 1 && w[i + 1] == 1) bad = true;
        if (!bad) brute.push_back(w);
      }
  auto words = golden_mean().language().enumerate_words(3);
  EXPECT_EQ(words.size(), brute.size());
  EXPECT_EQ(words.size(), 5u);
  for (const auto& w : words) {
    for (std::size_t i = 0; i + 1 < w.size(); ++i)
      EXPECT_FALSE(w[i] == 1 && w[i + 1] == 1);
  }
}

TEST(MakeSystem, SftDeadSymbolRejected) {
  SystemDescriptor d;
  d.kind = SystemKind::sft;
  d.symbols = 2;
  d.forbidden_words = {Word{1, 1}, Word{1, 2}};  // symbol 1 has no successor
  EXPECT_THROW(make_system(d), ValidationError);
}

TEST(Apply, RotationWrapsMod1) {
  DynSystem rot = quarter_rotation();
  Point x(TorusPoint(0.9));
  Point y = rot.apply(x);
  EXPECT_NEAR(y.torus().coords[0], 0.15, 1e-15);
}

TEST(Apply, SkewProductFormula) {
  DynSystem sys = skew("1/4");
  Point x(TorusPoint(0.5, 0.0));
  Point y = sys.apply(x);
  EXPECT_NEAR(y.torus().coords[0], 0.75, 1e-15);
  EXPECT_NEAR(y.torus().coords[1], 0.5, 1e-15);
}

TEST(Apply, FullShiftShifts) {
  DynSystem sys = full2();
  Point x = sys.point_from_word({1, 2, 1, 2}, 8);
  Point y = sys.apply(x);
  EXPECT_EQ(y.symbolic().at(0), 2);
  EXPECT_EQ(y.symbolic().at(1), 1);
  EXPECT_EQ(y.symbolic().horizon(), 7u);
}

TEST(Apply, HorizonExhaustedThrows) {
  DynSystem sys = full2();
  Point x = sys.point_from_word({1}, 1);
  Point y = sys.apply(x);
  EXPECT_THROW(sys.apply(y), HorizonError);
  EXPECT_THROW(y.symbolic().at(0), HorizonError);
}

TEST(Iterate, RotationPeriodFour) {
  DynSystem rot = quarter_rotation();
  Point x(TorusPoint(0.1));
  Point y = rot.iterate(x, 4);
  EXPECT_EQ(y.torus().coords[0], 0.1);  // exact via the rational path
  EXPECT_EQ(rot.iterate(x, 0).torus().coords[0], 0.1);
}

TEST(Iterate, SkewClosedFormAlphaZero) {
  DynSystem sys = skew("0/1");
  Point x(TorusPoint(0.5, 0.0));
  Point y = sys.iterate(x, 3);
  EXPECT_NEAR(y.torus().coords[0], 0.5, 1e-15);
  EXPECT_NEAR(y.torus().coords[1], 0.5, 1e-15);  // y + 3x = 1.5 mod 1
}

TEST(Iterate, FullShiftTwice) {
  DynSystem sys = full2();
  Point x = sys.point_from_word({1, 1, 2, 1}, 8);
  Point y = sys.iterate(x, 2);
  EXPECT_EQ(y.symbolic().at(0), 2);
  EXPECT_EQ(y.symbolic().at(1), 1);
}

TEST(Iterate, ClosedFormMatchesRepeatedApply) {
  for (DynSystem sys : {golden_rotation(), skew("0.137")}) {
    Point x = sys.kind() == SystemKind::circle_rotation
                  ? Point(TorusPoint(0.3))
                  : Point(TorusPoint(0.3, 0.7));
    Point stepped = x;
    for (int n = 1; n <= 1000; ++n) {
      stepped = sys.apply(stepped);
      if (n % 97 == 0 || n == 1000) {
        Point closed = sys.iterate(x, n);
        EXPECT_NEAR(sys.distance(closed, stepped), 0.0, 1e-9)
            << kind_name(sys.kind()) << " n=" << n;
      }
    }
  }
}

TEST(Iterate, SkewFirstCoordinateMatchesRotationExactly) {
  DynSystem sk = skew(kGoldenAlphaText);
  DynSystem rot = golden_rotation();
  Point x(TorusPoint(0.37, 0.21));
  Point rx(TorusPoint(0.37));
  for (std::int64_t n : {1, 7, 100, 12345}) {
    EXPECT_EQ(sk.iterate(x, n).torus().coords[0],
              rot.iterate(rx, n).torus().coords[0]);
  }
}

TEST(Distance, TorusWrapAround) {
  DynSystem rot = golden_rotation();
  EXPECT_NEAR(rot.distance(Point(TorusPoint(0.1)), Point(TorusPoint(0.95))),
              0.15, 1e-15);
}

TEST(Distance, SymbolicFirstDisagreement) {
  DynSystem sys = full2();
  Point x = sys.point_from_word({1, 2}, 16);
  Point y = sys.point_from_word({1, 1}, 16);
  EXPECT_EQ(sys.distance(x, y), 0.25);  // 2^-2
}

TEST(Distance, IdenticalToHorizonFlagged) {
  DynSystem sys = full2();
  Point x = sys.point_from_word({1, 2, 1}, 10);
  Point y = sys.point_from_word({1, 2, 1}, 10);
  auto r = sys.distance_ex(x, y);
  EXPECT_EQ(r.value, 0.0);
  EXPECT_TRUE(r.at_horizon);
}

TEST(Distance, VariantMismatchThrows) {
  DynSystem sys = full2();
  EXPECT_THROW(sys.distance(Point(TorusPoint(0.1)), Point(TorusPoint(0.2))),
               TypeError);
}

TEST(Net, CircleGrid) {
  DynSystem rot = quarter_rotation();
  auto net = rot.build_net(0.25);
  ASSERT_EQ(net.size(), 4u);
  EXPECT_EQ(net[0].torus().coords[0], 0.0);
  EXPECT_EQ(net[1].torus().coords[0], 0.25);
}

TEST(Net, FullShiftPrefixes) {
  auto net = full2().build_net(0.125);  // 2^-3
  EXPECT_EQ(net.size(), 8u);
}

TEST(Net, GoldenMeanFibonacciCount) {
  auto net = golden_mean().build_net(0.125);
  EXPECT_EQ(net.size(), 5u);
}

TEST(Net, CapRespected) {
  SystemDescriptor d = full_shift_descriptor(2);
  d.net_cap = 16;
  DynSystem sys = make_system(d);
  EXPECT_THROW(sys.build_net(1.0 / 1024.0), BudgetError);
}

TEST(Metric, IsometryOnNetPoints) {
  DynSystem rot = golden_rotation();
  auto net = rot.build_net(0.1);
  for (const auto& x : net)
    for (const auto& y : net) {
      double before = rot.distance(x, y);
      double after = rot.distance(rot.apply(x), rot.apply(y));
      EXPECT_NEAR(before, after, 1e-12);
    }
}

TEST(Metric, AxiomsOnSampledTriples) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  DynSystem sys = skew("0.3");
  for (int i = 0; i < 300; ++i) {
    Point a(TorusPoint(u(rng), u(rng)));
    Point b(TorusPoint(u(rng), u(rng)));
    Point c(TorusPoint(u(rng), u(rng)));
    EXPECT_EQ(sys.distance(a, b), sys.distance(b, a));
    EXPECT_LE(sys.distance(a, c),
              sys.distance(a, b) + sys.distance(b, c) + 1e-12);
    EXPECT_GE(sys.distance(a, b), 0.0);
  }
}

TEST(Metric, ShiftMetricIdentity) {
  // d(shift x, shift y) = 2 d(x, y) whenever x, y agree at index 1 and
  // differ later.
  DynSystem sys = full2();
  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) {
    Word wx(12), wy(12);
    wx[0] = wy[0] = static_cast<Symbol>(1 + (rng() & 1));
    bool differ = false;
    for (std::size_t j = 1; j < wx.size(); ++j) {
      wx[j] = static_cast<Symbol>(1 + (rng() & 1));
      wy[j] = static_cast<Symbol>(1 + (rng() & 1));
      differ = differ || wx[j] != wy[j];
    }
    if (!differ) wy[5] = static_cast<Symbol>(3 - wy[5]);
    Point x = sys.point_from_word(wx, 16);
    Point y = sys.point_from_word(wy, 16);
    EXPECT_EQ(sys.distance(sys.apply(x), sys.apply(y)), 2 * sys.distance(x, y));
  }
}

TEST(Sturmian, ComplexityIsNPlusOne) {
  DynSystem sys = sturmian();
  for (std::size_t n : {1u, 2u, 3u, 4u, 8u, 16u}) {
    EXPECT_EQ(sys.language().count_words(n), n + 1) << "n=" << n;
  }
}

TEST(Sturmian, CodingMatchesRotationIntervals) {
  DynSystem sys = sturmian();
  const auto* st = sys.language().sturmian();
  ASSERT_NE(st, nullptr);
  DynSystem rot = golden_rotation();
  Point x(TorusPoint(0.0));
  for (std::size_t n = 0; n < 64; ++n) {
    double phase = rot.iterate(x, static_cast<std::int64_t>(n)).torus().coords[0];
    Symbol expected = phase < 1.0 - kGoldenAlpha ? 1 : 2;
    EXPECT_EQ(st->symbol_at_phase(0.0, n), expected) << n;
  }
}

TEST(Sturmian, WordArcAgreesWithScan) {
  DynSystem sys = sturmian();
  const auto* st = sys.language().sturmian();
  auto factors = sys.language().enumerate_words(6);
  EXPECT_EQ(factors.size(), 7u);
  // Every enumerated factor has a nonempty phase arc, and every admissible
  // 6-word is found by the scan.
  lang::FullShiftLang all{2};
  std::vector<Word> every;
  all.enumerate_words(6, every);
  int arc_admissible = 0;
  for (const auto& w : every) {
    bool in_list =
        std::find(factors.begin(), factors.end(), w) != factors.end();
    bool arc_nonempty = !st->word_arc(w).inflated(-1e-9).empty();
    if (arc_nonempty) ++arc_admissible;
    EXPECT_EQ(sys.language().word_admissible(w), in_list);
  }
  EXPECT_EQ(arc_admissible, 7);
}

TEST(Product, PairOfRotations) {
  SystemDescriptor d;
  d.kind = SystemKind::product;
  d.factors = {circle_rotation_descriptor("1/4"),
               circle_rotation_descriptor("1/3")};
  DynSystem sys = make_system(d);
  EXPECT_EQ(sys.dimension(), 2u);
  EXPECT_TRUE(sys.isometry());
  Point x(TorusPoint(0.0, 0.0));
  Point y = sys.iterate(x, 12);
  EXPECT_EQ(y.torus().coords[0], 0.0);
  EXPECT_EQ(y.torus().coords[1], 0.0);
}

TEST(Arcs, BasicOperations) {
  ArcSet a = ArcSet::ball(0.0, 0.1);
  EXPECT_TRUE(a.contains(0.95));
  EXPECT_TRUE(a.contains(0.05));
  EXPECT_FALSE(a.contains(0.5));
  ArcSet b = ArcSet::ball(0.5, 0.1);
  EXPECT_TRUE(a.intersect(b).empty());
  EXPECT_FALSE(a.intersect(a.shifted(0.15)).empty());
  ArcSet s = ArcSet::scaled_ball(4, 0.1);
  EXPECT_TRUE(s.contains(0.25));
  EXPECT_TRUE(s.contains(0.77));
  EXPECT_FALSE(s.contains(0.6));
  EXPECT_NEAR(ArcSet::full().measure(), 1.0, 1e-15);
}

}  // namespace
