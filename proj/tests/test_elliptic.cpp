#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "classforge/elliptic.hpp"
#include "classforge/kernels.hpp"

using namespace classforge;
using namespace classforge::ec;

static CurveQ mordell(long n) { return make_curve(mpq_class(0), mpq_class(n)); }

static PointQ pt(long x, long y) {
  return PointQ::affine(mpq_class(x), mpq_class(y));
}

TEST_CASE("curve construction") {
  CHECK_THROWS_AS(make_curve(mpq_class(0), mpq_class(0)), invalid_input);
  CHECK_THROWS_AS(make_curve(mpq_class(-3), mpq_class(2)), invalid_input);
  CHECK(mordell(17).disc_quantity() == 27 * 289);
  CHECK(make_curve(mpq_class(1, 2), mpq_class(1)).is_integral() == false);
}

TEST_CASE("group law on pinned values") {
  CurveQ c1 = mordell(1);
  CHECK(add(c1, pt(2, 3), pt(2, 3)) == pt(0, 1));
  CHECK(multiply(c1, 2, pt(2, 3)) == pt(0, 1));
  CHECK(multiply(c1, 3, pt(2, 3)) == pt(-1, 0));
  CHECK(multiply(c1, 6, pt(2, 3)) == PointQ::infinity());
  CHECK(add(c1, pt(-1, 0), pt(-1, 0)) == PointQ::infinity());

  CurveQ c17 = mordell(17);
  CHECK(multiply(c17, 2, pt(-2, 3)) == pt(8, -23));
  CHECK(add(c17, pt(-2, 3), negate_point(pt(-2, 3))) == PointQ::infinity());

  CurveQ c4 = mordell(4);
  CHECK(multiply(c4, 2, pt(0, 2)) == pt(0, -2));
  CHECK(multiply(c4, 3, pt(0, 2)) == PointQ::infinity());

  CHECK_THROWS_AS(add(c1, pt(5, 5), pt(2, 3)), invalid_input);
}

TEST_CASE("group law properties on sampled points") {
  CurveQ c = mordell(17);
  PointQ g1 = pt(-2, 3), g2 = pt(2, 5);
  REQUIRE(on_curve(c, g1));
  REQUIRE(on_curve(c, g2));

  std::mt19937_64 rng(0x5eed0101ULL);
  auto sample = [&]() {
    long i = static_cast<long>(rng() % 7) - 3;
    long j = static_cast<long>(rng() % 7) - 3;
    return add(c, multiply(c, i, g1), multiply(c, j, g2));
  };
  for (int trial = 0; trial < 60; ++trial) {
    PointQ a = sample(), b = sample(), d = sample();
    CHECK(on_curve(c, a));
    CHECK(add(c, a, b) == add(c, b, a));
    CHECK(add(c, add(c, a, b), d) == add(c, a, add(c, b, d)));
    CHECK(add(c, a, negate_point(a)) == PointQ::infinity());
    CHECK(multiply(c, 5, a) ==
          add(c, multiply(c, 2, a), multiply(c, 3, a)));
  }
}

TEST_CASE("integral torsion candidates on pinned curves") {
  auto cands = integral_torsion_candidates(mordell(1));
  std::vector<PointQ> want{pt(-1, 0), pt(0, -1), pt(0, 1), pt(2, -3),
                           pt(2, 3)};
  CHECK(cands == want);

  cands = integral_torsion_candidates(mordell(17));
  want = {pt(-2, -3), pt(-2, 3)};
  CHECK(cands == want);

  cands = integral_torsion_candidates(mordell(4));
  want = {pt(0, -2), pt(0, 2)};
  CHECK(cands == want);

  cands = integral_torsion_candidates(mordell(-1));
  CHECK(cands == std::vector<PointQ>{pt(1, 0)});

  CHECK_THROWS_AS(
      integral_torsion_candidates(make_curve(mpq_class(1, 2), mpq_class(1))),
      invalid_input);
}

TEST_CASE("torsion subgroups of y^2 = x^3 + n") {
  TorsionGroup t = torsion_subgroup(mordell(1));
  REQUIRE(t.structure.divisors.size() == 1);
  CHECK(t.structure.divisors[0] == 6);
  CHECK(t.points.size() == 6);
  REQUIRE(t.generators.size() == 1);
  CHECK(multiply(mordell(1), 6, t.generators[0]) == PointQ::infinity());
  CHECK(multiply(mordell(1), 3, t.generators[0]) != PointQ::infinity());
  CHECK(multiply(mordell(1), 2, t.generators[0]) != PointQ::infinity());

  t = torsion_subgroup(mordell(17));
  CHECK(t.structure.divisors.empty());
  CHECK(t.points.size() == 1);
  CHECK(t.points[0] == PointQ::infinity());

  t = torsion_subgroup(mordell(4));
  REQUIRE(t.structure.divisors.size() == 1);
  CHECK(t.structure.divisors[0] == 3);

  t = torsion_subgroup(mordell(-1));
  REQUIRE(t.structure.divisors.size() == 1);
  CHECK(t.structure.divisors[0] == 2);

  // a curve with full 2-torsion: y^2 = x^3 - x has (0,0), (1,0), (-1,0)
  TorsionGroup f = torsion_subgroup(make_curve(mpq_class(-1), mpq_class(0)));
  REQUIRE(f.structure.divisors.size() == 2);
  CHECK(f.structure.divisors[0] == 2);
  CHECK(f.structure.divisors[1] == 2);
  CHECK(f.points.size() == 4);
}

TEST_CASE("point counts mod p on pinned curves") {
  CHECK(count_points_mod_p(mordell(1), 5) == 6);
  CHECK(count_points_mod_p(mordell(1), 7) == 12);
  CHECK(count_points_mod_p(mordell(17), 5) == 6);
  CHECK(count_points_mod_p(mordell(17), 7) == 13);

  CHECK_THROWS_AS(count_points_mod_p(mordell(1), 3), invalid_input);
  CHECK_THROWS_AS(count_points_mod_p(mordell(1), 9), invalid_input);
  CHECK_THROWS_AS(count_points_mod_p(mordell(1), 100003), limit_exceeded);
}

TEST_CASE("Hasse bound and parallel agreement for point counts") {
  for (long p : {5L, 7L, 11L, 13L, 101L, 1009L, 10007L}) {
    for (long n : {1L, 17L, -2L, 24L}) {
      CurveQ c = mordell(n);
      mpz_class disc = mpz_class(27) * n * n;
      if (mpz_divisible_ui_p(disc.get_mpz_t(), p)) continue;
      long cnt = count_points_mod_p(c, p);
      CHECK(kernels::ec_count_serial(0, ((n % p) + p) % p, p) == cnt);
      long diff = std::abs(cnt - p - 1);
      CHECK(static_cast<double>(diff) <= 2.0 * std::sqrt(static_cast<double>(p)));
    }
  }
}

TEST_CASE("point sweep kernel") {
  WorkMeter m1, m2;
  auto hits = kernels::point_sweep_serial(17, 100, m1);
  auto par = kernels::point_sweep_parallel(17, 100, m2);
  CHECK(hits == par);

  // every reported row really solves u^3 + 17 e^6 = v^2 with gcd(u,e)=1
  bool saw_m2 = false, saw_2 = false, saw_8 = false, saw_quarter = false;
  for (const auto& h : hits) {
    mpz_class u(h.u), e(h.e);
    CHECK(u * u * u + 17 * e * e * e * e * e * e == h.v * h.v);
    CHECK(gcd(u, e) == 1);
    if (h.u == -2 && h.e == 1) saw_m2 = h.v == 3;
    if (h.u == 2 && h.e == 1) saw_2 = h.v == 5;
    if (h.u == 8 && h.e == 1) saw_8 = h.v == 23;
    if (h.u == 1 && h.e == 2) saw_quarter = h.v == 33;
  }
  CHECK(saw_m2);
  CHECK(saw_2);
  CHECK(saw_8);
  CHECK(saw_quarter);

  WorkMeter m3;
  auto small = kernels::point_sweep_serial(1, 10, m3);
  REQUIRE(small.size() == 3);
  CHECK(small[0] == kernels::SweepHit{-1, 1, 0});
  CHECK(small[1] == kernels::SweepHit{0, 1, 1});
  CHECK(small[2] == kernels::SweepHit{2, 1, 3});

  WorkMeter tiny(10);
  CHECK_THROWS_AS(kernels::point_sweep_serial(17, 1000, tiny), limit_exceeded);
}
