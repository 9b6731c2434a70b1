#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "classforge/arith.hpp"

using namespace classforge;
using namespace classforge::arith;

static mpz_class random_mpz(std::mt19937_64& rng, int bits) {
  mpz_class n = 0;
  for (int i = 0; i < bits; i += 32) {
    n <<= 32;
    n += static_cast<unsigned long>(rng() & 0xffffffffULL);
  }
  return n;
}

TEST_CASE("primality on known values") {
  CHECK(is_prime(2));
  CHECK(is_prime(3));
  CHECK(is_prime(17));
  CHECK(is_prime(1000003));
  CHECK(is_prime((mpz_class(1) << 61) - 1));
  CHECK_FALSE(is_prime(1));
  CHECK_FALSE(is_prime(0));
  CHECK_FALSE(is_prime(-7));
  CHECK_FALSE(is_prime(561));   // Carmichael
  CHECK_FALSE(is_prime(6601));  // Carmichael
}

TEST_CASE("factor on pinned values") {
  Factorization f = factor(7803);
  REQUIRE(f.primes.size() == 2);
  CHECK(f.sign == 1);
  CHECK(f.primes[0] == std::pair<mpz_class, unsigned>{3, 3});
  CHECK(f.primes[1] == std::pair<mpz_class, unsigned>{17, 2});

  f = factor(-124);
  CHECK(f.sign == -1);
  REQUIRE(f.primes.size() == 2);
  CHECK(f.primes[0] == std::pair<mpz_class, unsigned>{2, 2});
  CHECK(f.primes[1] == std::pair<mpz_class, unsigned>{31, 1});

  CHECK(factor(1).primes.empty());
  CHECK(factor(-1).sign == -1);
  CHECK_THROWS_AS(factor(0), invalid_input);
}

TEST_CASE("factor reconstruction property") {
  std::mt19937_64 rng(0x5eed0001ULL);
  for (int i = 0; i < 200; ++i) {
    mpz_class n = random_mpz(rng, 64) + 2;
    if (rng() & 1) n = -n;
    Factorization f = factor(n);
    CHECK(f.value() == n);
    for (std::size_t k = 0; k < f.primes.size(); ++k) {
      CHECK(is_prime(f.primes[k].first));
      if (k) CHECK(f.primes[k - 1].first < f.primes[k].first);
    }
  }
  // semiprime with two 40-bit factors exercises the rho stage
  mpz_class p = 549755813911_mpz, q = 549755813881_mpz;
  Factorization f = factor(p * q);
  REQUIRE(f.primes.size() == 2);
  CHECK(f.primes[0].first == q);
  CHECK(f.primes[1].first == p);
}

TEST_CASE("squarefree kernel") {
  auto [d, s] = squarefree_kernel(-124);
  CHECK(d == -31);
  CHECK(s == 2);
  CHECK(squarefree_kernel(-8) == std::pair<mpz_class, mpz_class>{-2, 2});
  CHECK(squarefree_kernel(-7) == std::pair<mpz_class, mpz_class>{-7, 1});
  CHECK(squarefree_kernel(12) == std::pair<mpz_class, mpz_class>{3, 2});
  CHECK(squarefree_kernel(49) == std::pair<mpz_class, mpz_class>{1, 7});
  CHECK(squarefree_kernel(1) == std::pair<mpz_class, mpz_class>{1, 1});

  std::mt19937_64 rng(0x5eed0002ULL);
  for (int i = 0; i < 200; ++i) {
    mpz_class n = random_mpz(rng, 48) + 2;
    if (rng() & 1) n = -n;
    auto [dd, ss] = squarefree_kernel(n);
    CHECK(dd * ss * ss == n);
    for (const auto& [pp, ee] : factor(dd).primes) CHECK(ee == 1);
  }
}

TEST_CASE("perfect power") {
  auto r = perfect_power(125);
  REQUIRE(r.has_value());
  CHECK(r->first == 5);
  CHECK(r->second == 3);
  r = perfect_power(729);
  REQUIRE(r.has_value());
  CHECK(r->first == 3);
  CHECK(r->second == 6);
  CHECK_FALSE(perfect_power(17).has_value());
  CHECK(perfect_power(1089)->second == 2);  // 33^2
  CHECK_THROWS_AS(perfect_power(1), invalid_input);

  std::mt19937_64 rng(0x5eed0003ULL);
  for (int i = 0; i < 100; ++i) {
    mpz_class b = random_mpz(rng, 20) + 2;
    unsigned e = 2 + static_cast<unsigned>(rng() % 5);
    mpz_class n;
    mpz_pow_ui(n.get_mpz_t(), b.get_mpz_t(), e);
    auto pp = perfect_power(n);
    REQUIRE(pp.has_value());
    mpz_class back;
    mpz_pow_ui(back.get_mpz_t(), pp->first.get_mpz_t(), pp->second);
    CHECK(back == n);
    CHECK(pp->second >= e);
    // maximal exponent means the base is not itself a power
    if (pp->first > 1) CHECK_FALSE(perfect_power(pp->first).has_value());
  }
}

TEST_CASE("divisor enumeration") {
  auto dv = divisors(factor(12));
  std::vector<mpz_class> want{1, 2, 3, 4, 6, 12};
  CHECK(dv == want);
  CHECK(divisors(factor(1)).size() == 1);
  CHECK(divisors(factor(7803)).size() == 12);
}

TEST_CASE("smith normal form on pinned matrices") {
  IntMat m(2, 2);
  m.at(0, 0) = 2;
  m.at(1, 1) = 4;
  AbelianStructure g = smith_normal_form(m);
  REQUIRE(g.divisors.size() == 2);
  CHECK(g.divisors[0] == 2);
  CHECK(g.divisors[1] == 4);
  CHECK(g.order() == 8);
  CHECK(g.rank_at(2) == 2);
  CHECK(g.rank_at(4) == 1);

  m.at(0, 0) = 2;
  m.at(0, 1) = 1;
  m.at(1, 0) = 0;
  m.at(1, 1) = 2;
  g = smith_normal_form(m);
  REQUIRE(g.divisors.size() == 1);
  CHECK(g.divisors[0] == 4);

  m.at(0, 0) = 1;
  m.at(0, 1) = 0;
  m.at(1, 0) = 0;
  m.at(1, 1) = 6;
  g = smith_normal_form(m);
  REQUIRE(g.divisors.size() == 1);
  CHECK(g.divisors[0] == 6);

  IntMat wide(1, 2);
  wide.at(0, 0) = 2;
  CHECK_THROWS_AS(quotient_structure(wide), invalid_input);
  IntMat tall(2, 1);
  tall.at(0, 0) = 2;
  CHECK_THROWS_AS(smith_normal_form(tall), invalid_input);
  CHECK_THROWS_AS(smith_normal_form(IntMat{}), invalid_input);
}

TEST_CASE("smith decomposition properties") {
  std::mt19937_64 rng(0x5eed0004ULL);
  for (int trial = 0; trial < 150; ++trial) {
    std::size_t n = 2 + rng() % 4;
    IntMat m(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        m.at(i, j) = static_cast<long>(rng() % 41) - 20;
    SmithResult s = smith_decompose(m);

    // divisor chain
    for (std::size_t i = 0; i + 1 < s.divisors.size(); ++i) {
      if (s.divisors[i] == 0) CHECK(s.divisors[i + 1] == 0);
      if (s.divisors[i] != 0 && s.divisors[i + 1] != 0)
        CHECK(s.divisors[i + 1] % s.divisors[i] == 0);
    }

    // V * V^-1 == I
    IntMat prod(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        mpz_class acc = 0;
        for (std::size_t k = 0; k < n; ++k)
          acc += s.v.at(i, k) * s.v_inv.at(k, j);
        prod.at(i, j) = acc;
      }
    CHECK(prod == IntMat::identity(n));

    // every row of M maps to zero in the quotient chart
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        mpz_class acc = 0;
        for (std::size_t k = 0; k < n; ++k)
          acc += m.at(i, k) * s.v.at(k, j);
        if (s.divisors[j] != 0)
          CHECK(acc % s.divisors[j] == 0);
        else
          CHECK(acc == 0);
      }

    if (s.rank == n) {
      mpz_class ord = 1;
      for (const auto& d : s.divisors) ord *= d;
      AbelianStructure g = quotient_structure(m);
      CHECK(g.order() == ord);
    }
  }
}

TEST_CASE("element order in invariant-factor coordinates") {
  AbelianStructure g;
  g.divisors = {2, 4};
  CHECK(element_order_in(g, {1, 0}) == 2);
  CHECK(element_order_in(g, {0, 1}) == 4);
  CHECK(element_order_in(g, {1, 2}) == 2);
  CHECK(element_order_in(g, {1, 1}) == 4);
  CHECK(element_order_in(g, {0, 0}) == 1);
  CHECK(element_order_in(g, {-1, 3}) == 4);
}
