#ifndef CLASSFORGE_ARITH_HPP
#define CLASSFORGE_ARITH_HPP

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "classforge/errors.hpp"

namespace classforge::arith {

bool is_prime(const mpz_class& n);

struct Factorization {
  int sign = 1;  // -1, 0 never occurs (n = 0 is rejected)
  std::vector<std::pair<mpz_class, unsigned>> primes;  // ascending, exp >= 1

  mpz_class value() const;
  unsigned exponent_of(const mpz_class& p) const;
};

// Trial division to 1e6, then Miller-Rabin + Brent's rho on what is left.
// Primality is deterministic below 2^64; above that the witnesses make a
// wrong answer unreachable for anything this library ever feeds in, but the
// result is formally probable-prime.  pre: n != 0, |n| < 2^128.
Factorization factor(const mpz_class& n, WorkMeter* meter = nullptr);

// n = d * s^2 with d squarefree and sign(d) = sign(n).  pre: n != 0.
std::pair<mpz_class, mpz_class> squarefree_kernel(const mpz_class& n,
                                                  WorkMeter* meter = nullptr);

// Largest k >= 2 with n = b^k, if any.  pre: n > 1.
std::optional<std::pair<mpz_class, unsigned>> perfect_power(const mpz_class& n);

// All positive divisors, ascending.  Count is metered.
std::vector<mpz_class> divisors(const Factorization& f,
                                WorkMeter* meter = nullptr);

// Finite abelian group in invariant-factor form: d1 | d2 | ... | dk, each
// di >= 2.  Empty chain is the trivial group.
struct AbelianStructure {
  std::vector<mpz_class> divisors;

  mpz_class order() const;
  mpz_class exponent() const;
  // dim of G/G^l over F_l, i.e. the number of di divisible by l.
  int rank_at(const mpz_class& l) const;
  bool operator==(const AbelianStructure&) const = default;
};

// Dense row-major integer matrix, small sizes only.
struct IntMat {
  std::size_t rows = 0, cols = 0;
  std::vector<mpz_class> a;

  IntMat() = default;
  IntMat(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c) {}

  mpz_class& at(std::size_t i, std::size_t j) { return a[i * cols + j]; }
  const mpz_class& at(std::size_t i, std::size_t j) const {
    return a[i * cols + j];
  }

  static IntMat identity(std::size_t n);
  IntMat transposed() const;
  bool operator==(const IntMat&) const = default;
};

// Smith decomposition of M (r x c): U M V = D with U, V unimodular and D
// diagonal, d1 | d2 | ... | dmin, all di >= 0.  U is not tracked; V and
// V^-1 are, because they carry the coordinates of the quotient
//
//   Z^c / rowspace(M)  ~  (+) Z/di  (+)  Z^(c - rank),
//
// where x |-> xV reads off the coordinates and row i of V^-1 realises the
// generator of the i-th cyclic factor.
struct SmithResult {
  std::vector<mpz_class> divisors;  // length min(r, c)
  std::size_t rank = 0;             // number of nonzero di
  IntMat v, v_inv;                  // c x c
};

SmithResult smith_decompose(const IntMat& m, WorkMeter* meter = nullptr);

// Structure of coker(M) = Z^rows / colspace(M).  Throws invalid_input if
// the cokernel is infinite (rank < rows) or M has no columns.
AbelianStructure smith_normal_form(const IntMat& m,
                                   WorkMeter* meter = nullptr);

// Invariant factors of Z^cols / rowspace(M); same infinite-quotient rule.
AbelianStructure quotient_structure(const IntMat& m,
                                    WorkMeter* meter = nullptr);

// Order of the image of `coords` in (+) Z/di (coords in the xV chart).
mpz_class element_order_in(const AbelianStructure& g,
                           const std::vector<mpz_class>& coords);

mpz_class isqrt(const mpz_class& n);
bool is_square(const mpz_class& n, mpz_class* root = nullptr);
// Exact k-th root if n is a k-th power (n >= 0, k >= 1).
bool is_kth_power(const mpz_class& n, unsigned k, mpz_class* root = nullptr);

}  // namespace classforge::arith

#endif
