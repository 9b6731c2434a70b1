#ifndef CLASSFORGE_KERNELS_HPP
#define CLASSFORGE_KERNELS_HPP

#include <gmpxx.h>

#include <cstdint>
#include <vector>

#include "classforge/errors.hpp"

// Data-parallel scan kernels.  Every kernel ships in two builds: a serial
// reference (the ground truth the tests pin down) and an OpenMP variant
// that must produce byte-identical output, which it gets by giving each
// thread a contiguous slice and concatenating the slices in slice order.
// The *_auto entry points pick the OpenMP build when it was compiled in.

namespace classforge::kernels {

bool openmp_enabled() noexcept;
int thread_count() noexcept;

// --- point counting on y^2 = x^3 + ax + b over F_p (odd p, good reduction)

long ec_count_serial(long a, long b, long p);
long ec_count_parallel(long a, long b, long p);
long ec_count_auto(long a, long b, long p);

// --- reduced positive forms of discriminant D < 0, ordered by (a, b)

struct FormRow {
  long a, b, c;
  bool operator==(const FormRow&) const = default;
};

std::vector<FormRow> forms_enumerate_serial(long D, WorkMeter& meter);
std::vector<FormRow> forms_enumerate_parallel(long D, WorkMeter& meter);
std::vector<FormRow> forms_enumerate_auto(long D, WorkMeter& meter);

// --- rational point sweep on y^2 = x^3 + n
//
// Walks x = u/e^2 with gcd(u, e) = 1, |u| <= H, 1 <= e <= H^(1/4) and
// reports every (u, e, v) with u^3 + n e^6 = v^2, v >= 0.  Rows come out
// ordered by (e, u).

struct SweepHit {
  long u, e;
  mpz_class v;
  bool operator==(const SweepHit&) const = default;
};

std::vector<SweepHit> point_sweep_serial(const mpz_class& n, long H,
                                         WorkMeter& meter);
std::vector<SweepHit> point_sweep_parallel(const mpz_class& n, long H,
                                           WorkMeter& meter);
std::vector<SweepHit> point_sweep_auto(const mpz_class& n, long H,
                                       WorkMeter& meter);

// --- smooth-norm scan for the cubic relation harvest
//
// Coordinates (x, y, z) over the integral basis of Q(cbrt(m)); when
// three_shared is true the basis is {1, th, (1 + t*th + th^2)/3}, else
// {1, th, th^2}.  Scans the cube shells r_lo < max|coord| <= r_hi in
// lexicographic order, keeps one representative per +-alpha pair, skips
// imprimitive triples, and reports those whose |norm| factors completely
// over base_primes.  |norm| = 1 rows (units) are reported too; the caller
// decides what to do with them.

struct CubicShape {
  long m = 2;
  bool three_shared = false;
  int t = 0;  // only meaningful when three_shared
};

struct SmoothHit {
  long x, y, z;
  mpz_class norm_abs;
  bool operator==(const SmoothHit&) const = default;
};

std::vector<SmoothHit> smooth_scan_serial(const CubicShape& shape, long r_lo,
                                          long r_hi,
                                          const std::vector<long>& base_primes,
                                          WorkMeter& meter);
std::vector<SmoothHit> smooth_scan_parallel(
    const CubicShape& shape, long r_lo, long r_hi,
    const std::vector<long>& base_primes, WorkMeter& meter);
std::vector<SmoothHit> smooth_scan_auto(const CubicShape& shape, long r_lo,
                                        long r_hi,
                                        const std::vector<long>& base_primes,
                                        WorkMeter& meter);

}  // namespace classforge::kernels

#endif
