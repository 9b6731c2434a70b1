#include "classforge/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#ifdef CLASSFORGE_HAVE_OPENMP
#include <omp.h>
#endif

namespace classforge::kernels {

bool openmp_enabled() noexcept {
#ifdef CLASSFORGE_HAVE_OPENMP
  return true;
#else
  return false;
#endif
}

int thread_count() noexcept {
#ifdef CLASSFORGE_HAVE_OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

namespace {

using u64 = std::uint64_t;
using i128 = __int128;
using u128 = unsigned __int128;

mpz_class mpz_from_u128(u128 v) {
  mpz_class hi(static_cast<unsigned long>(v >> 64));
  hi <<= 64;
  return hi + mpz_class(static_cast<unsigned long>(v));
}

u128 u128_from_mpz(const mpz_class& v) {
  mpz_class hi = v >> 64, lo = v - (hi << 64);
  return (static_cast<u128>(hi.get_ui()) << 64) | lo.get_ui();
}

// floor sqrt of a u128, exact.  One AM-GM step from any positive seed lands
// within 1 of sqrt(t) from above, after which integer Newton is monotone.
u128 isqrt_u128(u128 t) {
  if (t == 0) return 0;
  u128 x = static_cast<u128>(sqrtl(static_cast<long double>(t))) + 2;
  x = (x + t / x) >> 1;
  x = (x + t / x) >> 1;
  for (;;) {
    u128 nx = (x + t / x) >> 1;
    if (nx >= x) break;
    x = nx;
  }
  while (x * x > t) --x;
  while ((x + 1) * (x + 1) <= t) ++x;
  return x;
}

constexpr u64 kSquareMask64 = []() {
  u64 m = 0;
  for (u64 i = 0; i < 64; ++i) m |= u64(1) << ((i * i) & 63);
  return m;
}();

bool u128_square(u128 t, u128* root) {
  if (!(kSquareMask64 >> (static_cast<u64>(t) & 63) & 1)) return false;
  u128 s = isqrt_u128(t);
  if (s * s != t) return false;
  *root = s;
  return true;
}

std::vector<uint8_t> square_table(long p) {
  std::vector<uint8_t> sq(p, 0);
  for (long t = 0; t <= p / 2; ++t)
    sq[static_cast<u64>(t) * t % p] = 1;
  return sq;
}

inline long ec_rhs(long x, long a, long b, long p) {
  u64 xx = static_cast<u64>(x);
  u64 v = (xx * xx % p) * xx % p;
  v = (v + static_cast<u64>(a) * xx) % p;
  v = (v + b) % p;
  return static_cast<long>(v);
}

}  // namespace

long ec_count_serial(long a, long b, long p) {
  std::vector<uint8_t> sq = square_table(p);
  long count = 1;
  for (long x = 0; x < p; ++x) {
    long f = ec_rhs(x, a, b, p);
    count += f == 0 ? 1 : (sq[f] ? 2 : 0);
  }
  return count;
}

long ec_count_parallel(long a, long b, long p) {
  std::vector<uint8_t> sq = square_table(p);
  long count = 1;
#ifdef CLASSFORGE_HAVE_OPENMP
#pragma omp parallel for reduction(+ : count) schedule(static)
#endif
  for (long x = 0; x < p; ++x) {
    long f = ec_rhs(x, a, b, p);
    count += f == 0 ? 1 : (sq[f] ? 2 : 0);
  }
  return count;
}

long ec_count_auto(long a, long b, long p) {
  return openmp_enabled() ? ec_count_parallel(a, b, p)
                          : ec_count_serial(a, b, p);
}

namespace {

long forms_amax(long D) {
  long amax = static_cast<long>(std::sqrt(static_cast<double>(-D) / 3.0)) + 2;
  while (amax > 0 && 3 * amax * amax > -D) --amax;
  return amax;
}

void forms_for_a(long D, long a, std::vector<FormRow>& out) {
  long b0 = -a + 1;
  if (((b0 - D) & 1) != 0) ++b0;  // match parity of D
  for (long b = b0; b <= a; b += 2) {
    long num = b * b - D;
    if (num % (4 * a) != 0) continue;
    long c = num / (4 * a);
    if (c < a) continue;
    if (b < 0 && a == c) continue;
    if (std::gcd(std::gcd(a, std::abs(b)), c) != 1) continue;
    out.push_back({a, b, c});
  }
}

}  // namespace

std::vector<FormRow> forms_enumerate_serial(long D, WorkMeter& meter) {
  long amax = forms_amax(D);
  meter.charge(static_cast<u64>(amax) * (amax + 3) / 2, "forms-enumerate");
  std::vector<FormRow> out;
  for (long a = 1; a <= amax; ++a) forms_for_a(D, a, out);
  return out;
}

std::vector<FormRow> forms_enumerate_parallel(long D, WorkMeter& meter) {
  long amax = forms_amax(D);
  meter.charge(static_cast<u64>(amax) * (amax + 3) / 2, "forms-enumerate");
  std::vector<std::vector<FormRow>> per_a(amax + 1);
#ifdef CLASSFORGE_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic, 64)
#endif
  for (long a = 1; a <= amax; ++a) forms_for_a(D, a, per_a[a]);
  std::vector<FormRow> out;
  for (long a = 1; a <= amax; ++a)
    out.insert(out.end(), per_a[a].begin(), per_a[a].end());
  return out;
}

std::vector<FormRow> forms_enumerate_auto(long D, WorkMeter& meter) {
  return openmp_enabled() ? forms_enumerate_parallel(D, meter)
                          : forms_enumerate_serial(D, meter);
}

namespace {

struct SweepPlan {
  long H, E;
  bool narrow;   // whole computation fits in i128
  mpz_class n;
};

SweepPlan sweep_plan(const mpz_class& n, long H, WorkMeter& meter) {
  SweepPlan plan;
  plan.H = H;
  plan.E = std::max(1L, static_cast<long>(std::pow(static_cast<double>(H), 0.25)));
  while (static_cast<i128>(plan.E + 1) * (plan.E + 1) * (plan.E + 1) *
             (plan.E + 1) <=
         H)
    ++plan.E;
  while (plan.E > 1 && static_cast<i128>(plan.E) * plan.E * plan.E * plan.E > H)
    --plan.E;
  plan.n = n;
  // u^3 + n e^6 must stay well inside i128 for the fast path
  std::size_t ebits = 1;
  while ((1L << ebits) <= plan.E) ++ebits;
  plan.narrow = mpz_sizeinbase(n.get_mpz_t(), 2) + 6 * ebits <= 120;
  meter.charge(static_cast<u64>(plan.E) * (2 * static_cast<u64>(H) + 1),
               "point-sweep");
  return plan;
}

void sweep_range(const SweepPlan& plan, long e, long u_lo, long u_hi,
                 std::vector<SweepHit>& out) {
  mpz_class e6 = mpz_class(e) * e * e;
  e6 = e6 * e6;
  mpz_class c_mpz = plan.n * e6;
  if (plan.narrow) {
    i128 c = static_cast<i128>(u128_from_mpz(abs(c_mpz)));
    if (c_mpz < 0) c = -c;
    for (long u = u_lo; u <= u_hi; ++u) {
      if (std::gcd(std::abs(u), e) != 1) continue;
      i128 t = static_cast<i128>(u) * u * u + c;
      if (t < 0) continue;
      u128 root;
      if (!u128_square(static_cast<u128>(t), &root)) continue;
      out.push_back({u, e, mpz_from_u128(root)});
    }
  } else {
    mpz_class t, root;
    for (long u = u_lo; u <= u_hi; ++u) {
      if (std::gcd(std::abs(u), e) != 1) continue;
      t = mpz_class(u) * u * u + c_mpz;
      if (t < 0) continue;
      if (!mpz_perfect_square_p(t.get_mpz_t())) continue;
      mpz_sqrt(root.get_mpz_t(), t.get_mpz_t());
      out.push_back({u, e, root});
    }
  }
}

}  // namespace

std::vector<SweepHit> point_sweep_serial(const mpz_class& n, long H,
                                         WorkMeter& meter) {
  SweepPlan plan = sweep_plan(n, H, meter);
  std::vector<SweepHit> out;
  for (long e = 1; e <= plan.E; ++e) sweep_range(plan, e, -H, H, out);
  return out;
}

std::vector<SweepHit> point_sweep_parallel(const mpz_class& n, long H,
                                           WorkMeter& meter) {
  SweepPlan plan = sweep_plan(n, H, meter);
  std::vector<SweepHit> out;
  int slices = std::max(1, thread_count());
  long span = 2 * H + 1;
  for (long e = 1; e <= plan.E; ++e) {
    std::vector<std::vector<SweepHit>> per_slice(slices);
#ifdef CLASSFORGE_HAVE_OPENMP
#pragma omp parallel for schedule(static, 1)
#endif
    for (int s = 0; s < slices; ++s) {
      long lo = -H + span * s / slices;
      long hi = -H + span * (s + 1) / slices - 1;
      if (lo <= hi) sweep_range(plan, e, lo, hi, per_slice[s]);
    }
    for (int s = 0; s < slices; ++s)
      out.insert(out.end(), per_slice[s].begin(), per_slice[s].end());
  }
  return out;
}

std::vector<SweepHit> point_sweep_auto(const mpz_class& n, long H,
                                       WorkMeter& meter) {
  return openmp_enabled() ? point_sweep_parallel(n, H, meter)
                          : point_sweep_serial(n, H, meter);
}

namespace {

// |norm| of x + y*th + z*nu over the given basis shape, exact in i128.
u128 cubic_norm_abs(const CubicShape& s, long x, long y, long z) {
  i128 X = x, Y = y, Z = z;
  i128 m = s.m;
  if (s.three_shared) {
    X = 3 * static_cast<i128>(x) + z;
    Y = 3 * static_cast<i128>(y) + s.t * static_cast<i128>(z);
  }
  i128 n = X * X * X + m * Y * Y * Y + m * m * Z * Z * Z - 3 * m * X * Y * Z;
  if (s.three_shared) n /= 27;
  return n < 0 ? static_cast<u128>(-n) : static_cast<u128>(n);
}

void smooth_slice(const CubicShape& shape, long r_lo, long r_hi, long x_lo,
                  long x_hi, const std::vector<long>& base_primes,
                  std::vector<SmoothHit>& out) {
  for (long x = x_lo; x <= x_hi; ++x)
    for (long y = -r_hi; y <= r_hi; ++y)
      for (long z = -r_hi; z <= r_hi; ++z) {
        long mx = std::max({std::abs(x), std::abs(y), std::abs(z)});
        if (mx <= r_lo || mx > r_hi) continue;
        if (x < 0 || (x == 0 && (y < 0 || (y == 0 && z <= 0)))) continue;
        if (std::gcd(std::gcd(std::abs(x), std::abs(y)), std::abs(z)) > 1)
          continue;
        u128 na = cubic_norm_abs(shape, x, y, z);
        u128 rest = na;
        for (long p : base_primes) {
          while (rest % static_cast<u128>(p) == 0) rest /= p;
          if (rest == 1) break;
        }
        if (rest != 1) continue;
        out.push_back({x, y, z, mpz_from_u128(na)});
      }
}

// canonical representatives all live in the x >= 0 half-space
u64 scan_volume(long r_hi) {
  u64 w = 2 * static_cast<u64>(r_hi) + 1;
  return (static_cast<u64>(r_hi) + 1) * w * w;
}

}  // namespace

std::vector<SmoothHit> smooth_scan_serial(const CubicShape& shape, long r_lo,
                                          long r_hi,
                                          const std::vector<long>& base_primes,
                                          WorkMeter& meter) {
  meter.charge(scan_volume(r_hi), "smooth-scan");
  std::vector<SmoothHit> out;
  smooth_slice(shape, r_lo, r_hi, 0, r_hi, base_primes, out);
  return out;
}

std::vector<SmoothHit> smooth_scan_parallel(
    const CubicShape& shape, long r_lo, long r_hi,
    const std::vector<long>& base_primes, WorkMeter& meter) {
  meter.charge(scan_volume(r_hi), "smooth-scan");
  int slices = std::max(1, thread_count());
  long span = r_hi + 1;
  std::vector<std::vector<SmoothHit>> per_slice(slices);
#ifdef CLASSFORGE_HAVE_OPENMP
#pragma omp parallel for schedule(static, 1)
#endif
  for (int s = 0; s < slices; ++s) {
    long lo = span * s / slices;
    long hi = span * (s + 1) / slices - 1;
    if (lo <= hi)
      smooth_slice(shape, r_lo, r_hi, lo, hi, base_primes, per_slice[s]);
  }
  std::vector<SmoothHit> out;
  for (int s = 0; s < slices; ++s)
    out.insert(out.end(), per_slice[s].begin(), per_slice[s].end());
  return out;
}

std::vector<SmoothHit> smooth_scan_auto(const CubicShape& shape, long r_lo,
                                        long r_hi,
                                        const std::vector<long>& base_primes,
                                        WorkMeter& meter) {
  return openmp_enabled()
             ? smooth_scan_parallel(shape, r_lo, r_hi, base_primes, meter)
             : smooth_scan_serial(shape, r_lo, r_hi, base_primes, meter);
}

}  // namespace classforge::kernels
