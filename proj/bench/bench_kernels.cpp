// Times each scan kernel's serial reference against its OpenMP build on a
// sized-up workload and confirms the two return identical rows.  Exits
// nonzero if any pair of outputs differs.

#include <gmpxx.h>

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "classforge/errors.hpp"
#include "classforge/kernels.hpp"

namespace {

using namespace classforge;

double time_best_of(int reps, const std::function<void()>& fn) {
  double best = 1e300;
  for (int i = 0; i < reps; ++i) {
    auto t0 = std::chrono::steady_clock::now();
    fn();
    double dt =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    if (dt < best) best = dt;
  }
  return best;
}

int report(const char* name, double serial, double parallel, bool identical) {
  std::printf("%-16s %9.3fs %9.3fs %7.2fx   %s\n", name, serial, parallel,
              serial / parallel, identical ? "identical" : "DIFFER");
  return identical ? 0 : 1;
}

}  // namespace

int main() {
  std::printf("openmp=%s threads=%d\n", kernels::openmp_enabled() ? "on" : "off",
              kernels::thread_count());
  std::printf("%-16s %10s %10s %8s\n", "kernel", "serial", "parallel",
              "speedup");

  int bad = 0;

  {
    // 40 curves over a 5-digit prime: 4e6 Legendre symbols per pass
    const long p = 99991;
    std::vector<long> serial_counts, parallel_counts;
    double ts = time_best_of(2, [&] {
      serial_counts.clear();
      for (long b = 1; b <= 40; ++b)
        serial_counts.push_back(kernels::ec_count_serial(2, b, p));
    });
    double tp = time_best_of(2, [&] {
      parallel_counts.clear();
      for (long b = 1; b <= 40; ++b)
        parallel_counts.push_back(kernels::ec_count_parallel(2, b, p));
    });
    bad += report("ec_count", ts, tp, serial_counts == parallel_counts);
  }

  {
    const long D = -39999991;  // 1 mod 4
    std::vector<kernels::FormRow> fs, fp;
    double ts = time_best_of(2, [&] {
      WorkMeter m(1000000000000ULL);
      fs = kernels::forms_enumerate_serial(D, m);
    });
    double tp = time_best_of(2, [&] {
      WorkMeter m(1000000000000ULL);
      fp = kernels::forms_enumerate_parallel(D, m);
    });
    bad += report("forms_enumerate", ts, tp, fs == fp);
  }

  {
    const mpz_class n = 17;
    const long H = 400000;
    std::vector<kernels::SweepHit> hs, hp;
    double ts = time_best_of(2, [&] {
      WorkMeter m(1000000000000ULL);
      hs = kernels::point_sweep_serial(n, H, m);
    });
    double tp = time_best_of(2, [&] {
      WorkMeter m(1000000000000ULL);
      hp = kernels::point_sweep_parallel(n, H, m);
    });
    bad += report("point_sweep", ts, tp, hs == hp);
  }

  {
    kernels::CubicShape shape{7, false, 0};
    std::vector<long> base{2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43};
    std::vector<kernels::SmoothHit> hs, hp;
    double ts = time_best_of(2, [&] {
      WorkMeter m(1000000000000ULL);
      hs = kernels::smooth_scan_serial(shape, 0, 48, base, m);
    });
    double tp = time_best_of(2, [&] {
      WorkMeter m(1000000000000ULL);
      hp = kernels::smooth_scan_parallel(shape, 0, 48, base, m);
    });
    bad += report("smooth_scan", ts, tp, hs == hp);
  }

  return bad;
}
