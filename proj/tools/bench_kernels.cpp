///
/// Micro-benchmark comparing the serial reference kernels against the
/// dispatched (OpenMP above the grain size) variants.  Prints one row per
/// kernel and size with both timings and the speedup.
///

#include <chrono>
#include <cstdio>
#include <functional>
#include <vector>

#include "parcone/kernels.hpp"
#include "parcone/rng.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double time_of(int reps, const std::function<void()>& body) {
  // one warmup, then best of 3
  body();
  double best = 1e300;
  for (int trial = 0; trial < 3; ++trial) {
    const auto t0 = Clock::now();
    for (int r = 0; r < reps; ++r) body();
    const auto t1 = Clock::now();
    best = std::min(best, std::chrono::duration<double>(t1 - t0).count() / reps);
  }
  return best;
}

volatile double sink;  // keeps reductions observable

}  // namespace

int main() {
  std::printf("%-12s %10s %12s %12s %8s\n", "kernel", "n", "serial_us",
              "dispatch_us", "speedup");
  for (std::size_t n : {std::size_t(1) << 16, std::size_t(1) << 20,
                        std::size_t(1) << 23}) {
    std::vector<double> a(n), b(n), out(n);
    parcone::Rng rng(42);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = rng.gaussian();
      b[i] = rng.gaussian();
    }
    const int reps = n > (std::size_t(1) << 21) ? 5 : 50;

    struct Row {
      const char* name;
      std::function<void()> serial, dispatched;
    };
    const double p = 3.0;
    const double inv_h2 = double(n) * double(n);
    std::vector<Row> rows;
    rows.push_back({"dot",
                    [&] { sink = parcone::kern::serial::dot(a.data(), b.data(), n); },
                    [&] { sink = parcone::kern::dot(a.data(), b.data(), n); }});
    rows.push_back(
        {"sum_abs_pow",
         [&] { sink = parcone::kern::serial::sum_abs_pow(a.data(), p, n); },
         [&] { sink = parcone::kern::sum_abs_pow(a.data(), p, n); }});
    rows.push_back(
        {"axpy",
         [&] { parcone::kern::serial::axpy(1.0001, a.data(), out.data(), n); },
         [&] { parcone::kern::axpy(1.0001, a.data(), out.data(), n); }});
    rows.push_back(
        {"laplacian",
         [&] {
           parcone::kern::serial::laplacian(a.data(), out.data(), n, inv_h2,
                                            0.0, 0.0);
         },
         [&] {
           parcone::kern::laplacian(a.data(), out.data(), n, inv_h2, 0.0, 0.0);
         }});

    for (auto& row : rows) {
      const double ts = time_of(reps, row.serial);
      const double td = time_of(reps, row.dispatched);
      std::printf("%-12s %10zu %12.2f %12.2f %8.2f\n", row.name, n, ts * 1e6,
                  td * 1e6, ts / td);
    }
  }
  return 0;
}
