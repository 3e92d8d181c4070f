#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "parcone/kernels.hpp"
#include "parcone/rng.hpp"

using namespace parcone;

namespace {

std::vector<double> random_vec(std::size_t n, std::uint64_t seed) {
  std::vector<double> v(n);
  Rng rng(seed);
  for (auto& x : v) x = rng.gaussian();
  return v;
}

}  // namespace

TEST_CASE("serial and dispatched kernels agree bitwise across the grain") {
  // sizes straddling the parallel threshold, plus awkward remainders
  for (std::size_t n : {std::size_t(1), std::size_t(7), kern::kReduceBlock - 1,
                        kern::kReduceBlock, kern::kReduceBlock + 1,
                        std::size_t(200000), std::size_t(200001)}) {
    const auto a = random_vec(n, 1);
    const auto b = random_vec(n, 2);

    CHECK(kern::serial::dot(a.data(), b.data(), n) ==
          kern::dot(a.data(), b.data(), n));
    CHECK(kern::serial::sum_abs_pow(a.data(), 2.5, n) ==
          kern::sum_abs_pow(a.data(), 2.5, n));
    CHECK(kern::serial::max_abs(a.data(), n) == kern::max_abs(a.data(), n));

    std::vector<double> y1 = b, y2 = b;
    kern::serial::axpy(0.37, a.data(), y1.data(), n);
    kern::axpy(0.37, a.data(), y2.data(), n);
    CHECK(y1 == y2);

    std::vector<double> s1 = a, s2 = a;
    kern::serial::scale(-1.25, s1.data(), n);
    kern::scale(-1.25, s2.data(), n);
    CHECK(s1 == s2);

    std::vector<double> h1(n), h2(n);
    kern::serial::hadamard(a.data(), b.data(), h1.data(), n);
    kern::hadamard(a.data(), b.data(), h2.data(), n);
    CHECK(h1 == h2);

    std::vector<double> l1(n), l2(n);
    kern::serial::laplacian(a.data(), l1.data(), n, 4.0, 0.5, -0.5);
    kern::laplacian(a.data(), l2.data(), n, 4.0, 0.5, -0.5);
    CHECK(l1 == l2);

    std::vector<double> g1(n), g2(n);
    kern::serial::centered_grad(a.data(), g1.data(), n, 2.0);
    kern::centered_grad(a.data(), g2.data(), n, 2.0);
    CHECK(g1 == g2);

    std::vector<double> aext = random_vec(n + 2, 3);
    std::vector<double> d1(n), d2(n);
    kern::serial::div_a_grad(aext.data(), a.data(), d1.data(), n, 4.0);
    kern::div_a_grad(aext.data(), a.data(), d2.data(), n, 4.0);
    CHECK(d1 == d2);
  }
}

TEST_CASE("reductions match a plain loop to rounding") {
  const std::size_t n = 50000;
  const auto a = random_vec(n, 7);
  const auto b = random_vec(n, 8);
  double dref = 0.0, pref = 0.0, mref = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    dref += a[i] * b[i];
    pref += std::pow(std::abs(a[i]), 3.0);
    mref = std::max(mref, std::abs(a[i]));
  }
  CHECK(kern::dot(a.data(), b.data(), n) == doctest::Approx(dref).epsilon(1e-12));
  CHECK(kern::sum_abs_pow(a.data(), 3.0, n) ==
        doctest::Approx(pref).epsilon(1e-12));
  CHECK(kern::max_abs(a.data(), n) == mref);
}

TEST_CASE("stencil kernels on a hand-checked example") {
  // n = 3, h = 1/2 pretend spacing via inv_h2 = 4, u = (1, 3, 2)
  const double u[3] = {1.0, 3.0, 2.0};
  double lap[3];
  kern::serial::laplacian(u, lap, 3, 4.0, 0.0, 0.0);
  CHECK(lap[0] == doctest::Approx(4.0 * (0.0 - 2.0 * 1.0 + 3.0)));
  CHECK(lap[1] == doctest::Approx(4.0 * (1.0 - 2.0 * 3.0 + 2.0)));
  CHECK(lap[2] == doctest::Approx(4.0 * (3.0 - 2.0 * 2.0 + 0.0)));

  double lap_bc[3];
  kern::serial::laplacian(u, lap_bc, 3, 4.0, 2.0, -1.0);
  CHECK(lap_bc[0] == doctest::Approx(4.0 * (2.0 - 2.0 * 1.0 + 3.0)));
  CHECK(lap_bc[2] == doctest::Approx(4.0 * (3.0 - 2.0 * 2.0 - 1.0)));

  double grad[3];
  kern::serial::centered_grad(u, grad, 3, 2.0);
  CHECK(grad[0] == doctest::Approx(2.0 * (3.0 - 0.0)));
  CHECK(grad[1] == doctest::Approx(2.0 * (2.0 - 1.0)));
  CHECK(grad[2] == doctest::Approx(2.0 * (0.0 - 3.0)));

  // constant coefficient a reduces the flux form to the laplacian
  const double aext[5] = {3.0, 3.0, 3.0, 3.0, 3.0};
  double dag[3];
  kern::serial::div_a_grad(aext, u, dag, 3, 4.0);
  for (int i = 0; i < 3; ++i) CHECK(dag[i] == doctest::Approx(3.0 * lap[i]));
}

TEST_CASE("div_a_grad uses arithmetic half-node means") {
  // one interior node: out = inv_h2 * (a_half_left * (0 - u) + a_half_right
  // * (0 - u)) with halves (a0+a1)/2 and (a1+a2)/2
  const double u[1] = {2.0};
  const double aext[3] = {1.0, 2.0, 5.0};
  double out[1];
  kern::serial::div_a_grad(aext, u, out, 1, 9.0);
  const double a_lo = 0.5 * (1.0 + 2.0);
  const double a_hi = 0.5 * (2.0 + 5.0);
  CHECK(out[0] ==
        doctest::Approx(9.0 * (a_hi * (0.0 - 2.0) - a_lo * (2.0 - 0.0))));
}
