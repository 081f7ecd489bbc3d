#include <doctest.h>

#include <cmath>
#include <random>

#include "raceplan/polynomial.hpp"

using namespace raceplan;

namespace {

// independent jerk-cost oracle: Simpson quadrature of 0.5 * jerk^2
template <typename Poly>
double jerk_cost_quadrature(const Poly& poly, double T) {
  const int n = 2000;
  const double h = T / n;
  double acc = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double t = h * i;
    const double j = poly.jerk(t);
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    acc += w * j * j;
  }
  return 0.5 * acc * h / 3.0;
}

struct Poly7 {
  // quintic plus a perturbation that keeps the boundary conditions
  Poly5 base;
  double a, b;  // epsilon(t) = (a + b t) * t^3 (T-t)^3
  double T;
  double jerk(double t) const {
    // third derivative of (a + b t) t^3 (T-t)^3, expanded via coefficients
    // p(t) = sum_k c_k t^k with c from the product
    double c[8] = {0};
    // t^3 (T-t)^3 = t^3 (T^3 - 3T^2 t + 3T t^2 - t^3)
    const double T3 = T * T * T, T2 = T * T;
    const double base_c[4] = {T3, -3 * T2, 3 * T, -1.0};  // coeffs of t^3.. t^6
    for (int k = 0; k < 4; ++k) {
      c[k + 3] += a * base_c[k];
      c[k + 4] += b * base_c[k];
    }
    double out = 0.0;
    for (int k = 3; k < 8; ++k) {
      out += c[k] * k * (k - 1) * (k - 2) * std::pow(t, k - 3);
    }
    return base.jerk(t) + out;
  }
};

}  // namespace

TEST_CASE("quintic known solution") {
  const Poly5 q = Poly5::connect({0, 0, 0}, {1, 0, 0}, 1.0);
  CHECK(q.coeffs()[3] == doctest::Approx(10.0));
  CHECK(q.coeffs()[4] == doctest::Approx(-15.0));
  CHECK(q.coeffs()[5] == doctest::Approx(6.0));
  CHECK(q.pos(0.5) == doctest::Approx(10 * 0.125 - 15 * 0.0625 + 6 * 0.03125));
}

TEST_CASE("quintic zero motion stays zero") {
  const Poly5 q = Poly5::connect({0, 0, 0}, {0, 0, 0}, 2.0);
  for (double t = 0.0; t <= 2.0; t += 0.1) CHECK(q.pos(t) == doctest::Approx(0.0));
}

TEST_CASE("quartic known solution") {
  const Poly4 q = Poly4::connect({0, 0, 0}, {1.0, 0.0}, 1.0);
  CHECK(q.coeffs()[3] == doctest::Approx(1.0));
  CHECK(q.coeffs()[4] == doctest::Approx(-0.5));
  CHECK(q.vel(1.0) == doctest::Approx(1.0));
  CHECK(q.acc(1.0) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("quartic constant velocity case") {
  const double v = 13.7;
  const Poly4 q = Poly4::connect({0, v, 0}, {v, 0.0}, 3.0);
  for (double t = 0.0; t <= 3.0; t += 0.25) {
    CHECK(q.pos(t) == doctest::Approx(v * t));
    CHECK(q.vel(t) == doctest::Approx(v));
  }
}

TEST_CASE("horizon must be positive") {
  CHECK_THROWS(Poly5::connect({0, 0, 0}, {1, 0, 0}, 0.0));
  CHECK_THROWS(Poly5::connect({0, 0, 0}, {1, 0, 0}, -1.0));
  CHECK_THROWS(Poly4::connect({0, 0, 0}, {1, 0}, 0.0));
}

TEST_CASE("boundary conditions reproduced to 1e-9") {
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> val(-50.0, 50.0), horizon(0.5, 6.0);
  for (int i = 0; i < 300; ++i) {
    const BoundaryState start{val(rng), val(rng), val(rng)};
    const BoundaryState end{val(rng), val(rng), val(rng)};
    const double T = horizon(rng);
    const Poly5 q = Poly5::connect(start, end, T);
    CHECK(std::abs(q.pos(0) - start.p) < 1e-9);
    CHECK(std::abs(q.vel(0) - start.v) < 1e-9);
    CHECK(std::abs(q.acc(0) - start.a) < 1e-9);
    CHECK(std::abs(q.pos(T) - end.p) < 1e-9);
    CHECK(std::abs(q.vel(T) - end.v) < 1e-9);
    CHECK(std::abs(q.acc(T) - end.a) < 1e-9);

    const Poly4 quartic = Poly4::connect(start, {end.v, end.a}, T);
    CHECK(std::abs(quartic.pos(0) - start.p) < 1e-9);
    CHECK(std::abs(quartic.vel(0) - start.v) < 1e-9);
    CHECK(std::abs(quartic.acc(0) - start.a) < 1e-9);
    CHECK(std::abs(quartic.vel(T) - end.v) < 1e-9);
    CHECK(std::abs(quartic.acc(T) - end.a) < 1e-9);
  }
}

TEST_CASE("closed-form jerk cost matches quadrature") {
  SUBCASE("zero polynomial") { CHECK(jerk_cost(Poly5::zero()) == 0.0); }
  SUBCASE("reference quintic") {
    const Poly5 q = Poly5::connect({0, 0, 0}, {1, 0, 0}, 1.0);
    CHECK(jerk_cost(q) == doctest::Approx(360.0));
    CHECK(jerk_cost_quadrature(q, 1.0) == doctest::Approx(360.0));
  }
  SUBCASE("reference quartic") {
    const Poly4 q = Poly4::connect({0, 0, 0}, {1.0, 0.0}, 1.0);
    // integrand (6-12t)^2 integrates to 12; halving gives 6
    CHECK(jerk_cost(q) == doctest::Approx(6.0));
    CHECK(jerk_cost_quadrature(q, 1.0) == doctest::Approx(6.0));
  }
  SUBCASE("random agreement") {
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> val(-20.0, 20.0), horizon(0.5, 5.0);
    for (int i = 0; i < 50; ++i) {
      const double T = horizon(rng);
      const Poly5 q = Poly5::connect({val(rng), val(rng), val(rng)},
                                     {val(rng), val(rng), val(rng)}, T);
      CHECK(jerk_cost(q) == doctest::Approx(jerk_cost_quadrature(q, T)).epsilon(1e-9));
    }
  }
}

TEST_CASE("quintic minimizes jerk against boundary-preserving perturbations") {
  std::mt19937 rng(1234);
  std::uniform_real_distribution<double> val(-30.0, 30.0), horizon(0.8, 5.0), eps(-0.3, 0.3);
  for (int i = 0; i < 30; ++i) {
    const double T = horizon(rng);
    const Poly5 q = Poly5::connect({val(rng), val(rng), val(rng)},
                                   {val(rng), val(rng), val(rng)}, T);
    const double base_cost = jerk_cost(q);
    for (int j = 0; j < 30; ++j) {
      Poly7 perturbed{q, eps(rng), eps(rng), T};
      if (std::abs(perturbed.a) + std::abs(perturbed.b) < 1e-6) continue;
      const int n = 2000;
      const double h = T / n;
      double cost = 0.0;
      for (int k = 0; k <= n; ++k) {
        const double t = h * k;
        const double jj = perturbed.jerk(t);
        const double w = (k == 0 || k == n) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
        cost += w * jj * jj;
      }
      cost *= 0.5 * h / 3.0;
      CHECK(cost > base_cost);
    }
  }
}
