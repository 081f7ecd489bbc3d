#pragma once

#include <array>
#include <stdexcept>

namespace raceplan {

/// Position/velocity/acceleration triple used as polynomial boundary state.
struct BoundaryState {
  double p = 0.0;
  double v = 0.0;
  double a = 0.0;
};

/// Quintic connecting two full boundary states over [0, T]. Minimizes the
/// squared-jerk integral among all curves with those boundaries.
class Poly5 {
 public:
  static Poly5 connect(const BoundaryState& start, const BoundaryState& end, double T) {
    if (T <= 0.0) throw std::invalid_argument("poly5: horizon T must be positive");
    Poly5 q;
    q.horizon_ = T;
    q.c_[0] = start.p;
    q.c_[1] = start.v;
    q.c_[2] = start.a / 2.0;
    const double T2 = T * T, T3 = T2 * T, T4 = T3 * T, T5 = T4 * T;
    const double dp = end.p - (start.p + start.v * T + 0.5 * start.a * T2);
    const double dv = end.v - (start.v + start.a * T);
    const double da = end.a - start.a;
    q.c_[3] = (20.0 * dp - 8.0 * dv * T + da * T2) / (2.0 * T3);
    q.c_[4] = (-30.0 * dp + 14.0 * dv * T - 2.0 * da * T2) / (2.0 * T4);
    q.c_[5] = (12.0 * dp - 6.0 * dv * T + da * T2) / (2.0 * T5);
    return q;
  }

  static Poly5 zero() { return Poly5{}; }

  double pos(double t) const {
    return c_[0] + t * (c_[1] + t * (c_[2] + t * (c_[3] + t * (c_[4] + t * c_[5]))));
  }
  double vel(double t) const {
    return c_[1] + t * (2 * c_[2] + t * (3 * c_[3] + t * (4 * c_[4] + t * 5 * c_[5])));
  }
  double acc(double t) const {
    return 2 * c_[2] + t * (6 * c_[3] + t * (12 * c_[4] + t * 20 * c_[5]));
  }
  double jerk(double t) const { return 6 * c_[3] + t * (24 * c_[4] + t * 60 * c_[5]); }

  double horizon() const { return horizon_; }
  const std::array<double, 6>& coeffs() const { return c_; }

 private:
  std::array<double, 6> c_{};
  double horizon_ = 0.0;
};

/// Quartic with a free end position: matches a full start state and the end
/// velocity/acceleration. Jerk-optimal for the end-manifold problem.
class Poly4 {
 public:
  struct EndState {
    double v = 0.0;
    double a = 0.0;
  };

  static Poly4 connect(const BoundaryState& start, const EndState& end, double T) {
    if (T <= 0.0) throw std::invalid_argument("poly4: horizon T must be positive");
    Poly4 q;
    q.horizon_ = T;
    q.c_[0] = start.p;
    q.c_[1] = start.v;
    q.c_[2] = start.a / 2.0;
    const double T2 = T * T, T3 = T2 * T;
    const double dv = end.v - (start.v + start.a * T);
    const double da = end.a - start.a;
    // solve [3T^2 4T^3; 6T 12T^2] [c3 c4]^T = [dv da]^T
    q.c_[3] = (dv - da * T / 3.0) / T2;
    q.c_[4] = (da - 6.0 * q.c_[3] * T) / (12.0 * T2);
    return q;
  }

  static Poly4 zero() { return Poly4{}; }

  double pos(double t) const {
    return c_[0] + t * (c_[1] + t * (c_[2] + t * (c_[3] + t * c_[4])));
  }
  double vel(double t) const {
    return c_[1] + t * (2 * c_[2] + t * (3 * c_[3] + t * 4 * c_[4]));
  }
  double acc(double t) const { return 2 * c_[2] + t * (6 * c_[3] + t * 12 * c_[4]); }
  double jerk(double t) const { return 6 * c_[3] + t * 24 * c_[4]; }

  double horizon() const { return horizon_; }
  const std::array<double, 5>& coeffs() const { return c_; }

 private:
  std::array<double, 5> c_{};
  double horizon_ = 0.0;
};

/// 1/2 * integral of squared jerk over [0, T], closed form.
/// jerk(t) = a + b*t + c*t^2 with a = 6c3, b = 24c4, c = 60c5.
inline double jerk_cost(double a, double b, double c, double T) {
  const double T2 = T * T, T3 = T2 * T, T4 = T3 * T, T5 = T4 * T;
  return 0.5 * (a * a * T + a * b * T2 + (b * b + 2.0 * a * c) * T3 / 3.0 + b * c * T4 / 2.0 +
                c * c * T5 / 5.0);
}

inline double jerk_cost(const Poly5& q) {
  const auto& c = q.coeffs();
  return jerk_cost(6.0 * c[3], 24.0 * c[4], 60.0 * c[5], q.horizon());
}

inline double jerk_cost(const Poly4& q) {
  const auto& c = q.coeffs();
  return jerk_cost(6.0 * c[3], 24.0 * c[4], 0.0, q.horizon());
}

}  // namespace raceplan
