#pragma once

/* Internal explicit integrators used for cross-checks: an adaptive
 * Dormand-Prince 5(4) pair and classic fixed-step RK4. State is any Eigen
 * dense type supporting +, scalar *, and .norm(). */

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace thirdq::detail {

template <typename State, typename F>
State dopri5(F&& f, State y, double t0, double t1, double tol) {
  if (t1 < t0) throw std::invalid_argument("dopri5: t1 < t0");
  if (t1 == t0) return y;

  double t = t0;
  double h = (t1 - t0) / 16.0;
  const double h_min = 1e-14 * std::max(1.0, t1 - t0);

  while (t < t1) {
    h = std::min(h, t1 - t);

    State k1 = f(t, y);
    State k2 = f(t + h / 5.0, (y + (h / 5.0) * k1).eval());
    State k3 = f(t + 3.0 * h / 10.0, (y + h * (3.0 / 40.0 * k1 + 9.0 / 40.0 * k2)).eval());
    State k4 = f(t + 4.0 * h / 5.0,
                 (y + h * (44.0 / 45.0 * k1 - 56.0 / 15.0 * k2 + 32.0 / 9.0 * k3)).eval());
    State k5 = f(t + 8.0 * h / 9.0,
                 (y + h * (19372.0 / 6561.0 * k1 - 25360.0 / 2187.0 * k2 +
                           64448.0 / 6561.0 * k3 - 212.0 / 729.0 * k4)).eval());
    State k6 = f(t + h, (y + h * (9017.0 / 3168.0 * k1 - 355.0 / 33.0 * k2 +
                                  46732.0 / 5247.0 * k3 + 49.0 / 176.0 * k4 -
                                  5103.0 / 18656.0 * k5)).eval());
    State y5 = y + h * (35.0 / 384.0 * k1 + 500.0 / 1113.0 * k3 + 125.0 / 192.0 * k4 -
                        2187.0 / 6784.0 * k5 + 11.0 / 84.0 * k6);
    State k7 = f(t + h, y5);
    State err_state = h * ((35.0 / 384.0 - 5179.0 / 57600.0) * k1 +
                           (500.0 / 1113.0 - 7571.0 / 16695.0) * k3 +
                           (125.0 / 192.0 - 393.0 / 640.0) * k4 +
                           (-2187.0 / 6784.0 + 92097.0 / 339200.0) * k5 +
                           (11.0 / 84.0 - 187.0 / 2100.0) * k6 - (1.0 / 40.0) * k7);

    const double err = err_state.norm();
    const double cap = tol * (1.0 + y.norm());
    if (err <= cap) {
      t += h;
      y = y5;
    }
    double factor = err > 0.0 ? 0.9 * std::pow(cap / err, 0.2) : 5.0;
    h *= std::clamp(factor, 0.2, 5.0);
    if (h < h_min) throw std::runtime_error("dopri5: step size underflow");
  }
  return y;
}

template <typename State, typename F>
void rk4_fixed(F&& f, State& y, double t0, double t1, double step) {
  if (t1 <= t0) return;
  const int n = std::max(1, static_cast<int>(std::ceil((t1 - t0) / step)));
  const double h = (t1 - t0) / n;
  double t = t0;
  for (int i = 0; i < n; ++i) {
    State k1 = f(t, y);
    State k2 = f(t + h / 2.0, (y + (h / 2.0) * k1).eval());
    State k3 = f(t + h / 2.0, (y + (h / 2.0) * k2).eval());
    State k4 = f(t + h, (y + h * k3).eval());
    y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    t += h;
  }
}

}  // namespace thirdq::detail
