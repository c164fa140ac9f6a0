#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace hop {

/// One Dormand-Prince 5(4) step. `f(t, y)` returns dy/dt.
/// The fifth-order solution is propagated; the embedded fourth-order
/// solution only feeds the error estimate.
template <typename Scalar>
struct DormandPrince {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  struct Step {
    Vector y;
    Vector err;
  };

  template <typename F>
  static Step step(F&& f, Scalar t, const Vector& y, Scalar h) {
    static constexpr Scalar c2 = Scalar(1) / 5, c3 = Scalar(3) / 10, c4 = Scalar(4) / 5,
                            c5 = Scalar(8) / 9;
    static constexpr Scalar a21 = Scalar(1) / 5;
    static constexpr Scalar a31 = Scalar(3) / 40, a32 = Scalar(9) / 40;
    static constexpr Scalar a41 = Scalar(44) / 45, a42 = Scalar(-56) / 15, a43 = Scalar(32) / 9;
    static constexpr Scalar a51 = Scalar(19372) / 6561, a52 = Scalar(-25360) / 2187,
                            a53 = Scalar(64448) / 6561, a54 = Scalar(-212) / 729;
    static constexpr Scalar a61 = Scalar(9017) / 3168, a62 = Scalar(-355) / 33,
                            a63 = Scalar(46732) / 5247, a64 = Scalar(49) / 176,
                            a65 = Scalar(-5103) / 18656;
    static constexpr Scalar b1 = Scalar(35) / 384, b3 = Scalar(500) / 1113, b4 = Scalar(125) / 192,
                            b5 = Scalar(-2187) / 6784, b6 = Scalar(11) / 84;
    static constexpr Scalar e1 = Scalar(71) / 57600, e3 = Scalar(-71) / 16695,
                            e4 = Scalar(71) / 1920, e5 = Scalar(-17253) / 339200,
                            e6 = Scalar(22) / 525, e7 = Scalar(-1) / 40;

    const Vector k1 = f(t, y);
    const Vector k2 = f(t + c2 * h, Vector(y + h * a21 * k1));
    const Vector k3 = f(t + c3 * h, Vector(y + h * (a31 * k1 + a32 * k2)));
    const Vector k4 = f(t + c4 * h, Vector(y + h * (a41 * k1 + a42 * k2 + a43 * k3)));
    const Vector k5 =
        f(t + c5 * h, Vector(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)));
    const Vector k6 =
        f(t + h, Vector(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)));
    Step out;
    out.y = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const Vector k7 = f(t + h, out.y);
    out.err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    return out;
  }

  /// RMS error norm scaled by mixed absolute/relative tolerance.
  static Scalar error_norm(const Vector& err, const Vector& y0, const Vector& y1, Scalar abs_tol,
                           Scalar rel_tol) {
    using std::abs;
    using std::sqrt;
    Scalar acc = 0;
    for (Eigen::Index i = 0; i < err.size(); ++i) {
      const Scalar sc = abs_tol + rel_tol * std::max(abs(y0[i]), abs(y1[i]));
      const Scalar r = err[i] / sc;
      acc += r * r;
    }
    return sqrt(acc / Scalar(std::max<Eigen::Index>(err.size(), 1)));
  }
};

}  // namespace hop
