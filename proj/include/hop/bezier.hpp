#pragma once

#include <Eigen/Dense>

#include <algorithm>

namespace hop {

/// de Casteljau evaluation of a scalar Bezier curve at s in [0, 1].
template <typename Scalar, typename Points>
Scalar bezier_eval(const Points& pts, Scalar s) {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> work(pts.size());
  for (Eigen::Index i = 0; i < work.size(); ++i) work[i] = pts[i];
  for (Eigen::Index r = work.size() - 1; r > 0; --r)
    for (Eigen::Index i = 0; i < r; ++i) work[i] = (Scalar(1) - s) * work[i] + s * work[i + 1];
  return work[0];
}

/// d/ds of the Bezier curve: degree * (hodograph evaluated at s).
template <typename Scalar, typename Points>
Scalar bezier_derivative(const Points& pts, Scalar s) {
  const Eigen::Index n = pts.size() - 1;
  if (n < 1) return Scalar(0);
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> diff(n);
  for (Eigen::Index i = 0; i < n; ++i) diff[i] = Scalar(n) * (pts[i + 1] - pts[i]);
  return bezier_eval(diff, s);
}

}  // namespace hop
