#pragma once

#include <Eigen/Dense>

#include <vector>

namespace hop {

/// Piecewise-constant ground height along x. `steps` holds (x_from, height)
/// pairs sorted by x_from; height is `base` before the first step.
struct Terrain {
  double base = 0.0;
  std::vector<std::pair<double, double>> steps;

  double height(double x) const {
    double h = base;
    for (const auto& [x_from, hh] : steps) {
      if (x >= x_from) h = hh;
    }
    return h;
  }
};

/// Constant external force on the COM over [t_start, t_start + duration).
struct Push {
  Eigen::Vector3d force = Eigen::Vector3d::Zero();
  double t_start = 0.0;
  double duration = 0.0;

  bool active(double t) const { return duration > 0.0 && t >= t_start && t < t_start + duration; }
};

struct Environment {
  Terrain terrain;
  std::vector<Push> pushes;

  Eigen::Vector3d external_force(double t) const {
    Eigen::Vector3d f = Eigen::Vector3d::Zero();
    for (const auto& p : pushes)
      if (p.active(t)) f += p.force;
    return f;
  }

  std::vector<double> breakpoints(double t0, double t1) const {
    std::vector<double> out;
    for (const auto& p : pushes) {
      for (double tb : {p.t_start, p.t_start + p.duration})
        if (tb > t0 && tb < t1) out.push_back(tb);
    }
    return out;
  }
};

}  // namespace hop
