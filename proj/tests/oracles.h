// Copyright 2026 The rfdrive Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Independent reference arithmetic used by the unit and acceptance tests.
// Nothing here calls into the library under test.

#ifndef RFDRIVE_TESTS_ORACLES_H_
#define RFDRIVE_TESTS_ORACLES_H_

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <vector>

namespace oracle {

// Distance from (px, py) along unit direction (dx, dy) to a circle of radius
// r at the origin; the far root when starting inside.
inline std::optional<double> ray_circle(double px, double py, double dx,
                                        double dy, double r) {
  const double b = px * dx + py * dy;
  const double c = px * px + py * py - r * r;
  const double disc = b * b - c;
  if (disc < 0.0) return std::nullopt;
  const double s = std::sqrt(disc);
  const double t1 = -b - s;
  const double t2 = -b + s;
  if (t1 > 0.0) return t1;
  if (t2 > 0.0) return t2;
  return std::nullopt;
}

// Kinematic turning radius of the rear axle.
inline double kbm_radius(double wheelbase, double delta) {
  return wheelbase / std::tan(delta);
}

// Steady-state radius of a linear-tire single-track vehicle with the mass
// split a (front axle to CG) / b (CG to rear axle) and per-axle cornering
// stiffness cf, cr: delta = L/R + K v^2/R with
// K = m (b/cf - a/cr) / L.
inline double linear_tire_radius(double wheelbase, double a, double b,
                                 double mass, double cf, double cr, double v,
                                 double delta) {
  const double k = mass * (b / cf - a / cr) / wheelbase;
  return (wheelbase + k * v * v) / std::tan(delta);
}

// Plain row-major dense layer followed by tanh.
inline std::vector<double> dense_tanh(const std::vector<double>& x,
                                      const std::vector<double>& w,
                                      const std::vector<double>& b, int out) {
  const int in = static_cast<int>(x.size());
  std::vector<double> y(out);
  for (int o = 0; o < out; ++o) {
    long double acc = b[o];
    for (int i = 0; i < in; ++i) acc += static_cast<long double>(w[o * in + i]) * x[i];
    y[o] = std::tanh(static_cast<double>(acc));
  }
  return y;
}

// Circle through three points: returns the radius.
inline double circumradius(double ax, double ay, double bx, double by,
                           double cx, double cy) {
  const double a = std::hypot(bx - cx, by - cy);
  const double b = std::hypot(ax - cx, ay - cy);
  const double c = std::hypot(ax - bx, ay - by);
  const double area2 = std::abs((bx - ax) * (cy - ay) - (cx - ax) * (by - ay));
  return a * b * c / (2.0 * area2);
}

// Mean of clamp(a) under N(a; mu, sigma^2) * exp(-c (clamp(a) - target)^2 / lambda),
// by dense trapezoid quadrature over +-12 sigma. This is the optimum of the
// KL-regularized one-step objective for a quadratic reward.
inline double tilted_mean(double mu, double sigma, double lambda, double c,
                          double target, double lo, double hi) {
  const int n = 400000;
  const double a0 = mu - 12.0 * sigma, h = 24.0 * sigma / n;
  long double num = 0.0L, den = 0.0L;
  for (int i = 0; i <= n; ++i) {
    const double a = a0 + h * i;
    const double x = std::min(std::max(a, lo), hi);
    const double z = (a - mu) / sigma;
    const long double w = std::exp(-0.5 * z * z - c * (x - target) * (x - target) / lambda) *
                          ((i == 0 || i == n) ? 0.5 : 1.0);
    num += w * x;
    den += w;
  }
  return static_cast<double>(num / den);
}

}  // namespace oracle

#endif  // RFDRIVE_TESTS_ORACLES_H_
