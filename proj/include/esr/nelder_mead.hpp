#pragma once

// Derivative-free minimization with the Nelder-Mead simplex method.
//
// Fixed-dimension, deterministic, and tolerant of kinks in the objective
// (the CHSH functionals contain absolute values).

#include <algorithm>
#include <array>
#include <cstddef>
#include <numeric>

namespace esr {

template <std::size_t N>
struct SimplexResult {
  std::array<double, N> point{};
  double value = 0.0;
  int iterations = 0;
  int evaluations = 0;
};

template <std::size_t N, typename F>
SimplexResult<N> nelder_mead_minimize(F&& f, const std::array<double, N>& start,
                                      const std::array<double, N>& steps, int max_iterations,
                                      double value_tolerance = 1e-15) {
  using Point = std::array<double, N>;
  constexpr double kReflect = 1.0;
  constexpr double kExpand = 2.0;
  constexpr double kContract = 0.5;
  constexpr double kShrink = 0.5;

  std::array<Point, N + 1> vertices;
  std::array<double, N + 1> values;
  SimplexResult<N> result;

  auto eval = [&](const Point& p) {
    ++result.evaluations;
    return f(p);
  };
  auto affine = [](const Point& base, const Point& toward, double t) {
    Point out;
    for (std::size_t i = 0; i < N; ++i) out[i] = base[i] + t * (toward[i] - base[i]);
    return out;
  };

  vertices[0] = start;
  values[0] = eval(start);
  for (std::size_t i = 0; i < N; ++i) {
    vertices[i + 1] = start;
    vertices[i + 1][i] += steps[i];
    values[i + 1] = eval(vertices[i + 1]);
  }

  std::array<std::size_t, N + 1> order;
  int iter = 0;
  for (; iter < max_iterations; ++iter) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t l, std::size_t r) { return values[l] < values[r]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second_worst = order[N - 1];
    if (values[worst] - values[best] <= value_tolerance) break;

    Point centroid{};
    for (std::size_t k = 0; k < N + 1; ++k) {
      if (k == worst) continue;
      for (std::size_t i = 0; i < N; ++i) centroid[i] += vertices[k][i] / N;
    }

    const Point reflected = affine(centroid, vertices[worst], -kReflect);
    const double f_reflected = eval(reflected);
    if (f_reflected < values[best]) {
      const Point expanded = affine(centroid, vertices[worst], -kExpand);
      const double f_expanded = eval(expanded);
      if (f_expanded < f_reflected) {
        vertices[worst] = expanded;
        values[worst] = f_expanded;
      } else {
        vertices[worst] = reflected;
        values[worst] = f_reflected;
      }
      continue;
    }
    if (f_reflected < values[second_worst]) {
      vertices[worst] = reflected;
      values[worst] = f_reflected;
      continue;
    }
    const bool outside = f_reflected < values[worst];
    const Point contracted = outside ? affine(centroid, reflected, kContract)
                                     : affine(centroid, vertices[worst], kContract);
    const double f_contracted = eval(contracted);
    if (f_contracted < (outside ? f_reflected : values[worst])) {
      vertices[worst] = contracted;
      values[worst] = f_contracted;
      continue;
    }
    for (std::size_t k = 0; k < N + 1; ++k) {
      if (k == best) continue;
      vertices[k] = affine(vertices[best], vertices[k], kShrink);
      values[k] = eval(vertices[k]);
    }
  }

  result.iterations = iter;
  const auto best_it = std::min_element(values.begin(), values.end());
  const auto best = static_cast<std::size_t>(best_it - values.begin());
  result.point = vertices[best];
  result.value = values[best];
  return result;
}

}  // namespace esr
