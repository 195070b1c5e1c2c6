#pragma once

// Limited-memory BFGS with a strong-Wolfe line search.

#include <functional>
#include <span>
#include <vector>

namespace edqe {

struct LbfgsOptions {
  int memory = 10;
  int max_iterations = 500;
  double gradient_tolerance = 1e-6;
  double wolfe_c1 = 1e-4;
  double wolfe_c2 = 0.9;
  int max_line_search = 40;
};

// Evaluates f(x), writing the gradient into `grad`.
using ObjectiveFn = std::function<double(std::span<const double> x, std::span<double> grad)>;

// Convergence measure, ||g|| unless overridden.
using StationarityFn = std::function<double(std::span<const double> x, std::span<const double> grad)>;

struct LbfgsResult {
  std::vector<double> x;
  double value = 0.0;
  double stationarity = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
};

LbfgsResult lbfgs_minimize(const ObjectiveFn& fn, std::vector<double> x0,
                           const LbfgsOptions& options = {},
                           const StationarityFn& stationarity = {});

}  // namespace edqe
