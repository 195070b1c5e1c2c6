#include "edqe/lbfgs.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "edqe/errors.hpp"
#include "edqe/vecspace.hpp"

namespace edqe {

namespace {

struct Point {
  double step;
  double value;
  double slope;
};

// Minimizer of the cubic interpolating (a, fa, da) and (b, fb, db), safeguarded
// into the interior of [a, b].
double cubic_step(const Point& a, const Point& b) {
  const double d1 = a.slope + b.slope - 3.0 * (a.value - b.value) / (a.step - b.step);
  const double disc = d1 * d1 - a.slope * b.slope;
  const double lo = std::min(a.step, b.step);
  const double hi = std::max(a.step, b.step);
  double t = 0.5 * (lo + hi);
  if (disc >= 0.0) {
    const double d2 = std::copysign(std::sqrt(disc), b.step - a.step);
    const double denom = b.slope - a.slope + 2.0 * d2;
    if (denom != 0.0) {
      t = b.step - (b.step - a.step) * (b.slope + d2 - d1) / denom;
    }
  }
  const double margin = 0.1 * (hi - lo);
  if (!std::isfinite(t) || t < lo + margin || t > hi - margin) t = 0.5 * (lo + hi);
  return t;
}

class LineSearch {
 public:
  LineSearch(const ObjectiveFn& fn, std::span<const double> x, std::span<const double> dir,
             const LbfgsOptions& opt, int& evals)
      : fn_(fn), x_(x), dir_(dir), opt_(opt), evals_(evals), trial_(x.size()), grad_(x.size()) {}

  // Returns true when a step satisfying the strong Wolfe conditions was found.
  // On return, best_x/best_g/best_f hold the accepted (or best seen) point.
  bool run(double f0, double slope0, double initial_step) {
    f0_ = f0;
    slope0_ = slope0;
    best_f_ = f0;
    Point prev{0.0, f0, slope0};
    double step = initial_step;
    for (int i = 0; i < opt_.max_line_search; ++i) {
      Point cur = eval(step);
      if (cur.value > f0_ + opt_.wolfe_c1 * step * slope0_ || (i > 0 && cur.value >= prev.value)) {
        return zoom(prev, cur, opt_.max_line_search - i);
      }
      if (std::abs(cur.slope) <= -opt_.wolfe_c2 * slope0_) return true;
      if (cur.slope >= 0.0) return zoom(cur, prev, opt_.max_line_search - i);
      prev = cur;
      step *= 2.0;
    }
    return best_f_ < f0_;
  }

  std::vector<double> best_x;
  std::vector<double> best_g;
  double best_f_ = 0.0;

 private:
  Point eval(double step) {
    for (std::size_t i = 0; i < x_.size(); ++i) trial_[i] = x_[i] + step * dir_[i];
    const double f = fn_(trial_, grad_);
    ++evals_;
    const double slope = dot(grad_, dir_);
    if (std::isfinite(f) && f < best_f_) {
      best_f_ = f;
      best_x = trial_;
      best_g = grad_;
    }
    last_x_ = trial_;
    last_g_ = grad_;
    last_f_ = f;
    return {step, f, slope};
  }

  void accept_last() {
    best_x = last_x_;
    best_g = last_g_;
    best_f_ = last_f_;
  }

  bool zoom(Point lo, Point hi, int budget) {
    for (int i = 0; i < budget; ++i) {
      if (std::abs(hi.step - lo.step) < 1e-16 * std::max(1.0, std::abs(lo.step))) break;
      const double step = cubic_step(lo, hi);
      Point cur = eval(step);
      if (cur.value > f0_ + opt_.wolfe_c1 * step * slope0_ || cur.value >= lo.value) {
        hi = cur;
      } else {
        if (std::abs(cur.slope) <= -opt_.wolfe_c2 * slope0_) {
          accept_last();
          return true;
        }
        if (cur.slope * (hi.step - lo.step) >= 0.0) hi = lo;
        lo = cur;
      }
    }
    return best_f_ < f0_;
  }

  const ObjectiveFn& fn_;
  std::span<const double> x_;
  std::span<const double> dir_;
  const LbfgsOptions& opt_;
  int& evals_;
  std::vector<double> trial_;
  std::vector<double> grad_;
  std::vector<double> last_x_;
  std::vector<double> last_g_;
  double last_f_ = 0.0;
  double f0_ = 0.0;
  double slope0_ = 0.0;
};

}  // namespace

LbfgsResult lbfgs_minimize(const ObjectiveFn& fn, std::vector<double> x0, const LbfgsOptions& options,
                           const StationarityFn& stationarity) {
  if (x0.empty()) throw InvalidArgument("lbfgs: empty starting point");
  const std::size_t n = x0.size();
  auto measure = [&](std::span<const double> x, std::span<const double> g) {
    return stationarity ? stationarity(x, g) : std::sqrt(dot(g, g));
  };

  LbfgsResult res;
  res.x = std::move(x0);
  std::vector<double> g(n);
  res.value = fn(res.x, g);
  res.evaluations = 1;
  res.stationarity = measure(res.x, g);

  struct Pair {
    std::vector<double> s, y;
    double rho;
  };
  std::deque<Pair> history;
  std::vector<double> dir(n);
  std::vector<double> alpha(static_cast<std::size_t>(std::max(options.memory, 1)));

  while (true) {
    if (res.stationarity <= options.gradient_tolerance) {
      res.converged = true;
      break;
    }
    if (res.iterations >= options.max_iterations) break;

    // Two-loop recursion: dir = -H g.
    for (std::size_t i = 0; i < n; ++i) dir[i] = -g[i];
    for (std::size_t h = history.size(); h-- > 0;) {
      const Pair& p = history[h];
      alpha[h] = p.rho * dot(p.s, dir);
      for (std::size_t i = 0; i < n; ++i) dir[i] -= alpha[h] * p.y[i];
    }
    if (!history.empty()) {
      const Pair& p = history.back();
      const double gamma = dot(p.s, p.y) / dot(p.y, p.y);
      for (double& d : dir) d *= gamma;
    }
    for (std::size_t h = 0; h < history.size(); ++h) {
      const Pair& p = history[h];
      const double beta = p.rho * dot(p.y, dir);
      for (std::size_t i = 0; i < n; ++i) dir[i] += (alpha[h] - beta) * p.s[i];
    }

    double slope = dot(g, dir);
    if (!(slope < 0.0)) {
      history.clear();
      for (std::size_t i = 0; i < n; ++i) dir[i] = -g[i];
      slope = dot(g, dir);
    }
    const double initial_step = history.empty() ? std::min(1.0, 1.0 / std::sqrt(dot(dir, dir))) : 1.0;

    LineSearch ls(fn, res.x, dir, options, res.evaluations);
    const bool ok = ls.run(res.value, slope, initial_step);
    ++res.iterations;
    if (ls.best_x.empty()) {
      // No decrease at all along this direction.
      if (history.empty()) break;
      history.clear();
      continue;
    }

    Pair p{std::vector<double>(n), std::vector<double>(n), 0.0};
    for (std::size_t i = 0; i < n; ++i) {
      p.s[i] = ls.best_x[i] - res.x[i];
      p.y[i] = ls.best_g[i] - g[i];
    }
    const double sy = dot(p.s, p.y);
    res.x = ls.best_x;
    g = ls.best_g;
    const double previous = res.value;
    res.value = ls.best_f_;
    res.stationarity = measure(res.x, g);

    if (sy > 1e-12 * std::sqrt(dot(p.s, p.s) * dot(p.y, p.y))) {
      p.rho = 1.0 / sy;
      history.push_back(std::move(p));
      if (static_cast<int>(history.size()) > options.memory) history.pop_front();
    }
    if (!ok && previous - res.value <= 1e-16 * std::max(1.0, std::abs(previous))) {
      if (history.empty()) break;
      history.clear();
    }
  }
  return res;
}

}  // namespace edqe
