#pragma once

// Globally adaptive Gauss-Kronrod (7/15) quadrature for matrix-valued
// integrands over the real line. The line is split at caller-supplied
// breakpoints; the two semi-infinite tails are mapped onto [0, 1).

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include <Eigen/Dense>

#include "cvtele/errors.hpp"

namespace cvtele {

struct QuadratureControls {
  double abs_tol = 1e-8;
  double rel_tol = 1e-12;
  int max_evaluations = 2'000'000;
};

template <typename Value>
struct QuadratureResult {
  Value value;
  double error_estimate = 0.0;
  int evaluations = 0;
};

namespace internal {

// Kronrod abscissae on [0, 1] (the rule is symmetric) and weights; the
// odd-indexed abscissae carry the embedded 7-point Gauss rule.
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <typename Value>
struct Segment {
  double a = 0.0;
  double b = 0.0;
  Value value;
  double error = 0.0;
};

template <typename Value, typename F>
Segment<Value> gauss_kronrod(F& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const Value fc = f(c);
  Value kronrod = kKronrodWeights[7] * fc;
  Value gauss = kGaussWeights[3] * fc;
  for (int k = 0; k < 7; ++k) {
    const double dx = h * kKronrodNodes[k];
    const Value pair = f(c - dx) + f(c + dx);
    kronrod += kKronrodWeights[k] * pair;
    if (k % 2 == 1) gauss += kGaussWeights[k / 2] * pair;
  }
  kronrod *= h;
  gauss *= h;
  const double error = (kronrod - gauss).cwiseAbs().maxCoeff();
  return {a, b, std::move(kronrod), error};
}

}  // namespace internal

// Integral of f over the real line. breakpoints must be sorted and finite;
// the tails beyond them use x = lo - s u / (1 - u) and x = hi + s u / (1 - u)
// with s = tail_scale. Convergence is judged on the max-abs entry.
template <typename Value, typename F>
QuadratureResult<Value> integrate_real_line(F&& f, const std::vector<double>& breakpoints,
                                            double tail_scale, const QuadratureControls& ctl,
                                            const Value& zero) {
  if (breakpoints.empty() || !std::is_sorted(breakpoints.begin(), breakpoints.end())) {
    throw QuadratureError("integrate_real_line: breakpoints must be non-empty and sorted");
  }
  if (!(tail_scale > 0.0) || !std::isfinite(tail_scale)) {
    throw QuadratureError("integrate_real_line: tail scale must be finite and > 0");
  }
  int evaluations = 0;
  const double lo = breakpoints.front();
  const double hi = breakpoints.back();
  enum class Kind { kLeft, kFinite, kRight };
  auto eval_left = [&](double u) -> Value {
    ++evaluations;
    const double s = 1.0 - u;
    return f(lo - tail_scale * u / s) * (tail_scale / (s * s));
  };
  auto eval_right = [&](double u) -> Value {
    ++evaluations;
    const double s = 1.0 - u;
    return f(hi + tail_scale * u / s) * (tail_scale / (s * s));
  };
  auto eval_finite = [&](double x) -> Value {
    ++evaluations;
    return f(x);
  };

  struct Item {
    internal::Segment<Value> seg;
    Kind kind;
    bool operator<(const Item& o) const { return seg.error < o.seg.error; }
  };
  std::priority_queue<Item> queue;
  Value running = zero;
  double err_total = 0.0;
  auto push = [&](Kind kind, double a, double b) {
    internal::Segment<Value> seg =
        kind == Kind::kLeft    ? internal::gauss_kronrod<Value>(eval_left, a, b)
        : kind == Kind::kRight ? internal::gauss_kronrod<Value>(eval_right, a, b)
                               : internal::gauss_kronrod<Value>(eval_finite, a, b);
    running += seg.value;
    err_total += seg.error;
    queue.push({std::move(seg), kind});
  };
  push(Kind::kLeft, 0.0, 1.0);
  push(Kind::kRight, 0.0, 1.0);
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    push(Kind::kFinite, breakpoints[i], breakpoints[i + 1]);
  }

  while (err_total > std::max(ctl.abs_tol, ctl.rel_tol * running.cwiseAbs().maxCoeff())) {
    if (evaluations >= ctl.max_evaluations) {
      throw QuadratureError("integrate_real_line: tolerance not met within evaluation budget");
    }
    Item worst = queue.top();
    queue.pop();
    const double mid = 0.5 * (worst.seg.a + worst.seg.b);
    if (!(mid > worst.seg.a && mid < worst.seg.b)) {
      throw QuadratureError("integrate_real_line: interval cannot be subdivided further");
    }
    running -= worst.seg.value;
    err_total -= worst.seg.error;
    push(worst.kind, worst.seg.a, mid);
    push(worst.kind, mid, worst.seg.b);
    // Incremental updates drift; re-sum the errors once they look converged.
    if (err_total <= 2.0 * ctl.abs_tol) {
      err_total = 0.0;
      auto copy = queue;
      while (!copy.empty()) {
        err_total += copy.top().seg.error;
        copy.pop();
      }
    }
  }

  // Deterministic pairwise reduction over segments sorted by position.
  std::vector<Item> items;
  items.reserve(queue.size());
  while (!queue.empty()) {
    items.push_back(queue.top());
    queue.pop();
  }
  auto key = [](const Item& it) {
    const double base = it.kind == Kind::kLeft ? 0.0 : (it.kind == Kind::kFinite ? 1.0 : 2.0);
    return std::make_pair(base, it.seg.a);
  };
  std::sort(items.begin(), items.end(), [&](const Item& x, const Item& y) { return key(x) < key(y); });
  std::vector<Value> partial;
  partial.reserve(items.size());
  double err = 0.0;
  for (const auto& it : items) {
    partial.push_back(it.seg.value);
    err += it.seg.error;
  }
  while (partial.size() > 1) {
    std::vector<Value> next;
    next.reserve((partial.size() + 1) / 2);
    for (std::size_t i = 0; i + 1 < partial.size(); i += 2) next.push_back(partial[i] + partial[i + 1]);
    if (partial.size() % 2 == 1) next.push_back(partial.back());
    partial = std::move(next);
  }
  return {partial.empty() ? zero : partial.front(), err, evaluations};
}

}  // namespace cvtele
