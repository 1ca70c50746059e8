#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

namespace wnv {
namespace optim {

using Objective = std::function<double(const Eigen::VectorXd&)>;

struct Options {
  double tolerance = 1e-8;  // relative spread / improvement threshold
  int max_iterations = 5000;
};

struct Result {
  Eigen::VectorXd x;
  double f = std::numeric_limits<double>::infinity();
  bool converged = false;
  int iterations = 0;
};

// Downhill simplex (Nelder-Mead) on an unconstrained space. Bound handling
// lives in the caller's parameter transform, which keeps this routine simple
// and the simplex geometry well behaved.
inline Result nelder_mead(const Objective& f, const Eigen::VectorXd& x0,
                          const Options& opts = {},
                          double initial_step = 0.25) {
  const int n = static_cast<int>(x0.size());
  const double rho = 1.0, chi = 2.0, gamma = 0.5, sigma = 0.5;

  auto safe_eval = [&](const Eigen::VectorXd& x) {
    double v = f(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::max();
  };

  std::vector<Eigen::VectorXd> simplex(n + 1, x0);
  std::vector<double> values(n + 1);
  for (int i = 0; i < n; ++i) {
    double step = initial_step * (1.0 + std::abs(x0(i)) * 0.1);
    simplex[i + 1](i) += step;
  }
  for (int i = 0; i <= n; ++i) values[i] = safe_eval(simplex[i]);

  std::vector<int> order(n + 1);
  Result res;
  for (res.iterations = 0; res.iterations < opts.max_iterations;
       ++res.iterations) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return values[a] < values[b]; });
    int best = order[0], second_worst = order[n - 1], worst = order[n];

    double spread = values[worst] - values[best];
    if (spread < opts.tolerance * (1.0 + std::abs(values[best]))) {
      res.converged = true;
      break;
    }

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (int i = 0; i <= n; ++i)
      if (i != worst) centroid += simplex[i];
    centroid /= static_cast<double>(n);

    Eigen::VectorXd reflected = centroid + rho * (centroid - simplex[worst]);
    double f_r = safe_eval(reflected);
    if (f_r < values[best]) {
      Eigen::VectorXd expanded = centroid + chi * (reflected - centroid);
      double f_e = safe_eval(expanded);
      if (f_e < f_r) {
        simplex[worst] = expanded;
        values[worst] = f_e;
      } else {
        simplex[worst] = reflected;
        values[worst] = f_r;
      }
    } else if (f_r < values[second_worst]) {
      simplex[worst] = reflected;
      values[worst] = f_r;
    } else {
      bool outside = f_r < values[worst];
      Eigen::VectorXd contracted =
          outside ? Eigen::VectorXd(centroid + gamma * (reflected - centroid))
                  : Eigen::VectorXd(centroid -
                                    gamma * (centroid - simplex[worst]));
      double f_c = safe_eval(contracted);
      if (f_c < std::min(f_r, values[worst])) {
        simplex[worst] = contracted;
        values[worst] = f_c;
      } else {
        for (int i = 0; i <= n; ++i) {
          if (i == best) continue;
          simplex[i] = simplex[best] + sigma * (simplex[i] - simplex[best]);
          values[i] = safe_eval(simplex[i]);
        }
      }
    }
  }

  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return values[a] < values[b]; });
  res.x = simplex[order[0]];
  res.f = values[order[0]];
  return res;
}

inline Eigen::VectorXd numerical_gradient(const Objective& f,
                                          const Eigen::VectorXd& x,
                                          double rel_step = 1e-6) {
  const int n = static_cast<int>(x.size());
  Eigen::VectorXd g(n);
  Eigen::VectorXd xp = x, xm = x;
  for (int i = 0; i < n; ++i) {
    double h = rel_step * (1.0 + std::abs(x(i)));
    xp(i) = x(i) + h;
    xm(i) = x(i) - h;
    g(i) = (f(xp) - f(xm)) / (2.0 * h);
    xp(i) = x(i);
    xm(i) = x(i);
  }
  return g;
}

// Central-difference Hessian; symmetric by construction.
inline Eigen::MatrixXd numerical_hessian(const Objective& f,
                                         const Eigen::VectorXd& x,
                                         double rel_step = 1e-4) {
  const int n = static_cast<int>(x.size());
  Eigen::MatrixXd H(n, n);
  Eigen::VectorXd h(n);
  for (int i = 0; i < n; ++i) h(i) = rel_step * (1.0 + std::abs(x(i)));
  const double f0 = f(x);
  Eigen::VectorXd xt = x;
  for (int i = 0; i < n; ++i) {
    xt(i) = x(i) + h(i);
    double fp = f(xt);
    xt(i) = x(i) - h(i);
    double fm = f(xt);
    xt(i) = x(i);
    H(i, i) = (fp - 2.0 * f0 + fm) / (h(i) * h(i));
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      xt(i) = x(i) + h(i);
      xt(j) = x(j) + h(j);
      double fpp = f(xt);
      xt(j) = x(j) - h(j);
      double fpm = f(xt);
      xt(i) = x(i) - h(i);
      double fmm = f(xt);
      xt(j) = x(j) + h(j);
      double fmp = f(xt);
      xt(i) = x(i);
      xt(j) = x(j);
      H(i, j) = H(j, i) = (fpp - fpm - fmp + fmm) / (4.0 * h(i) * h(j));
    }
  }
  return H;
}

// Quasi-Newton polish with numerical gradients and Armijo backtracking.
// Intended to refine a simplex solution, not to work from arbitrary starts.
inline Result bfgs(const Objective& f, const Eigen::VectorXd& x0,
                   const Options& opts = {}) {
  const int n = static_cast<int>(x0.size());
  Result res;
  res.x = x0;
  res.f = f(x0);
  if (!std::isfinite(res.f)) return res;

  Eigen::MatrixXd Hinv = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd g = numerical_gradient(f, res.x);
  int max_iter = std::min(opts.max_iterations, 200);
  double grad_tol = std::max(opts.tolerance, 1e-12);
  for (res.iterations = 0; res.iterations < max_iter; ++res.iterations) {
    if (g.lpNorm<Eigen::Infinity>() < grad_tol * (1.0 + std::abs(res.f))) {
      res.converged = true;
      break;
    }
    Eigen::VectorXd direction = -Hinv * g;
    double slope = g.dot(direction);
    if (slope >= 0.0) {  // lost positive definiteness, steepest descent
      direction = -g;
      slope = g.dot(direction);
      Hinv.setIdentity();
    }
    double step = 1.0;
    double f_new = std::numeric_limits<double>::infinity();
    Eigen::VectorXd x_new;
    bool accepted = false;
    for (int ls = 0; ls < 40; ++ls) {
      x_new = res.x + step * direction;
      f_new = f(x_new);
      if (std::isfinite(f_new) && f_new <= res.f + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;

    Eigen::VectorXd g_new = numerical_gradient(f, x_new);
    Eigen::VectorXd s = x_new - res.x;
    Eigen::VectorXd y = g_new - g;
    double sy = s.dot(y);
    if (sy > 1e-12) {
      Eigen::VectorXd Hy = Hinv * y;
      double yHy = y.dot(Hy);
      Hinv += ((sy + yHy) / (sy * sy)) * (s * s.transpose()) -
              (Hy * s.transpose() + s * Hy.transpose()) / sy;
    }
    double improvement = res.f - f_new;
    res.x = x_new;
    res.f = f_new;
    g = g_new;
    if (improvement < opts.tolerance * (1.0 + std::abs(res.f))) {
      res.converged = true;
      break;
    }
  }
  return res;
}

}  // namespace optim
}  // namespace wnv
