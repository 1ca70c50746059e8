#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "wnv/optim.hpp"
#include "wnv/richards.hpp"
#include "wnv/rng.hpp"
#include "wnv/series.hpp"

namespace wnv {

struct Bound {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
};

namespace detail {

// Monotone map between a bounded natural parameter and an unconstrained
// optimizer coordinate: log for one-sided bounds, scaled logit for boxes.
struct Transform1D {
  Bound b;

  double to_x(double v) const {
    bool lo = std::isfinite(b.lo), hi = std::isfinite(b.hi);
    if (lo && hi) {
      double u = (v - b.lo) / (b.hi - b.lo);
      u = std::clamp(u, 1e-12, 1.0 - 1e-12);
      return std::log(u / (1.0 - u));
    }
    if (lo) return std::log(std::max(v - b.lo, 1e-300));
    if (hi) return -std::log(std::max(b.hi - v, 1e-300));
    return v;
  }

  double to_v(double x) const {
    bool lo = std::isfinite(b.lo), hi = std::isfinite(b.hi);
    if (lo && hi) {
      double s = x >= 0 ? 1.0 / (1.0 + std::exp(-x))
                        : std::exp(x) / (1.0 + std::exp(x));
      return b.lo + (b.hi - b.lo) * s;
    }
    if (lo) return b.lo + std::exp(x);
    if (hi) return b.hi - std::exp(-x);
    return x;
  }
};

// Inverse standard normal CDF (Acklam's rational approximation, |err|<1e-9).
inline double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw Error("normal_quantile: p outside (0,1)");
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425, phigh = 1 - plow;
  double q, r;
  if (p < plow) {
    q = std::sqrt(-2 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q +
            c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  }
  if (p > phigh) {
    q = std::sqrt(-2 * std::log(1 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q +
             c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  }
  q = p - 0.5;
  r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r +
          a[5]) *
         q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
}

inline double quantile_of_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) throw Error("quantile of empty sample");
  double pos = q * static_cast<double>(sorted.size() - 1);
  std::size_t i = static_cast<std::size_t>(pos);
  if (i + 1 >= sorted.size()) return sorted.back();
  double frac = pos - static_cast<double>(i);
  return sorted[i] * (1.0 - frac) + sorted[i + 1] * frac;
}

}  // namespace detail

// Parameter order used throughout estimation: b, r, h, p, s (+ dispersion).
inline constexpr std::array<std::string_view, 5> kParamNames{"b", "r", "h",
                                                             "p", "s"};

struct FitConfig {
  CountFamily family = CountFamily::poisson;
  CurveVariant variant = CurveVariant::constant_baseline;

  // Per-parameter (lo, hi); NaN entries take the default. The default p box
  // depends on the series length: (-T, 2T).
  std::array<Bound, 5> bounds{
      Bound{0.0, std::numeric_limits<double>::infinity()},   // b
      Bound{0.0, std::numeric_limits<double>::infinity()},   // r
      Bound{-10.0, 10.0},                                    // h
      Bound{std::numeric_limits<double>::quiet_NaN(),
            std::numeric_limits<double>::quiet_NaN()},       // p, set from T
      Bound{0.0, 10.0},                                      // s
  };
  std::array<std::optional<double>, 5> fixed{};  // pin parameters

  std::optional<double> fixed_dispersion;  // negbin: skip joint estimation
  Bound dispersion_bounds{1e-4, 1e6};

  int n_starts = 20;
  std::uint64_t seed = 1;
  double tolerance = 1e-8;
  int max_iterations = 5000;
  double ci_level = 0.95;

  void validate() const {
    if (n_starts < 1) throw InvalidParamsError("n_starts must be >= 1");
    if (!(tolerance > 0)) throw InvalidParamsError("tolerance must be > 0");
    if (max_iterations < 1)
      throw InvalidParamsError("max_iterations must be >= 1");
    if (!(ci_level > 0 && ci_level < 1))
      throw InvalidParamsError("ci level must be in (0,1)");
    for (const auto& bd : bounds) {
      if (std::isnan(bd.lo) || std::isnan(bd.hi)) continue;
      if (!(bd.lo < bd.hi)) throw InvalidParamsError("bound lower >= upper");
    }
  }
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool available = false;
};

struct FitResult {
  RichardsParams params_hat;
  std::optional<double> dispersion_hat;
  double loglik_hat = -std::numeric_limits<double>::infinity();
  std::array<Interval, 5> ci{};
  std::optional<Interval> dispersion_ci;
  double ci_level = 0.95;
  double r_squared = 0.0;
  std::vector<double> fitted_incidence;
  bool converged = false;
  long n_evaluations = 0;
  std::uint64_t seed = 0;
  CountFamily family = CountFamily::poisson;

  // Per-start final log-likelihoods, in start order (best is their max).
  std::vector<double> start_logliks;

  // Transformed-scale optimum and covariance over the free coordinates;
  // what the forecast simulation draws from.
  std::vector<int> free_index;  // free coordinate -> 0..4 (5 = dispersion)
  Eigen::VectorXd xhat;
  Eigen::MatrixXd cov;
  bool cov_available = false;

  // Enough context to rebuild the transforms from a serialized result.
  std::array<Bound, 5> bounds_used{};
  Bound dispersion_bounds_used{};
  int n_weeks = 0;
};

namespace detail {

struct ParamSpace {
  CurveVariant variant;
  CountFamily family;
  int n_full;                                // 5, or 6 with free dispersion
  std::vector<std::optional<double>> fixed;  // size n_full
  std::vector<Transform1D> transforms;       // size n_full
  std::vector<int> free_index;
  std::optional<double> fixed_dispersion;

  static ParamSpace make(const FitConfig& cfg, int T) {
    ParamSpace sp;
    sp.variant = cfg.variant;
    sp.family = cfg.family;
    bool free_dispersion =
        cfg.family == CountFamily::negbin && !cfg.fixed_dispersion;
    sp.n_full = free_dispersion ? 6 : 5;
    sp.fixed.resize(sp.n_full);
    sp.transforms.resize(sp.n_full);
    for (int i = 0; i < 5; ++i) {
      Bound bd = cfg.bounds[static_cast<std::size_t>(i)];
      if (std::isnan(bd.lo) || std::isnan(bd.hi))
        bd = Bound{-static_cast<double>(T), 2.0 * static_cast<double>(T)};
      sp.transforms[i] = Transform1D{bd};
      sp.fixed[i] = cfg.fixed[static_cast<std::size_t>(i)];
    }
    if (free_dispersion) sp.transforms[5] = Transform1D{cfg.dispersion_bounds};
    sp.fixed_dispersion = cfg.fixed_dispersion;
    for (int i = 0; i < sp.n_full; ++i)
      if (!sp.fixed[i]) sp.free_index.push_back(i);
    return sp;
  }

  int n_free() const { return static_cast<int>(free_index.size()); }

  Eigen::VectorXd pack(const std::vector<double>& natural_full) const {
    Eigen::VectorXd x(n_free());
    for (int j = 0; j < n_free(); ++j) {
      int i = free_index[static_cast<std::size_t>(j)];
      x(j) = transforms[static_cast<std::size_t>(i)].to_x(
          natural_full[static_cast<std::size_t>(i)]);
    }
    return x;
  }

  std::vector<double> unpack(const Eigen::VectorXd& x) const {
    std::vector<double> natural(static_cast<std::size_t>(n_full));
    for (int i = 0; i < n_full; ++i)
      if (fixed[static_cast<std::size_t>(i)])
        natural[static_cast<std::size_t>(i)] =
            *fixed[static_cast<std::size_t>(i)];
    for (int j = 0; j < n_free(); ++j) {
      int i = free_index[static_cast<std::size_t>(j)];
      natural[static_cast<std::size_t>(i)] =
          transforms[static_cast<std::size_t>(i)].to_v(x(j));
    }
    return natural;
  }

  RichardsParams params_at(const Eigen::VectorXd& x,
                           std::optional<double>* dispersion = nullptr) const {
    std::vector<double> nat = unpack(x);
    RichardsParams g;
    g.b = nat[0];
    g.r = nat[1];
    g.h = nat[2];
    g.p = nat[3];
    g.s = nat[4];
    g.variant = variant;
    if (dispersion) {
      if (n_full == 6)
        *dispersion = nat[5];
      else if (fixed_dispersion)
        *dispersion = *fixed_dispersion;
      else
        *dispersion = std::nullopt;
    }
    return g;
  }
};

inline std::size_t observed_weeks(const WeeklySeries& series) {
  std::size_t k = 0;
  for (const auto& y : series.incidence)
    if (y) ++k;
  return k;
}

inline optim::Objective make_negloglik(const WeeklySeries& series,
                                       const ParamSpace& space,
                                       long* eval_counter) {
  std::size_t min_points = static_cast<std::size_t>(space.n_free()) + 1;
  return [&series, space, eval_counter,
          min_points](const Eigen::VectorXd& x) -> double {
    if (eval_counter) ++*eval_counter;
    std::optional<double> dispersion;
    RichardsParams g = space.params_at(x, &dispersion);
    if (!g.valid()) return std::numeric_limits<double>::infinity();
    LikelihoodFamily fam{space.family, std::nullopt};
    if (space.family == CountFamily::negbin) {
      if (!dispersion || !(*dispersion > 0))
        return std::numeric_limits<double>::infinity();
      fam.dispersion = dispersion;
    }
    try {
      double ll = loglik(series.incidence, g, fam, min_points);
      return std::isfinite(ll) ? -ll
                               : std::numeric_limits<double>::infinity();
    } catch (const Error&) {
      return std::numeric_limits<double>::infinity();
    }
  };
}

// Data-driven start points: the asymptote gap seeds r, the first cumulative
// seeds b, the incidence peak seeds p; h and s cycle through a coarse grid
// and later starts jitter everything.
inline std::vector<double> start_point(const WeeklySeries& series,
                                       const ParamSpace& space, int start,
                                       std::uint64_t seed) {
  const double T = static_cast<double>(series.size());
  double c_first = static_cast<double>(series.cumulative.front());
  double c_max = static_cast<double>(
      *std::max_element(series.cumulative.begin(), series.cumulative.end()));
  int peak = 0;
  std::int64_t peak_val = -1;
  for (std::size_t i = 0; i < series.incidence.size(); ++i) {
    if (series.incidence[i] && *series.incidence[i] > peak_val) {
      peak_val = *series.incidence[i];
      peak = static_cast<int>(i) + 1;
    }
  }
  static constexpr double h_grid[] = {0.1, 0.5, 1.0};
  static constexpr double s_grid[] = {0.5, 1.0, 2.0};

  std::vector<double> nat(static_cast<std::size_t>(space.n_full));
  nat[0] = space.variant == CurveVariant::linear_drift
               ? std::max(c_max / (2.0 * T * T), 1e-3)
               : std::max(c_first, 1e-3);
  // an all-zero season starts (and stays) at a vanishing wave
  nat[1] = std::max(c_max - c_first, 1e-6);
  nat[2] = h_grid[start % 3];
  nat[3] = static_cast<double>(peak);
  nat[4] = s_grid[(start / 3) % 3];
  if (space.n_full == 6) nat[5] = 10.0;

  if (start >= 9) {
    Rng rng = Rng(seed).split(static_cast<std::uint64_t>(start));
    nat[0] *= std::exp(0.4 * rng.normal());
    nat[1] *= std::exp(0.4 * rng.normal());
    nat[2] *= std::exp(0.3 * rng.normal());
    nat[3] += T / 8.0 * rng.normal();
    nat[4] *= std::exp(0.3 * rng.normal());
    if (space.n_full == 6) nat[5] *= std::exp(0.5 * rng.normal());
  }

  // keep starts strictly inside their boxes
  for (int i = 0; i < space.n_full; ++i) {
    if (space.fixed[static_cast<std::size_t>(i)]) continue;
    const Bound& bd = space.transforms[static_cast<std::size_t>(i)].b;
    double lo = bd.lo, hi = bd.hi;
    double margin_lo =
        std::isfinite(lo) && std::isfinite(hi) ? (hi - lo) * 1e-4 : 1e-6;
    double margin_hi = margin_lo;
    double& v = nat[static_cast<std::size_t>(i)];
    if (std::isfinite(lo)) v = std::max(v, lo + margin_lo);
    if (std::isfinite(hi)) v = std::min(v, hi - margin_hi);
  }
  return nat;
}

}  // namespace detail

// Coefficient of determination on the incidence scale; NA weeks are excluded
// pairwise. SST is taken about the observed mean.
inline double r_squared(const std::vector<Count>& observed,
                        const std::vector<double>& fitted) {
  if (observed.size() != fitted.size())
    throw InvalidParamsError("observed/fitted length mismatch");
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    if (!observed[i]) continue;
    sum += static_cast<double>(*observed[i]);
    ++n;
  }
  if (n < 2) throw TooFewPointsError("need at least 2 observed weeks");
  double mean = sum / static_cast<double>(n);
  double ssr = 0.0, sst = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    if (!observed[i]) continue;
    double y = static_cast<double>(*observed[i]);
    ssr += (y - fitted[i]) * (y - fitted[i]);
    sst += (y - mean) * (y - mean);
  }
  if (sst == 0.0)
    throw DegenerateVarianceError("observed incidence has zero variance");
  return 1.0 - ssr / sst;
}

// Asymptotic cumulative level of the fitted curve. Only the constant
// baseline variant has a finite asymptote b + r.
inline double final_epidemic_size(const RichardsParams& params) {
  params.require_valid();
  if (params.variant == CurveVariant::linear_drift)
    throw NoAsymptoteError("linear-drift curve has no finite asymptote");
  return params.b + params.r;
}

// Whether curve parameters live on the raw count scale or were fitted on
// cases per 1000 residents. Never inferred from magnitudes.
enum class ParamScale { count, per_thousand };

inline double final_epidemic_size_per_thousand(
    const RichardsParams& params, ParamScale scale,
    std::optional<std::int64_t> population = std::nullopt) {
  double size = final_epidemic_size(params);
  if (scale == ParamScale::per_thousand) return size;
  if (!population || *population <= 0)
    throw InvalidParamsError(
        "count-scale parameters need a positive population");
  return 1000.0 * size / static_cast<double>(*population);
}

// Wald intervals from the numerical Hessian of the negative log-likelihood
// at the optimum, on the transformed scale, back-transformed per parameter.
// Directions where the likelihood is flat yield "unavailable" markers.
inline std::array<Interval, 5> wald_ci(FitResult& result,
                                       const WeeklySeries& series,
                                       const FitConfig& config, double level) {
  if (!result.converged) throw NotConvergedError("fit did not converge");
  if (!(level > 0 && level < 1))
    throw InvalidParamsError("level must be in (0,1)");

  detail::ParamSpace space =
      detail::ParamSpace::make(config, static_cast<int>(series.size()));
  long evals = 0;
  auto negll = detail::make_negloglik(series, space, &evals);
  Eigen::MatrixXd H = optim::numerical_hessian(negll, result.xhat);
  result.n_evaluations += evals;

  const int n = space.n_free();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(H);
  double max_eig = eig.eigenvalues().cwiseAbs().maxCoeff();
  // the cut also has to absorb finite-difference noise on exactly flat
  // directions, which scales like machine epsilon over the squared step
  double threshold = std::max(1e-7 * max_eig, 1e-9);

  std::vector<bool> null_dir(static_cast<std::size_t>(n), false);
  bool any_null = false;
  for (int k = 0; k < n; ++k) {
    if (eig.eigenvalues()(k) <= threshold) {
      null_dir[static_cast<std::size_t>(k)] = true;
      any_null = true;
    }
  }

  // Pseudo-inverse over the identified directions. Flat directions carry no
  // draw variance (harmless: a flat direction does not move the curve) and
  // any parameter loading on one gets an "unavailable" interval instead of a
  // meaningless width. The constant-baseline variant always has one such
  // direction, b, which cancels in the incidence differences.
  std::vector<double> variance(static_cast<std::size_t>(n), 0.0);
  std::vector<bool> usable(static_cast<std::size_t>(n), true);
  result.cov = Eigen::MatrixXd::Zero(n, n);
  int informative = 0;
  for (int k = 0; k < n; ++k) {
    if (null_dir[static_cast<std::size_t>(k)]) continue;
    result.cov += eig.eigenvectors().col(k) *
                  eig.eigenvectors().col(k).transpose() /
                  eig.eigenvalues()(k);
    ++informative;
  }
  result.cov_available = informative > 0;
  if (any_null) {
    for (int j = 0; j < n; ++j) {
      double loading = 0.0;
      for (int k = 0; k < n; ++k)
        if (null_dir[static_cast<std::size_t>(k)])
          loading += eig.eigenvectors()(j, k) * eig.eigenvectors()(j, k);
      usable[static_cast<std::size_t>(j)] = loading < 1e-6;
    }
  }
  for (int j = 0; j < n; ++j) {
    double v = result.cov(j, j);
    if (v > 0)
      variance[static_cast<std::size_t>(j)] = v;
    else
      usable[static_cast<std::size_t>(j)] = false;
  }

  double z = detail::normal_quantile(0.5 + level / 2.0);
  std::array<Interval, 5> out{};
  std::optional<Interval> dispersion_ci;

  std::vector<double> nat = space.unpack(result.xhat);
  for (int i = 0; i < space.n_full; ++i) {
    Interval iv;
    if (space.fixed[static_cast<std::size_t>(i)]) {
      iv = {nat[static_cast<std::size_t>(i)], nat[static_cast<std::size_t>(i)],
            true};
    } else {
      int j = -1;
      for (int jj = 0; jj < n; ++jj)
        if (space.free_index[static_cast<std::size_t>(jj)] == i) j = jj;
      if (j >= 0 && usable[static_cast<std::size_t>(j)] &&
          variance[static_cast<std::size_t>(j)] > 0) {
        double se = std::sqrt(variance[static_cast<std::size_t>(j)]);
        const auto& tr = space.transforms[static_cast<std::size_t>(i)];
        iv = {tr.to_v(result.xhat(j) - z * se),
              tr.to_v(result.xhat(j) + z * se), true};
      } else {
        iv.available = false;
      }
    }
    if (i < 5)
      out[static_cast<std::size_t>(i)] = iv;
    else
      dispersion_ci = iv;
  }
  result.dispersion_ci = dispersion_ci;
  return out;
}

// Maximum-likelihood fit of the growth-curve count GLM. Deterministic:
// (series, config) reproduces the result bit for bit. The best of n_starts
// simplex+quasi-Newton runs wins; ties resolve to the lowest start index.
inline FitResult fit(const WeeklySeries& series, const FitConfig& config) {
  config.validate();
  const int T = static_cast<int>(series.size());

  detail::ParamSpace space = detail::ParamSpace::make(config, T);
  // one observed week more than there are free parameters (6 for the full
  // five-parameter curve)
  std::size_t min_points = static_cast<std::size_t>(space.n_free()) + 1;
  if (detail::observed_weeks(series) < min_points)
    throw TooFewPointsError("need at least " + std::to_string(min_points) +
                            " observed weeks");
  long evals = 0;
  auto negll = detail::make_negloglik(series, space, &evals);

  FitResult result;
  result.seed = config.seed;
  result.family = config.family;
  result.ci_level = config.ci_level;
  result.n_weeks = T;
  for (int i = 0; i < 5; ++i) {
    Bound bd = config.bounds[static_cast<std::size_t>(i)];
    if (std::isnan(bd.lo) || std::isnan(bd.hi))
      bd = Bound{-static_cast<double>(T), 2.0 * static_cast<double>(T)};
    result.bounds_used[static_cast<std::size_t>(i)] = bd;
  }
  result.dispersion_bounds_used = config.dispersion_bounds;
  result.free_index = space.free_index;

  optim::Options nm_opts{config.tolerance, config.max_iterations};
  optim::Options polish_opts{config.tolerance, 200};

  bool have_best = false;
  Eigen::VectorXd best_x;
  double best_f = std::numeric_limits<double>::infinity();
  bool best_converged = false;

  for (int start = 0; start < config.n_starts; ++start) {
    std::vector<double> nat =
        detail::start_point(series, space, start, config.seed);
    Eigen::VectorXd x0 = space.pack(nat);
    if (!std::isfinite(negll(x0))) {
      result.start_logliks.push_back(
          -std::numeric_limits<double>::infinity());
      continue;
    }
    optim::Result nm = optim::nelder_mead(negll, x0, nm_opts);
    optim::Result polished = optim::bfgs(negll, nm.x, polish_opts);
    const optim::Result& run = polished.f <= nm.f ? polished : nm;
    result.start_logliks.push_back(
        std::isfinite(run.f) ? -run.f
                             : -std::numeric_limits<double>::infinity());
    if (!std::isfinite(run.f)) continue;
    bool run_converged = nm.converged || polished.converged;
    if (!have_best || run.f < best_f) {
      have_best = true;
      best_f = run.f;
      best_x = run.x;
      best_converged = run_converged;
    }
  }
  if (!have_best)
    throw AllStartsFailedError("no start produced a finite likelihood");

  result.xhat = best_x;
  result.loglik_hat = -best_f;
  result.converged = best_converged;
  std::optional<double> dispersion;
  result.params_hat = space.params_at(best_x, &dispersion);
  result.dispersion_hat = dispersion;

  result.fitted_incidence.resize(static_cast<std::size_t>(T));
  for (int t = 1; t <= T; ++t)
    result.fitted_incidence[static_cast<std::size_t>(t - 1)] =
        incidence_mean(t, result.params_hat);

  try {
    result.r_squared = r_squared(series.incidence, result.fitted_incidence);
  } catch (const DegenerateVarianceError&) {
    result.r_squared = 0.0;  // all-constant observations: nothing to explain
  }

  result.n_evaluations = evals;
  if (result.converged)
    result.ci = wald_ci(result, series, config, config.ci_level);
  return result;
}

struct Forecast {
  int horizon = 0;
  double level = 0.95;
  std::vector<double> point;  // per-week median
  std::vector<double> lo;
  std::vector<double> hi;
  bool plugin_fallback = false;  // parameter uncertainty unavailable
  std::uint64_t seed = 0;
  int n_sims = 0;
};

// Short-term forecast by parametric simulation: parameter vectors from the
// asymptotic normal on the transformed scale, observation noise from the
// fitted family. Falls back to plug-in parameters (observation noise only)
// when the covariance is unavailable, and flags that in the output.
inline Forecast forecast(const FitResult& fit_result,
                         const WeeklySeries& series, int horizon, double level,
                         int n_sims, std::uint64_t seed,
                         const FitConfig& config) {
  if (!fit_result.converged) throw NotConvergedError("fit did not converge");
  if (horizon < 1) throw InvalidParamsError("horizon must be >= 1");
  if (!(level > 0 && level < 1))
    throw InvalidParamsError("level must be in (0,1)");
  if (n_sims < 1) throw InvalidParamsError("n_sims must be >= 1");

  const int T = static_cast<int>(series.size());
  detail::ParamSpace space = detail::ParamSpace::make(config, T);
  const int n = space.n_free();

  bool use_cov = fit_result.cov_available && fit_result.cov.rows() == n;
  Eigen::MatrixXd L;
  if (use_cov) {
    Eigen::LLT<Eigen::MatrixXd> llt(fit_result.cov);
    if (llt.info() == Eigen::Success) {
      L = llt.matrixL();
    } else {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(fit_result.cov);
      Eigen::VectorXd clamped = eig.eigenvalues().cwiseMax(0.0);
      L = eig.eigenvectors() * clamped.cwiseSqrt().asDiagonal();
    }
  }

  Forecast fc;
  fc.horizon = horizon;
  fc.level = level;
  fc.plugin_fallback = !use_cov;
  fc.seed = seed;
  fc.n_sims = n_sims;

  std::vector<std::vector<double>> samples(
      static_cast<std::size_t>(horizon),
      std::vector<double>(static_cast<std::size_t>(n_sims)));

  Rng root(seed);
  for (int sim = 0; sim < n_sims; ++sim) {
    Rng rng = root.split(static_cast<std::uint64_t>(sim));
    Eigen::VectorXd x = fit_result.xhat;
    if (use_cov) {
      Eigen::VectorXd z(n);
      for (int j = 0; j < n; ++j) z(j) = rng.normal();
      x += L * z;
    }
    std::optional<double> dispersion;
    RichardsParams g = space.params_at(x, &dispersion);
    if (!g.valid()) {  // extreme draw; fall back to the point estimate
      g = fit_result.params_hat;
      dispersion = fit_result.dispersion_hat;
    }
    for (int k = 0; k < horizon; ++k) {
      double mu = std::max(incidence_mean(T + 1 + k, g), 0.0);
      long y;
      if (config.family == CountFamily::negbin && dispersion &&
          *dispersion > 0 && mu > 0)
        y = rng.negbin(mu, *dispersion);
      else
        y = rng.poisson(mu);
      samples[static_cast<std::size_t>(k)][static_cast<std::size_t>(sim)] =
          static_cast<double>(y);
    }
  }

  double tail = (1.0 - level) / 2.0;
  for (int k = 0; k < horizon; ++k) {
    auto& week = samples[static_cast<std::size_t>(k)];
    std::sort(week.begin(), week.end());
    fc.point.push_back(detail::quantile_of_sorted(week, 0.5));
    fc.lo.push_back(detail::quantile_of_sorted(week, tail));
    fc.hi.push_back(detail::quantile_of_sorted(week, 1.0 - tail));
  }
  return fc;
}

}  // namespace wnv
