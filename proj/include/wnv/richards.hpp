#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wnv/errors.hpp"

namespace wnv {

// Curve variants. The baseline parameter b is a constant lower asymptote in
// the first variant and a per-week linear drift in the second.
enum class CurveVariant { constant_baseline, linear_drift };

inline std::string_view to_string(CurveVariant v) {
  return v == CurveVariant::constant_baseline ? "baseline" : "drift";
}

inline std::optional<CurveVariant> parse_variant(std::string_view s) {
  if (s == "baseline" || s == "constant_baseline")
    return CurveVariant::constant_baseline;
  if (s == "drift" || s == "linear_drift") return CurveVariant::linear_drift;
  return std::nullopt;
}

// Five-parameter generalized logistic growth curve for cumulative counts:
//
//   baseline(t) + r / (1 + exp(h*(p - t)))^s
//
// b  baseline (lower asymptote, or weekly drift in the drift variant)
// r  distance between lower and upper asymptote
// h  growth rate of the ascending phase
// p  inflection location, in week units
// s  asymmetry between ascending and descending phase
struct RichardsParams {
  double b = 0.0;
  double r = 1.0;
  double h = 0.5;
  double p = 0.0;
  double s = 1.0;
  CurveVariant variant = CurveVariant::constant_baseline;

  bool valid() const {
    return b >= 0.0 && r > 0.0 && std::isfinite(b) && std::isfinite(r) &&
           std::isfinite(h) && std::isfinite(p) && std::isfinite(s) && s > 0.0;
  }
  void require_valid() const {
    if (!valid()) throw InvalidParamsError("invalid growth-curve parameters");
  }
};

enum class CountFamily { poisson, negbin };

inline std::string_view to_string(CountFamily f) {
  return f == CountFamily::poisson ? "poisson" : "negbin";
}

inline std::optional<CountFamily> parse_family(std::string_view s) {
  if (s == "poisson") return CountFamily::poisson;
  if (s == "negbin" || s == "nb" || s == "nb2") return CountFamily::negbin;
  return std::nullopt;
}

// Observation family for weekly counts. NB2 parameterization: variance
// mu + mu^2/dispersion, so Poisson is the dispersion -> infinity limit.
struct LikelihoodFamily {
  CountFamily kind = CountFamily::poisson;
  std::optional<double> dispersion;  // required iff kind == negbin

  bool valid() const {
    if (kind == CountFamily::negbin)
      return dispersion.has_value() && *dispersion > 0.0;
    return !dispersion.has_value();
  }
  void require_valid() const {
    if (!valid()) throw InvalidParamsError("invalid likelihood family");
  }
};

// Mean floor applied inside likelihood evaluation only, to keep log(mu)
// finite where the curve is locally flat. Far below one case per week.
inline constexpr double kMeanFloor = 1e-10;

namespace detail {
// log(1 + e^u), safe for the whole double range.
inline double softplus(double u) {
  if (u > 36.0) return u + std::exp(-u);
  if (u < -36.0) return std::exp(u);
  return std::log1p(std::exp(u));
}
}  // namespace detail

// Expected cumulative count at week t. Evaluated in log space so that the
// power term neither overflows nor loses the tails for |h*(p-t)| up to ~700.
inline double richards_mean(double t, const RichardsParams& g) {
  g.require_valid();
  double wave = g.r * std::exp(-g.s * detail::softplus(g.h * (g.p - t)));
  double base = g.variant == CurveVariant::linear_drift ? g.b * t : g.b;
  return base + wave;
}

// Expected new counts at week t >= 1: first difference of the cumulative
// mean. May be slightly negative for pathological parameter combinations;
// clamping happens inside the likelihood, never here.
inline double incidence_mean(int t, const RichardsParams& g) {
  return richards_mean(t, g) - richards_mean(t - 1, g);
}

inline double log_poisson_pmf(std::int64_t y, double mu) {
  return static_cast<double>(y) * std::log(mu) - mu -
         std::lgamma(static_cast<double>(y) + 1.0);
}

inline double log_nb2_pmf(std::int64_t y, double mu, double k) {
  double yd = static_cast<double>(y);
  return std::lgamma(yd + k) - std::lgamma(k) - std::lgamma(yd + 1.0) +
         k * std::log(k / (k + mu)) + yd * std::log(mu / (k + mu));
}

// Log-likelihood of an incidence series under the curve. Weeks are indexed
// 1..T over the vector; NA weeks contribute nothing. The default minimum of
// 6 observed weeks matches the five free curve parameters; restricted fits
// lower it to their own free-parameter count plus one.
inline double loglik(const std::vector<std::optional<std::int64_t>>& incidence,
                     const RichardsParams& params,
                     const LikelihoodFamily& family,
                     std::size_t min_points = 6) {
  params.require_valid();
  family.require_valid();
  std::size_t observed = 0;
  for (const auto& y : incidence)
    if (y.has_value()) ++observed;
  if (observed < min_points)
    throw TooFewPointsError("need at least " + std::to_string(min_points) +
                            " observed weeks, have " +
                            std::to_string(observed));
  double total = 0.0;
  for (std::size_t i = 0; i < incidence.size(); ++i) {
    if (!incidence[i].has_value()) continue;
    int t = static_cast<int>(i) + 1;
    double mu = std::max(incidence_mean(t, params), kMeanFloor);
    total += family.kind == CountFamily::poisson
                 ? log_poisson_pmf(*incidence[i], mu)
                 : log_nb2_pmf(*incidence[i], mu, *family.dispersion);
  }
  return total;
}

}  // namespace wnv
