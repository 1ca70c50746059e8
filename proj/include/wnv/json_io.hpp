#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "wnv/estimate.hpp"
#include "wnv/stats.hpp"

namespace wnv {

// Serialized artifacts use nlohmann's ordered_json so that repeated runs
// with the same seed produce byte-identical files.
using Json = nlohmann::ordered_json;

inline Json interval_to_json(const Interval& iv) {
  Json j;
  if (iv.available) {
    j["low"] = iv.lo;
    j["high"] = iv.hi;
  } else {
    j["low"] = nullptr;
    j["high"] = nullptr;
    j["unavailable"] = true;
  }
  return j;
}

inline Interval interval_from_json(const Json& j) {
  Interval iv;
  if (j.contains("unavailable") && j["unavailable"].get<bool>()) {
    iv.available = false;
  } else {
    iv.available = true;
    iv.lo = j["low"].get<double>();
    iv.hi = j["high"].get<double>();
  }
  return iv;
}

// The JSON fit artifact is the contract between the fit and forecast
// commands: point estimates, intervals, fit quality, and the transformed
// optimum/covariance needed to simulate parameter uncertainty.
inline Json fit_result_to_json(const FitResult& fr) {
  Json j;
  j["params"] = {{"b", fr.params_hat.b},
                 {"r", fr.params_hat.r},
                 {"h", fr.params_hat.h},
                 {"p", fr.params_hat.p},
                 {"s", fr.params_hat.s}};
  Json ci;
  for (std::size_t i = 0; i < 5; ++i)
    ci[std::string(kParamNames[i])] = interval_to_json(fr.ci[i]);
  j["ci"] = ci;
  j["ci_level"] = fr.ci_level;
  j["loglik"] = fr.loglik_hat;
  j["r2"] = fr.r_squared;
  j["converged"] = fr.converged;
  j["seed"] = fr.seed;
  j["variant"] = std::string(to_string(fr.params_hat.variant));
  j["family"] = std::string(to_string(fr.family));
  if (fr.dispersion_hat) {
    j["dispersion"] = *fr.dispersion_hat;
    if (fr.dispersion_ci)
      j["dispersion_ci"] = interval_to_json(*fr.dispersion_ci);
  }
  j["n_weeks"] = fr.n_weeks;
  j["n_evaluations"] = fr.n_evaluations;
  j["fitted_incidence"] = fr.fitted_incidence;
  j["start_logliks"] = fr.start_logliks;

  Json tr;
  tr["free_index"] = fr.free_index;
  tr["estimate"] = std::vector<double>(fr.xhat.data(),
                                       fr.xhat.data() + fr.xhat.size());
  tr["cov_available"] = fr.cov_available;
  if (fr.cov_available) {
    std::vector<std::vector<double>> cov;
    for (Eigen::Index i = 0; i < fr.cov.rows(); ++i)
      cov.emplace_back(fr.cov.row(i).begin(), fr.cov.row(i).end());
    tr["cov"] = cov;
  }
  Json bounds;
  for (std::size_t i = 0; i < 5; ++i) {
    const Bound& b = fr.bounds_used[i];
    bounds[std::string(kParamNames[i])] = {
        std::isfinite(b.lo) ? Json(b.lo) : Json(nullptr),
        std::isfinite(b.hi) ? Json(b.hi) : Json(nullptr)};
  }
  bounds["dispersion"] = {fr.dispersion_bounds_used.lo,
                          fr.dispersion_bounds_used.hi};
  tr["bounds"] = bounds;
  j["transformed"] = tr;
  return j;
}

inline FitResult fit_result_from_json(const Json& j) {
  FitResult fr;
  fr.params_hat.b = j["params"]["b"].get<double>();
  fr.params_hat.r = j["params"]["r"].get<double>();
  fr.params_hat.h = j["params"]["h"].get<double>();
  fr.params_hat.p = j["params"]["p"].get<double>();
  fr.params_hat.s = j["params"]["s"].get<double>();
  auto variant = parse_variant(j["variant"].get<std::string>());
  auto family = parse_family(j["family"].get<std::string>());
  if (!variant || !family) throw IoError("fit JSON has unknown variant/family");
  fr.params_hat.variant = *variant;
  fr.family = *family;
  for (std::size_t i = 0; i < 5; ++i)
    fr.ci[i] = interval_from_json(j["ci"][std::string(kParamNames[i])]);
  fr.ci_level = j["ci_level"].get<double>();
  fr.loglik_hat = j["loglik"].get<double>();
  fr.r_squared = j["r2"].get<double>();
  fr.converged = j["converged"].get<bool>();
  fr.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("dispersion"))
    fr.dispersion_hat = j["dispersion"].get<double>();
  fr.n_weeks = j["n_weeks"].get<int>();
  fr.n_evaluations = j["n_evaluations"].get<long>();
  fr.fitted_incidence = j["fitted_incidence"].get<std::vector<double>>();
  if (j.contains("start_logliks"))
    fr.start_logliks = j["start_logliks"].get<std::vector<double>>();

  const Json& tr = j["transformed"];
  fr.free_index = tr["free_index"].get<std::vector<int>>();
  auto est = tr["estimate"].get<std::vector<double>>();
  fr.xhat = Eigen::Map<Eigen::VectorXd>(est.data(),
                                        static_cast<Eigen::Index>(est.size()));
  fr.cov_available = tr["cov_available"].get<bool>();
  if (fr.cov_available) {
    auto cov = tr["cov"].get<std::vector<std::vector<double>>>();
    fr.cov.resize(static_cast<Eigen::Index>(cov.size()),
                  static_cast<Eigen::Index>(cov.size()));
    for (std::size_t i = 0; i < cov.size(); ++i)
      for (std::size_t k = 0; k < cov[i].size(); ++k)
        fr.cov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
            cov[i][k];
  }
  const Json& bounds = tr["bounds"];
  for (std::size_t i = 0; i < 5; ++i) {
    const Json& b = bounds[std::string(kParamNames[i])];
    fr.bounds_used[i].lo =
        b[0].is_null() ? -std::numeric_limits<double>::infinity()
                       : b[0].get<double>();
    fr.bounds_used[i].hi =
        b[1].is_null() ? std::numeric_limits<double>::infinity()
                       : b[1].get<double>();
  }
  fr.dispersion_bounds_used.lo = bounds["dispersion"][0].get<double>();
  fr.dispersion_bounds_used.hi = bounds["dispersion"][1].get<double>();
  return fr;
}

// Rebuilds the fit configuration that matches a serialized result closely
// enough to drive forecasting (bounds, family, variant, fixed parameters).
inline FitConfig fit_config_from_result(const FitResult& fr) {
  FitConfig cfg;
  cfg.family = fr.family;
  cfg.variant = fr.params_hat.variant;
  cfg.bounds = fr.bounds_used;
  cfg.dispersion_bounds = fr.dispersion_bounds_used;
  cfg.seed = fr.seed;
  // coordinates absent from free_index were fixed at their estimates
  std::array<bool, 6> is_free{};
  for (int i : fr.free_index)
    if (i >= 0 && i < 6) is_free[static_cast<std::size_t>(i)] = true;
  const double nat[5] = {fr.params_hat.b, fr.params_hat.r, fr.params_hat.h,
                         fr.params_hat.p, fr.params_hat.s};
  for (std::size_t i = 0; i < 5; ++i)
    if (!is_free[i]) cfg.fixed[i] = nat[i];
  if (fr.family == CountFamily::negbin && !is_free[5])
    cfg.fixed_dispersion = fr.dispersion_hat;
  return cfg;
}

inline Json forecast_to_json(const Forecast& fc) {
  Json j;
  j["horizon"] = fc.horizon;
  j["level"] = fc.level;
  j["point"] = fc.point;
  j["low"] = fc.lo;
  j["high"] = fc.hi;
  j["plugin_fallback"] = fc.plugin_fallback;
  j["seed"] = fc.seed;
  j["n_sims"] = fc.n_sims;
  return j;
}

inline Json stat_report_to_json(const StatReport& report) {
  Json j;
  j["grouping"] = report.grouping;
  Json rows = Json::array();
  for (const auto& r : report.rows)
    rows.push_back({{"key", r.key}, {"count", r.count}, {"share", r.share}});
  j["rows"] = rows;
  j["total"] = report.total;
  j["unattributable_weeks"] = report.unattributable_weeks;
  if (report.mean) j["mean"] = *report.mean;
  return j;
}

// One validation issue as a JSON-lines object.
inline Json issue_to_json(const std::string& file, std::size_t row,
                          const std::string& column, Severity severity,
                          const std::string& message) {
  Json j;
  j["file"] = file;
  j["row"] = row;
  j["column"] = column;
  j["severity"] = std::string(to_string(severity));
  j["message"] = message;
  return j;
}

}  // namespace wnv
