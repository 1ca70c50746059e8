// wnv — command line front end for the WNVDB surveillance analytics toolkit.
//
// Subcommands: validate, preprocess, stats, fit, forecast, join-weather,
// qa-sample. Exit codes: 0 success, 1 data-validation failure, 2 I/O or
// usage failure, 3 non-convergence.

#include <CLI11.hpp>
#include <openssl/evp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "wnv/dataset.hpp"
#include "wnv/estimate.hpp"
#include "wnv/json_io.hpp"
#include "wnv/stats.hpp"

namespace fs = std::filesystem;
using wnv::Json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNotConverged = 3;

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr);
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 0xf]);
  }
  return out;
}

std::string now_iso8601() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// All output files go through a temp-file rename so concurrent invocations
// on disjoint outputs never observe partial writes.
void atomic_write(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw wnv::IoError("cannot write " + tmp.string());
    out << content;
  }
  fs::rename(tmp, path);
}

// Every command records what it read, what it wrote and with which
// configuration. Timestamps live only in the manifest, never in outputs.
class Manifest {
 public:
  Manifest(std::string command, Json config)
      : started_(now_iso8601()),
        command_(std::move(command)),
        config_(std::move(config)) {}

  void add_input(const fs::path& path, const std::string& content) {
    inputs_.push_back({{"path", path.string()}, {"sha256", sha256_hex(content)}});
  }
  void add_output(const fs::path& path, const std::string& content) {
    atomic_write(path, content);
    outputs_.push_back(
        {{"path", path.string()}, {"sha256", sha256_hex(content)}});
  }

  void write(const fs::path& out_path) const {
    Json j;
    j["command"] = command_;
    j["tool_version"] = WNV_VERSION;
    j["started"] = started_;
    j["finished"] = now_iso8601();
    j["config"] = config_;
    j["inputs"] = inputs_;
    j["outputs"] = outputs_;
    fs::path path = out_path;
    path += ".manifest.json";
    atomic_write(path, j.dump(2) + "\n");
  }

 private:
  std::string started_;
  std::string command_;
  Json config_;
  Json inputs_ = Json::array();
  Json outputs_ = Json::array();
};

wnv::Host require_host(const std::string& token) {
  auto host = wnv::parse_host(token);
  if (!host)
    throw wnv::UsageError(
        "unknown host '" + token +
        "' (use umani|equidi|uccelli-bersaglio|uccelli-selvatici|zanzare)");
  return *host;
}

// Family that carries a host's data at the requested level.
wnv::TableFamilyKind family_for(wnv::Host host, wnv::GeoLevel level) {
  if (level == wnv::GeoLevel::national)
    return wnv::TableFamilyKind::national_trend;
  switch (host) {
    case wnv::Host::humans:
      return level == wnv::GeoLevel::province
                 ? wnv::TableFamilyKind::human_province
                 : wnv::TableFamilyKind::human_region;
    case wnv::Host::equids:
      return wnv::TableFamilyKind::equid;
    case wnv::Host::mosquitoes:
      return wnv::TableFamilyKind::entomological;
    case wnv::Host::target_birds:
      return wnv::TableFamilyKind::target_birds;
    case wnv::Host::wild_birds:
      return wnv::TableFamilyKind::wild_birds;
  }
  return wnv::TableFamilyKind::national_trend;
}

bool geo_matches(const wnv::SliceKey& key, const std::string& wanted) {
  if (key.geo_code == wanted || key.geo_name == wanted) return true;
  // tolerate unpadded codes
  auto norm = wnv::geo::normalize_code(
      wanted, key.level == wnv::GeoLevel::region ? 2 : 3);
  return norm && key.geo_code == *norm;
}

std::string format_g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// --- validate ---------------------------------------------------------------

struct ValidateArgs {
  std::string data_dir;
  std::string out = "wnv-validation.jsonl";
};

int run_validate(const ValidateArgs& args) {
  Manifest manifest("validate", Json{{"data_dir", args.data_dir}});
  wnv::Dataset ds = wnv::load_dataset(args.data_dir);

  std::vector<Json> lines;
  bool any_error = false;
  for (const auto& path : ds.skipped)
    lines.push_back(wnv::issue_to_json(path.string(), 0, "",
                                       wnv::Severity::warning,
                                       "no table family matches this file"));
  for (const auto& file : ds.files) {
    manifest.add_input(file.path, wnv::read_file(file.path));
    for (const auto& issue : file.result.issues) {
      lines.push_back(wnv::issue_to_json(file.path.string(), issue.row,
                                         issue.column, issue.severity,
                                         issue.message));
      any_error |= issue.severity == wnv::Severity::error;
    }
    for (const auto& issue : wnv::validate_geo(file.result.records)) {
      lines.push_back(wnv::issue_to_json(file.path.string(),
                                         issue.record_index + 1, issue.field,
                                         issue.severity, issue.message));
      any_error |= issue.severity == wnv::Severity::error;
    }
    for (const auto& [index, message] :
         wnv::audit_increments(file.result.records))
      lines.push_back(wnv::issue_to_json(file.path.string(), index + 1,
                                         "nuovi_casi", wnv::Severity::warning,
                                         message));
  }

  std::string report;
  for (const auto& line : lines) report += line.dump() + "\n";
  manifest.add_output(args.out, report);
  manifest.write(args.out);
  std::cout << "validated " << ds.files.size() << " files, " << lines.size()
            << " findings\n";
  return any_error ? kExitValidation : kExitOk;
}

// --- preprocess -------------------------------------------------------------

struct PreprocessArgs {
  std::string data_dir;
  std::string host;
  int year = 0;
  std::string region;
  std::string province;
  std::string out;
};

int run_preprocess(const PreprocessArgs& args) {
  if (!args.region.empty() && !args.province.empty())
    throw wnv::UsageError("--region and --province are mutually exclusive");
  wnv::Host host = require_host(args.host);
  wnv::GeoLevel level = !args.province.empty()
                            ? wnv::GeoLevel::province
                            : (!args.region.empty() ? wnv::GeoLevel::region
                                                    : wnv::GeoLevel::national);

  Manifest manifest("preprocess", Json{{"data_dir", args.data_dir},
                                       {"host", args.host},
                                       {"year", args.year},
                                       {"region", args.region},
                                       {"province", args.province}});
  wnv::Dataset ds = wnv::load_dataset(args.data_dir);
  auto records = ds.records(family_for(host, level));
  std::erase_if(records, [&](const wnv::SurveillanceRecord& r) {
    return r.year != args.year || r.host != host;
  });
  auto series = wnv::build_series(records, {level, wnv::Stratify::none});
  const std::string& geo_filter =
      !args.province.empty() ? args.province : args.region;
  if (!geo_filter.empty())
    std::erase_if(series, [&](const wnv::WeeklySeries& s) {
      return !geo_matches(s.key, geo_filter);
    });
  if (series.empty())
    throw wnv::UsageError("no series matches the requested slice");

  for (const auto& file : ds.files)
    if (file.kind == family_for(host, level) && file.year == args.year)
      manifest.add_input(file.path, wnv::read_file(file.path));
  manifest.add_output(args.out, wnv::write_series_csv(series));
  manifest.write(args.out);
  std::cout << "wrote " << series.size() << " series to " << args.out << "\n";
  return kExitOk;
}

// --- stats -------------------------------------------------------------------

struct StatsArgs {
  std::string data_dir;
  std::string host = "umani";
  std::string by = "anno";
  int year = 0;  // 0 = pooled
  std::string out;
  std::string csv_out;
};

int run_stats(const StatsArgs& args) {
  wnv::Host host = require_host(args.host);
  Manifest manifest("stats", Json{{"data_dir", args.data_dir},
                                  {"host", args.host},
                                  {"by", args.by},
                                  {"year", args.year}});
  wnv::Dataset ds = wnv::load_dataset(args.data_dir);

  std::optional<int> year;
  if (args.year != 0) year = args.year;

  wnv::StatReport report;
  if (args.by == "anno") {
    report = wnv::yearly_totals(ds.records(family_for(host, wnv::GeoLevel::region)),
                                host);
  } else if (args.by == "regione") {
    report = wnv::regional_breakdown(
        ds.records(family_for(host, wnv::GeoLevel::region)), host,
        wnv::GeoLevel::region);
  } else if (args.by == "provincia") {
    report = wnv::regional_breakdown(
        ds.records(family_for(host, wnv::GeoLevel::province)), host,
        wnv::GeoLevel::province);
  } else if (args.by == "eta") {
    report = wnv::age_composition(
        ds.records(wnv::TableFamilyKind::human_province), year);
  } else if (args.by == "tipo") {
    report = wnv::type_composition(
        ds.records(family_for(host, wnv::GeoLevel::region)), year);
  } else {
    throw wnv::UsageError("unknown breakdown '" + args.by +
                          "' (anno|regione|provincia|eta|tipo)");
  }

  manifest.add_output(args.out, wnv::stat_report_to_json(report).dump(2) + "\n");
  if (!args.csv_out.empty())
    manifest.add_output(args.csv_out, wnv::write_report_csv(report));
  manifest.write(args.out);
  std::cout << report.grouping << ": total " << report.total << " over "
            << report.rows.size() << " groups\n";
  return kExitOk;
}

// --- fit ---------------------------------------------------------------------

struct FitArgs {
  std::string series;
  std::string family = "poisson";
  std::string variant = "baseline";
  std::uint64_t seed = 1;
  int starts = 20;
  double level = 0.95;
  double tolerance = 1e-8;
  int max_iterations = 5000;
  std::string out;
  std::string curve_out;
};

wnv::WeeklySeries load_single_series(const std::string& path,
                                     Manifest& manifest) {
  std::string text = wnv::read_file(path);
  manifest.add_input(path, text);
  auto series = wnv::read_series_csv(text);
  if (series.size() != 1)
    throw wnv::UsageError("expected exactly one series in " + path + ", got " +
                          std::to_string(series.size()) +
                          " (preprocess with --region/--province)");
  return series.front();
}

wnv::FitConfig config_from_args(const FitArgs& args) {
  wnv::FitConfig cfg;
  auto family = wnv::parse_family(args.family);
  auto variant = wnv::parse_variant(args.variant);
  if (!family) throw wnv::UsageError("unknown family '" + args.family + "'");
  if (!variant) throw wnv::UsageError("unknown variant '" + args.variant + "'");
  cfg.family = *family;
  cfg.variant = *variant;
  cfg.seed = args.seed;
  cfg.n_starts = args.starts;
  cfg.ci_level = args.level;
  cfg.tolerance = args.tolerance;
  cfg.max_iterations = args.max_iterations;
  return cfg;
}

std::string curve_csv(const wnv::FitResult& res, const wnv::WeeklySeries& series,
                      const wnv::FitConfig& cfg) {
  // pointwise band for the weekly mean from parameter draws (no observation
  // noise); collapses onto the fitted curve when the covariance is missing
  const int T = static_cast<int>(series.size());
  const int draws = 500;
  wnv::detail::ParamSpace space = wnv::detail::ParamSpace::make(cfg, T);
  std::vector<std::vector<double>> mean_draws(
      static_cast<std::size_t>(T));
  if (res.cov_available) {
    Eigen::LLT<Eigen::MatrixXd> llt(res.cov);
    Eigen::MatrixXd L;
    if (llt.info() == Eigen::Success) {
      L = llt.matrixL();
    } else {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(res.cov);
      L = eig.eigenvectors() *
          eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
    }
    wnv::Rng root(res.seed ^ 0x5ca1ab1eULL);
    for (int d = 0; d < draws; ++d) {
      wnv::Rng rng = root.split(static_cast<std::uint64_t>(d));
      Eigen::VectorXd z(res.xhat.size());
      for (Eigen::Index j = 0; j < z.size(); ++j) z(j) = rng.normal();
      Eigen::VectorXd x = res.xhat + L * z;
      wnv::RichardsParams g = space.params_at(x);
      if (!g.valid()) g = res.params_hat;
      for (int t = 1; t <= T; ++t)
        mean_draws[static_cast<std::size_t>(t - 1)].push_back(
            wnv::incidence_mean(t, g));
    }
  }

  std::ostringstream out;
  wnv::csv::write_row(out, std::vector<std::string>{"week", "data", "observed",
                                                    "fitted", "lower",
                                                    "upper"});
  for (int t = 1; t <= T; ++t) {
    double fitted = res.fitted_incidence[static_cast<std::size_t>(t - 1)];
    double lo = fitted, hi = fitted;
    auto& draws_t = mean_draws[static_cast<std::size_t>(t - 1)];
    if (!draws_t.empty()) {
      std::sort(draws_t.begin(), draws_t.end());
      lo = wnv::detail::quantile_of_sorted(draws_t, 0.025);
      hi = wnv::detail::quantile_of_sorted(draws_t, 0.975);
    }
    const wnv::Count& y = series.incidence[static_cast<std::size_t>(t - 1)];
    wnv::csv::write_row(
        out, std::vector<std::string>{
                 std::to_string(t),
                 series.dates[static_cast<std::size_t>(t - 1)].to_string(),
                 y ? std::to_string(*y) : "NA", format_g(fitted),
                 format_g(lo), format_g(hi)});
  }
  return out.str();
}

int run_fit(const FitArgs& args) {
  Manifest manifest("fit", Json{{"series", args.series},
                                {"family", args.family},
                                {"variant", args.variant},
                                {"seed", args.seed},
                                {"starts", args.starts},
                                {"level", args.level}});
  wnv::WeeklySeries series = load_single_series(args.series, manifest);
  wnv::FitConfig cfg = config_from_args(args);
  wnv::FitResult res = wnv::fit(series, cfg);

  Json j = wnv::fit_result_to_json(res);
  j["slice"] = {{"year", series.key.year},
                {"host", std::string(wnv::host_name(series.key.host))},
                {"level", std::string(wnv::to_string(series.key.level))},
                {"geo_code", series.key.geo_code},
                {"geo_name", series.key.geo_name}};
  j["config"] = {{"n_starts", cfg.n_starts},
                 {"tolerance", cfg.tolerance},
                 {"max_iterations", cfg.max_iterations}};
  manifest.add_output(args.out, j.dump(2) + "\n");

  std::string curve_path = args.curve_out.empty()
                               ? args.out + ".curve.csv"
                               : args.curve_out;
  manifest.add_output(curve_path, curve_csv(res, series, cfg));
  manifest.write(args.out);

  std::cout << "fit " << series.key.geo_name << " " << series.key.year
            << ": loglik " << res.loglik_hat << ", R2 " << res.r_squared
            << ", converged " << (res.converged ? "yes" : "no") << "\n";
  return res.converged ? kExitOk : kExitNotConverged;
}

// --- forecast ----------------------------------------------------------------

struct ForecastArgs {
  std::string fit;
  std::string series;
  int horizon = 3;
  double level = 0.95;
  std::uint64_t seed = 1;
  int sims = 2000;
  int holdout = 0;
  std::string out;
  std::string csv_out;
};

int run_forecast(const ForecastArgs& args) {
  if (args.horizon < 1) throw wnv::UsageError("--horizon must be >= 1");
  Manifest manifest("forecast", Json{{"fit", args.fit},
                                     {"series", args.series},
                                     {"horizon", args.horizon},
                                     {"level", args.level},
                                     {"seed", args.seed},
                                     {"sims", args.sims},
                                     {"holdout", args.holdout}});
  std::string fit_text = wnv::read_file(args.fit);
  manifest.add_input(args.fit, fit_text);
  wnv::FitResult fit_res = wnv::fit_result_from_json(Json::parse(fit_text));
  if (!fit_res.converged) {
    std::cerr << "fit artifact is not converged\n";
    return kExitNotConverged;
  }
  wnv::WeeklySeries series = load_single_series(args.series, manifest);
  Json fit_json = Json::parse(fit_text);
  wnv::FitConfig cfg = wnv::fit_config_from_result(fit_res);
  if (fit_json.contains("config")) {
    cfg.n_starts = fit_json["config"]["n_starts"].get<int>();
    cfg.tolerance = fit_json["config"]["tolerance"].get<double>();
    cfg.max_iterations = fit_json["config"]["max_iterations"].get<int>();
  }

  Json j;
  wnv::Forecast fc;
  wnv::WeekDate anchor_date = series.dates.back();
  if (args.holdout > 0) {
    if (static_cast<std::size_t>(args.holdout) + 6 > series.size())
      throw wnv::UsageError("holdout leaves too few weeks to refit");
    wnv::WeeklySeries truncated = series;
    std::size_t keep = series.size() - static_cast<std::size_t>(args.holdout);
    truncated.dates.resize(keep);
    truncated.cumulative.resize(keep);
    truncated.incidence.resize(keep);
    anchor_date = truncated.dates.back();

    wnv::FitResult refit = wnv::fit(truncated, cfg);
    if (!refit.converged) {
      std::cerr << "holdout refit did not converge\n";
      return kExitNotConverged;
    }
    fc = wnv::forecast(refit, truncated, args.holdout, args.level, args.sims,
                       args.seed, cfg);
    int hits = 0, total = 0;
    Json held = Json::array();
    for (int k = 0; k < args.holdout; ++k) {
      const wnv::Count& y = series.incidence[keep + static_cast<std::size_t>(k)];
      Json entry;
      entry["week"] = static_cast<int>(keep) + k + 1;
      if (y) {
        bool inside = static_cast<double>(*y) >= fc.lo[static_cast<std::size_t>(k)] &&
                      static_cast<double>(*y) <= fc.hi[static_cast<std::size_t>(k)];
        entry["observed"] = *y;
        entry["covered"] = inside;
        hits += inside ? 1 : 0;
        ++total;
      } else {
        entry["observed"] = nullptr;
      }
      held.push_back(entry);
    }
    j["holdout"] = {{"weeks", args.holdout},
                    {"hits", hits},
                    {"total", total},
                    {"details", held}};
    std::cout << "holdout coverage " << hits << "/" << total << " inside the "
              << args.level << " interval\n";
  } else {
    fc = wnv::forecast(fit_res, series, args.horizon, args.level, args.sims,
                       args.seed, cfg);
    std::cout << "forecast " << args.horizon << " weeks ahead\n";
  }

  Json fc_json = wnv::forecast_to_json(fc);
  for (auto& [key, value] : fc_json.items()) j[key] = value;

  manifest.add_output(args.out, j.dump(2) + "\n");
  if (!args.csv_out.empty()) {
    std::ostringstream csv;
    wnv::csv::write_row(csv, std::vector<std::string>{"week", "data", "point",
                                                      "lower", "upper"});
    for (int k = 0; k < fc.horizon; ++k) {
      wnv::csv::write_row(
          csv, std::vector<std::string>{
                   std::to_string(k + 1),
                   anchor_date.plus_days(7 * (k + 1)).to_string(),
                   format_g(fc.point[static_cast<std::size_t>(k)]),
                   format_g(fc.lo[static_cast<std::size_t>(k)]),
                   format_g(fc.hi[static_cast<std::size_t>(k)])});
    }
    manifest.add_output(args.csv_out, csv.str());
  }
  manifest.write(args.out);
  return kExitOk;
}

// --- join-weather ------------------------------------------------------------

struct JoinArgs {
  std::string series;
  std::string weather;
  std::string out;
};

int run_join_weather(const JoinArgs& args) {
  Manifest manifest("join-weather",
                    Json{{"series", args.series}, {"weather", args.weather}});
  std::string series_text = wnv::read_file(args.series);
  std::string weather_text = wnv::read_file(args.weather);
  manifest.add_input(args.series, series_text);
  manifest.add_input(args.weather, weather_text);
  auto series = wnv::read_series_csv(series_text);
  auto weather = wnv::read_weather_csv(weather_text);
  auto joined = wnv::join_weather(series, weather);
  manifest.add_output(args.out, wnv::write_joined_csv(joined));
  manifest.write(args.out);
  std::cout << "joined " << joined.size() << " case-weeks\n";
  return kExitOk;
}

// --- qa-sample ---------------------------------------------------------------

struct QaArgs {
  std::string data_dir;
  std::size_t n = 100;
  std::uint64_t seed = 1;
  std::string out;
};

int run_qa_sample(const QaArgs& args) {
  Manifest manifest("qa-sample", Json{{"data_dir", args.data_dir},
                                      {"n", args.n},
                                      {"seed", args.seed}});
  wnv::Dataset ds = wnv::load_dataset(args.data_dir);
  std::vector<wnv::SurveillanceRecord> records;
  for (const auto& file : ds.files) {
    if (file.kind == wnv::TableFamilyKind::latest_rollup) continue;  // dupes
    records.insert(records.end(), file.result.records.begin(),
                   file.result.records.end());
  }
  auto sample = wnv::qa_sample(records, args.n, args.seed);

  std::ostringstream out;
  wnv::csv::write_row(
      out, std::vector<std::string>{
               "url_bollettino", "data", "anno", "ospite", "codice_regione",
               "denominazione_regione", "codice_provincia",
               "denominazione_provincia", "eta", "tipo_infezione", "specie",
               "nuovi_casi", "casi_totali"});
  for (const auto& r : sample) {
    wnv::csv::write_row(
        out,
        std::vector<std::string>{
            r.bulletin_url, r.week_date.to_string(), std::to_string(r.year),
            std::string(wnv::host_name(r.host)),
            r.geo ? r.geo->region_code : "",
            r.geo ? r.geo->region_name : "",
            r.geo && r.geo->province_code ? *r.geo->province_code : "",
            r.geo && r.geo->province_name ? *r.geo->province_name : "",
            r.age ? std::string(wnv::age_token(*r.age)) : "",
            r.infection_type
                ? std::string(wnv::infection_token(*r.infection_type))
                : "",
            r.species.value_or(""),
            r.new_cases ? std::to_string(*r.new_cases) : "NA",
            std::to_string(r.total_cases)});
  }
  manifest.add_output(args.out, out.str());
  manifest.write(args.out);
  std::cout << "sampled " << sample.size() << " of " << records.size()
            << " records\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"WNVDB surveillance analytics toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", WNV_VERSION);

  ValidateArgs validate_args;
  auto* validate = app.add_subcommand(
      "validate", "Validate a WNVDB directory tree against the schema");
  validate->add_option("--data-dir", validate_args.data_dir)
      ->envname("WNV_DATA_DIR")
      ->required();
  validate->add_option("--out", validate_args.out,
                       "JSONL issue report path");

  PreprocessArgs pre_args;
  auto* preprocess = app.add_subcommand(
      "preprocess", "Slice the database into weekly incidence series");
  preprocess->add_option("--data-dir", pre_args.data_dir)
      ->envname("WNV_DATA_DIR")
      ->required();
  preprocess->add_option("--host", pre_args.host)->required();
  preprocess->add_option("--year", pre_args.year)->required();
  preprocess->add_option("--region", pre_args.region);
  preprocess->add_option("--province", pre_args.province);
  preprocess->add_option("--out", pre_args.out)->required();

  StatsArgs stats_args;
  auto* stats = app.add_subcommand("stats", "Descriptive statistics reports");
  stats->add_option("--data-dir", stats_args.data_dir)
      ->envname("WNV_DATA_DIR")
      ->required();
  stats->add_option("--host", stats_args.host);
  stats->add_option("--by", stats_args.by,
                    "anno|regione|provincia|eta|tipo");
  stats->add_option("--year", stats_args.year);
  stats->add_option("--out", stats_args.out)->required();
  stats->add_option("--csv-out", stats_args.csv_out);

  FitArgs fit_args;
  auto* fit_cmd =
      app.add_subcommand("fit", "Fit the growth-curve count GLM to a series");
  fit_cmd->add_option("--series", fit_args.series)->required();
  fit_cmd->add_option("--family", fit_args.family, "poisson|negbin");
  fit_cmd->add_option("--variant", fit_args.variant, "baseline|drift");
  fit_cmd->add_option("--seed", fit_args.seed);
  fit_cmd->add_option("--starts", fit_args.starts);
  fit_cmd->add_option("--level", fit_args.level);
  fit_cmd->add_option("--tolerance", fit_args.tolerance);
  fit_cmd->add_option("--max-iterations", fit_args.max_iterations);
  fit_cmd->add_option("--out", fit_args.out)->required();
  fit_cmd->add_option("--curve-out", fit_args.curve_out);

  ForecastArgs fc_args;
  auto* forecast_cmd = app.add_subcommand(
      "forecast", "Short-term forecasts with uncertainty from a fit");
  forecast_cmd->add_option("--fit", fc_args.fit)->required();
  forecast_cmd->add_option("--series", fc_args.series)->required();
  forecast_cmd->add_option("--horizon", fc_args.horizon);
  forecast_cmd->add_option("--level", fc_args.level);
  forecast_cmd->add_option("--seed", fc_args.seed);
  forecast_cmd->add_option("--sims", fc_args.sims);
  forecast_cmd->add_option("--holdout", fc_args.holdout,
                           "refit without the last K weeks, check coverage");
  forecast_cmd->add_option("--out", fc_args.out)->required();
  forecast_cmd->add_option("--csv-out", fc_args.csv_out);

  JoinArgs join_args;
  auto* join = app.add_subcommand(
      "join-weather", "Left-join weather covariates onto case weeks");
  join->add_option("--series", join_args.series)->required();
  join->add_option("--weather", join_args.weather)->required();
  join->add_option("--out", join_args.out)->required();

  QaArgs qa_args;
  auto* qa = app.add_subcommand(
      "qa-sample", "Deterministic record sample for manual bulletin checks");
  qa->add_option("--data-dir", qa_args.data_dir)
      ->envname("WNV_DATA_DIR")
      ->required();
  qa->add_option("--n", qa_args.n);
  qa->add_option("--seed", qa_args.seed);
  qa->add_option("--out", qa_args.out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (app.got_subcommand(validate)) return run_validate(validate_args);
    if (app.got_subcommand(preprocess)) return run_preprocess(pre_args);
    if (app.got_subcommand(stats)) return run_stats(stats_args);
    if (app.got_subcommand(fit_cmd)) return run_fit(fit_args);
    if (app.got_subcommand(forecast_cmd)) return run_forecast(fc_args);
    if (app.got_subcommand(join)) return run_join_weather(join_args);
    if (app.got_subcommand(qa)) return run_qa_sample(qa_args);
  } catch (const wnv::NotConvergedError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNotConverged;
  } catch (const wnv::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
