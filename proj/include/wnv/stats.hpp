#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "wnv/csv.hpp"
#include "wnv/errors.hpp"
#include "wnv/records.hpp"
#include "wnv/series.hpp"

namespace wnv {

// One descriptive-statistics breakdown. Shares of the listed rows sum to 1;
// weeks whose increment was masked to NA are not attributable to any group
// and are surfaced separately instead of silently vanishing.
struct StatReport {
  std::string grouping;
  struct Row {
    std::string key;
    std::int64_t count = 0;
    double share = 0.0;
  };
  std::vector<Row> rows;
  std::int64_t total = 0;
  std::int64_t unattributable_weeks = 0;  // masked (NA) increments seen
  std::optional<double> mean;             // per-row mean where meaningful

  void finalize() {
    total = 0;
    for (const auto& r : rows) total += r.count;
    for (auto& r : rows)
      r.share = total > 0 ? static_cast<double>(r.count) /
                                static_cast<double>(total)
                          : 0.0;
    mean = rows.empty() ? std::optional<double>{}
                        : static_cast<double>(total) /
                              static_cast<double>(rows.size());
  }
};

namespace detail {

inline std::int64_t case_weight(const SurveillanceRecord& rec,
                                std::int64_t* na_weeks) {
  if (!rec.new_cases.has_value()) {
    if (na_weeks) ++*na_weeks;
    return 0;
  }
  return *rec.new_cases;
}

}  // namespace detail

// Per-year totals of new cases for one host; the mean field is the yearly
// average over the years present in the records.
inline StatReport yearly_totals(
    const std::vector<SurveillanceRecord>& records, Host host) {
  StatReport report;
  report.grouping = "anno";
  std::map<int, std::int64_t> by_year;
  for (const auto& rec : records) {
    if (rec.host != host) continue;
    by_year[rec.year] += detail::case_weight(rec, &report.unattributable_weeks);
  }
  for (const auto& [year, count] : by_year)
    report.rows.push_back({std::to_string(year), count, 0.0});
  report.finalize();
  return report;
}

// Totals per geographic unit, sorted by descending count (ties by code).
inline StatReport regional_breakdown(
    const std::vector<SurveillanceRecord>& records, Host host,
    GeoLevel level) {
  StatReport report;
  report.grouping = std::string(to_string(level));
  std::map<std::string, std::int64_t> by_geo;
  for (const auto& rec : records) {
    if (rec.host != host || !rec.geo) continue;
    std::string key;
    if (level == GeoLevel::region) {
      key = rec.geo->region_name;
    } else {
      if (!rec.geo->province_name) continue;
      key = *rec.geo->province_name;
    }
    by_geo[key] += detail::case_weight(rec, &report.unattributable_weeks);
  }
  for (const auto& [key, count] : by_geo)
    report.rows.push_back({key, count, 0.0});
  std::stable_sort(report.rows.begin(), report.rows.end(),
                   [](const StatReport::Row& a, const StatReport::Row& b) {
                     return a.count > b.count;
                   });
  report.finalize();
  report.mean.reset();
  return report;
}

// Age-class composition of human cases, optionally for a single year. The
// explicit "missing" class is reported but excluded from share
// normalization.
inline StatReport age_composition(
    const std::vector<SurveillanceRecord>& records,
    std::optional<int> year = std::nullopt) {
  StatReport report;
  report.grouping = year ? "eta/" + std::to_string(*year) : "eta";
  std::map<AgeClass, std::int64_t> by_age;
  std::int64_t missing = 0;
  for (const auto& rec : records) {
    if (rec.host != Host::humans || !rec.age) continue;
    if (year && rec.year != *year) continue;
    std::int64_t w = detail::case_weight(rec, &report.unattributable_weeks);
    if (*rec.age == AgeClass::missing)
      missing += w;
    else
      by_age[*rec.age] += w;
  }
  for (const auto& [age, count] : by_age)
    report.rows.push_back({std::string(age_token(age)), count, 0.0});
  report.finalize();
  report.mean.reset();
  if (missing > 0) {
    StatReport::Row row{"missing", missing, 0.0};
    // reported alongside, but not part of the normalized shares
    report.rows.push_back(row);
  }
  return report;
}

// Infection-type composition of human cases for one year (or pooled).
inline StatReport type_composition(
    const std::vector<SurveillanceRecord>& records,
    std::optional<int> year = std::nullopt) {
  StatReport report;
  report.grouping =
      year ? "tipo_infezione/" + std::to_string(*year) : "tipo_infezione";
  std::map<InfectionType, std::int64_t> by_type;
  for (const auto& rec : records) {
    if (rec.host != Host::humans || !rec.infection_type) continue;
    if (year && rec.year != *year) continue;
    if (*rec.infection_type == InfectionType::missing) continue;
    by_type[*rec.infection_type] +=
        detail::case_weight(rec, &report.unattributable_weeks);
  }
  for (const auto& [type, count] : by_type)
    report.rows.push_back({std::string(infection_token(type)), count, 0.0});
  report.finalize();
  report.mean.reset();
  return report;
}

// Regional composition for an animal host over a set of years (pooled).
inline StatReport host_region_composition(
    const std::vector<SurveillanceRecord>& records, Host host,
    const std::vector<int>& years = {}) {
  StatReport report;
  std::ostringstream label;
  label << "regione/" << host_name(host);
  for (int y : years) label << "/" << y;
  report.grouping = label.str();
  std::set<int> year_set(years.begin(), years.end());
  std::map<std::string, std::int64_t> by_region;
  for (const auto& rec : records) {
    if (rec.host != host || !rec.geo) continue;
    if (!year_set.empty() && !year_set.count(rec.year)) continue;
    by_region[rec.geo->region_name] +=
        detail::case_weight(rec, &report.unattributable_weeks);
  }
  for (const auto& [region, count] : by_region)
    report.rows.push_back({region, count, 0.0});
  std::stable_sort(report.rows.begin(), report.rows.end(),
                   [](const StatReport::Row& a, const StatReport::Row& b) {
                     return a.count > b.count;
                   });
  report.finalize();
  report.mean.reset();
  return report;
}

// --- weather interoperability ----------------------------------------------

// Weekly (or daily, before aggregation) weather observations for one
// province, as exported from the file-based mirror of the weather source.
struct WeatherWeek {
  std::string province_code;
  WeekDate date;
  double t_max_mean = 0.0;   // Celsius
  double precip_mean = 0.0;  // millimeters
  double wind_mean = 0.0;    // km/h
};

inline const std::vector<std::string>& weather_csv_columns() {
  static const std::vector<std::string> cols{"codice_provincia", "data",
                                             "tmax_c", "precip_mm",
                                             "wind_kmh"};
  return cols;
}

inline std::vector<WeatherWeek> read_weather_csv(std::string_view text) {
  csv::Table table = csv::read_table(text);
  if (table.header != weather_csv_columns())
    throw HeaderMismatchError("not a weather file");
  std::vector<WeatherWeek> out;
  std::set<std::pair<std::string, std::string>> seen;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    if (row.size() != 5)
      throw IoError("weather row " + std::to_string(i + 1) +
                    " has wrong field count");
    WeatherWeek w;
    auto code = geo::normalize_code(row[0], 3);
    auto date = WeekDate::parse(row[1]);
    if (!code || !date)
      throw IoError("weather row " + std::to_string(i + 1) +
                    " has a bad key");
    if (!seen.insert({*code, row[1]}).second)
      throw DuplicateWeatherKeyError("duplicate weather key " + *code + "/" +
                                     row[1]);
    w.province_code = *code;
    w.date = *date;
    try {
      w.t_max_mean = std::stod(row[2]);
      w.precip_mean = std::stod(row[3]);
      w.wind_mean = std::stod(row[4]);
    } catch (const std::exception&) {
      throw IoError("weather row " + std::to_string(i + 1) +
                    " has a non-numeric value");
    }
    if (w.t_max_mean < -30.0 || w.t_max_mean > 55.0 || w.precip_mean < 0.0 ||
        w.wind_mean < 0.0)
      throw IoError("weather row " + std::to_string(i + 1) +
                    " outside physical range");
    out.push_back(w);
  }
  return out;
}

struct JoinedWeek {
  std::string province_code;
  WeekDate date;
  Count incidence;
  std::int64_t cumulative = 0;
  std::optional<double> t_max_mean;
  std::optional<double> precip_mean;
  std::optional<double> wind_mean;
};

// Left join of province-level case weeks with weather. Daily weather rows
// are first averaged into the case week that covers them (the 7 days ending
// on the week reference date). Loss-less on the case side.
inline std::vector<JoinedWeek> join_weather(
    const std::vector<WeeklySeries>& cases,
    const std::vector<WeatherWeek>& weather) {
  struct Acc {
    double t = 0, p = 0, w = 0;
    int n = 0;
  };
  std::map<std::pair<std::string, std::string>, Acc> agg;

  // index case weeks per province for day->week assignment
  std::map<std::string, std::vector<WeekDate>> weeks_by_province;
  for (const auto& s : cases) {
    auto& weeks = weeks_by_province[s.key.geo_code];
    weeks.insert(weeks.end(), s.dates.begin(), s.dates.end());
  }
  for (auto& [code, weeks] : weeks_by_province) {
    std::sort(weeks.begin(), weeks.end());
    weeks.erase(std::unique(weeks.begin(), weeks.end()), weeks.end());
  }

  for (const auto& w : weather) {
    auto it = weeks_by_province.find(w.province_code);
    if (it == weeks_by_province.end()) continue;
    const auto& weeks = it->second;
    auto pos = std::lower_bound(weeks.begin(), weeks.end(), w.date);
    if (pos == weeks.end()) continue;
    if (days_between(w.date, *pos) > 6) continue;  // not covered by any week
    Acc& acc = agg[{w.province_code, pos->to_string()}];
    acc.t += w.t_max_mean;
    acc.p += w.precip_mean;
    acc.w += w.wind_mean;
    acc.n += 1;
  }

  std::vector<JoinedWeek> out;
  for (const auto& s : cases) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      JoinedWeek j;
      j.province_code = s.key.geo_code;
      j.date = s.dates[i];
      j.incidence = s.incidence[i];
      j.cumulative = s.cumulative[i];
      auto it = agg.find({j.province_code, j.date.to_string()});
      if (it != agg.end() && it->second.n > 0) {
        j.t_max_mean = it->second.t / it->second.n;
        j.precip_mean = it->second.p / it->second.n;
        j.wind_mean = it->second.w / it->second.n;
      }
      out.push_back(j);
    }
  }
  return out;
}

inline std::string write_joined_csv(const std::vector<JoinedWeek>& rows) {
  std::ostringstream out;
  std::vector<std::string> header{"codice_provincia", "data",      "nuovi_casi",
                                  "casi_totali",      "tmax_c",    "precip_mm",
                                  "wind_kmh"};
  csv::write_row(out, header);
  auto fmt = [](const std::optional<double>& v) {
    if (!v) return std::string("NA");
    std::ostringstream s;
    s << *v;
    return s.str();
  };
  for (const auto& j : rows) {
    std::vector<std::string> row{
        j.province_code,
        j.date.to_string(),
        j.incidence ? std::to_string(*j.incidence) : "NA",
        std::to_string(j.cumulative),
        fmt(j.t_max_mean),
        fmt(j.precip_mean),
        fmt(j.wind_mean)};
    csv::write_row(out, row);
  }
  return out.str();
}

inline std::string write_report_csv(const StatReport& report) {
  std::ostringstream out;
  std::vector<std::string> header{"group_key", "count", "share"};
  csv::write_row(out, header);
  for (const auto& r : report.rows) {
    std::ostringstream share;
    share.precision(17);
    share << r.share;
    std::vector<std::string> row{r.key, std::to_string(r.count), share.str()};
    csv::write_row(out, row);
  }
  return out.str();
}

}  // namespace wnv
