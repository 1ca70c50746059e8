#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "wnv/csv.hpp"
#include "wnv/errors.hpp"
#include "wnv/records.hpp"
#include "wnv/rng.hpp"

namespace wnv {

enum class GeoLevel { national, region, province };

inline constexpr std::string_view to_string(GeoLevel l) {
  switch (l) {
    case GeoLevel::national: return "nazionale";
    case GeoLevel::region: return "regione";
    case GeoLevel::province: return "provincia";
  }
  return "?";
}

inline std::optional<GeoLevel> parse_geo_level(std::string_view s) {
  if (s == "nazionale" || s == "national") return GeoLevel::national;
  if (s == "regione" || s == "region") return GeoLevel::region;
  if (s == "provincia" || s == "province") return GeoLevel::province;
  return std::nullopt;
}

// Identity of one weekly time series: season, host, geographic unit and an
// optional stratum (infection type, age class or species) when the series
// keeps strata apart.
struct SliceKey {
  int year = 0;
  Host host = Host::humans;
  GeoLevel level = GeoLevel::national;
  std::string geo_code;  // empty at national level
  std::string geo_name;
  std::string stratum;  // empty when strata are collapsed

  bool same_slice_apart_from_geo(const SliceKey& o) const {
    return year == o.year && host == o.host && stratum == o.stratum;
  }
  bool operator==(const SliceKey&) const = default;
  auto operator<=>(const SliceKey&) const = default;
};

// Ordered weekly series of cumulative and incident counts for one slice.
// Incidence is NA wherever the cumulative series decreased (reporting
// anomaly), never negative.
struct WeeklySeries {
  SliceKey key;
  std::vector<WeekDate> dates;
  std::vector<std::int64_t> cumulative;
  std::vector<Count> incidence;

  std::size_t size() const { return dates.size(); }

  // Indices whose gap to the previous week is more than 7 days.
  std::vector<std::size_t> gap_positions() const {
    std::vector<std::size_t> gaps;
    for (std::size_t i = 1; i < dates.size(); ++i)
      if (days_between(dates[i - 1], dates[i]) > 7) gaps.push_back(i);
    return gaps;
  }
};

// First differences of a cumulative series, with the negative-masking rule:
// a decrease means the cumulative count was revised, so that week's new
// count is unknowable and becomes NA. The first week keeps its cumulative
// value (cumulative before the series starts is zero).
inline std::vector<Count> difference_cumulative(
    const std::vector<std::int64_t>& cumulative) {
  std::vector<Count> out;
  out.reserve(cumulative.size());
  std::int64_t prev = 0;
  for (std::int64_t c : cumulative) {
    if (c >= prev)
      out.push_back(c - prev);
    else
      out.push_back(std::nullopt);
    prev = c;
  }
  return out;
}

// Inverse of difference_cumulative given an anchor cumulative series that
// supplies the value at masked positions. Throws when the anchor contradicts
// an observed increment.
inline std::vector<std::int64_t> rebuild_cumulative(
    const std::vector<Count>& incidence,
    const std::vector<std::int64_t>& anchor) {
  if (incidence.size() != anchor.size())
    throw InconsistentAnchorError("incidence and anchor lengths differ");
  std::vector<std::int64_t> out;
  out.reserve(incidence.size());
  std::int64_t prev = 0;
  for (std::size_t t = 0; t < incidence.size(); ++t) {
    std::int64_t c;
    if (incidence[t].has_value()) {
      c = prev + *incidence[t];
      if (c != anchor[t])
        throw InconsistentAnchorError(
            "anchor contradicts increments at week " + std::to_string(t));
    } else {
      c = anchor[t];
    }
    out.push_back(c);
    prev = c;
  }
  return out;
}

namespace detail {

// Sums member cumulatives over the union of their date grids. A member that
// has not reported yet counts as zero; inside a reporting pause its last
// cumulative is carried forward.
inline std::pair<std::vector<WeekDate>, std::vector<std::int64_t>>
sum_cumulative(const std::vector<const WeeklySeries*>& members) {
  std::vector<WeekDate> grid;
  for (const auto* s : members)
    grid.insert(grid.end(), s->dates.begin(), s->dates.end());
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  std::vector<std::int64_t> total(grid.size(), 0);
  for (const auto* s : members) {
    std::size_t j = 0;
    std::int64_t carry = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      while (j < s->dates.size() && s->dates[j] <= grid[i]) {
        carry = s->cumulative[j];
        ++j;
      }
      total[i] += carry;
    }
  }
  return {std::move(grid), std::move(total)};
}

}  // namespace detail

// Aggregates province-level series into a region (or any set of series into
// the national level). Incidence is re-derived from the summed cumulative so
// that one member's masked week does not poison the aggregate.
inline WeeklySeries aggregate(const std::vector<WeeklySeries>& members,
                              GeoLevel target) {
  if (members.empty()) throw MixedSlicesError("nothing to aggregate");
  for (const auto& s : members) {
    if (!s.key.same_slice_apart_from_geo(members.front().key))
      throw MixedSlicesError(
          "cannot aggregate series with different year/host/stratum");
  }
  std::vector<const WeeklySeries*> ptrs;
  for (const auto& s : members) ptrs.push_back(&s);
  auto [grid, total] = detail::sum_cumulative(ptrs);

  WeeklySeries out;
  out.key = members.front().key;
  out.key.level = target;
  if (target == GeoLevel::national) {
    out.key.geo_code.clear();
    out.key.geo_name = "Italia";
  } else {
    // regional target: all members must sit inside one region
    const geo::ProvinceInfo* first =
        geo::find_province(members.front().key.geo_code);
    std::string region_code =
        first ? std::string(first->region_code) : members.front().key.geo_code;
    for (const auto& s : members) {
      const geo::ProvinceInfo* p = geo::find_province(s.key.geo_code);
      std::string rc = p ? std::string(p->region_code) : s.key.geo_code;
      if (rc != region_code)
        throw MixedSlicesError("members span more than one region");
    }
    const geo::RegionInfo* region = geo::find_region(region_code);
    out.key.geo_code = region_code;
    out.key.geo_name = region ? std::string(region->name) : region_code;
  }
  out.dates = std::move(grid);
  out.cumulative = std::move(total);
  out.incidence = difference_cumulative(out.cumulative);
  return out;
}

// Uniform sample of n records without replacement; the (records, n, seed)
// triple fully determines the result. Used for the manual cross-check of
// digitized rows against the source bulletins.
inline std::vector<SurveillanceRecord> qa_sample(
    const std::vector<SurveillanceRecord>& records, std::size_t n,
    std::uint64_t seed) {
  if (n > records.size())
    throw SampleTooLargeError("sample size " + std::to_string(n) +
                              " exceeds record count " +
                              std::to_string(records.size()));
  std::vector<std::size_t> idx(records.size());
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t j = i + static_cast<std::size_t>(
                            rng.uniform_below(idx.size() - i));
    std::swap(idx[i], idx[j]);
  }
  std::vector<SurveillanceRecord> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(records[idx[i]]);
  return out;
}

enum class Stratify { none, by_infection_type, by_age, by_species };

struct SeriesOptions {
  GeoLevel level = GeoLevel::region;
  Stratify stratify = Stratify::none;
};

// Groups records into weekly series. Counts of records that share a slice
// and week (different strata, when collapsing) are summed on the cumulative
// scale; incidence is then re-derived with the masking rule.
inline std::vector<WeeklySeries> build_series(
    const std::vector<SurveillanceRecord>& records,
    const SeriesOptions& opts) {
  std::map<SliceKey, std::map<WeekDate, std::int64_t>> groups;
  for (const auto& rec : records) {
    SliceKey key;
    key.year = rec.year;
    key.host = rec.host;
    key.level = opts.level;
    if (opts.level == GeoLevel::national) {
      key.geo_name = "Italia";
    } else if (rec.geo) {
      if (opts.level == GeoLevel::region) {
        key.geo_code = rec.geo->region_code;
        key.geo_name = rec.geo->region_name;
      } else {
        if (!rec.geo->province_code) continue;  // not attributable
        key.geo_code = *rec.geo->province_code;
        key.geo_name = rec.geo->province_name.value_or("");
      }
    } else {
      continue;  // record has no geography at this level
    }
    switch (opts.stratify) {
      case Stratify::none:
        break;
      case Stratify::by_infection_type:
        key.stratum = rec.infection_type
                          ? std::string(infection_token(*rec.infection_type))
                          : "NA";
        break;
      case Stratify::by_age:
        key.stratum = rec.age ? std::string(age_token(*rec.age)) : "NA";
        break;
      case Stratify::by_species:
        key.stratum = rec.species.value_or("NA");
        break;
    }
    groups[key][rec.week_date] += rec.total_cases;
  }

  std::vector<WeeklySeries> out;
  out.reserve(groups.size());
  for (auto& [key, by_date] : groups) {
    WeeklySeries s;
    s.key = key;
    for (auto& [date, cum] : by_date) {
      s.dates.push_back(date);
      s.cumulative.push_back(cum);
    }
    s.incidence = difference_cumulative(s.cumulative);
    out.push_back(std::move(s));
  }
  return out;
}

// --- series CSV interchange -------------------------------------------------
//
// Pre-processed series move between commands as CSV with the slice key
// spelled out per row. NA is written literally.

inline const std::vector<std::string>& series_csv_columns() {
  static const std::vector<std::string> cols{
      "anno",       "ospite", "livello",    "codice_geo", "denominazione_geo",
      "strato",     "data",   "nuovi_casi", "casi_totali"};
  return cols;
}

inline std::string write_series_csv(const std::vector<WeeklySeries>& series) {
  std::ostringstream out;
  csv::write_row(out, series_csv_columns());
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      std::vector<std::string> row{
          std::to_string(s.key.year),
          std::string(host_name(s.key.host)),
          std::string(to_string(s.key.level)),
          s.key.geo_code,
          s.key.geo_name,
          s.key.stratum,
          s.dates[i].to_string(),
          s.incidence[i] ? std::to_string(*s.incidence[i]) : "NA",
          std::to_string(s.cumulative[i])};
      csv::write_row(out, row);
    }
  }
  return out.str();
}

inline std::vector<WeeklySeries> read_series_csv(std::string_view text) {
  csv::Table table = csv::read_table(text);
  const auto& cols = series_csv_columns();
  if (table.header != cols)
    throw HeaderMismatchError("not a pre-processed series file");
  std::map<SliceKey, WeeklySeries> slices;
  for (std::size_t ri = 0; ri < table.rows.size(); ++ri) {
    const auto& row = table.rows[ri];
    if (row.size() != cols.size())
      throw IoError("series row " + std::to_string(ri + 1) +
                    " has wrong field count");
    SliceKey key;
    key.year = std::stoi(row[0]);
    auto host = parse_host(row[1]);
    auto level = parse_geo_level(row[2]);
    if (!host || !level)
      throw IoError("series row " + std::to_string(ri + 1) +
                    " has unknown host or level");
    key.host = *host;
    key.level = *level;
    key.geo_code = row[3];
    key.geo_name = row[4];
    key.stratum = row[5];
    auto date = WeekDate::parse(row[6]);
    if (!date)
      throw IoError("series row " + std::to_string(ri + 1) + " has bad date");
    WeeklySeries& s = slices[key];
    s.key = key;
    s.dates.push_back(*date);
    if (row[7] == "NA")
      s.incidence.push_back(std::nullopt);
    else
      s.incidence.push_back(std::stoll(row[7]));
    s.cumulative.push_back(std::stoll(row[8]));
  }
  std::vector<WeeklySeries> out;
  for (auto& [key, s] : slices) {
    // rows may arrive unsorted; realign by date
    std::vector<std::size_t> order(s.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return s.dates[a] < s.dates[b];
    });
    WeeklySeries sorted;
    sorted.key = s.key;
    for (std::size_t i : order) {
      sorted.dates.push_back(s.dates[i]);
      sorted.cumulative.push_back(s.cumulative[i]);
      sorted.incidence.push_back(s.incidence[i]);
    }
    out.push_back(std::move(sorted));
  }
  return out;
}

}  // namespace wnv
