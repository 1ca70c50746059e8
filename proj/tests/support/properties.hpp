#pragma once

// Randomized invariant suites shared by the unit tests and the acceptance
// runner. Each function runs `instances` independent cases and returns the
// number of violations (0 = pass).

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "wnv/richards.hpp"
#include "wnv/rng.hpp"
#include "wnv/series.hpp"
#include "wnv/stats.hpp"

namespace testsupport {

inline std::vector<std::int64_t> random_cumulative(wnv::Rng& rng,
                                                   bool allow_dips) {
  std::size_t n = 1 + rng.uniform_below(30);
  std::vector<std::int64_t> cum;
  std::int64_t level = static_cast<std::int64_t>(rng.uniform_below(5));
  for (std::size_t i = 0; i < n; ++i) {
    long step = static_cast<long>(rng.uniform_below(12));
    if (allow_dips && rng.uniform01() < 0.15)
      step = -static_cast<long>(rng.uniform_below(4));
    level = std::max<std::int64_t>(0, level + step);
    cum.push_back(level);
  }
  return cum;
}

// rebuild_cumulative(difference_cumulative(c), anchor=c) == c
inline int check_diff_rebuild_roundtrip(std::uint64_t seed, int instances) {
  wnv::Rng rng(seed);
  int failures = 0;
  for (int i = 0; i < instances; ++i) {
    auto cum = random_cumulative(rng, /*allow_dips=*/true);
    auto inc = wnv::difference_cumulative(cum);
    try {
      if (wnv::rebuild_cumulative(inc, cum) != cum) ++failures;
    } catch (const wnv::Error&) {
      ++failures;
    }
  }
  return failures;
}

// NA at position t iff cumulative[t] < cumulative[t-1]; sums preserved when
// nothing is masked
inline int check_masking_exactness(std::uint64_t seed, int instances) {
  wnv::Rng rng(seed);
  int failures = 0;
  for (int i = 0; i < instances; ++i) {
    auto cum = random_cumulative(rng, /*allow_dips=*/true);
    auto inc = wnv::difference_cumulative(cum);
    if (inc.size() != cum.size()) {
      ++failures;
      continue;
    }
    bool ok = true;
    std::int64_t prev = 0;
    bool any_na = false;
    std::int64_t total = 0;
    for (std::size_t t = 0; t < cum.size(); ++t) {
      bool should_mask = cum[t] < prev;
      if (should_mask != !inc[t].has_value()) ok = false;
      if (inc[t].has_value()) {
        if (*inc[t] < 0) ok = false;
        total += *inc[t];
      } else {
        any_na = true;
      }
      prev = cum[t];
    }
    if (!any_na && total != cum.back()) ok = false;
    if (!ok) ++failures;
  }
  return failures;
}

// summing member cumulatives then differencing == aggregate()'s incidence
inline int check_aggregation_commutes(std::uint64_t seed, int instances) {
  wnv::Rng rng(seed);
  int failures = 0;
  const char* codes[3] = {"023", "027", "028"};  // Verona, Venezia, Padova
  for (int i = 0; i < instances; ++i) {
    std::size_t members = 1 + rng.uniform_below(3);
    std::size_t weeks = 2 + rng.uniform_below(20);
    std::vector<wnv::WeeklySeries> series;
    std::vector<std::int64_t> summed(weeks, 0);
    for (std::size_t m = 0; m < members; ++m) {
      wnv::WeeklySeries s;
      s.key.year = 2020;
      s.key.host = wnv::Host::humans;
      s.key.level = wnv::GeoLevel::province;
      s.key.geo_code = codes[m];
      wnv::WeekDate d(2020, 6, 2);
      std::int64_t level = 0;
      for (std::size_t w = 0; w < weeks; ++w) {
        long step = static_cast<long>(rng.uniform_below(8));
        if (rng.uniform01() < 0.15) step = -static_cast<long>(rng.uniform_below(3));
        level = std::max<std::int64_t>(0, level + step);
        s.dates.push_back(d);
        d = d.plus_days(7);
        s.cumulative.push_back(level);
        summed[w] += level;
      }
      s.incidence = wnv::difference_cumulative(s.cumulative);
      series.push_back(std::move(s));
    }
    try {
      wnv::WeeklySeries agg = wnv::aggregate(series, wnv::GeoLevel::region);
      if (agg.cumulative != summed ||
          agg.incidence != wnv::difference_cumulative(summed))
        ++failures;
    } catch (const wnv::Error&) {
      ++failures;
    }
  }
  return failures;
}

// sum of weekly mean increments equals the cumulative mean span
inline int check_telescoping(std::uint64_t seed, int instances) {
  wnv::Rng rng(seed);
  int failures = 0;
  for (int i = 0; i < instances; ++i) {
    wnv::RichardsParams g;
    g.b = 5.0 * rng.uniform01();
    g.r = 1.0 + 300.0 * rng.uniform01();
    g.h = (rng.uniform01() < 0.5 ? -1 : 1) * (0.05 + 1.5 * rng.uniform01());
    g.p = -5.0 + 30.0 * rng.uniform01();
    g.s = 0.05 + 3.0 * rng.uniform01();
    g.variant = rng.uniform01() < 0.5 ? wnv::CurveVariant::constant_baseline
                                      : wnv::CurveVariant::linear_drift;
    int T = 5 + static_cast<int>(rng.uniform_below(30));
    double sum = 0.0;
    for (int t = 1; t <= T; ++t) sum += wnv::incidence_mean(t, g);
    double span = wnv::richards_mean(T, g) - wnv::richards_mean(0, g);
    double scale = std::max(1.0, std::abs(span));
    if (std::abs(sum - span) > 1e-9 * scale) ++failures;
  }
  return failures;
}

// StatReport shares sum to one whenever the total is positive
inline int check_share_normalization(std::uint64_t seed, int instances) {
  wnv::Rng rng(seed);
  int failures = 0;
  for (int i = 0; i < instances; ++i) {
    wnv::StatReport report;
    report.grouping = "synthetic";
    std::size_t groups = 1 + rng.uniform_below(12);
    for (std::size_t gidx = 0; gidx < groups; ++gidx)
      report.rows.push_back({"g" + std::to_string(gidx),
                             static_cast<std::int64_t>(rng.uniform_below(500)),
                             0.0});
    report.finalize();
    if (report.total == 0) continue;
    double sum = 0.0;
    for (const auto& row : report.rows) sum += row.share;
    if (std::abs(sum - 1.0) > 1e-9) ++failures;
  }
  return failures;
}

// identical (records, n, seed) give identical samples; distinctness holds
inline int check_sampling_determinism(std::uint64_t seed, int instances) {
  wnv::Rng rng(seed);
  int failures = 0;
  for (int i = 0; i < instances; ++i) {
    std::size_t count = 1 + rng.uniform_below(60);
    std::vector<wnv::SurveillanceRecord> records(count);
    for (std::size_t k = 0; k < count; ++k) {
      records[k].bulletin_url = "b" + std::to_string(k);
      records[k].week_date = wnv::WeekDate(2020, 6, 2).plus_days(7 * (int)k);
      records[k].year = 2020;
      records[k].total_cases = static_cast<std::int64_t>(k);
    }
    std::size_t n = rng.uniform_below(count + 1);
    std::uint64_t s = rng.next_u64();
    auto a = wnv::qa_sample(records, n, s);
    auto b = wnv::qa_sample(records, n, s);
    if (a != b) {
      ++failures;
      continue;
    }
    std::vector<std::string> urls;
    for (const auto& r : a) urls.push_back(r.bulletin_url);
    std::sort(urls.begin(), urls.end());
    if (std::adjacent_find(urls.begin(), urls.end()) != urls.end())
      ++failures;  // replacement happened
  }
  return failures;
}

}  // namespace testsupport
