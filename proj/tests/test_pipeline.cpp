#include <catch2/catch_amalgamated.hpp>

#include <optional>
#include <set>
#include <vector>

#include "support/properties.hpp"
#include "support/simulate.hpp"
#include "wnv/series.hpp"

using namespace wnv;

namespace {

WeeklySeries province_series(const char* code,
                             std::vector<std::int64_t> cumulative,
                             int year = 2020) {
  WeeklySeries s;
  s.key.year = year;
  s.key.host = Host::humans;
  s.key.level = GeoLevel::province;
  s.key.geo_code = code;
  WeekDate d(year, 6, 2);
  for (std::int64_t c : cumulative) {
    s.dates.push_back(d);
    d = d.plus_days(7);
    s.cumulative.push_back(c);
  }
  s.incidence = difference_cumulative(s.cumulative);
  return s;
}

}  // namespace

TEST_CASE("differencing applies the negative-masking rule") {
  auto out = difference_cumulative({2, 5, 5, 4, 9});
  REQUIRE(out.size() == 5);
  CHECK(out[0] == Count{2});
  CHECK(out[1] == Count{3});
  CHECK(out[2] == Count{0});
  CHECK(!out[3].has_value());
  CHECK(out[4] == Count{5});

  CHECK(difference_cumulative({0, 0, 0}) ==
        std::vector<Count>{Count{0}, Count{0}, Count{0}});
  CHECK(difference_cumulative({7}) == std::vector<Count>{Count{7}});
}

TEST_CASE("rebuilding inverts differencing through the anchor") {
  std::vector<std::int64_t> anchor{2, 5, 5, 4, 9};
  std::vector<Count> inc{2, 3, 0, std::nullopt, 5};
  CHECK(rebuild_cumulative(inc, anchor) == anchor);
  CHECK(rebuild_cumulative({Count{1}, Count{1}}, {1, 2}) ==
        std::vector<std::int64_t>{1, 2});
  CHECK_THROWS_AS(rebuild_cumulative({Count{1}, Count{5}}, {1, 2}),
                  InconsistentAnchorError);
  CHECK_THROWS_AS(rebuild_cumulative({Count{1}}, {1, 2}),
                  InconsistentAnchorError);
}

TEST_CASE("aggregation sums cumulatives and re-derives incidence") {
  auto a = province_series("028", {1, 2});
  auto b = province_series("027", {0, 3});
  WeeklySeries region = aggregate({a, b}, GeoLevel::region);
  CHECK(region.cumulative == std::vector<std::int64_t>{1, 5});
  CHECK(region.key.level == GeoLevel::region);
  CHECK(region.key.geo_code == "05");
  CHECK(region.key.geo_name == "Veneto");

  // single input is the identity apart from the level relabeling
  WeeklySeries solo = aggregate({a}, GeoLevel::region);
  CHECK(solo.cumulative == a.cumulative);
  CHECK(solo.incidence == a.incidence);
  CHECK(solo.dates == a.dates);

  // a decreasing member propagates masking through the sum
  auto down = province_series("028", {3, 2});
  auto flat = province_series("027", {0, 0});
  WeeklySeries mixed = aggregate({down, flat}, GeoLevel::region);
  CHECK(mixed.cumulative == std::vector<std::int64_t>{3, 2});
  REQUIRE(mixed.incidence.size() == 2);
  CHECK(mixed.incidence[0] == Count{3});
  CHECK(!mixed.incidence[1].has_value());
}

TEST_CASE("aggregation rejects mixed slices") {
  auto a = province_series("028", {1, 2}, 2020);
  auto b = province_series("027", {0, 3}, 2021);
  CHECK_THROWS_AS(aggregate({a, b}, GeoLevel::region), MixedSlicesError);

  auto c = province_series("027", {0, 3}, 2020);
  c.key.host = Host::equids;
  CHECK_THROWS_AS(aggregate({a, c}, GeoLevel::region), MixedSlicesError);

  auto other_region = province_series("015", {0, 3}, 2020);  // Milano
  CHECK_THROWS_AS(aggregate({a, other_region}, GeoLevel::region),
                  MixedSlicesError);
  CHECK_NOTHROW(aggregate({a, other_region}, GeoLevel::national));
}

TEST_CASE("aggregation carries cumulative forward over missing weeks") {
  auto a = province_series("028", {1, 2, 4});
  WeeklySeries b;
  b.key = a.key;
  b.key.geo_code = "027";
  b.dates = {a.dates[0], a.dates[2]};  // middle week not reported
  b.cumulative = {2, 6};
  b.incidence = difference_cumulative(b.cumulative);
  WeeklySeries region = aggregate({a, b}, GeoLevel::region);
  CHECK(region.dates == a.dates);
  CHECK(region.cumulative == std::vector<std::int64_t>{3, 4, 10});
}

TEST_CASE("gap positions are reported") {
  auto s = province_series("028", {1, 2, 3});
  CHECK(s.gap_positions().empty());
  s.dates[2] = s.dates[2].plus_days(14);
  CHECK(s.gap_positions() == std::vector<std::size_t>{2});
}

TEST_CASE("qa sampling is deterministic, distinct and bounded") {
  std::vector<SurveillanceRecord> records(50);
  for (std::size_t i = 0; i < records.size(); ++i) {
    records[i].bulletin_url = "bulletin-" + std::to_string(i);
    records[i].week_date = WeekDate(2020, 6, 2).plus_days(7 * (int)i);
    records[i].year = 2020;
  }
  auto sample = qa_sample(records, 10, 42);
  CHECK(sample.size() == 10);
  CHECK(sample == qa_sample(records, 10, 42));
  CHECK(sample != qa_sample(records, 10, 43));

  // sampling everything permutes the records
  auto everything = qa_sample(records, records.size(), 7);
  std::set<std::string> urls;
  for (const auto& r : everything) urls.insert(r.bulletin_url);
  CHECK(urls.size() == records.size());
  for (std::size_t i = 0; i < records.size(); ++i)
    CHECK(urls.count("bulletin-" + std::to_string(i)) == 1);

  CHECK(qa_sample(records, 0, 1).empty());
  CHECK_THROWS_AS(qa_sample(records, 51, 1), SampleTooLargeError);
}

TEST_CASE("series CSV round-trips") {
  auto a = province_series("028", {2, 5, 5, 4, 9});
  auto b = province_series("027", {0, 1, 3, 3, 3});
  std::string text = write_series_csv({a, b});
  auto back = read_series_csv(text);
  REQUIRE(back.size() == 2);
  // map ordering puts 027 first
  CHECK(back[0].key.geo_code == "027");
  CHECK(back[1].key.geo_code == "028");
  CHECK(back[1].cumulative == a.cumulative);
  CHECK(back[1].incidence == a.incidence);
  CHECK(back[1].dates == a.dates);
}

TEST_CASE("building series collapses or keeps strata") {
  std::vector<SurveillanceRecord> records;
  for (int week = 0; week < 3; ++week) {
    for (auto type : {InfectionType::neuroinvasive, InfectionType::fever}) {
      SurveillanceRecord r;
      r.year = 2020;
      r.host = Host::humans;
      r.week_date = WeekDate(2020, 8, 4).plus_days(7 * week);
      r.geo = geo::region_unit("05");
      r.infection_type = type;
      r.total_cases = (week + 1) * (type == InfectionType::fever ? 1 : 10);
      records.push_back(r);
    }
  }
  auto collapsed = build_series(records, {GeoLevel::region, Stratify::none});
  REQUIRE(collapsed.size() == 1);
  CHECK(collapsed[0].cumulative == std::vector<std::int64_t>{11, 22, 33});

  auto kept =
      build_series(records, {GeoLevel::region, Stratify::by_infection_type});
  REQUIRE(kept.size() == 2);
}

TEST_CASE("pipeline invariants hold on randomized instances") {
  CHECK(testsupport::check_diff_rebuild_roundtrip(101, 300) == 0);
  CHECK(testsupport::check_masking_exactness(102, 300) == 0);
  CHECK(testsupport::check_aggregation_commutes(103, 300) == 0);
  CHECK(testsupport::check_telescoping(104, 300) == 0);
  CHECK(testsupport::check_sampling_determinism(105, 300) == 0);
}
