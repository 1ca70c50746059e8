// Library-level checks against the bundled database snapshot: descriptive
// statistics from the literature, family detection over every bundled file,
// and serialization round trips on real data.

#include <catch2/catch_amalgamated.hpp>

#include <filesystem>

#include "wnv/dataset.hpp"
#include "wnv/stats.hpp"

namespace fs = std::filesystem;
using namespace wnv;

namespace {

const Dataset& snapshot() {
  static Dataset ds = load_dataset(std::string(WNV_TEST_DATA_DIR) + "/wnvdb");
  return ds;
}

double share_of(const StatReport& report, const std::string& key) {
  for (const auto& row : report.rows)
    if (row.key == key) return row.share;
  return 0.0;
}

std::int64_t count_of(const StatReport& report, const std::string& key) {
  for (const auto& row : report.rows)
    if (row.key == key) return row.count;
  return 0;
}

}  // namespace

TEST_CASE("every bundled file matches exactly one family, no skips") {
  const Dataset& ds = snapshot();
  CHECK(ds.skipped.empty());
  CHECK(!ds.files.empty());
  for (const auto& file : ds.files)
    CHECK_NOTHROW(detect_family(file.path.filename().string()));
}

TEST_CASE("snapshot parses without error-severity issues") {
  for (const auto& file : snapshot().files) {
    INFO(file.path.string());
    CHECK(!file.result.has_errors());
  }
}

TEST_CASE("snapshot records round-trip through serialization") {
  for (const auto& file : snapshot().files) {
    INFO(file.path.string());
    const TableFamily* fam = nullptr;
    for (const auto& f : default_families())
      if (f.kind == file.kind) fam = &f;
    REQUIRE(fam != nullptr);
    std::string text = write_table(file.result.records, *fam, file.year);
    auto back = parse_table(text, DetectedFamily{fam, file.year});
    CHECK(back.records == file.result.records);
  }
}

TEST_CASE("excluding the two epidemic years leaves a mean of 44 cases") {
  auto records = snapshot().records(TableFamilyKind::human_region);
  std::erase_if(records, [](const SurveillanceRecord& r) {
    return r.year == 2018 || r.year == 2022;
  });
  StatReport report = yearly_totals(records, Host::humans);
  REQUIRE(report.mean.has_value());
  CHECK(*report.mean == Catch::Approx(44.0));
  CHECK(report.rows.size() == 9);
}

TEST_CASE("pooled age composition matches the published shares") {
  auto records = snapshot().records(TableFamilyKind::human_province);
  StatReport report = age_composition(records);
  CHECK(share_of(report, "45-64") == Catch::Approx(0.22).margin(0.05));
  CHECK(share_of(report, "65-74") == Catch::Approx(0.27).margin(0.05));
  CHECK(share_of(report, ">=75") == Catch::Approx(0.46).margin(0.05));
}

TEST_CASE("mosquito infections concentrate in the Po valley regions") {
  auto records = snapshot().records(TableFamilyKind::entomological);
  StatReport pooled = host_region_composition(records, Host::mosquitoes);
  CHECK(share_of(pooled, "Emilia-Romagna") == Catch::Approx(0.50).margin(0.07));
  CHECK(share_of(pooled, "Veneto") == Catch::Approx(0.25).margin(0.07));
  CHECK(share_of(pooled, "Lombardia") == Catch::Approx(0.08).margin(0.07));

  // Sardegna appears with exactly 4 positive pools in 2018 and 1 in 2022
  CHECK(count_of(host_region_composition(records, Host::mosquitoes, {2018}),
                 "Sardegna") == 4);
  CHECK(count_of(host_region_composition(records, Host::mosquitoes, {2022}),
                 "Sardegna") == 1);
}

TEST_CASE("region-level human report equals province report summed by region") {
  const Dataset& ds = snapshot();
  StatReport regional = regional_breakdown(
      ds.records(TableFamilyKind::human_region), Host::humans,
      GeoLevel::region);
  auto province_records = ds.records(TableFamilyKind::human_province);
  std::map<std::string, std::int64_t> by_region;
  for (const auto& rec : province_records) {
    if (!rec.new_cases) continue;
    by_region[rec.geo->region_name] += *rec.new_cases;
  }
  for (const auto& row : regional.rows) {
    INFO(row.key);
    CHECK(by_region[row.key] == row.count);
  }
}

TEST_CASE("published weekly counts agree with recomputed differences") {
  // the masking showcase (one transient over-report) is itself consistent
  for (const auto& file : snapshot().files) {
    INFO(file.path.string());
    CHECK(audit_increments(file.result.records).empty());
  }
}

TEST_CASE("geographic audit of the snapshot finds only warnings") {
  for (const auto& file : snapshot().files) {
    INFO(file.path.string());
    for (const auto& issue : validate_geo(file.result.records))
      CHECK(issue.severity == Severity::warning);
  }
}

TEST_CASE("national trend equals the sum over regional human files") {
  const Dataset& ds = snapshot();
  // season-final cumulative = value on the latest reported week
  auto latest = [](std::map<std::string, std::pair<WeekDate, std::int64_t>>& m,
                   const std::string& key, const SurveillanceRecord& rec) {
    auto it = m.find(key);
    if (it == m.end() || it->second.first < rec.week_date)
      m[key] = {rec.week_date, rec.total_cases};
  };
  std::map<std::string, std::pair<WeekDate, std::int64_t>> national_slices;
  for (const auto& rec : ds.records(TableFamilyKind::national_trend)) {
    if (rec.host != Host::humans) continue;
    latest(national_slices, std::to_string(rec.year), rec);
  }
  std::map<std::string, std::pair<WeekDate, std::int64_t>> regional_slices;
  for (const auto& rec : ds.records(TableFamilyKind::human_region)) {
    std::string key =
        std::to_string(rec.year) + "/" + rec.geo->region_code + "/" +
        (rec.infection_type ? std::string(infection_token(*rec.infection_type))
                            : "");
    latest(regional_slices, key, rec);
  }
  std::map<std::string, std::int64_t> regional_final;
  for (const auto& [key, value] : regional_slices)
    regional_final[key.substr(0, 4)] += value.second;
  for (const auto& [year, value] : national_slices) {
    INFO(year);
    CHECK(value.second == regional_final[year]);
  }
}
