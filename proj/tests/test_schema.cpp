#include <catch2/catch_amalgamated.hpp>

#include <string>
#include <vector>

#include "wnv/rng.hpp"
#include "wnv/schema.hpp"

using namespace wnv;

TEST_CASE("file names map to unique table families") {
  auto equid = detect_family("wn-ita-sorveglianza-equidi-2019.csv");
  CHECK(equid.family->kind == TableFamilyKind::equid);
  CHECK(equid.year == 2019);

  auto latest = detect_family("latest-wnv.csv");
  CHECK(latest.family->kind == TableFamilyKind::latest_rollup);
  CHECK(!latest.year.has_value());

  // both stems from the documentation are accepted
  CHECK(detect_family("wn-ita-andamento-nazionale-2018.csv").family->kind ==
        TableFamilyKind::national_trend);
  CHECK(detect_family("wn-ita-sorveglianza-nazionale-2018.csv").family->kind ==
        TableFamilyKind::national_trend);
  CHECK(detect_family("wn-ita-regioni-sorveglianza-uccelli-bersaglio-2020.csv")
            .family->kind == TableFamilyKind::target_birds);
  CHECK(detect_family("wn-ita-sorveglianza-uccelli-bersaglio-2020.csv")
            .family->kind == TableFamilyKind::target_birds);

  CHECK_THROWS_AS(detect_family("readme.txt"), UnknownFileError);
  CHECK_THROWS_AS(detect_family("2018/wn-ita-sorveglianza-equidi-2019.csv"),
                  UnknownFileError);
}

TEST_CASE("overlapping patterns are reported as ambiguous") {
  std::vector<TableFamily> families = default_families();
  TableFamily clash = families.front();
  clash.kind = TableFamilyKind::latest_rollup;
  clash.patterns = {R"(^wn-ita-.*\.csv$)"};
  families.push_back(clash);
  CHECK_THROWS_AS(
      detect_family("wn-ita-andamento-nazionale-2018.csv", families),
      AmbiguousFileError);
}

namespace {

const TableFamily& family_of(TableFamilyKind kind) {
  for (const auto& f : default_families())
    if (f.kind == kind) return f;
  throw std::logic_error("family not registered");
}

constexpr const char* kNationalHeader =
    "url_bollettino,data,host,nuovi_casi,casi_totali\n";

}  // namespace

TEST_CASE("national trend rows parse with host decoding") {
  std::string text = std::string(kNationalHeader) +
                     "https://x/b.pdf,2018-08-14,0,12,255\n"
                     "https://x/b.pdf,2018-08-14,4,NA,33\n";
  DetectedFamily fam{&family_of(TableFamilyKind::national_trend), 2018};
  auto result = parse_table(text, fam);
  REQUIRE(result.records.size() == 2);
  CHECK(result.issues.empty());
  const auto& r = result.records[0];
  CHECK(r.host == Host::humans);
  CHECK(r.week_date.to_string() == "2018-08-14");
  CHECK(r.new_cases == Count{12});
  CHECK(r.total_cases == 255);
  CHECK(r.year == 2018);
  CHECK(!result.records[1].new_cases.has_value());
  CHECK(result.records[1].host == Host::mosquitoes);
}

TEST_CASE("malformed rows become issues without aborting the parse") {
  std::string text = std::string(kNationalHeader) +
                     "u,14/08/2018,0,1,10\n"    // wrong date format
                     "u,2018-08-14,0,1,-3\n"    // negative cumulative
                     "u,2018-08-14,9,1,10\n"    // unknown host
                     "u,2018-08-14,0,x,10\n"    // junk count
                     "u,2018-08-14,0,1\n"       // short row
                     "u,2018-08-21,0,-2,10\n"   // negative weekly -> NA + warn
                     "u,2018-08-28,0,3,13\n";   // fine
  DetectedFamily fam{&family_of(TableFamilyKind::national_trend), 2018};
  auto result = parse_table(text, fam);
  REQUIRE(result.records.size() == 2);
  CHECK(!result.records[0].new_cases.has_value());
  CHECK(result.records[1].new_cases == Count{3});

  REQUIRE(result.issues.size() == 6);
  CHECK(result.issues[0].column == "data");
  CHECK(result.issues[0].row == 1);
  CHECK(result.issues[1].column == "casi_totali");
  CHECK(result.issues[2].column == "host");
  CHECK(result.issues[3].column == "nuovi_casi");
  CHECK(result.issues[4].message.find("fields") != std::string::npos);
  CHECK(result.issues[5].severity == Severity::warning);
}

TEST_CASE("header problems are structural errors") {
  DetectedFamily fam{&family_of(TableFamilyKind::national_trend), 2018};
  CHECK_THROWS_AS(parse_table("url_bollettino,data,host,nuovi_casi\nu,x,0,1\n",
                              fam),
                  HeaderMismatchError);
  CHECK_THROWS_AS(parse_table(std::string(kNationalHeader), fam),
                  EmptyFileError);
  CHECK_THROWS_AS(parse_table("", fam), HeaderMismatchError);

  // reordered header parses with a warning
  auto result = parse_table(
      "data,url_bollettino,host,nuovi_casi,casi_totali\n"
      "2018-08-14,u,0,1,10\n",
      fam);
  REQUIRE(result.records.size() == 1);
  REQUIRE(!result.issues.empty());
  CHECK(result.issues[0].severity == Severity::warning);
  CHECK(result.issues[0].message.find("reordered") != std::string::npos);
  CHECK(result.records[0].new_cases == Count{1});

  // extra columns warn and are ignored
  auto extra = parse_table(
      "url_bollettino,data,host,nuovi_casi,casi_totali,note\nu,2018-08-14,0,1,10,hi\n",
      fam);
  CHECK(extra.records.size() == 1);
  REQUIRE(extra.issues.size() == 1);
  CHECK(extra.issues[0].column == "note");
  CHECK(extra.issues[0].severity == Severity::warning);
}

TEST_CASE("infection types respect the per-year availability rules") {
  DetectedFamily fam{&family_of(TableFamilyKind::human_region), 2015};
  std::string header =
      "url_bollettino,data,codice_regione,denominazione_regione,lat,long,"
      "nuovi_casi,casi_totali,tipo_infezione\n";
  auto strict = parse_table(
      header + "u,2015-08-14,05,Veneto,45.65,11.85,1,1,fever\n", fam);
  CHECK(strict.records.empty());
  REQUIRE(strict.issues.size() == 1);
  CHECK(strict.issues[0].column == "tipo_infezione");

  DetectedFamily fam19{&family_of(TableFamilyKind::human_region), 2019};
  auto sympto = parse_table(
      header + "u,2019-08-14,05,Veneto,45.65,11.85,1,1,symptomatic\n", fam19);
  CHECK(sympto.records.empty());
  REQUIRE(sympto.issues.size() == 1);

  DetectedFamily fam22{&family_of(TableFamilyKind::human_region), 2022};
  auto ok = parse_table(
      header + "u,2022-08-14,05,Veneto,45.65,11.85,1,1,symptomatic\n", fam22);
  CHECK(ok.records.size() == 1);
  CHECK(ok.records[0].infection_type == InfectionType::symptomatic);
}

TEST_CASE("2012 files may omit the infection type column") {
  DetectedFamily fam{&family_of(TableFamilyKind::human_region), 2012};
  std::string text =
      "url_bollettino,data,codice_regione,denominazione_regione,lat,long,"
      "nuovi_casi,casi_totali\n"
      "u,2012-10-02,05,Veneto,45.65,11.85,2,2\n";
  auto result = parse_table(text, fam);
  REQUIRE(result.records.size() == 1);
  CHECK(!result.records[0].infection_type.has_value());
  CHECK(result.issues.empty());
}

TEST_CASE("region codes are normalized to two digits") {
  DetectedFamily fam{&family_of(TableFamilyKind::human_region), 2018};
  std::string header =
      "url_bollettino,data,codice_regione,denominazione_regione,lat,long,"
      "nuovi_casi,casi_totali,tipo_infezione\n";
  auto result = parse_table(
      header + "u,2018-08-14,5,Veneto,45.65,11.85,1,1,fever\n", fam);
  REQUIRE(result.records.size() == 1);
  CHECK(result.records[0].geo->region_code == "05");
}

namespace {

std::vector<SurveillanceRecord> sample_province_records() {
  std::vector<SurveillanceRecord> records;
  for (int week = 0; week < 4; ++week) {
    SurveillanceRecord r;
    r.bulletin_url = "https://x/WNV_News_2018_" + std::to_string(week) + ".pdf";
    r.week_date = WeekDate(2018, 8, 7).plus_days(7 * week);
    r.year = 2018;
    r.host = Host::humans;
    r.geo = geo::province_unit("028");
    r.infection_type = InfectionType::fever;
    r.age = week % 2 ? AgeClass::ge75 : AgeClass::a45_64;
    r.new_cases = week == 2 ? Count{} : Count{week};
    r.total_cases = 3 * week;
    records.push_back(r);
  }
  return records;
}

}  // namespace

TEST_CASE("serialization round-trips the records field by field") {
  const TableFamily& fam = family_of(TableFamilyKind::human_province);
  auto records = sample_province_records();
  std::string text = write_table(records, fam, 2018);
  auto back = parse_table(text, DetectedFamily{&fam, 2018});
  CHECK(back.issues.empty());
  CHECK(back.records == records);
}

TEST_CASE("parser is total on arbitrary byte streams") {
  Rng rng(4242);
  const TableFamily& fam = family_of(TableFamilyKind::human_province);
  int declared_errors = 0;
  for (int i = 0; i < 500; ++i) {
    std::string junk;
    std::size_t len = rng.uniform_below(400);
    for (std::size_t k = 0; k < len; ++k)
      junk.push_back(static_cast<char>(rng.uniform_below(256)));
    if (rng.uniform01() < 0.3)
      junk = "url_bollettino,data,codice_regione,denominazione_regione,"
             "codice_provincia,denominazione_provincia,sigla_provincia,lat,"
             "long,eta,nuovi_casi,casi_totali,tipo_infezione\n" +
             junk;
    try {
      parse_table(junk, DetectedFamily{&fam, 2018});
    } catch (const HeaderMismatchError&) {
      ++declared_errors;
    } catch (const EmptyFileError&) {
      ++declared_errors;
    }
  }
  CHECK(declared_errors > 0);  // junk headers must be rejected, not crash
}

TEST_CASE("geographic audit accepts registry-consistent records") {
  auto records = sample_province_records();
  CHECK(validate_geo(records).empty());
}

TEST_CASE("geographic audit flags exactly the mutated records") {
  auto records = sample_province_records();

  SECTION("unknown province code") {
    records[1].geo->province_code = "999";
    auto issues = validate_geo(records);
    REQUIRE(issues.size() == 1);
    CHECK(issues[0].record_index == 1);
    CHECK(issues[0].severity == Severity::error);
  }
  SECTION("province assigned to the wrong region") {
    records[2].geo->province_code = "015";  // Milano inside Veneto record
    records[2].geo->province_name = "Milano";
    records[2].geo->province_abbrev = "MI";
    auto issues = validate_geo(records);
    // the stale Padova coordinates also trip the centroid check
    REQUIRE(!issues.empty());
    CHECK(issues[0].field == "codice_provincia");
    CHECK(issues[0].severity == Severity::error);
    for (const auto& issue : issues) CHECK(issue.record_index == 2);
  }
  SECTION("misspelled region name") {
    records[0].geo->region_name = "Venetto";
    auto issues = validate_geo(records);
    REQUIRE(issues.size() == 1);
    CHECK(issues[0].field == "denominazione_regione");
  }
  SECTION("wrong abbreviation") {
    records[3].geo->province_abbrev = "PV";
    auto issues = validate_geo(records);
    REQUIRE(issues.size() == 1);
    CHECK(issues[0].field == "sigla_provincia");
  }
  SECTION("coordinates far away") {
    records[0].geo->lat = *records[0].geo->lat + 2.0;
    auto issues = validate_geo(records);
    REQUIRE(issues.size() == 1);
    CHECK(issues[0].severity == Severity::warning);
  }
  SECTION("coordinates outside the Italian box") {
    records[0].geo->lon = 25.0;
    auto issues = validate_geo(records);
    REQUIRE(issues.size() == 1);
    CHECK(issues[0].severity == Severity::error);
  }
}

TEST_CASE("not-indicated provinces warn but stay in the database") {
  auto records = sample_province_records();
  records[0].geo->province_code.reset();
  records[0].geo->province_abbrev.reset();
  records[0].geo->province_name = "Not indicated";
  records[0].geo->lat = geo::kRegions[4].lat;
  records[0].geo->lon = geo::kRegions[4].lon;
  auto issues = validate_geo(records);
  REQUIRE(issues.size() == 1);
  CHECK(issues[0].severity == Severity::warning);
  CHECK(issues[0].record_index == 0);
}
