#pragma once

#include <charconv>
#include <cstdint>
#include <map>
#include <optional>
#include <regex>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "wnv/csv.hpp"
#include "wnv/errors.hpp"
#include "wnv/records.hpp"

namespace wnv {

enum class TableFamilyKind {
  national_trend,
  human_region,
  human_province,
  entomological,
  equid,
  target_birds,
  wild_birds,
  latest_rollup,
};

inline constexpr std::string_view to_string(TableFamilyKind k) {
  switch (k) {
    case TableFamilyKind::national_trend: return "national_trend";
    case TableFamilyKind::human_region: return "human_region";
    case TableFamilyKind::human_province: return "human_province";
    case TableFamilyKind::entomological: return "entomological";
    case TableFamilyKind::equid: return "equid";
    case TableFamilyKind::target_birds: return "target_birds";
    case TableFamilyKind::wild_birds: return "wild_birds";
    case TableFamilyKind::latest_rollup: return "latest_rollup";
  }
  return "?";
}

// Schema of one file family: base-name patterns and the published column
// set. Some columns only exist from a given surveillance year onwards
// (tipo_infezione appears in 2013); files from earlier years may omit them.
struct TableFamily {
  TableFamilyKind kind;
  std::vector<std::string> patterns;  // ECMAScript regexes, year in group 1
  std::vector<std::string> columns;
  std::map<std::string, int> required_from_year;  // column -> first year

  bool column_required(const std::string& col, std::optional<int> year) const {
    auto it = required_from_year.find(col);
    if (it == required_from_year.end()) return true;
    return year.has_value() && *year >= it->second;
  }
};

// The paper's body text and table captions disagree on a couple of file
// stems (andamento vs sorveglianza nazionale, regioni- prefix on bird files,
// entomologica vs entomological); both spellings are accepted.
inline const std::vector<TableFamily>& default_families() {
  static const std::vector<TableFamily> families = [] {
    std::vector<TableFamily> f;
    f.push_back({TableFamilyKind::national_trend,
                 {R"(^wn-ita-andamento-nazionale-(\d{4})\.csv$)",
                  R"(^wn-ita-sorveglianza-nazionale-(\d{4})\.csv$)"},
                 {"url_bollettino", "data", "host", "nuovi_casi",
                  "casi_totali"},
                 {}});
    f.push_back({TableFamilyKind::human_region,
                 {R"(^wn-ita-regioni-sorveglianza-umana-(\d{4})\.csv$)"},
                 {"url_bollettino", "data", "codice_regione",
                  "denominazione_regione", "lat", "long", "nuovi_casi",
                  "casi_totali", "tipo_infezione"},
                 {{"tipo_infezione", 2013}}});
    f.push_back({TableFamilyKind::human_province,
                 {R"(^wn-ita-province-sorveglianza-umana-(\d{4})\.csv$)"},
                 {"url_bollettino", "data", "codice_regione",
                  "denominazione_regione", "codice_provincia",
                  "denominazione_provincia", "sigla_provincia", "lat", "long",
                  "eta", "nuovi_casi", "casi_totali", "tipo_infezione"},
                 {{"tipo_infezione", 2013}}});
    f.push_back({TableFamilyKind::entomological,
                 {R"(^wn-ita-sorveglianza-entomologica-(\d{4})\.csv$)",
                  R"(^wn-ita-sorveglianza-entomological-(\d{4})\.csv$)"},
                 {"url_bollettino", "data", "codice_regione",
                  "denominazione_regione", "codice_provincia",
                  "denominazione_provincia", "sigla_provincia", "lat", "long",
                  "nuovi_casi", "casi_totali"},
                 {}});
    f.push_back({TableFamilyKind::equid,
                 {R"(^wn-ita-sorveglianza-equidi-(\d{4})\.csv$)"},
                 {"url_bollettino", "data", "codice_regione",
                  "denominazione_regione", "codice_provincia",
                  "denominazione_provincia", "sigla_provincia", "lat", "long",
                  "nuovi_casi", "casi_totali", "nuovi_morti_abbattuti",
                  "totale_morti_abbattuti", "equidi_presenti_focolaio"},
                 {}});
    f.push_back(
        {TableFamilyKind::target_birds,
         {R"(^wn-ita-sorveglianza-uccelli-bersaglio-(\d{4})\.csv$)",
          R"(^wn-ita-regioni-sorveglianza-uccelli-bersaglio-(\d{4})\.csv$)"},
         {"url_bollettino", "data", "codice_regione", "denominazione_regione",
          "codice_provincia", "denominazione_provincia", "sigla_provincia",
          "lat", "long", "specie", "nuovi_casi", "casi_totali"},
         {}});
    f.push_back(
        {TableFamilyKind::wild_birds,
         {R"(^wn-ita-sorveglianza-uccelli-selvatici-(\d{4})\.csv$)",
          R"(^wn-ita-regioni-sorveglianza-uccelli-selvatici-(\d{4})\.csv$)"},
         {"url_bollettino", "data", "codice_regione", "denominazione_regione",
          "codice_provincia", "denominazione_provincia", "sigla_provincia",
          "lat", "long", "specie", "nuovi_casi", "casi_totali"},
         {}});
    f.push_back({TableFamilyKind::latest_rollup,
                 {R"(^latest-wnv\.csv$)"},
                 {"url_bollettino", "data", "codice_regione",
                  "denominazione_regione", "codice_provincia",
                  "denominazione_provincia", "sigla_provincia", "lat", "long",
                  "nuovi_casi", "casi_totali", "ospite_recettivo"},
                 {}});
    return f;
  }();
  return families;
}

struct DetectedFamily {
  const TableFamily* family = nullptr;
  std::optional<int> year;
};

// Matches a base file name against the family patterns and extracts the
// surveillance year. The name must be a base name, not a path.
inline DetectedFamily detect_family(
    const std::string& filename,
    const std::vector<TableFamily>& families = default_families()) {
  if (filename.find('/') != std::string::npos ||
      filename.find('\\') != std::string::npos)
    throw UnknownFileError("expected a base name, got a path: " + filename);
  std::vector<DetectedFamily> matches;
  for (const auto& fam : families) {
    for (const auto& pattern : fam.patterns) {
      std::smatch m;
      if (std::regex_match(filename, m, std::regex(pattern))) {
        DetectedFamily d;
        d.family = &fam;
        if (m.size() > 1 && m[1].matched) d.year = std::stoi(m[1].str());
        matches.push_back(d);
        break;  // one pattern per family is enough
      }
    }
  }
  if (matches.empty())
    throw UnknownFileError("no table family matches: " + filename);
  if (matches.size() > 1)
    throw AmbiguousFileError("multiple table families match: " + filename);
  return matches.front();
}

struct ParseResult {
  std::vector<SurveillanceRecord> records;
  std::vector<RowIssue> issues;

  bool has_errors() const {
    for (const auto& i : issues)
      if (i.severity == Severity::error) return true;
    return false;
  }
};

namespace detail {

inline std::optional<std::int64_t> parse_int(std::string_view s) {
  if (s.empty()) return std::nullopt;
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

inline std::optional<double> parse_double(std::string_view s) {
  if (s.empty()) return std::nullopt;
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

inline std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

inline std::string format_count(const Count& c) {
  return c.has_value() ? std::to_string(*c) : "NA";
}

inline bool is_na_token(std::string_view s) { return s.empty() || s == "NA"; }

}  // namespace detail

// Parses one CSV file of a known family. Malformed rows produce RowIssues
// and are skipped; parsing never aborts on a single bad row. Throws
// HeaderMismatchError when required columns are missing and EmptyFileError
// when there are no data rows.
inline ParseResult parse_table(std::string_view content,
                               const DetectedFamily& detected) {
  const TableFamily& fam = *detected.family;
  csv::Table table = csv::read_table(content);
  if (table.header.empty())
    throw HeaderMismatchError("file has no header row");

  std::map<std::string, int> index;
  for (std::size_t i = 0; i < table.header.size(); ++i)
    index.emplace(table.header[i], static_cast<int>(i));

  std::vector<std::string> missing;
  std::vector<std::string> present_columns;
  for (const auto& col : fam.columns) {
    if (index.count(col)) {
      present_columns.push_back(col);
    } else if (fam.column_required(col, detected.year)) {
      missing.push_back(col);
    }
  }
  if (!missing.empty()) {
    std::string msg = "missing required columns:";
    for (const auto& c : missing) msg += " " + c;
    throw HeaderMismatchError(msg);
  }

  ParseResult out;

  bool reordered = false;
  for (std::size_t i = 0; i < present_columns.size(); ++i) {
    if (i >= table.header.size() || table.header[i] != present_columns[i]) {
      reordered = true;
      break;
    }
  }
  if (reordered)
    out.issues.push_back(
        {0, "", Severity::warning, "header columns reordered"});
  for (const auto& h : table.header) {
    bool known = false;
    for (const auto& col : fam.columns)
      if (col == h) known = true;
    if (!known)
      out.issues.push_back(
          {0, h, Severity::warning, "unexpected column ignored"});
  }

  if (table.rows.empty()) throw EmptyFileError("no data rows");

  auto has = [&](const char* col) { return index.count(col) > 0; };

  for (std::size_t ri = 0; ri < table.rows.size(); ++ri) {
    const auto& row = table.rows[ri];
    const std::size_t rownum = ri + 1;
    if (row.size() != table.header.size()) {
      out.issues.push_back({rownum, "", Severity::error,
                            "expected " + std::to_string(table.header.size()) +
                                " fields, got " + std::to_string(row.size())});
      continue;
    }
    auto field = [&](const char* col) -> const std::string& {
      return row[static_cast<std::size_t>(index.at(col))];
    };
    bool bad = false;
    auto fail = [&](const char* col, std::string msg) {
      out.issues.push_back({rownum, col, Severity::error, std::move(msg)});
      bad = true;
    };
    auto warn = [&](const char* col, std::string msg) {
      out.issues.push_back({rownum, col, Severity::warning, std::move(msg)});
    };

    SurveillanceRecord rec;
    rec.bulletin_url = field("url_bollettino");

    auto date = WeekDate::parse(field("data"));
    if (!date) {
      fail("data", "not a yyyy-mm-dd date: '" + field("data") + "'");
      continue;
    }
    rec.week_date = *date;
    rec.year = detected.year.value_or(date->year());

    // host
    switch (fam.kind) {
      case TableFamilyKind::national_trend: {
        auto h = parse_host(field("host"));
        if (!h) {
          fail("host", "unknown host token: '" + field("host") + "'");
          continue;
        }
        rec.host = *h;
        break;
      }
      case TableFamilyKind::latest_rollup: {
        auto h = parse_host(field("ospite_recettivo"));
        if (!h) {
          fail("ospite_recettivo",
               "unknown host token: '" + field("ospite_recettivo") + "'");
          continue;
        }
        rec.host = *h;
        break;
      }
      case TableFamilyKind::human_region:
      case TableFamilyKind::human_province:
        rec.host = Host::humans;
        break;
      case TableFamilyKind::entomological:
        rec.host = Host::mosquitoes;
        break;
      case TableFamilyKind::equid:
        rec.host = Host::equids;
        break;
      case TableFamilyKind::target_birds:
        rec.host = Host::target_birds;
        break;
      case TableFamilyKind::wild_birds:
        rec.host = Host::wild_birds;
        break;
    }

    // geography
    if (has("codice_regione")) {
      GeoUnit g;
      auto code = geo::normalize_code(field("codice_regione"), 2);
      if (!code) {
        fail("codice_regione",
             "not a region code: '" + field("codice_regione") + "'");
        continue;
      }
      g.region_code = *code;
      g.region_name = field("denominazione_regione");
      if (has("codice_provincia")) {
        const std::string& pc = field("codice_provincia");
        if (!pc.empty()) {
          auto pcode = geo::normalize_code(pc, 3);
          if (!pcode) {
            fail("codice_provincia", "not a province code: '" + pc + "'");
            continue;
          }
          g.province_code = *pcode;
        }
        if (!field("denominazione_provincia").empty())
          g.province_name = field("denominazione_provincia");
        if (!field("sigla_provincia").empty())
          g.province_abbrev = field("sigla_provincia");
      }
      if (has("lat")) {
        auto lat = detail::parse_double(field("lat"));
        auto lon = detail::parse_double(field("long"));
        if (!lat && !field("lat").empty()) {
          fail("lat", "not a number: '" + field("lat") + "'");
          continue;
        }
        if (!lon && !field("long").empty()) {
          fail("long", "not a number: '" + field("long") + "'");
          continue;
        }
        g.lat = lat;
        g.lon = lon;
      }
      rec.geo = std::move(g);
    }

    // counts
    {
      const std::string& totali = field("casi_totali");
      auto tv = detail::parse_int(totali);
      if (!tv) {
        fail("casi_totali", "not an integer: '" + totali + "'");
        continue;
      }
      if (*tv < 0) {
        fail("casi_totali", "negative cumulative count: " + totali);
        continue;
      }
      rec.total_cases = *tv;

      const std::string& nuovi = field("nuovi_casi");
      if (detail::is_na_token(nuovi)) {
        rec.new_cases = std::nullopt;
      } else {
        auto nv = detail::parse_int(nuovi);
        if (!nv) {
          fail("nuovi_casi", "not an integer or NA: '" + nuovi + "'");
          continue;
        }
        if (*nv < 0) {
          warn("nuovi_casi", "negative weekly count masked to NA");
          rec.new_cases = std::nullopt;
        } else {
          rec.new_cases = *nv;
        }
      }
    }

    // per-family extras
    if (has("tipo_infezione")) {
      auto t = parse_infection(field("tipo_infezione"));
      if (!t) {
        fail("tipo_infezione",
             "unknown infection type: '" + field("tipo_infezione") + "'");
        continue;
      }
      int year = rec.year;
      if ((*t == InfectionType::symptomatic ||
           *t == InfectionType::asymptomatic) &&
          year < 2022) {
        fail("tipo_infezione",
             "symptomatic/asymptomatic categories only exist from 2022");
        continue;
      }
      if (year >= 2013 && year <= 2017 && *t != InfectionType::neuroinvasive &&
          *t != InfectionType::missing) {
        fail("tipo_infezione",
             "years 2013-2017 report only neuroinvasive cases");
        continue;
      }
      rec.infection_type = *t;
    }
    if (has("eta")) {
      auto a = parse_age(field("eta"));
      if (!a) {
        fail("eta", "unknown age class: '" + field("eta") + "'");
        continue;
      }
      rec.age = *a;
    }
    if (has("specie")) {
      if (!field("specie").empty() && field("specie") != "NA")
        rec.species = field("specie");
    }
    if (has("nuovi_morti_abbattuti")) {
      const std::string& nm = field("nuovi_morti_abbattuti");
      if (detail::is_na_token(nm)) {
        rec.new_deaths = std::nullopt;
      } else {
        auto v = detail::parse_int(nm);
        if (!v) {
          fail("nuovi_morti_abbattuti", "not an integer or NA: '" + nm + "'");
          continue;
        }
        if (*v < 0) {
          warn("nuovi_morti_abbattuti", "negative weekly count masked to NA");
          rec.new_deaths = std::nullopt;
        } else {
          rec.new_deaths = *v;
        }
      }
      auto td = detail::parse_int(field("totale_morti_abbattuti"));
      if (!td || *td < 0) {
        fail("totale_morti_abbattuti",
             "not a non-negative integer: '" + field("totale_morti_abbattuti") +
                 "'");
        continue;
      }
      rec.total_deaths = *td;
      const std::string& eq = field("equidi_presenti_focolaio");
      if (!detail::is_na_token(eq)) {
        auto v = detail::parse_int(eq);
        if (!v || *v < 0) {
          fail("equidi_presenti_focolaio",
               "not a non-negative integer: '" + eq + "'");
          continue;
        }
        rec.outbreak_equids = *v;
      }
    }

    if (!bad) out.records.push_back(std::move(rec));
  }
  return out;
}

// Serializes records back into the family's column layout. Reparsing the
// output reproduces the records field by field.
inline std::string write_table(const std::vector<SurveillanceRecord>& records,
                               const TableFamily& fam,
                               std::optional<int> year = std::nullopt) {
  std::vector<std::string> columns;
  for (const auto& col : fam.columns) {
    if (!fam.column_required(col, year)) {
      bool any = false;
      for (const auto& r : records) {
        if (col == "tipo_infezione" && r.infection_type) any = true;
      }
      if (!any) continue;
    }
    columns.push_back(col);
  }

  std::ostringstream out;
  csv::write_row(out, columns);
  for (const auto& r : records) {
    std::vector<std::string> row;
    row.reserve(columns.size());
    for (const auto& col : columns) {
      std::string v;
      if (col == "url_bollettino") {
        v = r.bulletin_url;
      } else if (col == "data") {
        v = r.week_date.to_string();
      } else if (col == "host") {
        v = std::to_string(static_cast<int>(r.host));
      } else if (col == "ospite_recettivo") {
        v = std::string(host_name(r.host));
      } else if (col == "codice_regione") {
        v = r.geo ? r.geo->region_code : "";
      } else if (col == "denominazione_regione") {
        v = r.geo ? r.geo->region_name : "";
      } else if (col == "codice_provincia") {
        v = r.geo && r.geo->province_code ? *r.geo->province_code : "";
      } else if (col == "denominazione_provincia") {
        v = r.geo && r.geo->province_name ? *r.geo->province_name : "";
      } else if (col == "sigla_provincia") {
        v = r.geo && r.geo->province_abbrev ? *r.geo->province_abbrev : "";
      } else if (col == "lat") {
        v = r.geo && r.geo->lat ? detail::format_double(*r.geo->lat) : "";
      } else if (col == "long") {
        v = r.geo && r.geo->lon ? detail::format_double(*r.geo->lon) : "";
      } else if (col == "nuovi_casi") {
        v = detail::format_count(r.new_cases);
      } else if (col == "casi_totali") {
        v = std::to_string(r.total_cases);
      } else if (col == "tipo_infezione") {
        v = r.infection_type ? std::string(infection_token(*r.infection_type))
                             : "";
      } else if (col == "eta") {
        v = r.age ? std::string(age_token(*r.age)) : "";
      } else if (col == "specie") {
        v = r.species.value_or("");
      } else if (col == "nuovi_morti_abbattuti") {
        v = detail::format_count(r.new_deaths);
      } else if (col == "totale_morti_abbattuti") {
        v = r.total_deaths ? std::to_string(*r.total_deaths) : "0";
      } else if (col == "equidi_presenti_focolaio") {
        v = r.outbreak_equids ? std::to_string(*r.outbreak_equids) : "";
      }
      row.push_back(std::move(v));
    }
    csv::write_row(out, row);
  }
  return out.str();
}

// Audits record geography against the bundled ISTAT registry. Pure check,
// never throws: every disagreement yields one issue. Records whose province
// is "Not indicated" are kept by the database, so they only warn.
inline std::vector<GeoIssue> validate_geo(
    const std::vector<SurveillanceRecord>& records) {
  std::vector<GeoIssue> issues;
  constexpr double kCentroidTolerance = 0.25;  // degrees
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& rec = records[i];
    if (!rec.geo) continue;
    const GeoUnit& g = *rec.geo;
    auto add = [&](const char* field, Severity sev, std::string msg) {
      issues.push_back({i, field, sev, std::move(msg)});
    };

    const geo::RegionInfo* region = geo::find_region(g.region_code);
    if (!region) {
      add("codice_regione", Severity::error,
          "unknown region code " + g.region_code);
    } else if (g.region_name != region->name) {
      add("denominazione_regione", Severity::error,
          "region name '" + g.region_name + "' does not match registry '" +
              std::string(region->name) + "'");
    }

    if (g.province_name && *g.province_name == "Not indicated") {
      add("denominazione_provincia", Severity::warning,
          "province not indicated; record retained");
    } else if (g.province_code) {
      const geo::ProvinceInfo* prov = geo::find_province(*g.province_code);
      if (!prov) {
        add("codice_provincia", Severity::error,
            "unknown province code " + *g.province_code);
      } else {
        if (prov->region_code != g.region_code)
          add("codice_provincia", Severity::error,
              "province " + *g.province_code + " belongs to region " +
                  std::string(prov->region_code));
        if (g.province_name && *g.province_name != prov->name)
          add("denominazione_provincia", Severity::error,
              "province name '" + *g.province_name +
                  "' does not match registry '" + std::string(prov->name) +
                  "'");
        if (g.province_abbrev && *g.province_abbrev != prov->abbrev)
          add("sigla_provincia", Severity::error,
              "province abbreviation '" + *g.province_abbrev +
                  "' does not match registry '" + std::string(prov->abbrev) +
                  "'");
      }
    } else if (g.province_name) {
      if (!geo::find_province_by_name(*g.province_name))
        add("denominazione_provincia", Severity::error,
            "unknown province name '" + *g.province_name + "'");
    }

    if (g.lat || g.lon) {
      double lat = g.lat.value_or(0.0), lon = g.lon.value_or(0.0);
      if (!g.lat || !g.lon) {
        add("lat", Severity::warning, "incomplete coordinates");
      } else if (lat < geo::kLatMin || lat > geo::kLatMax ||
                 lon < geo::kLonMin || lon > geo::kLonMax) {
        add("lat", Severity::error, "coordinates outside Italian bounds");
      } else {
        const geo::ProvinceInfo* prov =
            g.province_code ? geo::find_province(*g.province_code) : nullptr;
        double ref_lat = prov ? prov->lat
                              : (geo::find_region(g.region_code)
                                     ? geo::find_region(g.region_code)->lat
                                     : lat);
        double ref_lon = prov ? prov->lon
                              : (geo::find_region(g.region_code)
                                     ? geo::find_region(g.region_code)->lon
                                     : lon);
        if (std::abs(lat - ref_lat) > kCentroidTolerance ||
            std::abs(lon - ref_lon) > kCentroidTolerance)
          add("lat", Severity::warning,
              "coordinates far from registry centroid");
      }
    }
  }
  return issues;
}

}  // namespace wnv
