#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <regex>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "wnv/errors.hpp"
#include "wnv/schema.hpp"
#include "wnv/series.hpp"

namespace wnv {

// One CSV file of the database tree, parsed.
struct LoadedFile {
  std::filesystem::path path;
  TableFamilyKind kind;
  std::optional<int> year;
  ParseResult result;
};

// A WNVDB directory tree in memory: per-year folders with
// dati-andamento-nazionale and dati-sorveglianza-* subfolders, plus the
// latest-wnv.csv rollup at the root.
struct Dataset {
  std::vector<LoadedFile> files;
  std::vector<std::filesystem::path> skipped;  // CSVs matching no family

  std::vector<SurveillanceRecord> records(TableFamilyKind kind) const {
    std::vector<SurveillanceRecord> out;
    for (const auto& f : files) {
      if (f.kind != kind) continue;
      out.insert(out.end(), f.result.records.begin(), f.result.records.end());
    }
    return out;
  }
};

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline Dataset load_dataset(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir))
    throw IoError("data directory not found: " + dir.string());

  std::vector<std::filesystem::path> candidates;
  const std::regex year_dir(R"(^\d{4}$)");
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".csv") {
      candidates.push_back(entry.path());
    } else if (entry.is_directory() &&
               std::regex_match(entry.path().filename().string(), year_dir)) {
      for (const auto& sub : std::filesystem::directory_iterator(entry)) {
        if (!sub.is_directory()) continue;
        std::string name = sub.path().filename().string();
        if (name.rfind("dati-", 0) != 0) continue;  // bollettini etc.
        for (const auto& file : std::filesystem::directory_iterator(sub))
          if (file.is_regular_file() && file.path().extension() == ".csv")
            candidates.push_back(file.path());
      }
    }
  }
  std::sort(candidates.begin(), candidates.end());

  Dataset ds;
  for (const auto& path : candidates) {
    DetectedFamily fam;
    try {
      fam = detect_family(path.filename().string());
    } catch (const UnknownFileError&) {
      ds.skipped.push_back(path);
      continue;
    }
    LoadedFile lf;
    lf.path = path;
    lf.kind = fam.family->kind;
    lf.year = fam.year;
    lf.result = parse_table(read_file(path), fam);
    ds.files.push_back(std::move(lf));
  }
  return ds;
}

// Cross-checks the published nuovi_casi column against first differences of
// casi_totali within each fully stratified slice. Disagreements are data
// quality findings, not parse failures.
inline std::vector<std::pair<std::size_t, std::string>> audit_increments(
    const std::vector<SurveillanceRecord>& records) {
  using Key = std::tuple<int, int, std::string, std::string, std::string,
                         std::string, std::string>;
  std::map<Key, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    Key key{r.year,
            static_cast<int>(r.host),
            r.geo ? r.geo->region_code : "",
            r.geo && r.geo->province_code ? *r.geo->province_code : "",
            r.infection_type
                ? std::string(infection_token(*r.infection_type))
                : "",
            r.age ? std::string(age_token(*r.age)) : "",
            r.species.value_or("")};
    groups[key].push_back(i);
  }

  std::vector<std::pair<std::size_t, std::string>> findings;
  for (auto& [key, idx] : groups) {
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      return records[a].week_date < records[b].week_date;
    });
    std::int64_t prev = 0;
    for (std::size_t i : idx) {
      const auto& r = records[i];
      Count expected;
      if (r.total_cases >= prev) expected = r.total_cases - prev;
      if (r.new_cases != expected) {
        std::ostringstream msg;
        msg << "published nuovi_casi "
            << (r.new_cases ? std::to_string(*r.new_cases) : "NA")
            << " disagrees with recomputed "
            << (expected ? std::to_string(*expected) : "NA") << " on "
            << r.week_date.to_string();
        findings.emplace_back(i, msg.str());
      }
      prev = r.total_cases;
    }
  }
  return findings;
}

}  // namespace wnv
