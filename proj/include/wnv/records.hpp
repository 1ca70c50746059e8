#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "wnv/date.hpp"
#include "wnv/geo.hpp"

namespace wnv {

// Host organism, with the numeric encoding used by the national trend files.
enum class Host : int {
  humans = 0,
  equids = 1,
  target_birds = 2,
  wild_birds = 3,
  mosquitoes = 4,
};

inline constexpr std::string_view host_name(Host h) {
  switch (h) {
    case Host::humans: return "umani";
    case Host::equids: return "equidi";
    case Host::target_birds: return "uccelli-bersaglio";
    case Host::wild_birds: return "uccelli-selvatici";
    case Host::mosquitoes: return "zanzare";
  }
  return "?";
}

// Accepts the numeric code or the canonical name.
inline std::optional<Host> parse_host(std::string_view token) {
  if (token.size() == 1 && token[0] >= '0' && token[0] <= '4')
    return static_cast<Host>(token[0] - '0');
  for (int i = 0; i <= 4; ++i)
    if (host_name(static_cast<Host>(i)) == token)
      return static_cast<Host>(i);
  return std::nullopt;
}

// Age classes used by the human province tables. `missing` is an explicit
// state for rows whose age cell is empty; it is distinct from records coming
// from families without an age column at all.
enum class AgeClass {
  le14,
  a15_44,
  a45_64,
  a65_74,
  ge75,
  missing,
};

inline constexpr std::string_view age_token(AgeClass a) {
  switch (a) {
    case AgeClass::le14: return "<=14";
    case AgeClass::a15_44: return "15-44";
    case AgeClass::a45_64: return "45-64";
    case AgeClass::a65_74: return "65-74";
    case AgeClass::ge75: return ">=75";
    case AgeClass::missing: return "NA";
  }
  return "?";
}

inline std::optional<AgeClass> parse_age(std::string_view token) {
  if (token.empty() || token == "NA") return AgeClass::missing;
  if (token == "<=14" || token == "≤14" || token == "0-14")
    return AgeClass::le14;
  if (token == "15-44") return AgeClass::a15_44;
  if (token == "45-64") return AgeClass::a45_64;
  if (token == "65-74") return AgeClass::a65_74;
  if (token == ">=75" || token == "≥75" || token == "75+")
    return AgeClass::ge75;
  return std::nullopt;
}

enum class InfectionType {
  neuroinvasive,
  fever,
  blood_donor,
  symptomatic,
  asymptomatic,
  missing,
};

inline constexpr std::string_view infection_token(InfectionType t) {
  switch (t) {
    case InfectionType::neuroinvasive: return "neuroinvasive";
    case InfectionType::fever: return "fever";
    case InfectionType::blood_donor: return "blood_donor";
    case InfectionType::symptomatic: return "symptomatic";
    case InfectionType::asymptomatic: return "asymptomatic";
    case InfectionType::missing: return "NA";
  }
  return "?";
}

inline std::optional<InfectionType> parse_infection(std::string_view token) {
  if (token.empty() || token == "NA") return InfectionType::missing;
  if (token == "neuroinvasive" || token == "neuro-invasiva" ||
      token == "neuroinvasiva")
    return InfectionType::neuroinvasive;
  if (token == "fever" || token == "febbre") return InfectionType::fever;
  if (token == "blood_donor" || token == "donatore di sangue" ||
      token == "donatore")
    return InfectionType::blood_donor;
  if (token == "symptomatic" || token == "sintomatica")
    return InfectionType::symptomatic;
  if (token == "asymptomatic" || token == "asintomatica")
    return InfectionType::asymptomatic;
  return std::nullopt;
}

// Weekly counts are non-negative or NA; negatives never reach a record.
using Count = std::optional<std::int64_t>;

// One row of one WNVDB table, normalized. Optional fields are populated
// according to the table family the record came from.
struct SurveillanceRecord {
  std::string bulletin_url;
  WeekDate week_date;
  int year = 0;  // surveillance season (folder year)
  std::optional<GeoUnit> geo;
  Host host = Host::humans;
  Count new_cases;              // NA allowed
  std::int64_t total_cases = 0;
  std::optional<InfectionType> infection_type;
  std::optional<AgeClass> age;
  std::optional<std::string> species;
  std::optional<std::int64_t> outbreak_equids;
  Count new_deaths;  // NA allowed
  std::optional<std::int64_t> total_deaths;

  bool operator==(const SurveillanceRecord&) const = default;
};

enum class Severity { warning, error };

inline constexpr std::string_view to_string(Severity s) {
  return s == Severity::warning ? "warning" : "error";
}

// Complaint about a single CSV row; parsing continues past it.
struct RowIssue {
  std::size_t row = 0;  // 1-based data row index
  std::string column;
  Severity severity = Severity::error;
  std::string message;
};

// Complaint from the geographic audit.
struct GeoIssue {
  std::size_t record_index = 0;
  std::string field;
  Severity severity = Severity::error;
  std::string message;
};

}  // namespace wnv
