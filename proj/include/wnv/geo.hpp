#pragma once

#include <algorithm>
#include <array>
#include <optional>
#include <string>
#include <string_view>

#include "wnv/errors.hpp"

namespace wnv {

// Geographic identity of a surveillance record, following the ISTAT coding
// scheme (2-digit regions, 3-digit provinces). Province fields and
// coordinates are optional because regional and national table families omit
// them.
struct GeoUnit {
  std::string region_code;  // zero-padded, "01".."20"
  std::string region_name;
  std::optional<std::string> province_code;  // zero-padded 3 digits
  std::optional<std::string> province_name;
  std::optional<std::string> province_abbrev;  // 2 uppercase letters
  std::optional<double> lat;
  std::optional<double> lon;

  bool operator==(const GeoUnit&) const = default;
};

namespace geo {

struct RegionInfo {
  std::string_view code;
  std::string_view name;
  double lat;
  double lon;
};

struct ProvinceInfo {
  std::string_view code;
  std::string_view name;
  std::string_view abbrev;
  std::string_view region_code;
  double lat;
  double lon;
};

// Static registry snapshot of current ISTAT codes with approximate capital
// coordinates. One snapshot is used across all surveillance years; historical
// reorganizations surface as audit warnings, not errors.
inline constexpr std::array<RegionInfo, 20> kRegions{{
    {"01", "Piemonte", 45.06, 7.92},
    {"02", "Valle d'Aosta", 45.74, 7.40},
    {"03", "Lombardia", 45.62, 9.77},
    {"04", "Trentino-Alto Adige", 46.44, 11.28},
    {"05", "Veneto", 45.65, 11.85},
    {"06", "Friuli-Venezia Giulia", 46.15, 13.05},
    {"07", "Liguria", 44.30, 8.77},
    {"08", "Emilia-Romagna", 44.53, 11.04},
    {"09", "Toscana", 43.45, 11.15},
    {"10", "Umbria", 42.97, 12.49},
    {"11", "Marche", 43.35, 13.15},
    {"12", "Lazio", 41.98, 12.77},
    {"13", "Abruzzo", 42.23, 13.86},
    {"14", "Molise", 41.68, 14.61},
    {"15", "Campania", 40.86, 14.84},
    {"16", "Puglia", 41.00, 16.60},
    {"17", "Basilicata", 40.50, 16.08},
    {"18", "Calabria", 39.07, 16.34},
    {"19", "Sicilia", 37.59, 14.16},
    {"20", "Sardegna", 40.09, 9.05},
}};

inline constexpr std::array<ProvinceInfo, 107> kProvinces{{
    {"001", "Torino", "TO", "01", 45.07, 7.69},
    {"002", "Vercelli", "VC", "01", 45.32, 8.42},
    {"003", "Novara", "NO", "01", 45.45, 8.62},
    {"004", "Cuneo", "CN", "01", 44.38, 7.55},
    {"005", "Asti", "AT", "01", 44.90, 8.21},
    {"006", "Alessandria", "AL", "01", 44.91, 8.62},
    {"096", "Biella", "BI", "01", 45.57, 8.05},
    {"103", "Verbano-Cusio-Ossola", "VB", "01", 45.92, 8.55},
    {"007", "Aosta", "AO", "02", 45.74, 7.32},
    {"012", "Varese", "VA", "03", 45.82, 8.83},
    {"013", "Como", "CO", "03", 45.81, 9.09},
    {"014", "Sondrio", "SO", "03", 46.17, 9.87},
    {"015", "Milano", "MI", "03", 45.47, 9.19},
    {"016", "Bergamo", "BG", "03", 45.70, 9.67},
    {"017", "Brescia", "BS", "03", 45.54, 10.22},
    {"018", "Pavia", "PV", "03", 45.19, 9.16},
    {"019", "Cremona", "CR", "03", 45.13, 10.02},
    {"020", "Mantova", "MN", "03", 45.16, 10.79},
    {"097", "Lecco", "LC", "03", 45.86, 9.39},
    {"098", "Lodi", "LO", "03", 45.31, 9.50},
    {"108", "Monza e della Brianza", "MB", "03", 45.58, 9.27},
    {"021", "Bolzano", "BZ", "04", 46.50, 11.35},
    {"022", "Trento", "TN", "04", 46.07, 11.12},
    {"023", "Verona", "VR", "05", 45.44, 10.99},
    {"024", "Vicenza", "VI", "05", 45.55, 11.55},
    {"025", "Belluno", "BL", "05", 46.14, 12.22},
    {"026", "Treviso", "TV", "05", 45.67, 12.24},
    {"027", "Venezia", "VE", "05", 45.44, 12.32},
    {"028", "Padova", "PD", "05", 45.41, 11.88},
    {"029", "Rovigo", "RO", "05", 45.07, 11.79},
    {"030", "Udine", "UD", "06", 46.07, 13.23},
    {"031", "Gorizia", "GO", "06", 45.94, 13.62},
    {"032", "Trieste", "TS", "06", 45.65, 13.77},
    {"093", "Pordenone", "PN", "06", 45.96, 12.66},
    {"008", "Imperia", "IM", "07", 43.89, 8.04},
    {"009", "Savona", "SV", "07", 44.31, 8.48},
    {"010", "Genova", "GE", "07", 44.41, 8.93},
    {"011", "La Spezia", "SP", "07", 44.10, 9.82},
    {"033", "Piacenza", "PC", "08", 45.05, 9.69},
    {"034", "Parma", "PR", "08", 44.80, 10.33},
    {"035", "Reggio nell'Emilia", "RE", "08", 44.70, 10.63},
    {"036", "Modena", "MO", "08", 44.65, 10.93},
    {"037", "Bologna", "BO", "08", 44.49, 11.34},
    {"038", "Ferrara", "FE", "08", 44.84, 11.62},
    {"039", "Ravenna", "RA", "08", 44.42, 12.20},
    {"040", "Forlì-Cesena", "FC", "08", 44.22, 12.04},
    {"099", "Rimini", "RN", "08", 44.06, 12.57},
    {"045", "Massa-Carrara", "MS", "09", 44.04, 10.14},
    {"046", "Lucca", "LU", "09", 43.84, 10.50},
    {"047", "Pistoia", "PT", "09", 43.93, 10.91},
    {"048", "Firenze", "FI", "09", 43.77, 11.25},
    {"049", "Livorno", "LI", "09", 43.55, 10.31},
    {"050", "Pisa", "PI", "09", 43.72, 10.40},
    {"051", "Arezzo", "AR", "09", 43.46, 11.88},
    {"052", "Siena", "SI", "09", 43.32, 11.33},
    {"053", "Grosseto", "GR", "09", 42.76, 11.11},
    {"100", "Prato", "PO", "09", 43.88, 11.10},
    {"054", "Perugia", "PG", "10", 43.11, 12.39},
    {"055", "Terni", "TR", "10", 42.56, 12.65},
    {"041", "Pesaro e Urbino", "PU", "11", 43.91, 12.91},
    {"042", "Ancona", "AN", "11", 43.62, 13.51},
    {"043", "Macerata", "MC", "11", 43.30, 13.45},
    {"044", "Ascoli Piceno", "AP", "11", 42.85, 13.58},
    {"109", "Fermo", "FM", "11", 43.16, 13.72},
    {"056", "Viterbo", "VT", "12", 42.42, 12.11},
    {"057", "Rieti", "RI", "12", 42.40, 12.86},
    {"058", "Roma", "RM", "12", 41.89, 12.48},
    {"059", "Latina", "LT", "12", 41.47, 12.90},
    {"060", "Frosinone", "FR", "12", 41.64, 13.35},
    {"066", "L'Aquila", "AQ", "13", 42.35, 13.40},
    {"067", "Teramo", "TE", "13", 42.66, 13.70},
    {"068", "Pescara", "PE", "13", 42.46, 14.21},
    {"069", "Chieti", "CH", "13", 42.35, 14.17},
    {"070", "Campobasso", "CB", "14", 41.56, 14.66},
    {"094", "Isernia", "IS", "14", 41.59, 14.23},
    {"061", "Caserta", "CE", "15", 41.07, 14.33},
    {"062", "Benevento", "BN", "15", 41.13, 14.78},
    {"063", "Napoli", "NA", "15", 40.85, 14.27},
    {"064", "Avellino", "AV", "15", 40.91, 14.79},
    {"065", "Salerno", "SA", "15", 40.68, 14.77},
    {"071", "Foggia", "FG", "16", 41.46, 15.54},
    {"072", "Bari", "BA", "16", 41.13, 16.87},
    {"073", "Taranto", "TA", "16", 40.47, 17.24},
    {"074", "Brindisi", "BR", "16", 40.64, 17.94},
    {"075", "Lecce", "LE", "16", 40.35, 18.17},
    {"110", "Barletta-Andria-Trani", "BT", "16", 41.32, 16.28},
    {"076", "Potenza", "PZ", "17", 40.64, 15.81},
    {"077", "Matera", "MT", "17", 40.67, 16.60},
    {"078", "Cosenza", "CS", "18", 39.30, 16.25},
    {"079", "Catanzaro", "CZ", "18", 38.91, 16.59},
    {"080", "Reggio Calabria", "RC", "18", 38.11, 15.65},
    {"101", "Crotone", "KR", "18", 39.08, 17.13},
    {"102", "Vibo Valentia", "VV", "18", 38.68, 16.10},
    {"081", "Trapani", "TP", "19", 38.02, 12.54},
    {"082", "Palermo", "PA", "19", 38.12, 13.36},
    {"083", "Messina", "ME", "19", 38.19, 15.55},
    {"084", "Agrigento", "AG", "19", 37.31, 13.58},
    {"085", "Caltanissetta", "CL", "19", 37.49, 14.06},
    {"086", "Enna", "EN", "19", 37.57, 14.28},
    {"087", "Catania", "CT", "19", 37.50, 15.09},
    {"088", "Ragusa", "RG", "19", 36.93, 14.73},
    {"089", "Siracusa", "SR", "19", 37.08, 15.29},
    {"090", "Sassari", "SS", "20", 40.73, 8.56},
    {"091", "Nuoro", "NU", "20", 40.32, 9.33},
    {"092", "Cagliari", "CA", "20", 39.22, 9.12},
    {"095", "Oristano", "OR", "20", 39.90, 8.59},
    {"111", "Sud Sardegna", "SU", "20", 39.17, 8.52},
}};

// Italian bounding box used for coordinate sanity checks.
inline constexpr double kLatMin = 35.0, kLatMax = 48.0;
inline constexpr double kLonMin = 6.0, kLonMax = 19.0;

// Zero-pads a numeric code ("5" -> "05"); returns nullopt if the token is
// not a plain integer or is too wide.
inline std::optional<std::string> normalize_code(std::string_view token,
                                                 std::size_t width) {
  if (token.empty() || token.size() > width + 1) return std::nullopt;
  for (char c : token)
    if (c < '0' || c > '9') return std::nullopt;
  std::string_view trimmed = token;
  while (trimmed.size() > 1 && trimmed.front() == '0') trimmed.remove_prefix(1);
  if (trimmed.size() > width) return std::nullopt;
  std::string out(width - trimmed.size(), '0');
  out.append(trimmed);
  return out;
}

inline const RegionInfo* find_region(std::string_view code) {
  for (const auto& r : kRegions)
    if (r.code == code) return &r;
  return nullptr;
}

inline const RegionInfo* find_region_by_name(std::string_view name) {
  for (const auto& r : kRegions)
    if (r.name == name) return &r;
  return nullptr;
}

inline const ProvinceInfo* find_province(std::string_view code) {
  for (const auto& p : kProvinces)
    if (p.code == code) return &p;
  return nullptr;
}

inline const ProvinceInfo* find_province_by_name(std::string_view name) {
  for (const auto& p : kProvinces)
    if (p.name == name) return &p;
  return nullptr;
}

inline GeoUnit region_unit(std::string_view region_code) {
  const RegionInfo* r = find_region(region_code);
  if (!r) throw Error("unknown region code: " + std::string(region_code));
  GeoUnit g;
  g.region_code = r->code;
  g.region_name = r->name;
  g.lat = r->lat;
  g.lon = r->lon;
  return g;
}

inline GeoUnit province_unit(std::string_view province_code) {
  const ProvinceInfo* p = find_province(province_code);
  if (!p) throw Error("unknown province code: " + std::string(province_code));
  const RegionInfo* r = find_region(p->region_code);
  GeoUnit g;
  g.region_code = p->region_code;
  g.region_name = r ? std::string(r->name) : std::string();
  g.province_code = std::string(p->code);
  g.province_name = std::string(p->name);
  g.province_abbrev = std::string(p->abbrev);
  g.lat = p->lat;
  g.lon = p->lon;
  return g;
}

}  // namespace geo
}  // namespace wnv
