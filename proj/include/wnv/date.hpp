#pragma once

#include <chrono>
#include <compare>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

#include "wnv/errors.hpp"

namespace wnv {

// Calendar date of a surveillance week ("data" column). Bulletins carry one
// reference date per reporting week, always formatted yyyy-mm-dd.
class WeekDate {
 public:
  WeekDate() = default;
  WeekDate(int year, unsigned month, unsigned day)
      : ymd_{std::chrono::year{year}, std::chrono::month{month},
             std::chrono::day{day}} {
    if (!ymd_.ok()) throw Error("invalid calendar date");
  }

  // Strict parse: exactly "yyyy-mm-dd", valid calendar date.
  static std::optional<WeekDate> parse(std::string_view s) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
    auto digits = [](std::string_view t) {
      for (char c : t)
        if (c < '0' || c > '9') return false;
      return true;
    };
    if (!digits(s.substr(0, 4)) || !digits(s.substr(5, 2)) ||
        !digits(s.substr(8, 2)))
      return std::nullopt;
    int y = (s[0] - '0') * 1000 + (s[1] - '0') * 100 + (s[2] - '0') * 10 +
            (s[3] - '0');
    unsigned m = static_cast<unsigned>((s[5] - '0') * 10 + (s[6] - '0'));
    unsigned d = static_cast<unsigned>((s[8] - '0') * 10 + (s[9] - '0'));
    std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m},
                                    std::chrono::day{d}};
    if (!ymd.ok()) return std::nullopt;
    WeekDate w;
    w.ymd_ = ymd;
    return w;
  }

  std::string to_string() const {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", year(), month(), day());
    return buf;
  }

  int year() const { return static_cast<int>(ymd_.year()); }
  unsigned month() const { return static_cast<unsigned>(ymd_.month()); }
  unsigned day() const { return static_cast<unsigned>(ymd_.day()); }

  WeekDate plus_days(int days) const {
    WeekDate w;
    w.ymd_ = std::chrono::year_month_day{
        std::chrono::sys_days{ymd_} + std::chrono::days{days}};
    return w;
  }

  friend int days_between(const WeekDate& a, const WeekDate& b) {
    return static_cast<int>((std::chrono::sys_days{b.ymd_} -
                             std::chrono::sys_days{a.ymd_})
                                .count());
  }

  friend auto operator<=>(const WeekDate& a, const WeekDate& b) {
    return std::chrono::sys_days{a.ymd_} <=> std::chrono::sys_days{b.ymd_};
  }
  friend bool operator==(const WeekDate& a, const WeekDate& b) {
    return std::chrono::sys_days{a.ymd_} == std::chrono::sys_days{b.ymd_};
  }

 private:
  std::chrono::year_month_day ymd_{};
};

}  // namespace wnv
