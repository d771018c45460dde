#include "hjmcal/dates.hpp"

#include <array>
#include <cstdio>

#include "hjmcal/errors.hpp"

namespace hjmcal {
namespace {

// Civil-to-serial conversion valid for all proleptic Gregorian dates.
int days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const int era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2u) / 5u +
                       static_cast<unsigned>(d) - 1u;
  const unsigned doe = yoe * 365u + yoe / 4u - yoe / 100u + doy;
  return era * 146097 + static_cast<int>(doe) - 719468;
}

std::array<int, 3> civil_from_days(int z) {
  z += 719468;
  const int era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const int y = static_cast<int>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned d = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp + (mp < 10 ? 3 : (unsigned)-9);
  return {y + (m <= 2), static_cast<int>(m), static_cast<int>(d)};
}

}  // namespace

Date::Date(int year, int month, int day) : serial_(days_from_civil(year, month, day)) {}

int Date::year() const { return civil_from_days(serial_)[0]; }
int Date::month() const { return civil_from_days(serial_)[1]; }
int Date::day() const { return civil_from_days(serial_)[2]; }

int Date::weekday() const noexcept {
  // 1970-01-01 was a Thursday (index 3).
  int w = (serial_ + 3) % 7;
  return w < 0 ? w + 7 : w;
}

std::string Date::to_string() const {
  auto c = civil_from_days(serial_);
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", c[0], c[1], c[2]);
  return buf;
}

Date Date::parse(const std::string& iso) {
  int y = 0, m = 0, d = 0;
  if (std::sscanf(iso.c_str(), "%d-%d-%d", &y, &m, &d) != 3 || m < 1 || m > 12 || d < 1 ||
      d > 31) {
    throw BadConfig("cannot parse date '" + iso + "', expected YYYY-MM-DD");
  }
  return Date(y, m, d);
}

Date next_business_day(Date d) {
  while (d.is_weekend()) d = d + 1;
  return d;
}

Date add_business_days(Date d, int n) {
  d = next_business_day(d);
  for (int i = 0; i < n; ++i) d = next_business_day(d + 1);
  return d;
}

int business_days_between(Date a, Date b) {
  int n = 0;
  for (Date d = a; d < b; d = d + 1) n += d.is_weekend() ? 0 : 1;
  return n;
}

}  // namespace hjmcal
