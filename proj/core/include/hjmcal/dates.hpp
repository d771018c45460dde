#pragma once

#include <string>

namespace hjmcal {

// Calendar date stored as a serial day count (days since 1970-01-01, may be negative).
// Calendar conventions used throughout:
//   - delivery windows are half-open [Ts, Te) on calendar days;
//   - observation grids use business days (weekdays; no holiday calendar);
//   - day counts: ACT/365.25 for delivery weighting, ACT/365 for option maturities.
class Date {
 public:
  Date() : serial_(0) {}
  explicit Date(int serial) : serial_(serial) {}
  Date(int year, int month, int day);

  int serial() const noexcept { return serial_; }
  int year() const;
  int month() const;
  int day() const;

  // 0 = Monday .. 6 = Sunday.
  int weekday() const noexcept;
  bool is_weekend() const noexcept { return weekday() >= 5; }

  Date operator+(int days) const { return Date(serial_ + days); }
  Date operator-(int days) const { return Date(serial_ - days); }
  int operator-(Date o) const { return serial_ - o.serial_; }
  auto operator<=>(const Date&) const = default;

  std::string to_string() const;  // ISO YYYY-MM-DD
  static Date parse(const std::string& iso);

 private:
  int serial_;
};

// Next business day at or after d.
Date next_business_day(Date d);
// Advance by n business days (n >= 0) starting from the next business day at or after d.
Date add_business_days(Date d, int n);
// Count of business days in [a, b).
int business_days_between(Date a, Date b);

inline double year_frac_act365(Date a, Date b) { return (b - a) / 365.0; }
inline double year_frac_act36525(Date a, Date b) { return (b - a) / 365.25; }

}  // namespace hjmcal
