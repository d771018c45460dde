#include "hjmcal/dates.hpp"

#include <gtest/gtest.h>

#include "hjmcal/errors.hpp"

using hjmcal::Date;

TEST(Dates, CivilRoundTrip) {
  for (int y : {1999, 2000, 2020, 2024, 2025, 2100}) {
    for (int m = 1; m <= 12; ++m) {
      Date d(y, m, 15);
      EXPECT_EQ(d.year(), y);
      EXPECT_EQ(d.month(), m);
      EXPECT_EQ(d.day(), 15);
    }
  }
  EXPECT_EQ(Date(1970, 1, 1).serial(), 0);
  EXPECT_EQ(Date(2024, 2, 29) + 1, Date(2024, 3, 1));   // leap year
  EXPECT_EQ(Date(2100, 2, 28) + 1, Date(2100, 3, 1));   // century non-leap
}

TEST(Dates, Weekday) {
  EXPECT_EQ(Date(2024, 1, 1).weekday(), 0);  // Monday
  EXPECT_EQ(Date(2024, 1, 6).weekday(), 5);  // Saturday
  EXPECT_TRUE(Date(2024, 1, 7).is_weekend());
  EXPECT_FALSE(Date(2024, 1, 8).is_weekend());
}

TEST(Dates, ParseFormat) {
  EXPECT_EQ(Date::parse("2024-10-01").to_string(), "2024-10-01");
  EXPECT_EQ(Date::parse("1999-01-31"), Date(1999, 1, 31));
  EXPECT_THROW(Date::parse("not-a-date"), hjmcal::BadConfig);
  EXPECT_THROW(Date::parse("2024-13-01"), hjmcal::BadConfig);
}

TEST(Dates, BusinessDays) {
  // 2024-01-05 is a Friday.
  EXPECT_EQ(hjmcal::next_business_day(Date(2024, 1, 6)), Date(2024, 1, 8));
  EXPECT_EQ(hjmcal::add_business_days(Date(2024, 1, 5), 1), Date(2024, 1, 8));
  EXPECT_EQ(hjmcal::add_business_days(Date(2024, 1, 5), 5), Date(2024, 1, 12));
  EXPECT_EQ(hjmcal::business_days_between(Date(2024, 1, 1), Date(2024, 1, 8)), 5);
}

TEST(Dates, YearFractions) {
  Date a(2024, 1, 1), b(2025, 1, 1);
  EXPECT_NEAR(hjmcal::year_frac_act365(a, b), 366.0 / 365.0, 1e-15);
  EXPECT_NEAR(hjmcal::year_frac_act36525(a, b), 366.0 / 365.25, 1e-15);
}
