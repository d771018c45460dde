#include "hjmcal/config.hpp"

#include <gtest/gtest.h>

#include "hjmcal/errors.hpp"

using namespace hjmcal;

TEST(Config, ParseSectionsAndTypes) {
  Config c = Config::from_string(
      "top = 1\n"
      "[step1]\n"
      "lambda = 0.5\n"
      "restarts = 100\n"
      "# comment\n"
      "smooth = true\n"
      "[curve]\n"
      "spans = 30, 60, 91\n");
  EXPECT_EQ(c.get_int("top"), 1);
  EXPECT_DOUBLE_EQ(c.get_double("step1.lambda"), 0.5);
  EXPECT_EQ(c.get_int("step1.restarts"), 100);
  EXPECT_TRUE(c.get_bool("step1.smooth", false));
  EXPECT_FALSE(c.get_bool("step1.absent", false));
  auto spans = c.get_list("curve.spans", {});
  ASSERT_EQ(spans.size(), 3u);
  EXPECT_DOUBLE_EQ(spans[1], 60.0);
}

TEST(Config, Defaults) {
  Config c;
  EXPECT_EQ(c.get_str("k", "fallback"), "fallback");
  EXPECT_DOUBLE_EQ(c.get_double("k", 2.5), 2.5);
  EXPECT_THROW(c.get_str("k"), BadConfig);
}

TEST(Config, Errors) {
  EXPECT_THROW(Config::from_string("novalue\n"), BadConfig);
  EXPECT_THROW(Config::from_string("[open\n"), BadConfig);
  Config c = Config::from_string("x = abc\n");
  EXPECT_THROW(c.get_double("x"), BadConfig);
  EXPECT_THROW(c.get_int("x"), BadConfig);
  EXPECT_THROW(c.get_bool("x", true), BadConfig);
}

TEST(Config, SerializeRoundTrip) {
  Config c;
  c.set("step1.lambda", "0.99");
  c.set("step1.restarts", "10");
  c.set("curve.spans", "30,60");
  Config back = Config::from_string(c.serialize());
  EXPECT_EQ(back.entries(), c.entries());
}
