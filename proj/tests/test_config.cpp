#include <doctest.h>

#include "vitals/config.hpp"
#include "vitals/errors.hpp"

using namespace vitals;

TEST_CASE("plain keys") {
  auto c = KeyValueConfig::parse("from = 2011-01\nlabor = \"commits\"\n# comment\n\nmerged-only = true\n");
  CHECK(c.get("from") == "2011-01");
  CHECK(c.get("labor") == "commits");
  CHECK(c.get_bool("merged-only") == true);
  CHECK_FALSE(c.contains("to"));
  CHECK(c.get("to") == std::nullopt);
}

TEST_CASE("sections and dotted keys flatten the same way") {
  auto sectioned = KeyValueConfig::parse("[pattern]\ncv_threshold = 0.5\ntrend_threshold = 0.01\n");
  auto dotted = KeyValueConfig::parse("pattern.cv_threshold = 0.5\npattern.trend_threshold = 0.01\n");
  CHECK(sectioned.get_double("pattern.cv_threshold") == 0.5);
  CHECK(sectioned.get_double("pattern.trend_threshold") == 0.01);
  CHECK(sectioned.entries() == dotted.entries());
}

TEST_CASE("arrays become several values") {
  auto c = KeyValueConfig::parse("weights = [0.6, 0.3, 0.1]\n");
  const auto* values = c.find("weights");
  REQUIRE(values);
  CHECK(*values == std::vector<std::string>{"0.6", "0.3", "0.1"});
  CHECK_THROWS_AS(c.get("weights"), InputError);
}

TEST_CASE("typed getters reject malformed values") {
  auto c = KeyValueConfig::parse("n = 12x\nx = abc\nb = maybe\nm = -3\n");
  CHECK_THROWS_AS(c.get_int("n"), InputError);
  CHECK_THROWS_AS(c.get_double("x"), InputError);
  CHECK_THROWS_AS(c.get_bool("b"), InputError);
  CHECK(c.get_int("m") == -3);
}

TEST_CASE("set overrides") {
  auto c = KeyValueConfig::parse("a = 1\n");
  c.set("a", {"2"});
  CHECK(c.get_int("a") == 2);
}

TEST_CASE("missing file") {
  CHECK_THROWS_AS(KeyValueConfig::load("/nonexistent/vitals.conf"), InputError);
}
