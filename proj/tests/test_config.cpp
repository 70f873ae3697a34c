#include <gtest/gtest.h>

#include <cmath>

#include "cases.hpp"
#include "qhd/config.hpp"
#include "qhd/io.hpp"

using namespace qhd;

namespace {

const char* kMinimal =
    "shock.gamma = 1.5\n"
    "shock.mu = 0.1\n"
    "shock.k = 0.5\n"
    "shock.P_minus = 0.719\n"
    "shock.epsilon = 0.2\n"
    "shock.s = 0.47\n";

int error_line(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ParseError& e) {
    return e.line;
  }
  return -1;
}

}  // namespace

TEST(Config, MinimalUsesDefaults) {
  auto c = parse_config(kMinimal);
  EXPECT_EQ(c.shock.gamma, 1.5);
  EXPECT_EQ(c.shock.P_minus, 0.719);
  EXPECT_EQ(c.shock.s, 0.47);
  EXPECT_FALSE(c.L.has_value());
  EXPECT_DOUBLE_EQ(c.domain_L(), 200.0);
  EXPECT_EQ(c.n_points, 4001);
  EXPECT_EQ(c.xi_max, 20.0);
  EXPECT_EQ(c.n_xi, 4001);
  EXPECT_EQ(c.eigen_n, 2000);
  EXPECT_EQ(c.localization_threshold, 0.05);
  EXPECT_EQ(c.tol_margin, 1e-6);
  EXPECT_EQ(c.tail_floor, 1e-13);
  EXPECT_TRUE(c.sweep.empty());
  EXPECT_EQ(c.output_dir, "qhd_out");
}

TEST(Config, CommentsAndWhitespace) {
  auto c = parse_config(std::string("# header\n\n") + kMinimal + "  domain.L = 50   # trailing\r\n");
  EXPECT_EQ(c.L.value(), 50.0);
}

TEST(Config, AmplitudeAtLeastPressureReportsLine) {
  std::string t = kMinimal;
  t.replace(t.find("shock.epsilon = 0.2"), 19, "shock.epsilon = 0.8");
  EXPECT_EQ(error_line(t), 5);
}

TEST(Config, ErrorsCarryLineNumbers) {
  std::string base = kMinimal;
  EXPECT_EQ(error_line(base + "domain.bogus = 1\n"), 7);
  EXPECT_EQ(error_line(base + "domain.L = 1.0x\n"), 7);
  EXPECT_EQ(error_line(base + "domain.n_points = 40.5\n"), 7);
  EXPECT_EQ(error_line(base + "shock.mu = 0.2\n"), 7);
  EXPECT_EQ(error_line(base + "no equals sign\n"), 7);
  EXPECT_EQ(error_line(base + "shock.J_plus = -0.4\n"), 7);
  EXPECT_EQ(error_line(base + "sweep.epsilon = 0.1, 0.9\n"), 7);
  std::string missing = base.substr(0, base.find("shock.mu"));
  EXPECT_EQ(error_line(missing), 0);
}

TEST(Config, ParseErrorMessageHasLinePrefix) {
  try {
    parse_config(std::string(kMinimal) + "nope = 1\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(std::string(e.what()).rfind("line 7: ", 0), 0u) << e.what();
  }
}

TEST(Config, SweepList) {
  auto c = parse_config(std::string(kMinimal) + "sweep.epsilon = 0.05, 0.1,0.2\n");
  ASSERT_EQ(c.sweep.size(), 3u);
  EXPECT_EQ(c.sweep[0], 0.05);
  EXPECT_EQ(c.sweep[1], 0.1);
  EXPECT_EQ(c.sweep[2], 0.2);
}

TEST(Config, ShippedReferenceConfig) {
  auto c = parse_config(read_file(std::string(QHD_CONFIG_DIR) + "/reference.cfg"));
  EXPECT_NEAR(c.shock.P_minus, cases::kPminus, 1e-15);
  EXPECT_EQ(c.shock.epsilon, 0.2);
  EXPECT_NEAR(c.shock.s, 0.47254842772851802, 1e-14);
  auto e = lax_end_states(c.shock);
  EXPECT_NEAR(e.J_plus, -0.418, 1e-14);
  EXPECT_NEAR(e.A, 0.6632526339911008, 1e-14);
}

TEST(Config, AllShippedConfigsParse) {
  for (const char* f : {"reference.cfg", "reference_family_sweep.cfg", "reference_family_eps005.cfg", "zero_mode.cfg",
                        "viscous_sweep.cfg"}) {
    EXPECT_NO_THROW(parse_config(read_file(std::string(QHD_CONFIG_DIR) + "/" + f))) << f;
  }
}
