#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "qhd/io.hpp"

namespace fs = std::filesystem;

namespace {

const char* kSmall =
    "shock.gamma = 1.5\n"
    "shock.mu = 0.1\n"
    "shock.k = 0.5\n"
    "shock.P_plus = 0.519\n"
    "shock.epsilon = 0.2\n"
    "shock.J_plus = -0.418\n"
    "domain.L = 60\n"
    "domain.n_points = 801\n"
    "spectra.n_xi = 1001\n"
    "eigen.n = 300\n"
    "eigen.L = 40\n";

fs::path scratch(const std::string& name) {
  fs::path d = fs::temp_directory_path() / ("qhd_lab_test_" + std::to_string(::getpid())) / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

fs::path write_cfg(const fs::path& dir, const std::string& text) {
  fs::path f = dir / "run.cfg";
  std::ofstream(f) << text;
  return f;
}

int run(const std::string& args, const std::string& env = "") {
  std::string cmd = env + " " + QHD_LAB_EXE + " " + args + " > /dev/null 2>&1";
  int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& f) { return qhd::read_file(f.string()); }

}  // namespace

TEST(Cli, EssentialOnlyWritesBorders) {
  auto d = scratch("essential");
  auto cfg = write_cfg(d, kSmall);
  EXPECT_EQ(run("essential --config " + cfg.string() + " --output " + (d / "out").string()), 0);
  EXPECT_TRUE(fs::exists(d / "out" / "essential.csv"));
  EXPECT_TRUE(fs::exists(d / "out" / "essential.json"));
  EXPECT_FALSE(fs::exists(d / "out" / "profile.csv"));
  auto j = qhd::json::parse(slurp(d / "out" / "essential.json"));
  EXPECT_TRUE(j.contains("verdict"));
}

TEST(Cli, ArtifactsAreDeterministic) {
  auto d = scratch("determinism");
  auto cfg = write_cfg(d, kSmall);
  for (const char* o : {"a", "b"}) {
    int rc = run("profile --config " + cfg.string() + " --output " + (d / o).string());
    EXPECT_TRUE(rc == 0 || rc == 2);
    rc = run("essential --config " + cfg.string() + " --output " + (d / o).string());
    EXPECT_EQ(rc, 0);
  }
  for (const char* f : {"profile.csv", "profile.json", "essential.csv", "essential.json"}) {
    ASSERT_TRUE(fs::exists(d / "a" / f)) << f;
    EXPECT_EQ(slurp(d / "a" / f), slurp(d / "b" / f)) << f;
  }
}

TEST(Cli, PointStageWritesSortedSpectrum) {
  auto d = scratch("point");
  auto cfg = write_cfg(d, kSmall);
  int rc = run("point --config " + cfg.string() + " --output " + (d / "out").string());
  EXPECT_TRUE(rc == 0 || rc == 2);
  std::ifstream in(d / "out" / "point.csv");
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "re,im,localization,classified_as");
  double prev = 1e300;
  int rows = 0;
  while (std::getline(in, line)) {
    double re = std::stod(line.substr(0, line.find(',')));
    EXPECT_LE(re, prev);
    prev = re;
    ++rows;
  }
  EXPECT_EQ(rows, 2 * (300 - 2));
}

TEST(Cli, ParseErrorWritesErrorJson) {
  auto d = scratch("parse_error");
  auto cfg = write_cfg(d, std::string(kSmall) + "shock.bogus = 3\n");
  EXPECT_EQ(run("all --config " + cfg.string() + " --output " + (d / "out").string()), 1);
  auto j = qhd::json::parse(slurp(d / "out" / "error.json"));
  EXPECT_EQ(j["error"]["kind"], "parse");
  EXPECT_EQ(j["error"]["line"], 12);
}

TEST(Cli, VacuumIterateWritesDomainError) {
  auto d = scratch("domain_error");
  auto cfg = write_cfg(d,
                       "shock.gamma = 1.5\nshock.mu = 1.0\nshock.k = 0.1\nshock.P_minus = 0.719\n"
                       "shock.epsilon = 0.2\nshock.s = 0.47254842772851802\ndomain.L = 2000\ndomain.n_points = 401\n");
  EXPECT_EQ(run("profile --config " + cfg.string() + " --output " + (d / "out").string()), 1);
  auto j = qhd::json::parse(slurp(d / "out" / "error.json"));
  EXPECT_EQ(j["error"]["kind"], "domain");
}

TEST(Cli, UnknownCommandIsRejected) {
  auto d = scratch("usage");
  auto cfg = write_cfg(d, kSmall);
  EXPECT_NE(run("frobnicate --config " + cfg.string()), 0);
}

TEST(Cli, OutputDirectoryPrecedence) {
  auto d = scratch("precedence");
  auto cfg = write_cfg(d, std::string(kSmall) + "output_dir = " + (d / "from_cfg").string() + "\n");
  std::string env = "QHD_LAB_OUTPUT=" + (d / "from_env").string();
  EXPECT_EQ(run("endstates --config " + cfg.string()), 0);
  EXPECT_TRUE(fs::exists(d / "from_cfg" / "endstates.json"));
  EXPECT_EQ(run("endstates --config " + cfg.string(), env), 0);
  EXPECT_TRUE(fs::exists(d / "from_env" / "endstates.json"));
  EXPECT_EQ(run("endstates --config " + cfg.string() + " --output " + (d / "from_flag").string(), env), 0);
  EXPECT_TRUE(fs::exists(d / "from_flag" / "endstates.json"));
}
