#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"

using namespace slitcarpet;
using slitcarpet::cli::cli_dispatch;

namespace {

struct Outcome {
  int code = -1;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  args.insert(args.begin(), "slitcarpet");
  std::ostringstream out;
  std::ostringstream err;
  Outcome r;
  r.code = cli_dispatch(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

bool has_line(const std::string& text, const std::string& line) {
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) {
    if (l == line) return true;
  }
  return false;
}

}  // namespace

TEST(Cli, DistanceAcrossTheSlit) {
  const Outcome r = run({"dist", "--level", "1", "--p", "0.5,0.5,L", "--q", "0.5,0.5,R"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("# slitcarpet-report v1\n", 0), 0U);
  EXPECT_TRUE(has_line(r.out, "d=0.5")) << r.out;
  EXPECT_TRUE(has_line(r.out, "status=ok"));
}

TEST(Cli, ConductanceOfTheSquare) {
  const Outcome r = run({"conductance", "--level", "0", "--dir", "LR"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("conductance=1.0 "), std::string::npos) << r.out;
}

TEST(Cli, GroupTable) {
  const Outcome r = run({"group", "--ambient", "DS2", "--table"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(has_line(r.out, "ambient=DS2 order=8 abelian=true involutive=true")) << r.out;
  int rows = 0;
  std::istringstream in(r.out);
  for (std::string l; std::getline(in, l);) rows += l.rfind("row=", 0) == 0 ? 1 : 0;
  EXPECT_EQ(rows, 8);
  const Outcome s2 = run({"group", "--ambient", "S2", "--table"});
  EXPECT_NE(s2.out.find("order=4"), std::string::npos);
}

TEST(Cli, UsageErrorsNameTheFlag) {
  const Outcome unknown = run({"conductance", "--levle", "1"});
  EXPECT_EQ(unknown.code, 2);
  EXPECT_NE((unknown.out + unknown.err).find("--levle"), std::string::npos);
  const Outcome bad_point = run({"dist", "--level", "1", "--p", "0.5,0.5,X", "--q", "0,0"});
  EXPECT_EQ(bad_point.code, 2);
  EXPECT_NE(bad_point.err.find("--p"), std::string::npos);
  EXPECT_EQ(run({"conductance", "--dir", "UP"}).code, 2);
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"dist", "--level", "1", "--p", "0.5,0.5", "--q", "0,0"}).code, 2);  // needs a side
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(Cli, AssertionFailuresExitWithOne) {
  const Outcome r = run({"group", "--validate", "1 0 1/2 0"});
  EXPECT_EQ(r.code, 1);
  EXPECT_TRUE(has_line(r.out, "status=fail"));
  EXPECT_EQ(run({"group", "--validate", "2 0 0 0 1/2 0"}).code, 0);
  EXPECT_EQ(run({"scan-ahlfors", "--level", "1", "--samples", "5", "--tol", "1.5"}).code, 1);
}

TEST(Cli, ReportsAreDeterministic) {
  const std::vector<std::string> args{"scan-ahlfors", "--level", "1", "--samples", "10", "--seed", "9"};
  EXPECT_EQ(run(args).out, run(args).out);
  const std::vector<std::string> verify{"verify", "verttovert", "--level", "2", "--random", "4", "--seed", "3"};
  const Outcome a = run(verify);
  EXPECT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, run(verify).out);
  EXPECT_NE(a.out, run({"verify", "verttovert", "--level", "2", "--random", "4", "--seed", "4"}).out);
}

TEST(Cli, EveryCommandRuns) {
  const std::vector<std::vector<std::string>> commands{
      {"build", "--level", "2"},
      {"dist", "--level", "2", "--mode", "limit", "--p", "0.1,0.5", "--q", "0.9,0.5"},
      {"dist", "--level", "1", "--mode", "double", "--p", "0.5,0.5,L,F", "--q", "0.5,0.5,R,B", "--path"},
      {"ball", "--level", "1", "--p", "0.25,0.5", "--radius", "0.125"},
      {"scan-porosity", "--level", "2", "--samples", "5"},
      {"check-incl", "--level", "2", "--p", "0.5,0.5,L", "--radius", "0.3"},
      {"check-cover", "--level", "1", "--p", "0.5,0.5", "--radius", "0.2"},
      {"modulus", "--level", "0", "--grid", "3", "--family", "tb"},
      {"group", "--a", "h0", "--b", "101 0 0 0"},
      {"group", "--a", "h0", "--inverse"},
      {"shear", "--p", "3/4,1/4,F", "--function", "2 0 0 0 1/2 0"},
      {"verify", "cohopf", "--level", "3"},
      {"verify", "bilip", "--level", "1", "--pairs", "50"},
      {"render", "--level", "1"},
  };
  for (const auto& c : commands) {
    const Outcome r = run(c);
    EXPECT_EQ(r.code, 0) << c.front() << ": " << r.err << r.out;
  }
  EXPECT_TRUE(has_line(run({"shear", "--p", "3/4,1/4,F", "--function", "2 0 0 0 1/2 0"}).out, "image=0.75,0.75,F"));
}

TEST(Cli, RenderToFile) {
  const auto path = std::filesystem::temp_directory_path() / "slitcarpet_cli_render.svg";
  const Outcome r = run({"render", "--level", "2", "--out", path.string(), "--check", "128", "--p", "0.5,0.5,L", "--q",
                     "0.5,0.5,R"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("injective=true"), std::string::npos);
  std::ifstream in(path);
  std::stringstream svg;
  svg << in.rdbuf();
  EXPECT_NE(svg.str().find("<svg"), std::string::npos);
  EXPECT_NE(svg.str().find("<polyline"), std::string::npos);
  std::filesystem::remove(path);
  EXPECT_EQ(run({"render", "--level", "1", "--eta", "0.5"}).code, 2);
}
