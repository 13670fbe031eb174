#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "momsos/cli.hpp"

using namespace momsos;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run_cli(const RunConfig& cfg) {
  std::ostringstream out, err;
  int code = run(cfg, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / "momsos_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

std::string write(const std::string& name, const std::string& text) {
  fs::path p = scratch(name);
  std::ofstream(p) << text;
  return p.string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunConfig on(Command c, const std::string& path) {
  RunConfig cfg;
  cfg.command = c;
  cfg.instance_path = path;
  return cfg;
}

const std::string kInterval = "n 1\nminimize x1\nineq 1 - x1^2\n";

}  // namespace

TEST(Cli, SolveReportsValue) {
  auto r = run_cli(on(Command::solve, write("interval.pop", kInterval)));
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("status optimal-to-eps"), std::string::npos);
  std::istringstream in(r.out.substr(r.out.find("mom ")));
  std::string key;
  double v = 0;
  in >> key >> v;
  EXPECT_NEAR(v, -1, 1e-6);
}

TEST(Cli, SolveCsv) {
  auto cfg = on(Command::solve, write("interval.pop", kInterval));
  cfg.csv = true;
  auto r = run_cli(cfg);
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out.rfind("status,t,mom,", 0), 0u);
}

TEST(Cli, CertifyThenVerifyClosedLoop) {
  auto inst = write("interval.pop", kInterval);
  auto cfg = on(Command::certify, inst);
  cfg.output_path = scratch("interval.cert").string();
  auto r = run_cli(cfg);
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("# verification pass"), std::string::npos);

  auto v = on(Command::verify, inst);
  v.certificate_path = cfg.output_path;
  auto rv = run_cli(v);
  EXPECT_EQ(rv.code, 0) << rv.out << rv.err;
  EXPECT_NE(rv.out.find("identity: pass"), std::string::npos);
}

TEST(Cli, TamperedCertificateNamesMonomial) {
  auto inst = write("interval.pop", kInterval);
  auto cfg = on(Command::certify, inst);
  cfg.output_path = scratch("tamper.cert").string();
  ASSERT_EQ(run_cli(cfg).code, 0);

  std::istringstream in(slurp(cfg.output_path));
  std::string text;
  for (std::string line; std::getline(in, line);) {
    if (line.rfind("residual :", 0) == 0) line += " + 1/1024 x1";
    text += line + "\n";
  }
  auto v = on(Command::verify, inst);
  v.certificate_path = write("tampered.cert", text);
  auto r = run_cli(v);
  EXPECT_EQ(r.code, kExitVerification);
  EXPECT_NE(r.out.find("mismatch at [x1]"), std::string::npos) << r.out;
}

TEST(Cli, CertifyIsDeterministic) {
  auto inst = write("disc.pop", "n 2\nminimize x1 + x2\nineq 1 - x1^2 - x2^2\n");
  auto a = on(Command::certify, inst), b = a;
  a.output_path = scratch("det_a.cert").string();
  b.output_path = scratch("det_b.cert").string();
  ASSERT_EQ(run_cli(a).code, 0);
  ASSERT_EQ(run_cli(b).code, 0);
  EXPECT_EQ(slurp(a.output_path), slurp(b.output_path));
}

TEST(Cli, CounterexampleThenAnalyze) {
  RunConfig c;
  c.command = Command::counterexample;
  c.counterexample_n = 3;
  c.add_ball = Rational(1);
  auto r = run_cli(c);
  ASSERT_EQ(r.code, 0);
  auto inst_path = write("squaring3.pop", r.out);
  auto inst = parse_instance(slurp(inst_path));
  EXPECT_EQ(inst.n, 3u);

  auto a = on(Command::analyze, inst_path);
  a.point = squaring_strict_point(3);
  auto ra = run_cli(a);
  EXPECT_EQ(ra.code, 0) << ra.err;
  std::istringstream in(ra.out.substr(ra.out.find("radius ")));
  std::string key, radius;
  in >> key >> radius;
  EXPECT_LE(parse_rational(radius), Rational(1, 16));
  EXPECT_NE(ra.out.find("checked true"), std::string::npos);
}

TEST(Cli, MomentsTable) {
  RunConfig c;
  c.command = Command::moments;
  c.box_center = {Rational(0)};
  c.t = 1;
  auto r = run_cli(c);
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("1/3"), std::string::npos);
}

TEST(Cli, ExitCodes) {
  auto bad = run_cli(on(Command::solve, write("bad.pop", "n 1\nminimize x1 +\n")));
  EXPECT_EQ(bad.code, kExitParse);
  EXPECT_EQ(bad.err.rfind("error: parse: ", 0), 0u);

  auto unbounded = run_cli(on(Command::certify, write("free.pop", "n 1\nminimize x1^2\n")));
  EXPECT_EQ(unbounded.code, kExitInfeasible);
  EXPECT_NE(unbounded.err.find("unbounded"), std::string::npos);

  auto infeasible = run_cli(on(Command::solve, write("empty.pop", "n 1\nminimize x1\nineq 1 - x1^2\nineq -1 - x1^2\n")));
  EXPECT_EQ(infeasible.code, kExitInfeasible) << infeasible.out << infeasible.err;

  auto missing = on(Command::solve, scratch("nope.pop").string());
  EXPECT_EQ(run_cli(missing).code, kExitOther);
}

TEST(Cli, AddBallMakesCertifyPossible) {
  auto cfg = on(Command::certify, write("free2.pop", "n 1\nminimize x1^2 - x1\n"));
  cfg.add_ball = Rational(4);
  auto r = run_cli(cfg);
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("# verification pass"), std::string::npos);
}

TEST(Cli, DefaultOrderCoversConstraints) {
  auto inst = parse_instance(std::string("n 1\nminimize x1\nineq 1 - x1^4\n"));
  EXPECT_EQ(detail::default_order(inst), 2u);
  EXPECT_EQ(detail::default_order(parse_instance(kInterval)), 1u);
}
