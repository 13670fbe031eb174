#include <CLI11.hpp>

#include <iostream>

#include "momsos/cli.hpp"

using namespace momsos;

namespace {

Rational rational_option(const std::string& text, const char* name) {
  auto q = try_parse_rational(text);
  if (!q) throw CLI::ValidationError(name, "not a rational number: " + text);
  return *q;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Moment-SOS relaxations with exact rational certificates"};
  app.require_subcommand(1);

  RunConfig cfg;
  unsigned t = 0;
  std::string round_eps, add_ball, point, box_r = "1", box_z;
  double volume = 0;

  auto common = [&](CLI::App* sub, bool needs_instance) {
    if (needs_instance) sub->add_option("instance", cfg.instance_path, "POP instance file")->required();
    sub->add_option("-t,--order", t, "relaxation order t (default: smallest that fits)");
    sub->add_option("--seed", cfg.seed, "seed for sampling");
    sub->add_option("-o,--output", cfg.output_path, "output file");
    sub->add_flag("--csv", cfg.csv, "CSV reports");
    sub->add_flag("-v,--verbose", cfg.verbose, "solver log on stderr");
    sub->add_option("--add-ball", add_ball, "prepend R2 - |x|^2 >= 0");
  };

  auto* solve = app.add_subcommand("solve", "solve the moment relaxation");
  common(solve, true);
  solve->add_option("--eps", cfg.eps, "target duality gap");

  auto* cert = app.add_subcommand("certify", "solve, round and verify an exact lower bound");
  common(cert, true);
  cert->add_option("--eps", cfg.eps, "target duality gap");
  cert->add_option("--round-eps", round_eps, "rounding grid (rational, default 1/1048576)");

  auto* verify = app.add_subcommand("verify", "exact check of a certificate file");
  common(verify, true);
  verify->add_option("--cert", cfg.certificate_path, "certificate file")->required();

  auto* analyze = app.add_subcommand("analyze", "conditioning and inner-ball report");
  common(analyze, true);
  analyze->add_option("--point", point, "strictly feasible point, comma-separated rationals");
  analyze->add_option("--volume", volume, "volume of the feasible set");
  analyze->add_flag("--convex", cfg.convex, "feasible set is convex");

  auto* moments = app.add_subcommand("moments", "moment table of the uniform box measure");
  common(moments, false);
  moments->add_option("--r", box_r, "box half-width (rational)");
  moments->add_option("--z", box_z, "box center, comma-separated rationals")->required();

  auto* counter = app.add_subcommand("counterexample", "repeated-squaring instance");
  common(counter, false);
  counter->add_option("--n", cfg.counterexample_n, "dimension")->required()->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
    if (t > 0) cfg.t = t;
    if (!round_eps.empty()) cfg.round_eps = rational_option(round_eps, "--round-eps");
    if (!add_ball.empty()) cfg.add_ball = rational_option(add_ball, "--add-ball");
    if (!box_r.empty()) cfg.box_radius = rational_option(box_r, "--r");
    if (!box_z.empty()) cfg.box_center = parse_rational_list(box_z);
    if (!point.empty()) cfg.point = parse_rational_list(point);
    if (volume > 0) cfg.volume = volume;
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const Error& e) {
    std::cerr << "error: " << to_string(e.kind()) << ": " << e.what() << "\n";
    return exit_code_for(e.kind());
  }

  if (*solve) cfg.command = Command::solve;
  else if (*cert) cfg.command = Command::certify;
  else if (*verify) cfg.command = Command::verify;
  else if (*analyze) cfg.command = Command::analyze;
  else if (*moments) cfg.command = Command::moments;
  else cfg.command = Command::counterexample;

  return run(cfg, std::cout, std::cerr);
}
