#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "momsos/certificate.hpp"
#include "momsos/conditioning.hpp"
#include "momsos/error.hpp"
#include "momsos/geometry.hpp"
#include "momsos/measures.hpp"
#include "momsos/moment_sdp.hpp"
#include "momsos/pop.hpp"
#include "momsos/sdp_solver.hpp"

namespace momsos {

enum class Command { solve, certify, verify, analyze, moments, counterexample };

struct RunConfig {
  Command command = Command::solve;
  std::string instance_path;
  std::optional<unsigned> t;
  double eps = 1e-8;
  Rational round_eps = Rational(1, 1 << 20);
  std::optional<Rational> add_ball;
  std::uint64_t seed = 1;
  std::string output_path;
  bool csv = false;
  bool verbose = false;
  // verify
  std::string certificate_path;
  // analyze
  std::optional<std::vector<Rational>> point;
  std::optional<double> volume;
  bool convex = false;
  // moments
  Rational box_radius = 1;
  std::vector<Rational> box_center;
  // counterexample
  std::size_t counterexample_n = 0;
};

enum ExitCode : int {
  kExitOk = 0,
  kExitOther = 1,
  kExitParse = 2,
  kExitInfeasible = 3,
  kExitVerification = 4,
  kExitCapacity = 5,
};

inline int exit_code_for(ErrorKind k) {
  switch (k) {
    case ErrorKind::parse: return kExitParse;
    case ErrorKind::infeasible:
    case ErrorKind::unbounded: return kExitInfeasible;
    case ErrorKind::verification: return kExitVerification;
    case ErrorKind::capacity: return kExitCapacity;
    default: return kExitOther;
  }
}

/// Comma-separated rationals, e.g. "1/2,0,-3".
inline std::vector<Rational> parse_rational_list(const std::string& text) {
  std::vector<Rational> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    out.push_back(parse_rational(item));
  }
  if (out.empty()) throw Error(ErrorKind::parse, "empty rational list");
  return out;
}

namespace detail {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::invalid_argument, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::invalid_argument, "cannot write '" + path + "'");
  out << text;
}

inline POPInstance load_instance(const RunConfig& cfg) {
  if (cfg.instance_path.empty()) throw Error(ErrorKind::invalid_argument, "no instance file given");
  POPInstance inst;
  try {
    inst = parse_instance(read_file(cfg.instance_path));
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::parse) throw;
    throw Error(ErrorKind::parse, cfg.instance_path + ": " + e.what());
  }
  if (cfg.add_ball) inst = with_ball(std::move(inst), *cfg.add_ball);
  return inst;
}

/// Smallest order at which every polynomial of the instance fits.
inline unsigned default_order(const POPInstance& inst) {
  unsigned d = std::max(1u, inst.objective.degree());
  for (const auto& g : inst.inequalities) d = std::max(d, g.degree());
  for (const auto& h : inst.equalities) d = std::max(d, h.degree());
  return (d + 1) / 2;
}

inline unsigned order_for(const RunConfig& cfg, const POPInstance& inst, std::ostream& err) {
  unsigned t = cfg.t ? *cfg.t : default_order(inst);
  if (t < 1) throw Error(ErrorKind::invalid_argument, "t must be >= 1");
  std::size_t vars = binomial(inst.n + 2 * t, 2 * t, static_cast<std::size_t>(-1) / 4);
  if (vars > 5000) err << "warning: " << vars << " moment variables; the solve may be slow\n";
  return t;
}

inline SolverConfig solver_config(const RunConfig& cfg) {
  if (!(cfg.eps > 0)) throw Error(ErrorKind::invalid_argument, "eps must be positive");
  SolverConfig sc;
  sc.eps = cfg.eps;
  sc.verbose = cfg.verbose;
  return sc;
}

inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline int run_solve(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  POPInstance inst = load_instance(cfg);
  unsigned t = order_for(cfg, inst, err);
  auto sdp = build_mom_sdp(inst, t);
  auto sol = solve_sdp(sdp, solver_config(cfg));
  if (cfg.csv) {
    out << "status,t,mom,primal,dual,gap,primal_residual,iterations\n";
    out << to_string(sol.status) << "," << t << "," << fmt(sol.primal_value) << "," << fmt(sol.primal_value) << ","
        << fmt(sol.dual_value) << "," << fmt(sol.gap()) << "," << fmt(sol.primal_residual) << "," << sol.iterations
        << "\n";
  } else {
    out << "status " << to_string(sol.status) << "\n";
    out << "t " << t << "\n";
    out << "mom " << fmt(sol.primal_value) << "\n";
    out << "dual " << fmt(sol.dual_value) << "\n";
    out << "gap " << fmt(sol.gap()) << "\n";
    out << "primal_residual " << fmt(sol.primal_residual) << "\n";
    out << "iterations " << sol.iterations << "\n";
  }
  if (sol.status == SolveStatus::infeasible) throw Error(ErrorKind::infeasible, "relaxation detected as infeasible");
  if (sol.status == SolveStatus::max_iter) {
    err << "error: " << to_string(ErrorKind::invalid_argument) << ": solver stopped before reaching eps\n";
    return kExitOther;
  }
  return kExitOk;
}

inline int run_certify(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  POPInstance inst = load_instance(cfg);
  if (!detect_explicit_bound(inst).explicitly_bounded)
    throw Error(ErrorKind::unbounded, "instance has no R^2 - |x|^2 constraint; pass --add-ball R2");
  unsigned t = order_for(cfg, inst, err);
  if (cfg.round_eps <= 0) throw Error(ErrorKind::invalid_argument, "round-eps must be positive");
  auto res = certify(inst, t, solver_config(cfg), cfg.round_eps);
  const auto& rc = res.rounded;

  std::string summary;
  summary += "# solver " + std::string(to_string(res.solution.status)) + " mom " + fmt(res.solution.primal_value) + "\n";
  summary += "# adjusted bound " + to_string(rc.adjusted_bound) + " (~" + fmt(to_double(rc.adjusted_bound)) + ")\n";
  summary += "# |E|_1 " + to_string(rc.l1_residual) + " (~" + fmt(to_double(rc.l1_residual)) + ")\n";
  summary += std::string("# verification ") + (res.verification.passed() ? "pass" : "FAIL") + "\n";
  if (res.solution.status != SolveStatus::optimal)
    summary += "# note: solver did not reach eps; the adjusted bound is still exact but may be loose\n";
  std::string cert = format_certificate(rc);

  if (cfg.csv) {
    out << "status,t,mom,lambda,l1_residual,adjusted_bound,verified\n";
    out << to_string(res.solution.status) << "," << t << "," << fmt(res.solution.primal_value) << ","
        << to_string(rc.base.lambda) << "," << to_string(rc.l1_residual) << "," << to_string(rc.adjusted_bound)
        << "," << (res.verification.passed() ? "true" : "false") << "\n";
  } else {
    out << summary;
  }
  if (!cfg.output_path.empty())
    write_file(cfg.output_path, summary + cert);
  else if (!cfg.csv)
    out << cert;
  if (!res.verification.passed()) {
    err << format_verification(res.verification);
    return kExitVerification;
  }
  return kExitOk;
}

inline int run_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  POPInstance inst = load_instance(cfg);
  if (cfg.certificate_path.empty()) throw Error(ErrorKind::invalid_argument, "no certificate file given (--cert)");
  RoundedCertificate rc;
  try {
    rc = parse_certificate(read_file(cfg.certificate_path), inst);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::parse) throw;
    throw Error(ErrorKind::parse, cfg.certificate_path + ": " + e.what());
  }
  auto rep = verify_certificate(rc, inst);
  if (cfg.csv) {
    out << "identity,degrees,membership,certified_bound\n";
    out << (rep.identity_ok ? "pass" : "fail") << "," << (rep.degrees_ok ? "pass" : "fail") << ","
        << (rep.membership_ok ? "pass" : "fail") << "," << to_string(rep.certified_bound) << "\n";
  } else {
    out << format_verification(rep);
  }
  if (!rep.passed()) {
    err << "error: " << to_string(ErrorKind::verification) << ": certificate does not verify\n";
    return kExitVerification;
  }
  return kExitOk;
}

inline int run_analyze(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  POPInstance inst = load_instance(cfg);
  unsigned t = order_for(cfg, inst, err);
  BoundReport bound = detect_explicit_bound(inst);
  out << "n " << inst.n << "\n";
  out << "bit-complexity " << bit_complexity(inst) << "\n";
  out << "explicitly-bounded " << (bound.explicitly_bounded ? "true" : "false");
  if (bound.explicitly_bounded) out << " R^2 " << to_string(bound.r_squared);
  out << "\n";

  if (cfg.volume) {
    if (!bound.explicitly_bounded) throw Error(ErrorKind::unbounded, "volume radius needs an explicit ball constraint");
    out << "volume-radius " << fmt(ball_radius_from_volume(inst, *cfg.volume)) << "\n";
    if (cfg.convex)
      out << "john-radius " << fmt(john_ball_radius(*cfg.volume, inst.n, to_double(bound.radius))) << "\n";
  }
  if (!cfg.point) {
    out << "conditioning skipped (no --point)\n";
    return kExitOk;
  }
  BallCertificate ball = inner_ball_from_strict_point(inst, *cfg.point, true, cfg.seed);
  out << format_ball(ball);
  // A cube of half-width r / sqrt(n) fits inside the ball; a power of two
  // keeps the moment bit complexity small.
  Rational limit = ball.radius / sqrt_upper(Rational(inst.n));
  Rational half(1);
  while (half > limit) half /= 2;
  while (2 * half <= limit) half *= 2;
  out << "box half-width " << to_string(half) << " (~" << fmt(to_double(half)) << ")\n";
  MomentFunctional L = box_functional(half, ball.center, 2 * t);
  ConditioningReport rep = check_conditioning(L, inst, t);
  out << format_conditioning(rep, cfg.csv);
  if (rep.violations > 0) {
    err << "error: " << to_string(ErrorKind::verification) << ": " << rep.violations << " eigenvalue bound violations\n";
    return kExitVerification;
  }
  return kExitOk;
}

inline int run_moments(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.box_center.empty()) throw Error(ErrorKind::invalid_argument, "moments needs --z (box center)");
  unsigned t = cfg.t.value_or(1);
  (void)err;
  auto L = box_functional(cfg.box_radius, cfg.box_center, 2 * t);
  std::string text = format_moments(L);
  if (cfg.output_path.empty())
    out << text;
  else
    write_file(cfg.output_path, text);
  return kExitOk;
}

inline int run_counterexample(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  (void)err;
  POPInstance inst = gen_squaring_counterexample(cfg.counterexample_n);
  if (cfg.add_ball) inst = with_ball(std::move(inst), *cfg.add_ball);
  std::string text = "# x1 <= " + to_string(squaring_threshold(cfg.counterexample_n)) + " on the feasible set\n";
  text += format_instance(inst);
  if (cfg.output_path.empty())
    out << text;
  else
    write_file(cfg.output_path, text);
  return kExitOk;
}

}  // namespace detail

/// Runs one command. Reports go to `out`, diagnostics and errors to `err`
/// as `error: <class>: <message>`.
inline int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    switch (cfg.command) {
      case Command::solve: return detail::run_solve(cfg, out, err);
      case Command::certify: return detail::run_certify(cfg, out, err);
      case Command::verify: return detail::run_verify(cfg, out, err);
      case Command::analyze: return detail::run_analyze(cfg, out, err);
      case Command::moments: return detail::run_moments(cfg, out, err);
      case Command::counterexample: return detail::run_counterexample(cfg, out, err);
    }
  } catch (const Error& e) {
    err << "error: " << to_string(e.kind()) << ": " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: internal: " << e.what() << "\n";
    return kExitOther;
  }
  return kExitOther;
}

}  // namespace momsos
