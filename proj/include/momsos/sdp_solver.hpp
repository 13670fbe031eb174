#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <limits>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "momsos/error.hpp"
#include "momsos/moment_sdp.hpp"

namespace momsos {

/// Symmetric sparse matrix entry in one block: the matrix holds `value` at
/// both (row, col) and (col, row).
struct SymEntry {
  std::size_t block;
  std::size_t row;
  std::size_t col;
  double value;
};

/// Floating-point standard-form data: min <C, X> s.t. <A_k, X> = b_k, X PSD.
struct SdpData {
  std::vector<std::size_t> block_dims;
  std::vector<std::vector<SymEntry>> a;
  Eigen::VectorXd b;
  std::vector<SymEntry> c;
};

namespace detail {
inline std::vector<SymEntry> to_sym_entries(const std::vector<SdpTerm>& terms) {
  std::map<Position, Rational> merged;
  for (const auto& t : terms) merged[t.pos] += t.coef;
  std::vector<SymEntry> out;
  for (const auto& [p, c] : merged) {
    if (c == 0) continue;
    Rational v = p.row == p.col ? c : Rational(c / 2);
    out.push_back({p.block, p.row, p.col, to_double(v)});
  }
  return out;
}
}  // namespace detail

/// Nearest-double conversion of the exact data.
inline SdpData to_sdp_data(const StandardFormSDP& sdp) {
  SdpData d;
  d.block_dims = sdp.block_dims;
  d.b.resize(static_cast<Eigen::Index>(sdp.constraints.size()));
  for (std::size_t k = 0; k < sdp.constraints.size(); ++k) {
    d.a.push_back(detail::to_sym_entries(sdp.constraints[k].terms));
    d.b(static_cast<Eigen::Index>(k)) = to_double(sdp.constraints[k].rhs);
  }
  d.c = detail::to_sym_entries(sdp.cost);
  return d;
}

using BlockMatrix = std::vector<Eigen::MatrixXd>;

struct SolverConfig {
  double eps = 1e-8;               // target |primal - dual|
  int max_iter = 200;
  double feasibility_tol = 1e-9;   // max-norm of primal and dual residuals
  std::optional<BlockMatrix> initial_point;
  bool verbose = false;
};

enum class SolveStatus { optimal, infeasible, max_iter };

inline std::string_view to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "optimal-to-eps";
    case SolveStatus::infeasible: return "infeasible-detected";
    case SolveStatus::max_iter: return "max-iter";
  }
  return "?";
}

struct SDPSolution {
  BlockMatrix primal_blocks;
  BlockMatrix dual_slack;  // Z = C - sum_k y_k A_k, the Gram matrices
  Eigen::VectorXd dual_y;
  double primal_value = 0;
  double dual_value = 0;
  double primal_residual = 0;
  double dual_residual = 0;
  double min_primal_eig = 0;
  int iterations = 0;
  SolveStatus status = SolveStatus::max_iter;

  double gap() const { return primal_value - dual_value; }
};

namespace detail {

inline BlockMatrix zeros(const std::vector<std::size_t>& dims) {
  BlockMatrix m;
  for (auto d : dims) m.push_back(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d)));
  return m;
}

inline void add_entries(BlockMatrix& m, const std::vector<SymEntry>& entries, double scale) {
  for (const auto& e : entries) {
    auto r = static_cast<Eigen::Index>(e.row), c = static_cast<Eigen::Index>(e.col);
    m[e.block](r, c) += scale * e.value;
    if (e.row != e.col) m[e.block](c, r) += scale * e.value;
  }
}

inline double inner(const std::vector<SymEntry>& entries, const BlockMatrix& x) {
  double v = 0;
  for (const auto& e : entries) {
    auto r = static_cast<Eigen::Index>(e.row), c = static_cast<Eigen::Index>(e.col);
    v += e.row == e.col ? e.value * x[e.block](r, c) : e.value * (x[e.block](r, c) + x[e.block](c, r));
  }
  return v;
}

inline double inner(const BlockMatrix& a, const BlockMatrix& b) {
  double v = 0;
  for (std::size_t i = 0; i < a.size(); ++i) v += (a[i].array() * b[i].array()).sum();
  return v;
}

inline Eigen::VectorXd apply_a(const SdpData& d, const BlockMatrix& x) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(d.a.size()));
  for (std::size_t k = 0; k < d.a.size(); ++k) v(static_cast<Eigen::Index>(k)) = inner(d.a[k], x);
  return v;
}

inline BlockMatrix apply_at(const SdpData& d, const Eigen::VectorXd& y) {
  BlockMatrix m = zeros(d.block_dims);
  for (std::size_t k = 0; k < d.a.size(); ++k) add_entries(m, d.a[k], y(static_cast<Eigen::Index>(k)));
  return m;
}

inline BlockMatrix cost_matrix(const SdpData& d) {
  BlockMatrix m = zeros(d.block_dims);
  add_entries(m, d.c, 1.0);
  return m;
}

inline double max_abs(const BlockMatrix& m) {
  double v = 0;
  for (const auto& b : m)
    if (b.size() > 0) v = std::max(v, b.cwiseAbs().maxCoeff());
  return v;
}

/// Largest alpha with x + alpha * dx PSD (infinity if unbounded), x PD.
inline double max_step(const BlockMatrix& x, const BlockMatrix& dx) {
  double alpha = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i].size() == 0) continue;
    Eigen::LLT<Eigen::MatrixXd> llt(x[i]);
    Eigen::MatrixXd l = llt.matrixL();
    Eigen::MatrixXd linv = l.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(l.rows(), l.cols()));
    Eigen::MatrixXd s = linv * dx[i] * linv.transpose();
    s = 0.5 * (s + s.transpose());
    double lmin = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(s, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
    if (lmin < 0) alpha = std::min(alpha, -1.0 / lmin);
  }
  return alpha;
}

inline Eigen::MatrixXd sym_power(const Eigen::MatrixXd& m, double p) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  Eigen::VectorXd ev = es.eigenvalues().cwiseMax(1e-300).array().pow(p);
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

inline double min_eig(const BlockMatrix& m) {
  double v = std::numeric_limits<double>::infinity();
  for (const auto& b : m)
    if (b.size() > 0)
      v = std::min(v, Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(b, Eigen::EigenvaluesOnly).eigenvalues().minCoeff());
  return v;
}

}  // namespace detail

/// Infeasible-start primal-dual path-following method with Nesterov-Todd
/// scaling and a Mehrotra-style adaptive centering parameter.
inline SDPSolution solve_sdp(const SdpData& d, const SolverConfig& cfg) {
  using namespace detail;
  if (cfg.eps <= 0 || cfg.feasibility_tol <= 0) throw Error(ErrorKind::invalid_argument, "solver tolerances must be positive");
  const std::size_t m = d.a.size();
  const auto mi = static_cast<Eigen::Index>(m);
  std::size_t total = 0;
  for (auto s : d.block_dims) total += s;

  const BlockMatrix cmat = cost_matrix(d);
  double norm_c = 0, max_a = 0, xi0 = 10;
  for (const auto& blk : cmat) norm_c = std::max(norm_c, blk.norm());
  for (std::size_t k = 0; k < m; ++k) {
    double na = 0;
    for (const auto& e : d.a[k]) na += e.value * e.value * (e.row == e.col ? 1 : 2);
    na = std::sqrt(na);
    max_a = std::max(max_a, na);
    xi0 = std::max(xi0, (1 + std::abs(d.b(static_cast<Eigen::Index>(k)))) / (1 + na));
  }
  const double root_n = std::sqrt(static_cast<double>(total));
  const double xi = std::max(xi0, root_n);
  const double eta = std::max({10.0, root_n, max_a, norm_c});

  BlockMatrix x = zeros(d.block_dims), z = zeros(d.block_dims);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i].setIdentity();
    x[i] *= xi;
    z[i].setIdentity();
    z[i] *= eta;
  }
  if (cfg.initial_point) {
    const auto& x0 = *cfg.initial_point;
    if (x0.size() != x.size()) throw Error(ErrorKind::dimension, "initial point has the wrong number of blocks");
    double damp = 0.1 * (1 + max_abs(x0));
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x0[i].rows() != x[i].rows()) throw Error(ErrorKind::dimension, "initial point block size mismatch");
      x[i] = x0[i] + damp * Eigen::MatrixXd::Identity(x[i].rows(), x[i].cols());
    }
  }
  Eigen::VectorXd y = Eigen::VectorXd::Zero(mi);

  const double b_scale = 1 + (m ? d.b.cwiseAbs().maxCoeff() : 0.0);
  SDPSolution sol;
  struct Snapshot {
    double merit = std::numeric_limits<double>::infinity();
    int iter = -1;
    BlockMatrix x, z;
    Eigen::VectorXd y;
    double pobj = 0, dobj = 0, pres = 0, dres = 0;
  } best;
  for (int iter = 0;; ++iter) {
    Eigen::VectorXd rp = d.b - apply_a(d, x);
    BlockMatrix aty = apply_at(d, y);
    BlockMatrix rd = cmat;
    for (std::size_t i = 0; i < rd.size(); ++i) rd[i] -= z[i] + aty[i];
    double pobj = inner(cmat, x);
    double dobj = d.b.dot(y);
    double pres = m ? rp.cwiseAbs().maxCoeff() : 0.0;
    double dres = max_abs(rd);
    double mu = inner(x, z) / static_cast<double>(total);

    sol.iterations = iter;
    sol.primal_value = pobj;
    sol.dual_value = dobj;
    sol.primal_residual = pres;
    sol.dual_residual = dres;
    if (cfg.verbose)
      std::fprintf(stderr, "iter %3d  pobj % .10e  dobj % .10e  gap % .3e  pres %.3e  dres %.3e  mu %.3e\n", iter, pobj,
                   dobj, pobj - dobj, pres, dres, mu);

    if (std::abs(pobj - dobj) <= cfg.eps && pres <= cfg.feasibility_tol && dres <= cfg.feasibility_tol) {
      sol.status = SolveStatus::optimal;
      break;
    }
    double merit = std::max({std::abs(pobj - dobj) / cfg.eps, pres / cfg.feasibility_tol, dres / cfg.feasibility_tol});
    if (std::isfinite(merit) && merit < best.merit) best = {merit, iter, x, z, y, pobj, dobj, pres, dres};
    // Numerical breakdown near the optimum: fall back to the best iterate.
    bool breakdown = !std::isfinite(mu) || mu <= 0 || (best.merit < 1e6 && merit > 1e3 * best.merit);
    if (breakdown && best.iter >= 0) {
      x = best.x;
      z = best.z;
      y = best.y;
      sol.iterations = best.iter;
      sol.primal_value = best.pobj;
      sol.dual_value = best.dobj;
      sol.primal_residual = best.pres;
      sol.dual_residual = best.dres;
      sol.status = SolveStatus::max_iter;
      if (cfg.verbose) std::fprintf(stderr, "numerical breakdown; returning iterate %d\n", best.iter);
      break;
    }
    if (max_abs(x) > 1e12 || (m && y.cwiseAbs().maxCoeff() > 1e12 * b_scale)) {
      sol.status = SolveStatus::infeasible;
      break;
    }
    if (iter >= cfg.max_iter) {
      sol.status = SolveStatus::max_iter;
      break;
    }

    // Nesterov-Todd scaling point W with W Z W = X.
    BlockMatrix w(x.size()), zinv(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i].size() == 0) continue;
      Eigen::MatrixXd xh = sym_power(x[i], 0.5);
      Eigen::MatrixXd s = xh * z[i] * xh;
      s = 0.5 * (s + s.transpose());
      w[i] = xh * sym_power(s, -0.5) * xh;
      w[i] = 0.5 * (w[i] + w[i].transpose());
      zinv[i] = z[i].llt().solve(Eigen::MatrixXd::Identity(z[i].rows(), z[i].cols()));
    }

    // Schur complement M_kl = <A_k, W A_l W>.
    Eigen::MatrixXd schur(mi, mi);
    for (std::size_t l = 0; l < m; ++l) {
      BlockMatrix al = zeros(d.block_dims);
      add_entries(al, d.a[l], 1.0);
      BlockMatrix wal(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) {
        bool touched = false;
        for (const auto& e : d.a[l])
          if (e.block == i) touched = true;
        wal[i] = touched ? Eigen::MatrixXd(w[i] * al[i] * w[i]) : Eigen::MatrixXd::Zero(x[i].rows(), x[i].cols());
      }
      for (std::size_t k = 0; k < m; ++k) schur(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(l)) = inner(d.a[k], wal);
    }
    schur = 0.5 * (schur + schur.transpose());
    Eigen::LLT<Eigen::MatrixXd> llt(schur);
    Eigen::LDLT<Eigen::MatrixXd> ldlt;
    bool use_llt = llt.info() == Eigen::Success;
    if (!use_llt) {
      double reg = 1e-13 * std::max(1.0, schur.diagonal().cwiseAbs().maxCoeff());
      ldlt.compute(schur + reg * Eigen::MatrixXd::Identity(mi, mi));
    }
    auto solve_schur = [&](const Eigen::VectorXd& rhs) -> Eigen::VectorXd {
      Eigen::VectorXd v = use_llt ? Eigen::VectorXd(llt.solve(rhs)) : Eigen::VectorXd(ldlt.solve(rhs));
      for (int pass = 0; pass < 2; ++pass) {
        Eigen::VectorXd res = rhs - schur * v;
        v += use_llt ? Eigen::VectorXd(llt.solve(res)) : Eigen::VectorXd(ldlt.solve(res));
      }
      return v;
    };

    BlockMatrix wrdw(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) wrdw[i] = w[i] * rd[i] * w[i];

    auto direction = [&](double sigma, BlockMatrix& dx, BlockMatrix& dz, Eigen::VectorXd& dy) {
      BlockMatrix r(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) r[i] = sigma * mu * zinv[i] - x[i] - wrdw[i];
      dy = solve_schur(rp - apply_a(d, r));
      BlockMatrix atdy = apply_at(d, dy);
      dx.resize(x.size());
      dz.resize(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) {
        dz[i] = rd[i] - atdy[i];
        dx[i] = r[i] + w[i] * atdy[i] * w[i];
        dx[i] = 0.5 * (dx[i] + dx[i].transpose());
        dz[i] = 0.5 * (dz[i] + dz[i].transpose());
      }
    };

    BlockMatrix dx, dz;
    Eigen::VectorXd dy;
    direction(0.0, dx, dz, dy);
    double ap = std::min(1.0, max_step(x, dx));
    double ad = std::min(1.0, max_step(z, dz));
    BlockMatrix xa = x, za = z;
    for (std::size_t i = 0; i < x.size(); ++i) {
      xa[i] += ap * dx[i];
      za[i] += ad * dz[i];
    }
    double mu_aff = inner(xa, za) / static_cast<double>(total);
    double sigma = std::clamp(std::pow(std::max(mu_aff, 0.0) / mu, 3.0), 0.0, 1.0);
    if (pres > 1e-3 * b_scale || dres > 1e-3 * (1 + norm_c)) sigma = std::max(sigma, 0.1);
    // Gap already small enough: only restore feasibility.
    if (std::abs(pobj - dobj) <= 0.5 * cfg.eps) sigma = 1.0;

    direction(sigma, dx, dz, dy);
    const double tau = mu < 1e-6 ? 0.98 : 0.9;
    ap = std::min(1.0, tau * max_step(x, dx));
    ad = std::min(1.0, tau * max_step(z, dz));
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] += ap * dx[i];
      z[i] += ad * dz[i];
      x[i] = 0.5 * (x[i] + x[i].transpose());
      z[i] = 0.5 * (z[i] + z[i].transpose());
    }
    y += ad * dy;
  }

  sol.primal_blocks = x;
  sol.dual_y = y;
  sol.dual_slack = z;
  sol.min_primal_eig = min_eig(x);
  if (sol.status == SolveStatus::optimal && sol.min_primal_eig < -cfg.feasibility_tol) sol.status = SolveStatus::max_iter;
  return sol;
}

inline SDPSolution solve_sdp(const StandardFormSDP& sdp, const SolverConfig& cfg) {
  return solve_sdp(to_sdp_data(sdp), cfg);
}

/// Z = C - sum_k y_k A_k recomputed from the data, free of the iterate's
/// dual residual.
inline BlockMatrix dual_slack_from_y(const SdpData& d, const Eigen::VectorXd& y) {
  BlockMatrix z = detail::cost_matrix(d);
  BlockMatrix aty = detail::apply_at(d, y);
  for (std::size_t i = 0; i < z.size(); ++i) z[i] -= aty[i];
  return z;
}

}  // namespace momsos
