#pragma once

// Linearized Jacobians of the semidiscrete residuals: analytic assembly for
// every scheme, weighted symmetric parts, and a finite-difference oracle.

#include <Eigen/Dense>
#include <functional>
#include <stdexcept>

#include "splitstab/semidisc.hpp"

namespace splitstab {

enum class Provenance { Analytic, FiniteDifference };
enum class Weighting { Euclidean, Hnorm, AHnorm };

struct JacobianMatrix {
  Mat matrix;
  Vec baseflow;  // empty when the operator is baseflow-independent
  SchemeConfig scheme;
  Provenance provenance{Provenance::Analytic};
};

// Central-difference Jacobian of an arbitrary residual; the step for column i
// is step_scale * max(|u_i|, 1).
inline Mat jac_fd(const std::function<Vec(const Vec&)>& residual, const Vec& u,
                  double step_scale = 1e-7) {
  const int n = static_cast<int>(u.size());
  Mat J(n, n);
  Vec up = u, um = u;
  for (int i = 0; i < n; ++i) {
    const double step = step_scale * std::max(std::abs(u(i)), 1.0);
    up(i) = u(i) + step;
    um(i) = u(i) - step;
    J.col(i) = (residual(up) - residual(um)) / (2.0 * step);
    up(i) = u(i);
    um(i) = u(i);
  }
  return J;
}

namespace detail {

// Linearized interface penalties, matching the branches of sat_terms row for
// row. The Burgers sigma > 0 branch has no analytic form here; callers fall
// back to jac_fd for it.
inline Mat sat_linearization(const Grid& g, const SchemeConfig& cfg, const Vec& a,
                             const Vec& u) {
  const int N = g.n_total();
  Mat J = Mat::Zero(N, N);
  if (cfg.sat == SatMode::None) return J;
  if (g.ref_op.family == Family::Circulant) return J;
  if (!g.periodic)
    throw std::invalid_argument("sat_linearization: only periodic grids are supported");

  const int n = g.block_size;
  const double sigma = cfg.sat_sigma();
  const bool wform = !cfg.use_split && cfg.equation == Equation::VarAdvection &&
                     (cfg.kind == FluxKind::Geometric || cfg.kind == FluxKind::Logarithmic);

  for (int b = 0; b < g.n_blocks; ++b) {
    const int im = g.gid(b, n - 1), ip = g.gid((b + 1) % g.n_blocks, 0);
    const double hm = g.h_global(im), hp = g.h_global(ip);

    if (cfg.equation == Equation::Burgers) {
      if (sigma != 0.0)
        throw std::invalid_argument(
            "sat_linearization: Burgers penalties with sigma > 0 need the "
            "finite-difference path");
      const double um = u(im), up = u(ip);
      const double dfh_dm = 0.5 * cfg.alpha * um + 0.5 * (1.0 - cfg.alpha) * up;
      const double dfh_dp = 0.5 * cfg.alpha * up + 0.5 * (1.0 - cfg.alpha) * um;
      J(im, im) += (um - dfh_dm) / hm;
      J(im, ip) += -dfh_dp / hm;
      J(ip, ip) -= (up - dfh_dp) / hp;
      J(ip, im) -= -dfh_dm / hp;
    } else if (wform) {
      const double fm = a(im) * u(im), fp = a(ip) * u(ip);
      if (!(fm > 0.0) || !(fp > 0.0))
        throw std::domain_error("sat_linearization: square-root penalties need a*u > 0");
      const double wm = std::sqrt(fm), wp = std::sqrt(fp);
      // Rows in w: +(1-sigma) wm (wm - wp)/hm and +(1+sigma) wp (wm - wp)/hp,
      // chained through dw/du = a/(2w).
      const double cm = a(im) / (2.0 * wm), cp = a(ip) / (2.0 * wp);
      J(im, im) += (1.0 - sigma) * (2.0 * wm - wp) / hm * cm;
      J(im, ip) += -(1.0 - sigma) * wm / hm * cp;
      J(ip, im) += (1.0 + sigma) * wp / hp * cm;
      J(ip, ip) += (1.0 + sigma) * (wm - 2.0 * wp) / hp * cp;
    } else {
      const double am = a(im), ap = a(ip);
      const double astar = std::abs(0.5 * (am + ap));
      J(im, im) += (am - 0.5 * am - 0.5 * sigma * astar) / hm;
      J(im, ip) += (-0.5 * ap + 0.5 * sigma * astar) / hm;
      J(ip, ip) -= (ap - 0.5 * ap + 0.5 * sigma * astar) / hp;
      J(ip, im) -= (-0.5 * am - 0.5 * sigma * astar) / hp;
    }
  }
  return J;
}

// Linearization of volume_dissipation about u.
inline Mat dissipation_linearization(const Grid& g, const Dissipation& diss,
                                     const Vec& u) {
  const int N = g.n_total();
  Mat J = Mat::Zero(N, N);
  if (!diss.enabled()) return J;
  const int n = g.block_size;
  Mat Dt = undivided_diff(n, diss.s, g.ref_op.family == Family::Circulant);
  Mat block = Dt.transpose() * Dt;
  for (int b = 0; b < g.n_blocks; ++b) {
    const int o = b * n;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double dv = diss.variable == DissVariable::Entropy ? 1.0 / u(o + j) : 1.0;
        J(o + i, o + j) -= diss.eps * block(i, j) * dv / g.h_global(o + i);
      }
  }
  return J;
}

}  // namespace detail

// Split-form operator -alpha D A - (1-alpha)(A D + diag(Da)) with its SAT and
// dissipation contributions; linear, so baseflow-independent.
inline JacobianMatrix jac_split_form(const Grid& g, const SchemeConfig& cfg,
                                     const Vec& a) {
  cfg.validate();
  if (cfg.diss.enabled() && cfg.diss.variable == DissVariable::Entropy)
    throw std::invalid_argument(
        "jac_split_form: entropy-variable dissipation is baseflow-dependent; use "
        "jac_flux_diff");
  const int n = g.block_size, N = g.n_total();
  Mat J = Mat::Zero(N, N);
  const Mat& D = g.block_op.d_mat;
  for (int b = 0; b < g.n_blocks; ++b) {
    const int o = b * n;
    Vec ab = a.segment(o, n);
    Vec da = D * ab;
    J.block(o, o, n, n) = -cfg.alpha * D * ab.asDiagonal().toDenseMatrix() -
                          (1.0 - cfg.alpha) * (ab.asDiagonal().toDenseMatrix() * D +
                                               Mat(da.asDiagonal()));
  }
  SchemeConfig satcfg = cfg;
  satcfg.use_split = true;  // forces the flux-form penalty branch
  J += detail::sat_linearization(g, satcfg, a, Vec::Zero(N));
  if (cfg.diss.enabled()) J += detail::dissipation_linearization(g, cfg.diss, Vec());

  JacobianMatrix out;
  out.matrix = std::move(J);
  out.scheme = cfg;
  return out;
}

// Flux-differencing Jacobian about baseflow u: Hadamard assembly from the
// two-point flux partials, plus penalty and dissipation linearizations.
inline JacobianMatrix jac_flux_diff(const Grid& g, const SchemeConfig& cfg, const Vec& a,
                                    const Vec& u) {
  cfg.validate();
  const int n = g.block_size, N = g.n_total();
  Mat J = Mat::Zero(N, N);
  const Mat& D = g.block_op.d_mat;
  for (int b = 0; b < g.n_blocks; ++b) {
    const int o = b * n;
    for (int i = 0; i < n; ++i) {
      const double dii = D(i, i);
      if (dii != 0.0) J(o + i, o + i) -= 2.0 * dii * a(o + i);
      for (int j = i + 1; j < n; ++j) {
        const double dij = D(i, j), dji = D(j, i);
        if (dij == 0.0 && dji == 0.0) continue;
        FluxPartials p;
        try {
          p = flux_partials(cfg.kind, a(o + i), u(o + i), a(o + j), u(o + j));
        } catch (const std::domain_error& e) {
          detail::rethrow_with_nodes(e, b, i, j);
        }
        J(o + i, o + i) -= 2.0 * dij * p.d1;
        J(o + i, o + j) -= 2.0 * dij * p.d2;
        J(o + j, o + i) -= 2.0 * dji * p.d1;
        J(o + j, o + j) -= 2.0 * dji * p.d2;
      }
    }
  }
  J += detail::sat_linearization(g, cfg, a, u);
  if (cfg.diss.enabled()) J += detail::dissipation_linearization(g, cfg.diss, u);

  JacobianMatrix out;
  out.matrix = std::move(J);
  out.baseflow = u;
  out.scheme = cfg;
  return out;
}

// Burgers split-form Jacobian about u. The analytic penalty linearization
// covers sigma = 0 only; sigma > 0 is differenced numerically.
inline JacobianMatrix jac_burgers(const Grid& g, double alpha, const Vec& u,
                                  double sigma = 0.0) {
  JacobianMatrix out;
  out.baseflow = u;
  out.scheme.equation = Equation::Burgers;
  out.scheme.alpha = alpha;
  out.scheme.sigma = sigma;
  out.scheme.sat = sigma > 0.0 ? SatMode::Upwind : SatMode::Conservative;

  if (sigma > 0.0) {
    out.matrix = jac_fd([&](const Vec& v) { return burgers_residual(g, alpha, v, sigma); }, u);
    out.provenance = Provenance::FiniteDifference;
    return out;
  }

  const int n = g.block_size, N = g.n_total();
  Mat J = Mat::Zero(N, N);
  const Mat& D = g.block_op.d_mat;
  for (int b = 0; b < g.n_blocks; ++b) {
    const int o = b * n;
    Vec ub = u.segment(o, n);
    Vec du = D * ub;
    J.block(o, o, n, n) = -alpha * D * ub.asDiagonal().toDenseMatrix() -
                          (1.0 - alpha) * (ub.asDiagonal().toDenseMatrix() * D +
                                           Mat(du.asDiagonal()));
  }
  J += detail::sat_linearization(g, out.scheme, Vec::Ones(N), u);
  out.matrix = std::move(J);
  return out;
}

// Weighted symmetric parts: Euclidean (J + J^T)/2, Hnorm (J^T H + H J)/2, and
// AHnorm (J^T A H + A H J)/2.
inline Mat jac_sym(const Mat& J, Weighting w, const Grid& g, const Vec& a = Vec()) {
  switch (w) {
    case Weighting::Euclidean:
      return 0.5 * (J + J.transpose());
    case Weighting::Hnorm: {
      Mat HJ = g.h_global.asDiagonal() * J;
      return 0.5 * (HJ.transpose() + HJ);
    }
    case Weighting::AHnorm: {
      if (a.size() != J.rows())
        throw std::invalid_argument("jac_sym: AHnorm weighting needs the coefficient vector");
      Mat WJ = a.cwiseProduct(g.h_global).asDiagonal() * J;
      return 0.5 * (WJ.transpose() + WJ);
    }
  }
  throw std::logic_error("unreachable weighting");
}

}  // namespace splitstab
