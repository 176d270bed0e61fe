#pragma once

// Semidiscrete residuals: flux-differencing and split-form volume terms,
// interface SATs, and high-order volume dissipation, on periodic grids.

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

#include "splitstab/fluxes.hpp"
#include "splitstab/operators.hpp"

namespace splitstab {

enum class Equation { VarAdvection, Burgers, Euler };
enum class SatMode { None, Conservative, Upwind };
enum class DissVariable { Conservative, Entropy };

struct Dissipation {
  int s{0};  // derivative order; 0 disables the term
  double eps{0.0};
  DissVariable variable{DissVariable::Conservative};
  bool enabled() const { return s > 0 && eps > 0.0; }
};

struct SchemeConfig {
  Equation equation{Equation::VarAdvection};
  bool use_split{false};  // split-form with alpha instead of a two-point flux
  FluxKind kind{FluxKind::Central};
  double alpha{1.0};
  SatMode sat{SatMode::Conservative};
  double sigma{0.0};  // upwind SAT strength
  Dissipation diss;

  void validate() const {
    if (!(alpha >= 0.0 && alpha <= 1.0))
      throw std::invalid_argument("SchemeConfig: alpha must lie in [0,1], got " +
                                  std::to_string(alpha));
    if (!(sigma >= 0.0))
      throw std::invalid_argument("SchemeConfig: sigma must be >= 0");
    if (diss.s < 0 || diss.eps < 0.0)
      throw std::invalid_argument("SchemeConfig: dissipation needs s >= 1 and eps >= 0");
    if (diss.eps > 0.0 && diss.s < 1)
      throw std::invalid_argument("SchemeConfig: dissipation needs s >= 1");
  }

  double sat_sigma() const { return sat == SatMode::Upwind ? sigma : 0.0; }
};

struct DefectMatrices {
  Mat theta;
  Mat theta_a;
  double gamma{0.0};
};

// Global block-diagonal difference matrix of a grid.
inline Mat grid_d_matrix(const Grid& g) {
  const int n = g.block_size, nb = g.n_blocks;
  Mat D = Mat::Zero(nb * n, nb * n);
  for (int b = 0; b < nb; ++b) D.block(b * n, b * n, n, n) = g.block_op.d_mat;
  return D;
}

inline Vec sample(const Grid& g, const std::function<double(double)>& f) {
  Vec v(g.n_total());
  for (int i = 0; i < g.n_total(); ++i) v(i) = f(g.x(i));
  return v;
}

namespace detail {

[[noreturn]] inline void rethrow_with_nodes(const std::domain_error& e, int block, int i,
                                            int j) {
  throw std::domain_error(std::string(e.what()) + " (block " + std::to_string(block) +
                          ", nodes " + std::to_string(i) + "," + std::to_string(j) + ")");
}

}  // namespace detail

// Volume term r_i = -2 sum_j D_ij F*(u_i, u_j), assembled per block. Pairs
// where both D entries vanish are skipped, so banded operators stay cheap.
inline Vec flux_diff_volume(const Grid& g, FluxKind kind, const Vec& a, const Vec& u) {
  const int n = g.block_size;
  const Mat& D = g.block_op.d_mat;
  Vec r = Vec::Zero(g.n_total());
  for (int b = 0; b < g.n_blocks; ++b) {
    const int o = b * n;
    for (int i = 0; i < n; ++i) {
      const double dii = D(i, i);
      if (dii != 0.0) {
        r(o + i) -= 2.0 * dii * a(o + i) * u(o + i);  // F*(u,u) = a u
      }
      for (int j = i + 1; j < n; ++j) {
        const double dij = D(i, j), dji = D(j, i);
        if (dij == 0.0 && dji == 0.0) continue;
        double F;
        try {
          F = flux_eval(kind, a(o + i), u(o + i), a(o + j), u(o + j));
        } catch (const std::domain_error& e) {
          detail::rethrow_with_nodes(e, b, i, j);
        }
        r(o + i) -= 2.0 * dij * F;
        r(o + j) -= 2.0 * dji * F;
      }
    }
  }
  return r;
}

// Split-form volume term -[alpha D A + (1-alpha)(A D + diag(Da))] u.
inline Vec split_form_volume(const Grid& g, double alpha, const Vec& a, const Vec& u) {
  const int n = g.block_size;
  const Mat& D = g.block_op.d_mat;
  Vec r(g.n_total());
  for (int b = 0; b < g.n_blocks; ++b) {
    auto seg = [&](const Vec& v) { return v.segment(b * n, n); };
    Vec au = seg(a).cwiseProduct(seg(u));
    Vec da = D * seg(a);
    r.segment(b * n, n) = -(alpha * (D * au) +
                            (1.0 - alpha) * (seg(a).cwiseProduct(D * seg(u)) +
                                             da.cwiseProduct(seg(u))));
  }
  return r;
}

// Interface SATs. For the central/product/split schemes these are flux-form
// penalties against F_hat = central flux + (sigma/2)|a*|(u- - u+); for the
// geometric and logarithmic schemes they act through w = sqrt(a u).
inline Vec sat_terms(const Grid& g, const SchemeConfig& cfg, const Vec& a, const Vec& u) {
  cfg.validate();
  Vec r = Vec::Zero(g.n_total());
  if (cfg.sat == SatMode::None) return r;
  if (g.ref_op.family == Family::Circulant) return r;  // no block boundaries
  if (!g.periodic)
    throw std::invalid_argument("sat_terms: only periodic grids are supported");

  const int n = g.block_size;
  const double sigma = cfg.sat_sigma();
  const bool wform = !cfg.use_split && cfg.equation == Equation::VarAdvection &&
                     (cfg.kind == FluxKind::Geometric || cfg.kind == FluxKind::Logarithmic);

  auto wval = [&](int gidx) {
    const double f = a(gidx) * u(gidx);
    if (!(f > 0.0))
      throw std::domain_error("square-root SAT variable needs a*u > 0, got " +
                              std::to_string(f) + " at node " + std::to_string(gidx));
    return std::sqrt(f);
  };

  // One interface per block boundary; periodic wrap joins the last block to
  // the first. Left state "-" is node n-1 of block b, right state "+" is
  // node 0 of block b+1.
  for (int b = 0; b < g.n_blocks; ++b) {
    const int bl = b, br = (b + 1) % g.n_blocks;
    const int im = g.gid(bl, n - 1), ip = g.gid(br, 0);
    const double hm = g.h_global(im), hp = g.h_global(ip);

    if (cfg.equation == Equation::Burgers) {
      // Flux-form SAT with the alpha-family interface flux
      // F_alpha = (alpha/4)(u-^2 + u+^2) + ((1-alpha)/2) u- u+.
      const double um = u(im), up = u(ip);
      const double fm = 0.5 * um * um, fp = 0.5 * up * up;
      const double ustar = 0.5 * (um + up);
      const double fhat = 0.25 * cfg.alpha * (um * um + up * up) +
                          0.5 * (1.0 - cfg.alpha) * um * up +
                          0.5 * sigma * std::abs(ustar) * (um - up);
      r(im) += (fm - fhat) / hm;
      r(ip) -= (fp - fhat) / hp;
    } else if (wform) {
      const double wm = wval(im), wp = wval(ip);
      const double what = 0.5 * (wm + wp) + 0.5 * sigma * (wm - wp);
      r(im) += 2.0 * wm * (wm - what) / hm;
      r(ip) -= 2.0 * wp * (wp - what) / hp;
    } else {
      const double fm = a(im) * u(im), fp = a(ip) * u(ip);
      const double astar = 0.5 * (a(im) + a(ip));
      const double fhat =
          0.5 * (fm + fp) + 0.5 * sigma * std::abs(astar) * (u(im) - u(ip));
      r(im) += (fm - fhat) / hm;
      r(ip) -= (fp - fhat) / hp;
    }
  }
  return r;
}

// Order-s undivided difference matrix; (n-s) x n for a block, n x n with
// wraparound when periodic.
inline Mat undivided_diff(int n, int s, bool periodic) {
  if (s < 1) throw std::invalid_argument("undivided_diff: s must be >= 1");
  if (n <= s) throw std::invalid_argument("undivided_diff: need n > s");
  std::vector<double> c(s + 1);
  for (int k = 0; k <= s; ++k) {
    double binom = 1.0;
    for (int m = 0; m < k; ++m) binom = binom * (s - m) / (m + 1);
    c[k] = ((s - k) % 2 == 0 ? 1.0 : -1.0) * binom;
  }
  const int rows = periodic ? n : n - s;
  Mat Dt = Mat::Zero(rows, n);
  for (int i = 0; i < rows; ++i)
    for (int k = 0; k <= s; ++k) Dt(i, periodic ? (i + k) % n : i + k) = c[k];
  return Dt;
}

// Volume dissipation -eps H^-1 Dt^T B Dt v with v = u or the entropy variable
// log(u); B is a positive diagonal scaling (identity when absent).
inline Vec volume_dissipation(const Grid& g, int s, double eps, DissVariable variable,
                              const Vec& u, const Vec* b_diag = nullptr) {
  Vec r = Vec::Zero(g.n_total());
  if (eps == 0.0) return r;
  const int n = g.block_size;
  const bool wrap = g.ref_op.family == Family::Circulant;
  Mat Dt = undivided_diff(n, s, wrap);
  for (int b = 0; b < g.n_blocks; ++b) {
    const int o = b * n;
    Vec v(n);
    for (int i = 0; i < n; ++i) {
      if (variable == DissVariable::Entropy) {
        if (!(u(o + i) > 0.0))
          throw std::domain_error("entropy-variable dissipation needs u > 0, got " +
                                  std::to_string(u(o + i)) + " at node " +
                                  std::to_string(o + i));
        v(i) = std::log(u(o + i));
      } else {
        v(i) = u(o + i);
      }
    }
    Vec dv = Dt * v;
    if (b_diag != nullptr) dv = dv.cwiseProduct(b_diag->segment(o, dv.size()));
    Vec contrib = Dt.transpose() * dv;
    for (int i = 0; i < n; ++i) r(o + i) -= eps * contrib(i) / g.h_global(o + i);
  }
  return r;
}

inline Vec flux_diff_residual(const Grid& g, const SchemeConfig& cfg, const Vec& a,
                              const Vec& u) {
  Vec r = flux_diff_volume(g, cfg.kind, a, u) + sat_terms(g, cfg, a, u);
  if (cfg.diss.enabled())
    r += volume_dissipation(g, cfg.diss.s, cfg.diss.eps, cfg.diss.variable, u);
  return r;
}

inline Vec split_form_residual(const Grid& g, const SchemeConfig& cfg, const Vec& a,
                               const Vec& u) {
  Vec r = split_form_volume(g, cfg.alpha, a, u) + sat_terms(g, cfg, a, u);
  if (cfg.diss.enabled())
    r += volume_dissipation(g, cfg.diss.s, cfg.diss.eps, cfg.diss.variable, u);
  return r;
}

// Burgers split form -[alpha D(u^2/2) + (1-alpha) U D u] with its flux-form SAT.
inline Vec burgers_residual(const Grid& g, double alpha, const Vec& u, double sigma) {
  const int n = g.block_size;
  const Mat& D = g.block_op.d_mat;
  Vec r(g.n_total());
  for (int b = 0; b < g.n_blocks; ++b) {
    Vec ub = u.segment(b * n, n);
    r.segment(b * n, n) =
        -(alpha * (D * (0.5 * ub.cwiseProduct(ub))) +
          (1.0 - alpha) * ub.cwiseProduct(D * ub));
  }
  SchemeConfig cfg;
  cfg.equation = Equation::Burgers;
  cfg.alpha = alpha;
  cfg.sat = sigma > 0.0 ? SatMode::Upwind : SatMode::Conservative;
  cfg.sigma = sigma;
  return r + sat_terms(g, cfg, Vec::Ones(g.n_total()), u);
}

// gamma = ||diag(Da) + (2 alpha - 1) Theta||_H with Theta = DA - AD - diag(Da).
inline std::pair<double, DefectMatrices> compute_gamma(const Grid& g, double alpha,
                                                       const Vec& a) {
  const Mat D = grid_d_matrix(g);
  const Mat A = a.asDiagonal();
  const Vec da = D * a;
  DefectMatrices m;
  m.theta = D * A - A * D - Mat(da.asDiagonal());
  m.theta_a = D * A * A - A * A * D - 2.0 * A * Mat(da.asDiagonal());

  Mat M = Mat(da.asDiagonal()) + (2.0 * alpha - 1.0) * m.theta;
  Vec hs = g.h_global.cwiseSqrt();
  Mat Ms = hs.asDiagonal() * M * hs.cwiseInverse().asDiagonal();
  Eigen::JacobiSVD<Mat> svd(Ms);
  m.gamma = svd.singularValues()(0);
  return {m.gamma, m};
}

// Entropy functions and their variables, per flux kind. Central/product use
// the quadratic entropy; geometric and logarithmic use the nonlinear ones.
inline double scheme_entropy(FluxKind kind, const Grid& g, const Vec& a, const Vec& u) {
  double S = 0.0;
  for (int i = 0; i < g.n_total(); ++i) {
    switch (kind) {
      case FluxKind::Central:
      case FluxKind::Product:
        S += 0.5 * g.h_global(i) * u(i) * u(i);
        break;
      case FluxKind::Geometric:
        S += -2.0 * g.h_global(i) * std::sqrt(u(i) / a(i));
        break;
      case FluxKind::Logarithmic:
        S += g.h_global(i) * (u(i) * std::log(a(i) * u(i)) - u(i));
        break;
    }
  }
  return S;
}

inline Vec entropy_variable(FluxKind kind, const Vec& a, const Vec& u) {
  Vec w(u.size());
  for (int i = 0; i < u.size(); ++i) {
    switch (kind) {
      case FluxKind::Central:
      case FluxKind::Product:
        w(i) = u(i);
        break;
      case FluxKind::Geometric:
        w(i) = -1.0 / std::sqrt(a(i) * u(i));
        break;
      case FluxKind::Logarithmic:
        w(i) = std::log(a(i) * u(i));
        break;
    }
  }
  return w;
}

// Scheme dispatcher used by the time integrators.
inline Vec residual(const Grid& g, const SchemeConfig& cfg, const Vec& a, const Vec& u) {
  cfg.validate();
  switch (cfg.equation) {
    case Equation::VarAdvection:
      return cfg.use_split ? split_form_residual(g, cfg, a, u)
                           : flux_diff_residual(g, cfg, a, u);
    case Equation::Burgers: {
      Vec r = burgers_residual(g, cfg.alpha, u, cfg.sat_sigma());
      if (cfg.diss.enabled())
        r += volume_dissipation(g, cfg.diss.s, cfg.diss.eps, cfg.diss.variable, u);
      return r;
    }
    case Equation::Euler:
      throw std::invalid_argument("residual: Euler systems live in euler1d");
  }
  throw std::logic_error("unreachable equation");
}

}  // namespace splitstab
