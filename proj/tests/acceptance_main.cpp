// Acceptance gate: twelve end-to-end checks with pinned tolerances, one
// pass/fail line each. Exit status is nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "splitstab/experiments.hpp"

using namespace splitstab;

namespace {

struct Check {
  bool ok{false};
  std::string detail;
};

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, sizeof buf, f, args);
  va_end(args);
  return std::string(buf);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

bool within_rel(double x, double target, double tol) {
  return std::abs(x - target) <= tol * std::abs(target);
}

// Uniform draw in [lo, hi), deterministic in the seed.
double uniform(double lo, double hi, std::uint64_t seed) {
  const double z = static_cast<double>(splitmix64(seed) >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * z;
}

Vec random_state(int n, double lo, double hi, std::uint64_t base) {
  Vec u(n);
  for (int i = 0; i < n; ++i)
    u(i) = uniform(lo, hi, base * 2654435761ull + static_cast<std::uint64_t>(i));
  return u;
}

std::function<double(double)> skewed_coefficient() {
  Scenario sc;
  sc.coefficient = "skewed-sinusoid";
  return coefficient_fn(sc);
}

std::function<double(double)> gaussian_profile() {
  Scenario sc;  // init defaults to the Gaussian pulse
  return initial_fn(sc);
}

// 1. Growth-rate goldens of the nondissipative product scheme (split form,
//    alpha = 0, skewed-sinusoid coefficient, one block) and its damped
//    variants, all four spectra inside a ten-second budget.
Check criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  auto af = skewed_coefficient();
  SchemeConfig cfg;
  cfg.use_split = true;
  cfg.alpha = 0.0;

  Grid gb = build_grid({"csbp", 1, 40, 1, 0.0, 1.0});
  Vec ab = sample(gb, af);
  const double r_csbp = eig(jac_split_form(gb, cfg, ab).matrix).re_lambda_max;

  SchemeConfig up = cfg;
  up.sat = SatMode::Upwind;
  up.sigma = 1.0;
  const double r_upwind = eig(jac_split_form(gb, up, ab).matrix).re_lambda_max;

  Grid gp = build_grid({"circulant", 2, 39, 1, 0.0, 1.0});
  Vec ap = sample(gp, af);
  const double r_circ = eig(jac_split_form(gp, cfg, ap).matrix).re_lambda_max;

  SchemeConfig dd = cfg;
  dd.diss = {2, 1.0 / 40.0, DissVariable::Conservative};
  const double r_diss = eig(jac_split_form(gp, dd, ap).matrix).re_lambda_max;

  const double el = seconds_since(t0);
  Check c;
  c.ok = within_rel(r_csbp, 3.1, 0.05) && within_rel(r_upwind, 0.17, 0.10) &&
         within_rel(r_circ, 0.072, 0.10) && r_diss <= 1e-10 && el < 10.0;
  c.detail = fmt("re_max csbp %.4g (3.1/5%%), upwind %.4g (0.17/10%%), "
                 "circulant %.4g (0.072/10%%), dissipative %.2g (<=1e-10), %.2f s",
                 r_csbp, r_upwind, r_circ, r_diss, el);
  return c;
}

// 2. Interior growth-rate decay of the product scheme under mesh refinement
//    with the order-8 circulant operator.
Check criterion2() {
  auto af = skewed_coefficient();
  SchemeConfig cfg;
  cfg.use_split = true;
  cfg.alpha = 0.0;
  const int nodes[3] = {39, 99, 399};
  const double target[3] = {6.1e-2, 1.2e-2, 8.2e-4};
  double got[3];
  bool ok = true;
  for (int k = 0; k < 3; ++k) {
    Grid g = build_grid({"circulant", 8, nodes[k], 1, 0.0, 1.0});
    Vec a = sample(g, af);
    got[k] = eig(jac_split_form(g, cfg, a).matrix).re_lambda_max;
    ok = ok && within_rel(got[k], target[k], 0.10);
  }
  Check c;
  c.ok = ok;
  c.detail = fmt("re_max %.3g / %.3g / %.3g vs 6.1e-2 / 1.2e-2 / 8.2e-4 "
                 "(10%% each) at n = 39 / 99 / 399",
                 got[0], got[1], got[2]);
  return c;
}

// 3. The conservative form (split alpha = 1) conserves the aH energy along an
//    adaptive high-order run while the plain H energy oscillates with the
//    exact traversal period T = 2/sqrt(5) of the sinusoid coefficient.
Check criterion3() {
  Grid g = build_grid({"circulant", 4, 64, 1, 0.0, 1.0});
  Scenario ssin;
  ssin.coefficient = "sinusoid";
  Vec a = sample(g, coefficient_fn(ssin));
  Vec u0 = sample(g, gaussian_profile());
  SchemeConfig cfg;
  cfg.use_split = true;
  cfg.alpha = 1.0;
  Residual f = [&](double, const Vec& u) { return residual(g, cfg, a, u); };
  const double T = 2.0 / std::sqrt(5.0);

  ChannelSpec cs;
  cs.grid = &g;
  cs.a = a;
  cs.kind = FluxKind::Central;
  cs.exact = [u0](double) { return u0; };  // recurrence channel ||u(t) - u0||_H
  Trajectory tr = rk8_adaptive(f, u0, 0.0, 1.25 * T, 1e-12, 1e-12, cs);

  const double e_ah0 = tr.energy_ah.front();
  const double e_h0 = tr.energy_h.front();
  double dev_ah = 0.0, osc = 0.0;
  for (std::size_t k = 0; k < tr.times.size(); ++k) {
    dev_ah = std::max(dev_ah, std::abs(tr.energy_ah[k] / e_ah0 - 1.0));
    osc = std::max(osc, std::abs(tr.energy_h[k] / e_h0 - 1.0));
  }

  // Recurrence time: vertex of the parabola through the three samples of
  // ||u(t) - u0||_H^2 bracketing its minimum on [0.8 T, 1.2 T].
  int kmin = -1;
  for (int k = 0; k < static_cast<int>(tr.times.size()); ++k) {
    if (tr.times[k] < 0.8 * T || tr.times[k] > 1.2 * T) continue;
    if (kmin < 0 || tr.err_h[k] < tr.err_h[kmin]) kmin = k;
  }
  double t_star = std::numeric_limits<double>::quiet_NaN();
  if (kmin > 0 && kmin + 1 < static_cast<int>(tr.times.size())) {
    const double tm = tr.times[kmin - 1], tk = tr.times[kmin],
                 tp = tr.times[kmin + 1];
    const double ym = tr.err_h[kmin - 1] * tr.err_h[kmin - 1],
                 yk = tr.err_h[kmin] * tr.err_h[kmin],
                 yp = tr.err_h[kmin + 1] * tr.err_h[kmin + 1];
    const double num = (tk - tm) * (tk - tm) * (yk - yp) -
                       (tk - tp) * (tk - tp) * (yk - ym);
    const double den =
        (tk - tm) * (yk - yp) - (tk - tp) * (yk - ym);
    if (den != 0.0) t_star = tk - 0.5 * num / den;
  }

  Check c;
  c.ok = !tr.crashed && dev_ah <= 1e-9 && osc >= 1e-3 &&
         std::isfinite(t_star) && std::abs(t_star - T) <= 0.01 * T;
  c.detail = fmt("aH-energy drift %.2g (<=1e-9), H-energy swing %.3g (>=1e-3), "
                 "recurrence at t = %.6f vs T = %.6f (1%%), %zu samples",
                 dev_ah, osc, t_star, T, tr.times.size());
  return c;
}

// 4. Instantaneous entropy-rate identities on random positive states.  The
//    square-root-variable interface coupling conserves the geometric entropy
//    for arbitrary interface data; the logarithmic identity is a volume
//    property, so multiblock interfaces enter that check only with continuous
//    data (equal values on the duplicated nodes).
Check criterion4() {
  Grid per = build_grid({"circulant", 8, 39, 1, 0.0, 1.0});
  Grid blk = build_grid({"csbp", 2, 17, 2, 0.0, 1.0});
  auto af = skewed_coefficient();
  auto rate = [&](const Grid& g, FluxKind kind, const Vec& a, const Vec& u) {
    SchemeConfig cfg;
    cfg.kind = kind;
    Vec r = residual(g, cfg, a, u);
    Vec w = entropy_variable(kind, a, u);
    return std::abs(w.dot(g.h_global.cwiseProduct(r)));
  };
  // Random periodic positive profile; nodes sharing a coordinate share a value.
  auto smooth_state = [&](const Grid& g, unsigned long long seed) {
    Vec u(g.n_total());
    for (int i = 0; i < g.n_total(); ++i) {
      double v = 1.5;
      for (int k = 1; k <= 3; ++k) {
        double ck = uniform(-0.25, 0.25, seed * 6 + k);
        double pk = uniform(0.0, 6.28318530717958648, seed * 6 + 3 + k);
        v += ck * std::sin(6.28318530717958648 * k * g.x(i) + pk);
      }
      u(i) = v;
    }
    return u;
  };
  Vec a_per = sample(per, af);
  Vec a_blk = sample(blk, af);
  double worst = 0.0;
  for (int s = 0; s < 20; ++s) {
    Vec up = random_state(per.n_total(), 0.1, 5.0, 4100 + 13 * s);
    Vec ub = random_state(blk.n_total(), 0.1, 5.0, 5300 + 17 * s);
    worst = std::max(worst, rate(per, FluxKind::Geometric, a_per, up));
    worst = std::max(worst, rate(blk, FluxKind::Geometric, a_blk, ub));
    worst = std::max(worst, rate(per, FluxKind::Logarithmic, a_per, up));
    worst = std::max(worst, rate(blk, FluxKind::Logarithmic, a_blk,
                                 smooth_state(blk, 7900 + 19 * s)));
  }
  Check c;
  c.ok = worst <= 1e-11;
  c.detail = fmt("max |w^T H r| = %.2g (<=1e-11) over 20 states x 2 fluxes "
                 "x 2 grids", worst);
  return c;
}

// 5. Floquet analysis of the geometric scheme about the translating Gaussian:
//    neutral exponents, the transient-growth golden, and K-convergence by
//    tolerance (monodromy throws if the doubling hits its cap unconverged).
Check criterion5() {
  const auto t0 = std::chrono::steady_clock::now();
  Grid g = build_grid({"csbp", 1, 100, 1, 0.0, 1.0});
  Vec a = Vec::Ones(g.n_total());
  auto init = gaussian_profile();
  SchemeConfig cfg;
  cfg.kind = FluxKind::Geometric;
  auto wrap01 = [](double x) { return x - std::floor(x); };
  auto base = [&](double t) {
    Vec u(g.n_total());
    for (int i = 0; i < g.n_total(); ++i) u(i) = init(wrap01(g.x(i) - t));
    return u;
  };
  auto jac_at = [&](double t) { return jac_flux_diff(g, cfg, a, base(t)).matrix; };

  Check c;
  try {
    Monodromy m = floquet_diagnostics(monodromy(jac_at, 1.0, 256, 1e-10),
                                      g.h_global);
    const double re_max = m.exponents.real().cwiseAbs().maxCoeff();
    const double el = seconds_since(t0);
    c.ok = re_max < 1e-10 && std::abs(m.sigma_max - 1.7) <= 0.1 && el < 120.0;
    c.detail = fmt("max |Re(exponent)| %.2g (<1e-10), sigma_max %.4g "
                   "(1.7 +- 0.1), converged at K = %d, %.1f s",
                   re_max, m.sigma_max, m.K, el);
  } catch (const std::exception& e) {
    c.ok = false;
    c.detail = std::string("monodromy did not converge: ") + e.what();
  }
  return c;
}

// 6. 100-period perturbation runs on the constant-coefficient Gaussian: the
//    geometric difference energy obeys the baseflow-ratio bound at every
//    sample, and the central scheme holds ||v||_H^2 constant to 1e-9. The
//    central run uses dt = 5e-5: its semidiscrete operator is exactly
//    skew-adjoint, so the step must be small enough that the O(dt^6)
//    per-step RK4 energy loss of the highest mode stays below the tolerance.
Check criterion6() {
  const auto t0 = std::chrono::steady_clock::now();
  Grid g = build_grid({"circulant", 8, 40, 1, 0.0, 1.0});
  Vec a = Vec::Ones(g.n_total());
  Vec u0 = sample(g, gaussian_profile());
  Vec v0 = random_perturbation(g.n_total(), 1e-3, 20260816ull);

  // geometric bound run at the catalog step
  SchemeConfig geo;
  geo.kind = FluxKind::Geometric;
  Residual fg = [&](double, const Vec& u) { return residual(g, geo, a, u); };
  PerturbationConfig pc;
  pc.residual = fg;
  pc.dt = 1e-3;
  pc.channels.grid = &g;
  pc.channels.a = a;
  pc.channels.kind = FluxKind::Geometric;
  PerturbationResult pr = perturbation_experiment(pc, u0, v0, 0.0, 100.0);

  // base maxima per sample from an identical fixed-step run
  std::vector<double> max_u;
  max_u.push_back(u0.maxCoeff());
  ChannelSpec rec;
  rec.post_step = [&](double, Vec& u) { max_u.push_back(u.maxCoeff()); };
  rk4(fg, u0, 0.0, 100.0, 1e-3, rec);

  Check c;
  if (pr.base.crashed || pr.perturbed.crashed ||
      max_u.size() != pr.pert_h.size()) {
    c.ok = false;
    c.detail = fmt("geometric run crashed or samples misaligned "
                   "(%zu vs %zu)", max_u.size(), pr.pert_h.size());
    return c;
  }
  const double min_u0 = u0.minCoeff();
  const double p0_sq = pr.pert_h.front() * pr.pert_h.front();
  double worst_ratio = 0.0;
  bool bounded = true;
  for (std::size_t k = 0; k < pr.pert_h.size(); ++k) {
    const double lhs = pr.pert_h[k] * pr.pert_h[k];
    const double rhs = (max_u[k] / min_u0) * p0_sq;
    worst_ratio = std::max(worst_ratio, lhs / rhs);
    bounded = bounded && lhs <= rhs * (1.0 + 1e-9);
  }

  // central constancy run, chunked to keep the channel storage small
  SchemeConfig cen;
  cen.kind = FluxKind::Central;
  Residual fc = [&](double, const Vec& u) { return residual(g, cen, a, u); };
  double dev_central = 0.0;
  bool central_ok = true;
  {
    Vec u = u0, ue = u0 + v0;
    double p0c_sq = -1.0;
    for (int chunk = 0; chunk < 10 && central_ok; ++chunk) {
      PerturbationConfig cc;
      cc.residual = fc;
      cc.dt = 5e-5;
      cc.channels.grid = &g;
      cc.channels.a = a;
      PerturbationResult r = perturbation_experiment(cc, u, ue - u, 0.0, 10.0);
      if (r.base.crashed || r.perturbed.crashed) {
        central_ok = false;
        break;
      }
      if (p0c_sq < 0.0) p0c_sq = r.pert_h.front() * r.pert_h.front();
      for (double ph : r.pert_h)
        dev_central = std::max(dev_central, std::abs(ph * ph / p0c_sq - 1.0));
      u = r.base.final_state;
      ue = r.perturbed.final_state;
    }
  }
  const double el = seconds_since(t0);
  c.ok = bounded && central_ok && dev_central <= 1e-9 && el < 600.0;
  c.detail = fmt("geometric bound margin %.3f (<=1), central ||v||_H^2 "
                 "drift %.2g (<=1e-9), %.0f s (<600)",
                 worst_ratio, dev_central, el);
  return c;
}

// 7. Analytic Jacobians against the finite-difference oracle on a multiblock
//    grid: split form with the upwind penalty, geometric, logarithmic, and
//    the Burgers split form at sigma = 0.
Check criterion7() {
  Grid g = build_grid({"csbp", 2, 25, 2, 0.0, 1.0});
  Vec a = sample(g, skewed_coefficient());
  const int n = g.n_total();

  SchemeConfig sp;
  sp.use_split = true;
  sp.alpha = 0.4;
  sp.sat = SatMode::Upwind;
  sp.sigma = 1.0;
  SchemeConfig geo;
  geo.kind = FluxKind::Geometric;
  SchemeConfig lg;
  lg.kind = FluxKind::Logarithmic;

  double worst[4] = {0.0, 0.0, 0.0, 0.0};
  for (int s = 0; s < 20; ++s) {
    Vec u = random_state(n, 0.2, 3.0, 7300 + 17 * s);
    auto rel = [&](const Mat& Ja, const std::function<Vec(const Vec&)>& r) {
      Mat Jf = jac_fd(r, u);
      return (Ja - Jf).norm() / Jf.norm();
    };
    worst[0] = std::max(worst[0], rel(jac_split_form(g, sp, a).matrix,
                                      [&](const Vec& v) { return residual(g, sp, a, v); }));
    worst[1] = std::max(worst[1], rel(jac_flux_diff(g, geo, a, u).matrix,
                                      [&](const Vec& v) { return residual(g, geo, a, v); }));
    worst[2] = std::max(worst[2], rel(jac_flux_diff(g, lg, a, u).matrix,
                                      [&](const Vec& v) { return residual(g, lg, a, v); }));
    worst[3] = std::max(worst[3],
                        rel(jac_burgers(g, 2.0 / 3.0, u, 0.0).matrix,
                            [&](const Vec& v) {
                              return burgers_residual(g, 2.0 / 3.0, v, 0.0);
                            }));
  }
  Check c;
  c.ok = worst[0] <= 1e-6 && worst[1] <= 1e-6 && worst[2] <= 1e-6 &&
         worst[3] <= 1e-6;
  c.detail = fmt("rel Frobenius gap split %.2g, geometric %.2g, logarithmic "
                 "%.2g, burgers %.2g (each <=1e-6, 20 baseflows)",
                 worst[0], worst[1], worst[2], worst[3]);
  return c;
}

// 8. The geometric flux-differencing residual equals the central scheme in
//    w = sqrt(a u) mapped back through du/dt = 2 W A^-1 dw/dt, interface
//    penalties included.
Check criterion8() {
  std::vector<Grid> grids;
  grids.push_back(build_grid({"circulant", 8, 39, 1, 0.0, 1.0}));
  grids.push_back(build_grid({"csbp", 1, 17, 3, 0.0, 1.0}));
  auto af = skewed_coefficient();
  SchemeConfig cfg;
  cfg.kind = FluxKind::Geometric;

  double worst = 0.0;
  for (const Grid& g : grids) {
    Vec a = sample(g, af);
    const int n = g.block_size, nb = g.n_blocks;
    const Mat& D = g.block_op.d_mat;
    const Vec& hb = g.block_op.h_diag;
    const bool coupled = g.ref_op.family != Family::Circulant;
    for (int s = 0; s < 20; ++s) {
      Vec u = random_state(g.n_total(), 0.1, 5.0, 8200 + 29 * s);
      Vec r = residual(g, cfg, a, u);
      Vec w = a.cwiseProduct(u).cwiseSqrt();
      Vec rp(g.n_total());
      for (int b = 0; b < nb; ++b) {
        const int o = g.gid(b, 0);
        Vec wb = w.segment(o, n);
        Vec ab = a.segment(o, n);
        Vec rw = -ab.cwiseProduct(D * wb);
        if (coupled) {
          const Vec& tl = g.block_op.tl;
          const Vec& tr = g.block_op.tr;
          Vec w_right = w.segment(g.gid((b + 1) % nb, 0), n);
          Vec w_left = w.segment(g.gid((b + nb - 1) % nb, 0), n);
          Vec bracket = g.block_op.e_mat * wb - tr * tl.dot(w_right) +
                        tl * tr.dot(w_left);
          rw += 0.5 * ab.cwiseProduct(bracket).cwiseQuotient(hb);
        }
        rp.segment(o, n) = 2.0 * wb.cwiseProduct(rw).cwiseQuotient(ab);
      }
      const double scale = std::max(1.0, r.cwiseAbs().maxCoeff());
      worst = std::max(worst, (r - rp).cwiseAbs().maxCoeff() / scale);
    }
  }
  Check c;
  c.ok = worst <= 1e-12;
  c.detail = fmt("max scaled residual gap %.2g (<=1e-12) over 20 states x 2 "
                 "grids", worst);
  return c;
}

// 9. Logarithmic stiffness blowup toward the profile zero: both the weighted
//    symmetric-part growth rate and the spectral radius rise monotonically as
//    the shift drops from 1e-1 to 1e-4, with at least tenfold total growth.
Check criterion9() {
  Grid g = build_grid({"circulant", 8, 40, 1, -1.0, 1.0});
  Vec a = Vec::Ones(g.n_total());
  Scenario sw;
  sw.init = "vacuum-well";
  Vec base = sample(g, initial_fn(sw));
  SchemeConfig cfg;
  cfg.kind = FluxKind::Logarithmic;
  const double eps[4] = {1e-1, 1e-2, 1e-3, 1e-4};
  double lam[4], rho[4];
  for (int k = 0; k < 4; ++k) {
    Vec u = (base.array() + eps[k]).matrix();
    Mat J = jac_flux_diff(g, cfg, a, u).matrix;
    lam[k] = lambda_max_sym(J, Weighting::Hnorm, g);
    rho[k] = eig(J).spectral_radius;
  }
  bool mono = true;
  for (int k = 1; k < 4; ++k) mono = mono && lam[k] > lam[k - 1] && rho[k] > rho[k - 1];
  Check c;
  c.ok = mono && lam[3] >= 10.0 * lam[0];
  c.detail = fmt("lambda_max_sym %.3g -> %.3g (x%.1f, >=10), rho %.3g -> %.3g, "
                 "both monotone over eps 1e-1..1e-4: %s",
                 lam[0], lam[3], lam[3] / lam[0], rho[0], rho[3],
                 mono ? "yes" : "no");
  return c;
}

bool summary_crashed(const RunResult& res) {
  return res.crashed ||
         (res.summary.contains("crashed") && res.summary["crashed"].get<bool>());
}

bool summary_get(const RunResult& res, const char* key, double& out) {
  if (!res.summary.contains(key) || !res.summary[key].is_number()) return false;
  out = res.summary[key].get<double>();
  return true;
}

// A run "blows up" when it leaves a crash record or its measured growth rate
// rises a hundredfold above the initial one.
bool blown_up(const RunResult& res, std::string& note) {
  if (summary_crashed(res)) {
    double t = std::numeric_limits<double>::quiet_NaN();
    summary_get(res, "final_time", t);
    note = fmt("crash@t=%.3g", t);
    return true;
  }
  double l0 = 0.0, lmax = 0.0;
  if (summary_get(res, "lambda_max_sym_initial", l0) &&
      summary_get(res, "lambda_max_sym_max", lmax) && l0 > 0.0 &&
      lmax >= 100.0 * l0) {
    note = fmt("lambda x%.0f", lmax / l0);
    return true;
  }
  note = fmt("no blowup (lambda x%.2f)", l0 > 0.0 ? lmax / l0 : 0.0);
  return false;
}

// 10. Near-vacuum density-wave advection to t = 20: the entropy-dissipation
//     and filter variants stay positive with bounded perturbation growth; the
//     bare and conservative-dissipation variants blow up or crash.
Check criterion10() {
  const std::string root = "acceptance-out";
  std::string notes;
  bool ok = true;

  for (const char* name : {"near-vacuum-entdiss", "near-vacuum-filter"}) {
    RunResult res = run_scenario(find_scenario(name), root);
    double min_u = -1.0, p0 = 0.0, pmax = 0.0, t_end = 0.0;
    const bool have = summary_get(res, "min_u_overall", min_u) &&
                      summary_get(res, "pert_h_initial", p0) &&
                      summary_get(res, "pert_h_max", pmax) &&
                      summary_get(res, "final_time", t_end);
    const bool good = res.ok && !summary_crashed(res) && have &&
                      t_end >= 20.0 - 1e-9 && min_u > 0.0 && pmax < 10.0 * p0;
    ok = ok && good;
    notes += fmt("%s%s min_u %.2g growth x%.2f; ", good ? "" : "FAIL ",
                 name + 12, min_u, p0 > 0.0 ? pmax / p0 : -1.0);
  }
  for (const char* name : {"near-vacuum-bare", "near-vacuum-consdiss"}) {
    RunResult res = run_scenario(find_scenario(name), root);
    std::string note;
    const bool good = res.ok && blown_up(res, note);
    ok = ok && good;
    notes += fmt("%s%s %s; ", good ? "" : "FAIL ", name + 12, note.c_str());
  }
  Check c;
  c.ok = ok;
  c.detail = notes;
  return c;
}

// 11. Euler density wave to t = 10: the filtered run stays above the density
//     floor with closed mass and energy accounts and an entropy-consistent
//     two-point flux; the unfiltered run blows up or crashes.
Check criterion11() {
  const std::string root = "acceptance-out";
  Check c;

  RunResult filt = run_scenario(find_scenario("euler-density-wave"), root);
  double min_rho = -1.0, mdef = 1.0, edef = 1.0, ec = 1.0, t_end = 0.0;
  const bool have = summary_get(filt, "min_rho_overall", min_rho) &&
                    summary_get(filt, "mass_defect", mdef) &&
                    summary_get(filt, "energy_defect", edef) &&
                    summary_get(filt, "ec_residual_max", ec) &&
                    summary_get(filt, "final_time", t_end);
  const bool filt_ok = filt.ok && !summary_crashed(filt) && have &&
                       t_end >= 10.0 - 1e-9 && min_rho >= 5e-4 - 1e-15 &&
                       std::abs(mdef) <= 1e-9 && std::abs(edef) <= 1e-9 &&
                       ec < 1e-11;

  RunResult bare = run_scenario(find_scenario("euler-density-wave-bare"), root);
  std::string note;
  const bool bare_ok = bare.ok && blown_up(bare, note);

  c.ok = filt_ok && bare_ok;
  c.detail = fmt("filtered min_rho %.4g (>=5e-4) mass defect %.2g energy "
                 "defect %.2g (<=1e-9) ec residual %.2g (<1e-11)%s; bare %s%s",
                 min_rho, mdef, edef, ec, filt_ok ? "" : " FAIL", note.c_str(),
                 bare_ok ? "" : " FAIL");
  return c;
}

// 12. The Burgers split form at alpha = 2/3, sigma = 0 is energy-neutral,
//     uT H r = 0, on random states; independent draws on the duplicated
//     interface nodes make the interface data discontinuous, and half the
//     states widen that jump deliberately.
Check criterion12() {
  Grid g = build_grid({"csbp", 2, 33, 2, 0.0, 1.0});
  const int n = g.block_size;
  double worst = 0.0;
  for (int s = 0; s < 20; ++s) {
    Vec u = random_state(g.n_total(), -2.0, 2.0, 9900 + 41 * s);
    if (s % 2 == 0) {
      u(g.gid(0, n - 1)) = 2.0;
      u(g.gid(1, 0)) = -1.5;
    }
    Vec r = burgers_residual(g, 2.0 / 3.0, u, 0.0);
    worst = std::max(worst, std::abs(u.dot(g.h_global.cwiseProduct(r))));
  }
  Check c;
  c.ok = worst <= 1e-11;
  c.detail = fmt("max |u^T H r| = %.2g (<=1e-11) over 20 discontinuous states",
                 worst);
  return c;
}

}  // namespace

int main() {
  std::error_code ec;
  std::filesystem::remove_all("acceptance-out", ec);

  int fails = 0;
  const std::function<Check()> criteria[12] = {
      criterion1, criterion2, criterion3, criterion4,  criterion5,  criterion6,
      criterion7, criterion8, criterion9, criterion10, criterion11, criterion12};
  for (int k = 0; k < 12; ++k) {
    Check c;
    try {
      c = criteria[k]();
    } catch (const std::exception& e) {
      c.ok = false;
      c.detail = std::string("unexpected exception: ") + e.what();
    }
    if (!c.ok) ++fails;
    std::printf("criterion %2d  %s  %s\n", k + 1, c.ok ? "PASS" : "FAIL",
                c.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("acceptance: %d/12 criteria passed\n", 12 - fails);
  return fails == 0 ? 0 : 1;
}
