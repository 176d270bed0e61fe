// 1D compressible Euler flux differencing with an entropy-conservative
// two-point flux, wavespeed-scaled volume dissipation on conservative or
// entropy variables, a softplus positivity filter, and the density-wave
// scenario with its exact translate solution.
#pragma once

#include <splitstab/timeint.hpp>

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace splitstab {

using Vec3 = Eigen::Vector3d;

enum class EulerDiss { None, Conservative, Entropy };

struct EulerConfig {
  double gamma{1.4};
  EulerDiss diss{EulerDiss::None};
  int diss_s{2};         // undivided-difference order of the dissipation
  double diss_eps{0.0};  // dissipation strength; 0 disables the term
  double u_floor{5e-4};  // positivity-filter floor, applied to rho and p
  double u_cut{5e-2};    // filter onset scale

  void validate() const {
    if (!(gamma > 1.0))
      throw std::invalid_argument("EulerConfig: gamma must exceed 1");
    if (diss_eps < 0.0)
      throw std::invalid_argument("EulerConfig: diss_eps must be >= 0");
    if (diss != EulerDiss::None && diss_eps > 0.0 && diss_s < 1)
      throw std::invalid_argument("EulerConfig: dissipation needs diss_s >= 1");
    if (!(u_cut > u_floor) || !(u_floor > 0.0))
      throw std::invalid_argument("EulerConfig: need u_cut > u_floor > 0");
  }
};

// Conserved fields, one value per node: density, momentum, total energy.
struct EulerState {
  Vec rho, m, e;
  int n() const { return static_cast<int>(rho.size()); }
};

inline Vec pack(const EulerState& s) {
  if (s.m.size() != s.rho.size() || s.e.size() != s.rho.size())
    throw std::invalid_argument("pack: component sizes differ");
  Vec q(3 * s.rho.size());
  q << s.rho, s.m, s.e;
  return q;
}

inline EulerState unpack_euler(const Vec& q) {
  if (q.size() % 3 != 0)
    throw std::invalid_argument("unpack_euler: size must be a multiple of 3");
  const int n = static_cast<int>(q.size()) / 3;
  return {q.segment(0, n), q.segment(n, n), q.segment(2 * n, n)};
}

struct EulerPrim {
  Vec rho, v, p;
};

namespace detail {

[[noreturn]] inline void euler_node_error(int node, double rho, double m, double e,
                                          double p) {
  std::ostringstream os;
  os << "euler state inadmissible at node " << node << ": rho = " << rho
     << ", m = " << m << ", e = " << e << ", p = " << p;
  throw std::domain_error(os.str());
}

// Two-point entropy-conservative flux on primitive values, positivity assumed.
// Built from logarithmic means of rho and rho/p with arithmetic means of v
// and p; satisfies (w_r - w_l) . F = psi_r - psi_l with psi = rho v.
inline Vec3 ec_flux_prim(double gamma, double rl, double vl, double pl, double rr,
                         double vr, double pr) {
  const double rho_log = flux_logarithmic(rl, rr);
  const double rho_p_log = flux_logarithmic(rl / pl, rr / pr);
  const double vb = 0.5 * (vl + vr);
  const double pb = 0.5 * (pl + pr);
  Vec3 f;
  f(0) = rho_log * vb;
  f(1) = f(0) * vb + pb;
  f(2) = f(0) * (0.5 * vl * vr + 1.0 / ((gamma - 1.0) * rho_p_log)) +
         0.5 * (pl * vr + pr * vl);
  return f;
}

}  // namespace detail

// Primitive extraction with the admissibility check rho > 0 and p > 0.
inline EulerPrim primitives(const EulerConfig& cfg, const EulerState& s) {
  if (s.m.size() != s.rho.size() || s.e.size() != s.rho.size())
    throw std::invalid_argument("primitives: component sizes differ");
  const int n = s.n();
  EulerPrim pr{Vec(n), Vec(n), Vec(n)};
  for (int i = 0; i < n; ++i) {
    const double rho = s.rho(i), m = s.m(i), e = s.e(i);
    const double p = (cfg.gamma - 1.0) * (e - 0.5 * m * m / rho);
    if (!(rho > 0.0) || !(p > 0.0)) detail::euler_node_error(i, rho, m, e, p);
    pr.rho(i) = rho;
    pr.v(i) = m / rho;
    pr.p(i) = p;
  }
  return pr;
}

inline Vec3 euler_physical_flux(const EulerConfig& cfg, double rho, double v,
                                double p) {
  const double e = p / (cfg.gamma - 1.0) + 0.5 * rho * v * v;
  return Vec3(rho * v, rho * v * v + p, v * (e + p));
}

// Entropy-conservative two-point flux on conserved triples (rho, m, e).
inline Vec3 euler_ec_flux(const EulerConfig& cfg, const Vec3& ul, const Vec3& ur) {
  auto prim = [&cfg](const Vec3& u, const char* side) -> Vec3 {
    const double rho = u(0);
    const double p = (cfg.gamma - 1.0) * (u(2) - 0.5 * u(1) * u(1) / rho);
    if (!(rho > 0.0) || !(p > 0.0)) {
      std::ostringstream os;
      os << "euler_ec_flux: inadmissible " << side << " state: rho = " << rho
         << ", m = " << u(1) << ", e = " << u(2) << ", p = " << p;
      throw std::domain_error(os.str());
    }
    return Vec3(rho, u(1) / rho, p);
  };
  const Vec3 l = prim(ul, "left"), r = prim(ur, "right");
  return detail::ec_flux_prim(cfg.gamma, l(0), l(1), l(2), r(0), r(1), r(2));
}

// Entropy S = -rho s / (gamma - 1) with s = log(p / rho^gamma); rho, p > 0.
inline double euler_entropy(const EulerConfig& cfg, double rho, double p) {
  const double s = std::log(p) - cfg.gamma * std::log(rho);
  return -rho * s / (cfg.gamma - 1.0);
}

inline Vec3 euler_entropy_variables(const EulerConfig& cfg, double rho, double v,
                                    double p) {
  const double s = std::log(p) - cfg.gamma * std::log(rho);
  Vec3 w;
  w(0) = (cfg.gamma - s) / (cfg.gamma - 1.0) - rho * v * v / (2.0 * p);
  w(1) = rho * v / p;
  w(2) = -rho / p;
  return w;
}

// Entropy flux potential psi = w . F - F_S, which reduces to rho v here.
inline double euler_flux_potential(double rho, double v) { return rho * v; }

inline double euler_entropy_total(const EulerConfig& cfg, const Grid& g,
                                  const EulerState& s) {
  const EulerPrim pr = primitives(cfg, s);
  double total = 0.0;
  for (int i = 0; i < s.n(); ++i)
    total += g.h_global(i) * euler_entropy(cfg, pr.rho(i), pr.p(i));
  return total;
}

// H-weighted relative entropy S(U) - S(Ubar) - w(Ubar) . (U - Ubar).
inline double euler_relative_entropy(const EulerConfig& cfg, const Grid& g,
                                     const EulerState& s, const EulerState& ref) {
  if (s.n() != ref.n())
    throw std::invalid_argument("euler_relative_entropy: state sizes differ");
  const EulerPrim pr = primitives(cfg, s);
  const EulerPrim pb = primitives(cfg, ref);
  double total = 0.0;
  for (int i = 0; i < s.n(); ++i) {
    const Vec3 w = euler_entropy_variables(cfg, pb.rho(i), pb.v(i), pb.p(i));
    const Vec3 du(s.rho(i) - ref.rho(i), s.m(i) - ref.m(i), s.e(i) - ref.e(i));
    total += g.h_global(i) * (euler_entropy(cfg, pr.rho(i), pr.p(i)) -
                              euler_entropy(cfg, pb.rho(i), pb.p(i)) - w.dot(du));
  }
  return total;
}

// Flux-differencing residual r_i = -2 sum_j D_ij F*(U_i, U_j) per component,
// plus optional volume dissipation -eps H^-1 Dt^T Lambda Dt applied to the
// conservative or entropy variables, Lambda = diag(|v| + c). Periodic
// single-block circulant grids only; interface coupling for multiblock Euler
// is out of scope.
inline EulerState euler_residual(const Grid& g, const EulerConfig& cfg,
                                 const EulerState& s) {
  cfg.validate();
  if (g.ref_op.family != Family::Circulant)
    throw std::invalid_argument("euler_residual: periodic circulant grids only");
  if (s.n() != g.n_total())
    throw std::invalid_argument("euler_residual: state size does not match the grid");
  const EulerPrim pr = primitives(cfg, s);
  const int n = g.block_size;
  const Mat& D = g.block_op.d_mat;
  EulerState r{Vec::Zero(n), Vec::Zero(n), Vec::Zero(n)};
  auto add = [&r](int i, double c, const Vec3& f) {
    r.rho(i) -= c * f(0);
    r.m(i) -= c * f(1);
    r.e(i) -= c * f(2);
  };
  for (int i = 0; i < n; ++i) {
    const double dii = D(i, i);
    if (dii != 0.0)
      add(i, 2.0 * dii, euler_physical_flux(cfg, pr.rho(i), pr.v(i), pr.p(i)));
    for (int j = i + 1; j < n; ++j) {
      const double dij = D(i, j), dji = D(j, i);
      if (dij == 0.0 && dji == 0.0) continue;
      const Vec3 f = detail::ec_flux_prim(cfg.gamma, pr.rho(i), pr.v(i), pr.p(i),
                                          pr.rho(j), pr.v(j), pr.p(j));
      add(i, 2.0 * dij, f);
      add(j, 2.0 * dji, f);
    }
  }
  if (cfg.diss != EulerDiss::None && cfg.diss_eps > 0.0) {
    Vec lam(n);
    for (int i = 0; i < n; ++i)
      lam(i) = std::abs(pr.v(i)) + std::sqrt(cfg.gamma * pr.p(i) / pr.rho(i));
    auto apply = [&](Vec& out, const Vec& v) {
      out += volume_dissipation(g, cfg.diss_s, cfg.diss_eps,
                                DissVariable::Conservative, v, &lam);
    };
    if (cfg.diss == EulerDiss::Conservative) {
      apply(r.rho, s.rho);
      apply(r.m, s.m);
      apply(r.e, s.e);
    } else {
      Vec w1(n), w2(n), w3(n);
      for (int i = 0; i < n; ++i) {
        const Vec3 w = euler_entropy_variables(cfg, pr.rho(i), pr.v(i), pr.p(i));
        w1(i) = w(0);
        w2(i) = w(1);
        w3(i) = w(2);
      }
      apply(r.rho, w1);
      apply(r.m, w2);
      apply(r.e, w3);
    }
  }
  return r;
}

// Residual on the packed state [rho; m; e] for the time integrators. The
// grid must outlive the returned function.
inline Residual euler_rhs(const Grid& g, const EulerConfig& cfg) {
  return [&g, cfg](double, const Vec& q) {
    return pack(euler_residual(g, cfg, unpack_euler(q)));
  };
}

// Softplus floor u + eps log(1 + exp((u_floor - u)/eps)), eps =
// (u_cut - u_floor)/12: strictly increasing, output always above u_floor,
// and an exact no-op for inputs far above u_cut (the exponential underflows).
inline double positivity_filter(double u, double u_floor, double u_cut) {
  if (!(u_cut > u_floor) || !(u_floor > 0.0))
    throw std::invalid_argument("positivity_filter: need u_cut > u_floor > 0");
  const double eps = (u_cut - u_floor) / 12.0;
  const double z = (u_floor - u) / eps;
  return u + eps * (std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))));
}

inline Vec positivity_filter(const Vec& u, double u_floor, double u_cut) {
  Vec out(u.size());
  for (int i = 0; i < u.size(); ++i)
    out(i) = positivity_filter(u(i), u_floor, u_cut);
  return out;
}

// H-weighted mass and energy the filter added in one application.
struct FilterDelta {
  double mass{0.0};
  double energy{0.0};
};

// Filters rho and p in place with the config floor, keeping momentum, and
// recomputes e from the filtered pressure. Works on inadmissible inputs;
// the output satisfies rho > u_floor and p > u_floor at every node.
inline FilterDelta apply_euler_filter(const EulerConfig& cfg, const Grid& g,
                                      EulerState& s) {
  cfg.validate();
  if (s.n() != g.n_total())
    throw std::invalid_argument("apply_euler_filter: state size does not match the grid");
  FilterDelta d;
  for (int i = 0; i < s.n(); ++i) {
    const double rho0 = s.rho(i), e0 = s.e(i), m = s.m(i);
    const double rho1 = positivity_filter(rho0, cfg.u_floor, cfg.u_cut);
    const double kin = 0.5 * m * m / rho1;
    const double p1 = positivity_filter((cfg.gamma - 1.0) * (e0 - kin), cfg.u_floor,
                                        cfg.u_cut);
    const double e1 = p1 / (cfg.gamma - 1.0) + kin;
    s.rho(i) = rho1;
    s.e(i) = e1;
    d.mass += g.h_global(i) * (rho1 - rho0);
    d.energy += g.h_global(i) * (e1 - e0);
  }
  return d;
}

// Fixed-step hook filtering the packed state once per accepted step;
// accumulated deltas land in *sink when given. Grid and sink must outlive
// the returned function.
inline std::function<void(double, Vec&)> euler_filter_hook(const Grid& g,
                                                           const EulerConfig& cfg,
                                                           FilterDelta* sink = nullptr) {
  return [&g, cfg, sink](double, Vec& q) {
    EulerState s = unpack_euler(q);
    const FilterDelta d = apply_euler_filter(cfg, g, s);
    if (sink != nullptr) {
      sink->mass += d.mass;
      sink->energy += d.energy;
    }
    q = pack(s);
  };
}

// Periodic density wave: rho(x, 0) = 0.98 sin(2 pi x) + 1 advected at the
// uniform velocity 0.1 with uniform pressure 20 on x in [-1, 1], so the exact
// density is the initial profile translated by 0.1 t.
struct DensityWave {
  Grid grid;
  EulerConfig config;
  EulerState init;
  double dt{1e-4};
  double speed{0.1};
  double pressure{20.0};

  double rho_exact(double x, double t) const {
    return 0.98 * std::sin(2.0 * M_PI * (x - speed * t)) + 1.0;
  }
};

inline DensityWave density_wave_scenario(int n = 39, int order = 8) {
  DensityWave s;
  s.grid = assemble_grid(-1.0, 1.0, 1, build_circulant(order, n, 2.0 / n));
  const int nt = s.grid.n_total();
  s.init.rho = Vec(nt);
  for (int i = 0; i < nt; ++i) s.init.rho(i) = s.rho_exact(s.grid.x(i), 0.0);
  s.init.m = s.speed * s.init.rho;
  s.init.e = Vec::Constant(nt, s.pressure / (s.config.gamma - 1.0)) +
             0.5 * s.speed * s.speed * s.init.rho;
  return s;
}

}  // namespace splitstab
