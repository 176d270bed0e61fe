// Explicit time integration with diagnostic channels, the paired
// perturbation-experiment driver, and exact-solution evaluation along
// characteristics for variable-coefficient advection.
#pragma once

#include <splitstab/spectral.hpp>

#include <boost/numeric/odeint.hpp>
#include <boost/numeric/odeint/external/eigen/eigen.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace splitstab {

// Semidiscrete right-hand side du/dt = residual(t, u).
using Residual = std::function<Vec(double, const Vec&)>;

// Context for the diagnostic channels. With no grid, H = I and a = 1 so the
// weighted channels reduce to Euclidean sums; the error channels stay NaN
// unless an exact-solution provider is set.
struct ChannelSpec {
  const Grid* grid{nullptr};
  Vec a;                              // coefficient; defaults to ones
  FluxKind kind{FluxKind::Central};   // selects the entropy functional
  std::function<Vec(double)> exact;   // exact solution sampled at the nodes
  int state_stride{0};                // 0: keep only first and last state
  // Applied to each accepted fixed-step state before channels are recorded
  // (positivity filters and similar per-step maps). A std::domain_error from
  // the hook crashes the run. Fixed-step integrators only.
  std::function<void(double, Vec&)> post_step;
};

struct Trajectory {
  std::vector<double> times;  // every accepted step, including t0
  std::vector<double> dts;    // step taken to reach times[k]; dts[0] = 0
  std::vector<double> energy_h;    // ||u||^2_H
  std::vector<double> energy_ah;   // ||u||^2_{aH}
  std::vector<double> entropy_s;   // scheme entropy (NaN without a grid)
  std::vector<double> min_u;
  std::vector<double> err_h;    // ||u - U_exact||_H (NaN without exact)
  std::vector<double> err_inf;  // max_i |u_i - U_exact(x_i)|
  std::vector<double> state_times;
  std::vector<Vec> states;  // thinned snapshots; always holds the last state
  Vec final_state;          // last finite state
  bool crashed{false};
  double crash_time{std::numeric_limits<double>::quiet_NaN()};
};

namespace detail {

inline void push_channels(Trajectory& tr, const ChannelSpec& cs, double t,
                          double dt_taken, const Vec& u) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  tr.times.push_back(t);
  tr.dts.push_back(dt_taken);
  if (cs.grid != nullptr) {
    const Vec& h = cs.grid->h_global;
    Vec a = cs.a.size() ? cs.a : Vec::Ones(u.size());
    tr.energy_h.push_back(u.dot(h.cwiseProduct(u)));
    tr.energy_ah.push_back(u.dot(h.cwiseProduct(a.cwiseProduct(u))));
    double s = nan;
    try {
      s = scheme_entropy(cs.kind, *cs.grid, a, u);
    } catch (const std::domain_error&) {
      // entropy undefined outside the admissible set; channel stays NaN
    }
    tr.entropy_s.push_back(s);
  } else {
    tr.energy_h.push_back(u.squaredNorm());
    tr.energy_ah.push_back(u.squaredNorm());
    tr.entropy_s.push_back(nan);
  }
  tr.min_u.push_back(u.minCoeff());
  if (cs.exact) {
    Vec e = u - cs.exact(t);
    if (cs.grid != nullptr) {
      tr.err_h.push_back(std::sqrt(e.dot(cs.grid->h_global.cwiseProduct(e))));
    } else {
      tr.err_h.push_back(e.norm());
    }
    tr.err_inf.push_back(e.cwiseAbs().maxCoeff());
  } else {
    tr.err_h.push_back(nan);
    tr.err_inf.push_back(nan);
  }
}

inline void push_state(Trajectory& tr, const ChannelSpec& cs, double t,
                       const Vec& u, long step_index, bool at_end) {
  const bool keep = step_index == 0 || at_end ||
                    (cs.state_stride > 0 && step_index % cs.state_stride == 0);
  if (!keep) return;
  if (!tr.state_times.empty() && tr.state_times.back() == t) return;
  tr.state_times.push_back(t);
  tr.states.push_back(u);
}

// One classical RK4 step. Throws whatever the residual throws.
inline Vec rk4_step(const Residual& f, double t, double dt, const Vec& u) {
  Vec k1 = f(t, u);
  Vec k2 = f(t + 0.5 * dt, u + (0.5 * dt) * k1);
  Vec k3 = f(t + 0.5 * dt, u + (0.5 * dt) * k2);
  Vec k4 = f(t + dt, u + dt * k3);
  return u + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

inline void record_crash(Trajectory& tr, double t_fail) {
  tr.crashed = true;
  tr.crash_time = t_fail;
}

}  // namespace detail

// Classical fixed-step RK4. The final step is shortened to land exactly on
// t1. A residual that throws std::domain_error or produces a non-finite
// state terminates the run with a crash record; the trajectory then ends at
// the last finite sample and final_state holds the last finite state.
inline Trajectory rk4(const Residual& f, const Vec& u0, double t0, double t1,
                      double dt, const ChannelSpec& cs = {}) {
  if (!(dt > 0.0)) throw std::invalid_argument("rk4: dt must be positive");
  if (!(t1 > t0)) throw std::invalid_argument("rk4: t1 must exceed t0");
  if (cs.grid != nullptr && cs.grid->h_global.size() != u0.size()) {
    throw std::invalid_argument("rk4: channel grid size does not match the state");
  }
  Trajectory tr;
  Vec u = u0;
  double t = t0;
  detail::push_channels(tr, cs, t, 0.0, u);
  detail::push_state(tr, cs, t, u, 0, false);
  long k = 0;
  while (t < t1) {
    double h = std::min(dt, t1 - t);
    // absorb a roundoff-sized remainder into the final step
    if (t1 - t - h < 1e-12 * dt) h = t1 - t;
    const double t_next = (t1 - t == h) ? t1 : t + h;
    Vec u_next;
    try {
      u_next = detail::rk4_step(f, t, h, u);
      if (cs.post_step && u_next.allFinite()) cs.post_step(t_next, u_next);
    } catch (const std::domain_error&) {
      detail::record_crash(tr, t_next);
      break;
    }
    if (!u_next.allFinite()) {
      detail::record_crash(tr, t_next);
      break;
    }
    u = u_next;
    t = t_next;
    ++k;
    detail::push_channels(tr, cs, t, h, u);
    detail::push_state(tr, cs, t, u, k, t >= t1);
  }
  detail::push_state(tr, cs, t, u, k, true);
  tr.final_state = u;
  return tr;
}

// Adaptive embedded Runge-Kutta-Fehlberg 7(8) with standard step control;
// accepted steps keep the local error estimate within atol + rtol*|u|.
// Persistent step rejection driving dt below 1e-14 of the span raises a
// stiffness error. Crash semantics match rk4. The embedded pair samples its
// error stages at duplicated time nodes, so forcing that depends on t alone
// escapes the step control; the residual must depend on the state, which
// every semidiscrete operator here does.
inline Trajectory rk8_adaptive(const Residual& f, const Vec& u0, double t0,
                               double t1, double rtol, double atol,
                               const ChannelSpec& cs = {}) {
  if (!(rtol > 0.0) || !(atol > 0.0)) {
    throw std::invalid_argument("rk8_adaptive: tolerances must be positive");
  }
  if (!(t1 > t0)) throw std::invalid_argument("rk8_adaptive: t1 must exceed t0");
  if (cs.grid != nullptr && cs.grid->h_global.size() != u0.size()) {
    throw std::invalid_argument("rk8_adaptive: channel grid size does not match the state");
  }
  if (cs.post_step) {
    throw std::invalid_argument("rk8_adaptive: post_step hooks need fixed-step rk4");
  }
  namespace ode = boost::numeric::odeint;
  using Stepper = ode::runge_kutta_fehlberg78<Vec, double, Vec, double,
                                              ode::vector_space_algebra>;
  auto stepper = ode::make_controlled<Stepper>(atol, rtol);
  auto sys = [&f](const Vec& u, Vec& dudt, double t) { dudt = f(t, u); };

  const double span = t1 - t0;
  Trajectory tr;
  Vec u = u0;
  double t = t0;
  double h = span / 100.0;
  detail::push_channels(tr, cs, t, 0.0, u);
  detail::push_state(tr, cs, t, u, 0, false);
  long k = 0;
  Vec u_prev = u;
  while (t < t1) {
    h = std::min(h, t1 - t);
    const double t_prev = t;
    u_prev = u;
    ode::controlled_step_result res;
    try {
      res = stepper.try_step(sys, u, t, h);
    } catch (const std::domain_error&) {
      detail::record_crash(tr, t_prev + h);
      break;
    }
    if (res == ode::fail) {
      if (h < 1e-14 * span) {
        std::ostringstream os;
        os << "rk8_adaptive: step size underflow at t = " << t
           << " (dt = " << h << "); the problem is too stiff";
        throw std::runtime_error(os.str());
      }
      continue;
    }
    if (!u.allFinite()) {
      detail::record_crash(tr, t);
      u = u_prev;  // keep the last finite state
      break;
    }
    ++k;
    detail::push_channels(tr, cs, t, t - t_prev, u);
    detail::push_state(tr, cs, t, u, k, t >= t1);
  }
  detail::push_state(tr, cs, tr.times.back(), u, k, true);
  tr.final_state = u;
  return tr;
}

// Counter-based 64-bit generator (splitmix64), reproducible across runs.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Uniform perturbation in [-amp, amp], deterministic in the seed.
inline Vec random_perturbation(int n, double amp, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("random_perturbation: n must be positive");
  if (!(amp > 0.0)) throw std::invalid_argument("random_perturbation: amp must be positive");
  Vec v(n);
  for (int i = 0; i < n; ++i) {
    const std::uint64_t r = splitmix64(seed + static_cast<std::uint64_t>(i));
    v(i) = amp * (2.0 * ((r >> 11) * 0x1.0p-53) - 1.0);
  }
  return v;
}

// Real part of an eigen or Floquet mode rescaled to a given max amplitude.
inline Vec scaled_mode(const CVec& mode, double amp) {
  Vec v = mode.real();
  const double m = v.cwiseAbs().maxCoeff();
  if (!(m > 0.0)) throw std::invalid_argument("scaled_mode: mode has zero real part");
  return (amp / m) * v;
}

struct PerturbationConfig {
  Residual residual;
  double dt{0.0};
  ChannelSpec channels;
};

struct PerturbationResult {
  Trajectory base;
  Trajectory perturbed;
  std::vector<double> pert_h;    // ||v||_H at the shared sample times
  std::vector<double> pert_inf;  // ||v||_inf
};

// Paired runs from u0 and u0 + v0 advanced in lockstep with fixed-step RK4,
// so both trajectories sample identical times bitwise. A crash in either run
// stops both with the same crash time.
inline PerturbationResult perturbation_experiment(const PerturbationConfig& c,
                                                  const Vec& u0, const Vec& v0,
                                                  double t0, double t1) {
  if (!c.residual) throw std::invalid_argument("perturbation_experiment: residual not set");
  if (!(c.dt > 0.0)) throw std::invalid_argument("perturbation_experiment: dt must be positive");
  if (!(t1 > t0)) throw std::invalid_argument("perturbation_experiment: t1 must exceed t0");
  if (u0.size() != v0.size()) {
    throw std::invalid_argument("perturbation_experiment: u0 and v0 sizes differ");
  }
  if (c.channels.grid != nullptr &&
      c.channels.grid->h_global.size() != u0.size()) {
    throw std::invalid_argument(
        "perturbation_experiment: channel grid size does not match the state");
  }
  PerturbationResult out;
  const ChannelSpec& cs = c.channels;
  Vec h_diag = cs.grid != nullptr ? Vec(cs.grid->h_global) : Vec(Vec::Ones(u0.size()));

  Vec u = u0;
  Vec ue = u0 + v0;
  double t = t0;
  auto sample = [&](double dt_taken) {
    detail::push_channels(out.base, cs, t, dt_taken, u);
    detail::push_channels(out.perturbed, cs, t, dt_taken, ue);
    Vec v = ue - u;
    out.pert_h.push_back(std::sqrt(v.dot(h_diag.cwiseProduct(v))));
    out.pert_inf.push_back(v.cwiseAbs().maxCoeff());
  };
  auto snapshot = [&](long step, bool at_end) {
    detail::push_state(out.base, cs, t, u, step, at_end);
    detail::push_state(out.perturbed, cs, t, ue, step, at_end);
  };
  sample(0.0);
  snapshot(0, false);
  long k = 0;
  while (t < t1) {
    double h = std::min(c.dt, t1 - t);
    if (t1 - t - h < 1e-12 * c.dt) h = t1 - t;
    const double t_next = (t1 - t == h) ? t1 : t + h;
    Vec u_next, ue_next;
    bool ok = true;
    try {
      u_next = detail::rk4_step(c.residual, t, h, u);
      ue_next = detail::rk4_step(c.residual, t, h, ue);
      if (cs.post_step && u_next.allFinite() && ue_next.allFinite()) {
        cs.post_step(t_next, u_next);
        cs.post_step(t_next, ue_next);
      }
    } catch (const std::domain_error&) {
      ok = false;
    }
    if (!ok || !u_next.allFinite() || !ue_next.allFinite()) {
      detail::record_crash(out.base, t_next);
      detail::record_crash(out.perturbed, t_next);
      break;
    }
    u = u_next;
    ue = ue_next;
    t = t_next;
    ++k;
    sample(h);
    snapshot(k, t >= t1);
  }
  snapshot(k, true);
  out.base.final_state = u;
  out.perturbed.final_state = ue;
  return out;
}

// Preflight check quantifying "sufficiently small timestep": the largest
// relative change of any finite final-sample channel when dt is halved.
inline double dt_halving_change(const Residual& f, const Vec& u0, double t0,
                                double t1, double dt, const ChannelSpec& cs = {}) {
  Trajectory a = rk4(f, u0, t0, t1, dt, cs);
  Trajectory b = rk4(f, u0, t0, t1, dt / 2.0, cs);
  if (a.crashed || b.crashed) {
    throw std::runtime_error("dt_halving_change: trial run crashed");
  }
  double worst = 0.0;
  auto cmp = [&](const std::vector<double>& xa, const std::vector<double>& xb) {
    const double va = xa.back(), vb = xb.back();
    if (!std::isfinite(va) || !std::isfinite(vb)) return;
    worst = std::max(worst, std::abs(va - vb) / std::max(1e-300, std::abs(vb)));
  };
  cmp(a.energy_h, b.energy_h);
  cmp(a.energy_ah, b.energy_ah);
  cmp(a.entropy_s, b.entropy_s);
  cmp(a.min_u, b.min_u);
  return worst;
}

// Characteristic map for u_t + (a u)_x = 0 with a > 0 on a periodic domain:
// tau(x) = int_{x_min}^x dy/a(y), inverted to locate characteristic feet.
// The cumulative table uses composite Simpson panels; inversion refines the
// bracketing panel with safeguarded Newton to 1e-12.
class CharacteristicMap {
 public:
  CharacteristicMap(std::function<double(double)> a, double x_min, double x_max,
                    int panels = 8192)
      : a_(std::move(a)), x_min_(x_min), x_max_(x_max), n_(panels) {
    if (!(x_max > x_min)) {
      throw std::invalid_argument("CharacteristicMap: empty domain");
    }
    if (n_ < 16) throw std::invalid_argument("CharacteristicMap: too few panels");
    dx_ = (x_max_ - x_min_) / n_;
    tau_.resize(n_ + 1);
    tau_[0] = 0.0;
    for (int j = 0; j < n_; ++j) {
      const double xl = x_min_ + j * dx_;
      tau_[j + 1] = tau_[j] + panel(xl, xl + dx_);
    }
  }

  // time for one full traversal of the domain
  double traversal_time() const { return tau_[n_]; }

  double tau(double x) const {
    x = std::clamp(x, x_min_, x_max_);
    int j = std::min(n_ - 1, static_cast<int>((x - x_min_) / dx_));
    const double xl = x_min_ + j * dx_;
    return tau_[j] + panel(xl, x);
  }

  // x in [x_min, x_max) with tau(x) = s mod traversal_time()
  double invert(double s) const {
    const double T = tau_[n_];
    s -= T * std::floor(s / T);
    int lo = 0, hi = n_;
    while (hi - lo > 1) {
      const int mid = (lo + hi) / 2;
      (tau_[mid] <= s ? lo : hi) = mid;
    }
    double xl = x_min_ + lo * dx_, xh = xl + dx_;
    double x = xl + (s - tau_[lo]) / std::max(tau_[lo + 1] - tau_[lo], 1e-300) * dx_;
    for (int it = 0; it < 100; ++it) {
      const double g = tau(x) - s;
      if (g > 0.0) xh = x; else xl = x;
      const double step = -g * a_(x);  // dtau/dx = 1/a
      double x_new = x + step;
      if (!(x_new > xl) || !(x_new < xh)) x_new = 0.5 * (xl + xh);
      if (std::abs(x_new - x) < 1e-13 * (x_max_ - x_min_) && std::abs(g) < 1e-12) {
        return x_new;
      }
      x = x_new;
    }
    throw std::runtime_error("CharacteristicMap: inversion did not converge");
  }

 private:
  // Simpson quadrature of 1/a over one (partial) panel
  double panel(double xl, double xr) const {
    const double xm = 0.5 * (xl + xr);
    return (xr - xl) / 6.0 * (1.0 / a_(xl) + 4.0 / a_(xm) + 1.0 / a_(xr));
  }

  std::function<double(double)> a_;
  double x_min_, x_max_, dx_;
  int n_;
  std::vector<double> tau_;
};

// Exact solution of the periodic conservative advection problem: a(x) u is
// constant along characteristics, so u(x,t) = u0(X0) a(X0) / a(x) with
// tau(X0) = tau(x) - t.
inline Vec exact_advection_solution(const CharacteristicMap& map,
                                    const std::function<double(double)>& a,
                                    const std::function<double(double)>& u0,
                                    const Vec& x, double t) {
  Vec u(x.size());
  for (int i = 0; i < x.size(); ++i) {
    const double x0 = map.invert(map.tau(x(i)) - t);
    u(i) = u0(x0) * a(x0) / a(x(i));
  }
  return u;
}

}  // namespace splitstab
