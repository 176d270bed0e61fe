#pragma once

// Eigen-diagnostics for semidiscrete operators: full spectra with residual
// checks, boundary localization, local Rayleigh-quotient growth maps,
// weighted symmetric-part extremes, unstable-mode projections, and the
// frozen-coefficient growth-rate predictor.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <complex>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "splitstab/jacobian.hpp"

namespace splitstab {

using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

struct SpectrumReport {
  CVec eigenvalues;   // sorted by descending real part
  CMat eigenvectors;  // columns aligned with eigenvalues
  Vec rho_bdy;        // boundary localization per mode; zero without a grid
  double re_lambda_max{0.0};
  double spectral_radius{0.0};
};

namespace detail {

// Parlett-Reinsch diagonal balancing: returns the scaling d with
// A_balanced = diag(d)^-1 A diag(d) applied in place.
inline Vec balance_in_place(Mat& A) {
  const int n = static_cast<int>(A.rows());
  Vec d = Vec::Ones(n);
  const double radix = 2.0, sqrdx = radix * radix;
  bool done = false;
  while (!done) {
    done = true;
    for (int i = 0; i < n; ++i) {
      double r = 0.0, c = 0.0;
      for (int j = 0; j < n; ++j)
        if (j != i) {
          c += std::abs(A(j, i));
          r += std::abs(A(i, j));
        }
      if (c == 0.0 || r == 0.0) continue;
      double f = 1.0;
      const double s = c + r;
      double g = r / radix;
      while (c < g) {
        f *= radix;
        c *= sqrdx;
      }
      g = r * radix;
      while (c > g) {
        f /= radix;
        c /= sqrdx;
      }
      if ((c + r) / f < 0.95 * s) {
        done = false;
        d(i) *= f;
        A.row(i) *= 1.0 / f;
        A.col(i) *= f;
      }
    }
  }
  return d;
}

}  // namespace detail

// Boundary node indices: first and last node of every block; empty for
// circulant operators, which have no block boundaries.
inline std::vector<int> boundary_index_set(const Grid& g) {
  std::vector<int> idx;
  if (g.ref_op.family == Family::Circulant) return idx;
  for (int b = 0; b < g.n_blocks; ++b) {
    idx.push_back(g.gid(b, 0));
    idx.push_back(g.gid(b, g.block_size - 1));
  }
  return idx;
}

inline double rho_bdy(const CVec& phi, const Vec& h_diag,
                      const std::vector<int>& boundary) {
  double total = 0.0;
  for (int i = 0; i < phi.size(); ++i) total += h_diag(i) * std::norm(phi(i));
  if (total == 0.0) throw std::domain_error("rho_bdy: zero eigenvector");
  double bdy = 0.0;
  for (int i : boundary) bdy += h_diag(i) * std::norm(phi(i));
  return bdy / total;
}

// Full spectrum with per-mode residual verification. When a grid is given,
// boundary localization is attached to every mode.
inline SpectrumReport eig(const Mat& J, const Grid* g = nullptr) {
  const int n = static_cast<int>(J.rows());
  Mat bal = J;
  Vec d = detail::balance_in_place(bal);
  Eigen::EigenSolver<Mat> es(bal);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("eig: dense eigensolver failed to converge");

  CVec lam = es.eigenvalues();
  CMat V = es.eigenvectors();
  for (int k = 0; k < n; ++k) {
    V.col(k) = d.cast<std::complex<double>>().cwiseProduct(V.col(k));
    V.col(k) /= V.col(k).norm();
  }

  for (int k = 0; k < n; ++k) {
    const double res = (J.cast<std::complex<double>>() * V.col(k) - lam(k) * V.col(k)).norm();
    if (!(res < 1e-9))
      throw std::runtime_error("eig: eigenpair residual " + std::to_string(res) +
                               " exceeds 1e-9 for mode " + std::to_string(k));
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int i, int j) {
    if (lam(i).real() != lam(j).real()) return lam(i).real() > lam(j).real();
    return lam(i).imag() > lam(j).imag();
  });

  SpectrumReport rep;
  rep.eigenvalues.resize(n);
  rep.eigenvectors.resize(n, n);
  rep.rho_bdy = Vec::Zero(n);
  const std::vector<int> bdy = g != nullptr ? boundary_index_set(*g) : std::vector<int>{};
  for (int k = 0; k < n; ++k) {
    rep.eigenvalues(k) = lam(order[k]);
    rep.eigenvectors.col(k) = V.col(order[k]);
    if (g != nullptr) rep.rho_bdy(k) = rho_bdy(rep.eigenvectors.col(k), g->h_global, bdy);
  }
  rep.re_lambda_max = rep.eigenvalues(0).real();
  rep.spectral_radius = rep.eigenvalues.cwiseAbs().maxCoeff();
  return rep;
}

// Local growth map g_i = Re(conj(phi_i) (S_W phi)_i) / ||phi||_W^2; sums to
// Re(lambda) when phi is an eigenvector of J.
inline Vec local_growth(const CVec& phi, const Mat& J, Weighting w, const Grid& g,
                        const Vec& a = Vec()) {
  if (w == Weighting::Euclidean)
    throw std::invalid_argument("local_growth: use Hnorm or AHnorm weighting");
  if (phi.norm() == 0.0) throw std::domain_error("local_growth: zero vector");
  Vec wdiag = w == Weighting::Hnorm ? g.h_global : Vec(a.cwiseProduct(g.h_global));
  Mat S = jac_sym(J, w, g, a);
  CVec Sphi = S.cast<std::complex<double>>() * phi;
  double norm2 = 0.0;
  for (int i = 0; i < phi.size(); ++i) norm2 += wdiag(i) * std::norm(phi(i));
  Vec out(phi.size());
  for (int i = 0; i < phi.size(); ++i)
    out(i) = (std::conj(phi(i)) * Sphi(i)).real() / norm2;
  return out;
}

// Largest eigenvalue of the plain symmetric part (J + J^T)/2.
inline double lambda_max_sym(const Mat& J) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (J + Mat(J.transpose())),
                                        Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

// Largest eigenvalue of the weighted symmetric part: the instantaneous growth
// rate of the corresponding norm. Weighted variants solve the congruent
// W^{-1/2} S_W W^{-1/2} problem so the result is a rate, not a scaled energy.
inline double lambda_max_sym(const Mat& J, Weighting w, const Grid& g,
                             const Vec& a = Vec()) {
  Mat S = jac_sym(J, w, g, a);
  if (w != Weighting::Euclidean) {
    Vec wdiag = w == Weighting::Hnorm ? g.h_global : Vec(a.cwiseProduct(g.h_global));
    Vec isqrt = wdiag.cwiseSqrt().cwiseInverse();
    S = isqrt.asDiagonal() * S * isqrt.asDiagonal();
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(S, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

struct GrowthCurve {
  Vec times;
  Vec values;          // H-norm of the unstable-subspace evolution
  double condition{0.0};  // eigenbasis condition number
  bool ill_conditioned{false};
};

// Projects u0 onto the modes with Re(lambda) > threshold and evaluates the
// H-norm of their free evolution on the given times.
inline GrowthCurve project_unstable(const Vec& u0, const SpectrumReport& rep,
                                    double threshold, const Vec& h_diag,
                                    const Vec& times) {
  if (threshold < 0.0) throw std::invalid_argument("project_unstable: threshold < 0");
  const int n = static_cast<int>(u0.size());
  GrowthCurve out;
  out.times = times;
  out.values = Vec::Zero(times.size());

  Eigen::BDCSVD<CMat> svd(rep.eigenvectors);
  const double smin = svd.singularValues()(svd.singularValues().size() - 1);
  out.condition = smin > 0.0 ? svd.singularValues()(0) / smin
                             : std::numeric_limits<double>::infinity();
  out.ill_conditioned = !(out.condition < 1e12);

  CVec c = rep.eigenvectors.colPivHouseholderQr().solve(u0.cast<std::complex<double>>());

  std::vector<int> unstable;
  for (int k = 0; k < n; ++k)
    if (rep.eigenvalues(k).real() > threshold) unstable.push_back(k);
  if (unstable.empty()) return out;

  for (int t = 0; t < times.size(); ++t) {
    CVec acc = CVec::Zero(n);
    for (int k : unstable)
      acc += c(k) * std::exp(rep.eigenvalues(k) * times(t)) * rep.eigenvectors.col(k);
    double norm2 = 0.0;
    for (int i = 0; i < n; ++i) norm2 += h_diag(i) * std::norm(acc(i));
    out.values(t) = std::sqrt(norm2);
  }
  return out;
}

enum class FrozenScheme { SplitForm, Geometric };

struct FrozenRate {
  double re{0.0}, im{0.0};
  double beta0{0.0}, beta1{0.0}, nu0{0.0}, nu1{0.0};
};

// Frozen-coefficient Fourier growth rate about a(x) = a0 + a1 d,
// U(x) = U0 + U1 d: Re = -a1 + h^2 b1 - h^2 k^2 n0, Im = -a0 k + h^2 k b0
// + h^2 k n1. The split form has n0 = (1-alpha) a1 / 2 and zero b0, b1, n1.
inline FrozenRate frozen_rate_predictor(double a0, double a1, double U0, double U1,
                                        double h, double kappa, FrozenScheme scheme,
                                        double alpha = 1.0) {
  if (!(a0 > 0.0)) throw std::domain_error("frozen_rate_predictor: a0 must be > 0");
  FrozenRate r;
  if (scheme == FrozenScheme::SplitForm) {
    r.nu0 = 0.5 * (1.0 - alpha) * a1;
  } else {
    if (!(U0 > 0.0))
      throw std::domain_error("frozen_rate_predictor: U0 must be > 0 for the geometric scheme");
    const double ra = a1 / a0, ru = U1 / U0;
    r.beta0 = a0 / 8.0 * (ra * ra - ru * ru);
    // Expanded so a1 = 0 needs no special case.
    r.beta1 = -a1 * a1 * a1 / (8.0 * a0 * a0) - a1 * ru * ru / 8.0 +
              a0 * ru * ru * ru / 4.0;
    r.nu0 = 0.25 * (a1 + a0 * ru);
    r.nu1 = 0.25 * (a1 * ru - a0 * ru * ru);
  }
  r.re = -a1 + h * h * r.beta1 - h * h * kappa * kappa * r.nu0;
  r.im = -a0 * kappa + h * h * kappa * r.beta0 + h * h * kappa * r.nu1;
  return r;
}

}  // namespace splitstab
