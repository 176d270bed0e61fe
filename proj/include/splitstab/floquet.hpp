// Monodromy matrices for time-periodic linearizations: exponential-midpoint
// products, Floquet multipliers and exponents, and transient-growth
// diagnostics in the H-weighted norm.
#pragma once

#include <splitstab/spectral.hpp>

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace splitstab {

// Matrix exponential, scaling-and-squaring with Pade approximants.
// Inputs and the result must stay finite; extreme norms overflow.
inline Mat expm(const Mat& m) {
  if (m.rows() != m.cols()) {
    std::ostringstream os;
    os << "expm: matrix must be square, got " << m.rows() << "x" << m.cols();
    throw std::invalid_argument(os.str());
  }
  if (!m.allFinite()) {
    throw std::invalid_argument("expm: matrix has non-finite entries");
  }
  Mat e = m.exp();
  if (!e.allFinite()) {
    std::ostringstream os;
    os << "expm: result overflowed, ||M||_inf = "
       << m.cwiseAbs().rowwise().sum().maxCoeff();
    throw std::runtime_error(os.str());
  }
  return e;
}

struct Monodromy {
  double T{0.0};  // period
  int K{0};       // subintervals in the midpoint product
  Mat psi_T;      // fundamental solution advanced over one period
  CVec multipliers;  // eigenvalues of psi_T, sorted by descending modulus
  CVec exponents;    // log(multiplier) / T, principal branch; the imaginary
                     // part is defined only up to additive shifts of 2*pi/T
  double sigma_max{std::numeric_limits<double>::quiet_NaN()};
  CVec dominant_mode;  // unit eigenvector of the largest-modulus multiplier
  bool defective{false};  // eigenvector basis unreliable; fields still filled
};

namespace detail {

struct PsiEigs {
  CVec values;   // sorted by descending modulus
  CMat vectors;  // unit columns aligned with values (empty if not requested)
  double max_residual{0.0};
  double basis_condition{1.0};
};

// Eigen-decomposition of a monodromy matrix. Unlike eig(), inaccurate or
// defective decompositions are reported through the residual and the basis
// condition number instead of throwing; callers decide how to react.
inline PsiEigs psi_eigs(const Mat& psi, bool want_vectors) {
  Mat bal = psi;
  Vec d = balance_in_place(bal);
  Eigen::EigenSolver<Mat> es(bal, want_vectors);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("psi_eigs: eigenvalue iteration failed");
  }
  const int n = static_cast<int>(psi.rows());
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  const CVec vals = es.eigenvalues();
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const double ma = std::abs(vals(a)), mb = std::abs(vals(b));
    if (ma != mb) return ma > mb;
    if (vals(a).real() != vals(b).real()) return vals(a).real() > vals(b).real();
    return vals(a).imag() > vals(b).imag();
  });
  PsiEigs out;
  out.values.resize(n);
  for (int i = 0; i < n; ++i) out.values(i) = vals(order[i]);
  if (want_vectors) {
    out.vectors.resize(n, n);
    for (int i = 0; i < n; ++i) {
      CVec phi = d.asDiagonal() * CVec(es.eigenvectors().col(order[i]));
      phi /= phi.norm();
      out.vectors.col(i) = phi;
      out.max_residual = std::max(
          out.max_residual, (psi * phi - out.values(i) * phi).norm());
    }
    Eigen::JacobiSVD<CMat> svd(out.vectors);
    const double smin = svd.singularValues().minCoeff();
    out.basis_condition =
        smin > 0.0 ? svd.singularValues().maxCoeff() / smin
                   : std::numeric_limits<double>::infinity();
  }
  return out;
}

// Ascending-time exponential-midpoint product: the factor at the lowest
// midpoint is applied to the state first, so it sits rightmost.
inline Mat midpoint_product(const std::function<Mat(double)>& jac_at, double T,
                            int K) {
  const double dt = T / K;
  Mat psi;
  for (int j = 1; j <= K; ++j) {
    const double t_mid = (j - 0.5) * dt;
    Mat jac = jac_at(t_mid);
    if (jac.rows() != jac.cols()) {
      throw std::invalid_argument("monodromy: provider returned a non-square matrix");
    }
    if (j == 1) {
      psi = expm(jac * dt);
    } else {
      if (jac.rows() != psi.rows()) {
        throw std::invalid_argument("monodromy: provider changed dimension");
      }
      psi = expm(jac * dt) * psi;
    }
  }
  return psi;
}

}  // namespace detail

// Fundamental solution over one period by the exponential midpoint method,
// Psi(T) = prod_j exp(J(t_{j-1/2}) dt). Multipliers and exponents are always
// filled; sigma_max and the dominant mode need floquet_diagnostics() and an
// H weight. With tol > 0, K doubles until the dominant modulus changes by
// less than tol between refinements (the refined product is kept).
inline Monodromy monodromy(const std::function<Mat(double)>& jac_at, double T,
                           int K = 256, double tol = -1.0,
                           int k_cap = 1 << 20) {
  if (!(T > 0.0)) throw std::invalid_argument("monodromy: period must be positive");
  if (K < 1) throw std::invalid_argument("monodromy: K must be at least 1");
  Monodromy out;
  out.T = T;
  out.K = K;
  out.psi_T = detail::midpoint_product(jac_at, T, K);
  CVec mults = detail::psi_eigs(out.psi_T, false).values;
  if (tol > 0.0) {
    double prev = mults.cwiseAbs().maxCoeff();
    while (true) {
      if (2L * out.K > k_cap) {
        std::ostringstream os;
        os << "monodromy: max multiplier modulus still moving at K = " << out.K
           << " (previous " << prev << ", refined "
           << mults.cwiseAbs().maxCoeff() << ", tol " << tol << ")";
        throw std::runtime_error(os.str());
      }
      prev = mults.cwiseAbs().maxCoeff();
      out.K *= 2;
      out.psi_T = detail::midpoint_product(jac_at, T, out.K);
      mults = detail::psi_eigs(out.psi_T, false).values;
      if (std::abs(mults.cwiseAbs().maxCoeff() - prev) < tol) break;
    }
  }
  out.multipliers = mults;
  out.exponents.resize(mults.size());
  for (int i = 0; i < mults.size(); ++i) {
    out.exponents(i) = std::log(mults(i)) / T;
  }
  return out;
}

// Full diagnostics for an existing monodromy matrix: sorted multipliers and
// principal-branch exponents, the dominant mode, and transient growth as the
// largest singular value of H^{1/2} Psi H^{-1/2}. A defective or inaccurate
// eigenbasis sets the warning flag; the diagnostics are still emitted.
inline Monodromy floquet_diagnostics(const Mat& psi, double T, int K,
                                     const Vec& h_diag) {
  if (!(T > 0.0)) {
    throw std::invalid_argument("floquet_diagnostics: period must be positive");
  }
  if (psi.rows() != psi.cols() || psi.rows() != h_diag.size()) {
    throw std::invalid_argument("floquet_diagnostics: size mismatch between psi and H");
  }
  if ((h_diag.array() <= 0.0).any()) {
    throw std::invalid_argument("floquet_diagnostics: H weights must be positive");
  }
  Monodromy out;
  out.T = T;
  out.K = K;
  out.psi_T = psi;
  detail::PsiEigs pe = detail::psi_eigs(psi, true);
  out.multipliers = pe.values;
  out.exponents.resize(pe.values.size());
  for (int i = 0; i < pe.values.size(); ++i) {
    out.exponents(i) = std::log(pe.values(i)) / T;
  }
  out.dominant_mode = pe.vectors.col(0);
  out.defective = pe.max_residual > 1e-6 || pe.basis_condition > 1e12;
  const Vec h_sqrt = h_diag.cwiseSqrt();
  Mat scaled = h_sqrt.asDiagonal() * psi * h_sqrt.cwiseInverse().asDiagonal();
  Eigen::BDCSVD<Mat> svd(scaled);
  out.sigma_max = svd.singularValues()(0);
  return out;
}

inline Monodromy floquet_diagnostics(const Monodromy& m, const Vec& h_diag) {
  return floquet_diagnostics(m.psi_T, m.T, m.K, h_diag);
}

}  // namespace splitstab
