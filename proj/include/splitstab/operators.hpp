#pragma once

// Diagonal-norm summation-by-parts first-derivative operators on the
// reference interval [0,1], plus uniform multi-block grid assembly.

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace splitstab {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

enum class Family { CSBP, Circulant, LGL };

inline std::string family_name(Family f) {
  switch (f) {
    case Family::CSBP: return "csbp";
    case Family::Circulant: return "circulant";
    case Family::LGL: return "lgl";
  }
  return "?";
}

struct Operator {
  Family family{Family::CSBP};
  int p{0};       // CSBP boundary order / LGL degree / circulant interior order
  int n_nodes{0};
  Vec nodes;      // reference coordinates
  Vec h_diag;     // diagonal of the norm matrix H
  Mat d_mat;      // difference matrix D
  Mat e_mat;      // boundary matrix E = tr tr^T - tl tl^T (zero for circulant)
  Vec tl, tr;     // boundary projection vectors

  Mat q_mat() const { return h_diag.asDiagonal() * d_mat; }
};

namespace detail {

// Dimensionless interior Q stencil (positive offsets) for central differences.
inline std::vector<double> interior_stencil(int order) {
  switch (order) {
    case 2: return {1.0 / 2.0};
    case 4: return {2.0 / 3.0, -1.0 / 12.0};
    case 6: return {3.0 / 4.0, -3.0 / 20.0, 1.0 / 60.0};
    case 8: return {4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0};
    default:
      throw std::invalid_argument("interior stencil order must be 2, 4, 6 or 8, got " +
                                  std::to_string(order));
  }
}

// k * i^(k-1) with the convention 0^0 = 1, evaluated on the integer lattice.
inline double accuracy_rhs(int k, int i) {
  if (k == 0) return 0.0;
  if (k == 1) return 1.0;
  return static_cast<double>(k) * std::pow(static_cast<double>(i), k - 1);
}

struct Closure {
  Mat b_corner;               // skew part of Q in the top-left corner
  std::vector<double> w;      // boundary norm weights (H/h)
};

// Boundary closures for p = 3, 4 are solved at construction: the unknowns are
// the strictly-upper corner of the skew part B = Q - E/2 (corner size 2p) and,
// for p = 4, the boundary norm weights. Entries outside the corner are forced
// by skew-symmetry against the interior stencil, so Q + Q^T = E holds exactly
// by construction and only the accuracy conditions need solving. The system is
// dimensionless (integer lattice), hence independent of n.
inline Closure solve_closure(int p, const std::vector<double>* fixed_w) {
  const int r = 2 * p;
  const auto s = interior_stencil(2 * p);
  const int hw = static_cast<int>(s.size());

  const int nt = r * (r - 1) / 2;
  const bool solve_w = (fixed_w == nullptr);
  const int nu = nt + (solve_w ? r : 0);
  auto tidx = [&](int a, int b) {  // a < b
    return a * r - a * (a + 1) / 2 + (b - a - 1);
  };

  const int neq = r * (p + 1);
  Mat A = Mat::Zero(neq, nu);
  Vec rhs = Vec::Zero(neq);

  // Rows are scaled by sigma^-k so lattice powers stay O(1); this only
  // rebalances the least-squares system, the solution set is unchanged.
  const double sigma = r;
  int eq = 0;
  for (int i = 0; i < r; ++i) {
    for (int k = 0; k <= p; ++k, ++eq) {
      // sum_j Q_ij j^k = k i^(k-1) w_i with Q = B + E/2.
      const double rsc = std::pow(sigma, -k);
      for (int b = i + 1; b < r; ++b) A(eq, tidx(i, b)) += rsc * std::pow(double(b), k);
      for (int a = 0; a < i; ++a) A(eq, tidx(a, i)) -= rsc * std::pow(double(a), k);
      double c = 0.0;
      if (i == 0 && k == 0) c -= 0.5;  // E/2 contribution at the corner
      for (int j = r; j <= i + hw; ++j) c += s[j - i - 1] * std::pow(double(j), k);
      if (solve_w) {
        A(eq, nt + i) = -rsc * accuracy_rhs(k, i);
        rhs(eq) = rsc * (accuracy_rhs(k, i) - c);
      } else {
        rhs(eq) = rsc * (accuracy_rhs(k, i) * (*fixed_w)[i] - c);
      }
    }
  }

  Eigen::JacobiSVD<Mat> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(1e-12);
  Vec u = svd.solve(rhs);
  u += svd.solve(rhs - A * u);  // one refinement pass
  const double res = (A * u - rhs).lpNorm<Eigen::Infinity>();
  if (res > 1e-12)
    throw std::runtime_error("closure solve for p=" + std::to_string(p) +
                             " left accuracy residual " + std::to_string(res));

  Closure cl;
  cl.b_corner = Mat::Zero(r, r);
  for (int a = 0; a < r; ++a)
    for (int b = a + 1; b < r; ++b) {
      cl.b_corner(a, b) = u(tidx(a, b));
      cl.b_corner(b, a) = -u(tidx(a, b));
    }
  cl.w.resize(r);
  for (int i = 0; i < r; ++i) cl.w[i] = solve_w ? 1.0 + u(nt + i) : (*fixed_w)[i];
  for (double wi : cl.w)
    if (!(wi > 0.0))
      throw std::runtime_error("closure solve for p=" + std::to_string(p) +
                               " produced a non-positive norm weight");
  return cl;
}

inline Closure csbp_closure(int p) {
  switch (p) {
    case 1: {
      Closure cl;
      cl.b_corner = Mat::Zero(2, 2);
      cl.b_corner(0, 1) = 0.5;
      cl.b_corner(1, 0) = -0.5;
      cl.w = {0.5, 1.0};
      return cl;
    }
    case 2: {
      Closure cl;
      cl.b_corner = Mat::Zero(4, 4);
      const double b01 = 59.0 / 96.0, b02 = -1.0 / 12.0, b03 = -1.0 / 32.0;
      const double b12 = 59.0 / 96.0, b13 = 0.0, b23 = 59.0 / 96.0;
      cl.b_corner << 0, b01, b02, b03,
                    -b01, 0, b12, b13,
                    -b02, -b12, 0, b23,
                    -b03, -b13, -b23, 0;
      cl.w = {17.0 / 48.0, 59.0 / 48.0, 43.0 / 48.0, 49.0 / 48.0};
      return cl;
    }
    case 3: {
      static const std::vector<double> w = {13649.0 / 43200.0, 12013.0 / 8640.0,
                                            2711.0 / 4320.0, 5359.0 / 4320.0,
                                            7877.0 / 8640.0, 43801.0 / 43200.0};
      return solve_closure(3, &w);
    }
    case 4:
      return solve_closure(4, nullptr);
    default:
      throw std::invalid_argument("build_csbp: p must be in 1..4, got " + std::to_string(p));
  }
}

}  // namespace detail

inline Operator build_csbp(int p, int n_nodes) {
  if (p < 1 || p > 4)
    throw std::invalid_argument("build_csbp: p must be in 1..4, got " + std::to_string(p));
  const int n_min = 5 * p;
  if (n_nodes < n_min)
    throw std::invalid_argument("build_csbp: p=" + std::to_string(p) + " needs at least " +
                                std::to_string(n_min) + " nodes, got " + std::to_string(n_nodes));

  const auto cl = detail::csbp_closure(p);
  const int r = static_cast<int>(cl.w.size());
  const auto s = detail::interior_stencil(2 * p);
  const int hw = static_cast<int>(s.size());
  const int n = n_nodes;
  const double h = 1.0 / (n - 1);

  Operator op;
  op.family = Family::CSBP;
  op.p = p;
  op.n_nodes = n;
  op.nodes = Vec::LinSpaced(n, 0.0, 1.0);
  op.h_diag = Vec::Constant(n, h);
  for (int i = 0; i < r; ++i) {
    op.h_diag(i) = h * cl.w[i];
    op.h_diag(n - 1 - i) = h * cl.w[i];
  }

  // Assemble the dimensionless skew part B, then Q = B + E/2, D = H^{-1} Q.
  Mat B = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int k = 1; k <= hw; ++k) {
      if (i + k < n) B(i, i + k) = s[k - 1];
      if (i - k >= 0) B(i, i - k) = -s[k - 1];
    }
  for (int a = 0; a < r; ++a)
    for (int b = 0; b < r; ++b) {
      B(a, b) = cl.b_corner(a, b);
      B(n - 1 - a, n - 1 - b) = -cl.b_corner(a, b);  // mirrored right closure
    }

  op.tl = Vec::Zero(n);
  op.tr = Vec::Zero(n);
  op.tl(0) = 1.0;
  op.tr(n - 1) = 1.0;
  op.e_mat = op.tr * op.tr.transpose() - op.tl * op.tl.transpose();

  Mat Q = B + 0.5 * op.e_mat;
  op.d_mat = op.h_diag.cwiseInverse().asDiagonal() * Q;
  return op;
}

inline Operator build_circulant(int order, int n_nodes, double h) {
  detail::interior_stencil(order);  // validates order
  if (n_nodes <= order)
    throw std::invalid_argument("build_circulant: order " + std::to_string(order) +
                                " needs more than " + std::to_string(order) + " nodes, got " +
                                std::to_string(n_nodes));
  if (!(h > 0.0)) throw std::invalid_argument("build_circulant: h must be positive");

  const auto s = detail::interior_stencil(order);
  const int hw = static_cast<int>(s.size());
  const int n = n_nodes;

  Operator op;
  op.family = Family::Circulant;
  op.p = order;
  op.n_nodes = n;
  op.nodes = Vec::LinSpaced(n, 0.0, (n - 1) * h);
  op.h_diag = Vec::Constant(n, h);

  Mat Q = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int k = 1; k <= hw; ++k) {
      Q(i, (i + k) % n) += s[k - 1];
      Q(i, ((i - k) % n + n) % n) -= s[k - 1];
    }
  op.d_mat = Q / h;
  op.e_mat = Mat::Zero(n, n);
  op.tl = Vec::Zero(n);
  op.tr = Vec::Zero(n);
  return op;
}

namespace detail {

// Legendre P_N, P'_N, P''_N at x via the three-term recurrence; the second
// derivative uses the Legendre ODE to avoid a separate recurrence.
inline void legendre_eval(int N, double x, double& P, double& dP, double& ddP) {
  double p0 = 1.0, p1 = x;
  if (N == 0) { P = 1.0; dP = 0.0; ddP = 0.0; return; }
  for (int k = 2; k <= N; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  P = p1;
  const double om = 1.0 - x * x;
  if (std::abs(om) < 1e-30) {  // endpoint formulas
    dP = 0.5 * N * (N + 1) * (x > 0 ? 1.0 : (N % 2 == 0 ? -1.0 : 1.0));
    ddP = 0.0;
    return;
  }
  dP = N * (p0 - x * p1) / om;
  ddP = (2.0 * x * dP - N * (N + 1.0) * p1) / om;
}

}  // namespace detail

inline Operator build_lgl(int p) {
  if (p < 1 || p > 15)
    throw std::invalid_argument("build_lgl: p must be in 1..15, got " + std::to_string(p));
  const int N = p;
  const int n = p + 1;

  // Interior nodes are roots of P'_N on (-1,1); Newton from Chebyshev-Lobatto guesses.
  Vec xs(n);
  xs(0) = -1.0;
  xs(n - 1) = 1.0;
  for (int i = 1; i < n - 1; ++i) {
    double x = -std::cos(M_PI * i / p);
    double P, dP, ddP;
    bool ok = false;
    for (int it = 0; it < 100; ++it) {
      detail::legendre_eval(N, x, P, dP, ddP);
      const double dx = dP / ddP;
      x -= dx;
      if (std::abs(dx) < 1e-14) { ok = true; break; }
    }
    if (!ok) {
      detail::legendre_eval(N, x, P, dP, ddP);
      throw std::runtime_error("build_lgl: Newton stalled at node " + std::to_string(i) +
                               " of p=" + std::to_string(p) + ", |P'|=" + std::to_string(dP));
    }
    xs(i) = x;
  }
  std::sort(xs.data(), xs.data() + n);
  for (int i = 0; i + 1 < n; ++i)
    if (!(xs(i) < xs(i + 1)))
      throw std::runtime_error("build_lgl: node ordering degenerate at p=" + std::to_string(p));

  Vec Pn(n);
  for (int i = 0; i < n; ++i) {
    double P, dP, ddP;
    detail::legendre_eval(N, xs(i), P, dP, ddP);
    Pn(i) = P;
  }

  Vec w(n);
  for (int i = 0; i < n; ++i) w(i) = 2.0 / (N * (N + 1.0) * Pn(i) * Pn(i));

  Mat D = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) D(i, j) = Pn(i) / (Pn(j) * (xs(i) - xs(j)));
  D(0, 0) = -N * (N + 1.0) / 4.0;
  D(n - 1, n - 1) = N * (N + 1.0) / 4.0;

  Operator op;
  op.family = Family::LGL;
  op.p = p;
  op.n_nodes = n;
  op.nodes = (xs.array() + 1.0) / 2.0;  // map [-1,1] -> [0,1]
  op.h_diag = w / 2.0;
  op.d_mat = 2.0 * D;
  op.tl = Vec::Zero(n);
  op.tr = Vec::Zero(n);
  op.tl(0) = 1.0;
  op.tr(n - 1) = 1.0;
  op.e_mat = op.tr * op.tr.transpose() - op.tl * op.tl.transpose();
  return op;
}

struct Grid {
  double x_min{0.0}, x_max{1.0};
  int n_blocks{1};
  bool periodic{true};
  Operator ref_op;    // reference-interval operator
  Operator block_op;  // scaled to a single block
  Vec x;              // global node coordinates (interface nodes duplicated)
  Vec h_global;       // global H diagonal
  int block_size{0};

  int n_total() const { return n_blocks * block_size; }
  int gid(int b, int i) const { return b * block_size + i; }
};

inline Grid assemble_grid(double x_min, double x_max, int n_blocks, const Operator& op,
                          bool periodic = true) {
  if (!(x_max > x_min)) throw std::invalid_argument("assemble_grid: empty domain");
  if (n_blocks < 1) throw std::invalid_argument("assemble_grid: n_blocks must be >= 1");
  if (op.family == Family::Circulant && n_blocks != 1)
    throw std::invalid_argument("assemble_grid: circulant operators are single-block");

  Grid g;
  g.x_min = x_min;
  g.x_max = x_max;
  g.n_blocks = n_blocks;
  g.periodic = periodic;
  g.ref_op = op;
  g.block_size = op.n_nodes;

  // Affine block map: the reference cell spans 1 for CSBP/LGL and n*h for the
  // periodic circulant cell (the wrap interval beyond the last node included).
  const double width = (x_max - x_min) / n_blocks;
  const double ref_span = (op.family == Family::Circulant)
                              ? op.n_nodes * op.h_diag(0)
                              : 1.0;
  const double scale = width / ref_span;

  g.block_op = op;
  g.block_op.d_mat = op.d_mat / scale;
  g.block_op.h_diag = op.h_diag * scale;

  const int n = op.n_nodes;
  g.x.resize(n_blocks * n);
  g.h_global.resize(n_blocks * n);
  for (int b = 0; b < n_blocks; ++b)
    for (int i = 0; i < n; ++i) {
      g.x(g.gid(b, i)) = x_min + width * (b + op.nodes(i) / ref_span);
      g.h_global(g.gid(b, i)) = g.block_op.h_diag(i);
    }
  return g;
}

}  // namespace splitstab
