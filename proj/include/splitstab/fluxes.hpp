#pragma once

// Symmetric consistent two-point fluxes for f = a(x) u, and their partial
// derivatives with respect to the two states.

#include <cmath>
#include <stdexcept>
#include <string>

namespace splitstab {

enum class FluxKind { Central, Product, Geometric, Logarithmic };

inline std::string flux_name(FluxKind k) {
  switch (k) {
    case FluxKind::Central: return "central";
    case FluxKind::Product: return "product";
    case FluxKind::Geometric: return "geometric";
    case FluxKind::Logarithmic: return "logarithmic";
  }
  return "?";
}

inline FluxKind flux_kind_from(const std::string& s) {
  if (s == "central") return FluxKind::Central;
  if (s == "product") return FluxKind::Product;
  if (s == "geometric") return FluxKind::Geometric;
  if (s == "logarithmic") return FluxKind::Logarithmic;
  throw std::invalid_argument("unknown flux kind '" + s + "'");
}

namespace detail {

[[noreturn]] inline void flux_domain_error(const char* kind, double fi, double fj) {
  throw std::domain_error(std::string(kind) + " flux needs positive arguments, got (" +
                          std::to_string(fi) + ", " + std::to_string(fj) + ")");
}

}  // namespace detail

inline double flux_central(double fi, double fj) { return 0.5 * (fi + fj); }

inline double flux_product(double ai, double ui, double aj, double uj) {
  return 0.5 * (ai * uj + aj * ui);
}

inline double flux_geometric(double fi, double fj) {
  if (!(fi > 0.0) || !(fj > 0.0)) detail::flux_domain_error("geometric", fi, fj);
  return std::sqrt(fi * fj);
}

// Logarithmic mean (fj - fi)/(log fj - log fi). Near fi = fj the quotient
// cancels; with xi = (fi - fj)/(fi + fj) the identity
//   log(fj/fi) = -2 xi (1 + xi^2/3 + xi^4/5 + xi^6/7 + ...)
// gives mean = (fi + fj) / (2 (1 + xi^2/3 + xi^4/5 + xi^6/7)), used when
// xi^2 < 1e-4 (truncation error below 1e-17 there).
inline double flux_logarithmic(double fi, double fj) {
  if (!(fi > 0.0) || !(fj > 0.0)) detail::flux_domain_error("logarithmic", fi, fj);
  const double xi = (fi - fj) / (fi + fj);
  const double xi2 = xi * xi;
  if (xi2 < 1e-4)
    return (fi + fj) / (2.0 * (1.0 + xi2 / 3.0 + xi2 * xi2 / 5.0 + xi2 * xi2 * xi2 / 7.0));
  return (fj - fi) / (std::log(fj) - std::log(fi));
}

inline double flux_eval(FluxKind k, double ai, double ui, double aj, double uj) {
  switch (k) {
    case FluxKind::Central: return flux_central(ai * ui, aj * uj);
    case FluxKind::Product: return flux_product(ai, ui, aj, uj);
    case FluxKind::Geometric: return flux_geometric(ai * ui, aj * uj);
    case FluxKind::Logarithmic: return flux_logarithmic(ai * ui, aj * uj);
  }
  throw std::logic_error("unreachable flux kind");
}

struct FluxPartials {
  double d1;  // dF/du_i
  double d2;  // dF/du_j
};

inline FluxPartials flux_partials(FluxKind k, double ai, double ui, double aj, double uj) {
  switch (k) {
    case FluxKind::Central:
      return {0.5 * ai, 0.5 * aj};
    case FluxKind::Product:
      return {0.5 * aj, 0.5 * ai};
    case FluxKind::Geometric: {
      const double fi = ai * ui, fj = aj * uj;
      if (!(fi > 0.0) || !(fj > 0.0)) detail::flux_domain_error("geometric", fi, fj);
      const double rt = std::sqrt(fj / fi);
      return {0.5 * ai * rt, 0.5 * aj / rt};
    }
    case FluxKind::Logarithmic: {
      const double fi = ai * ui, fj = aj * uj;
      if (!(fi > 0.0) || !(fj > 0.0)) detail::flux_domain_error("logarithmic", fi, fj);
      const double xi = (fi - fj) / (fi + fj);
      const double xi2 = xi * xi;
      double L;  // log(fj/fi)
      if (xi2 < 1e-4)
        L = -2.0 * xi * (1.0 + xi2 / 3.0 + xi2 * xi2 / 5.0 + xi2 * xi2 * xi2 / 7.0);
      else
        L = std::log(fj) - std::log(fi);
      if (std::abs(L) < 1e-3) {
        // dF/dfi = (e^L - 1 - L)/L^2, dF/dfj = (L - 1 + e^-L)/L^2, expanded.
        const double d1 = 0.5 + L / 6.0 + L * L / 24.0 + L * L * L / 120.0;
        const double d2 = 0.5 - L / 6.0 + L * L / 24.0 - L * L * L / 120.0;
        return {ai * d1, aj * d2};
      }
      const double m = (fj - fi) / L;
      return {ai * (m / fi - 1.0) / L, aj * (1.0 - m / fj) / L};
    }
  }
  throw std::logic_error("unreachable flux kind");
}

}  // namespace splitstab
