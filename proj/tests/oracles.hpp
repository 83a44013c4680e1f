#pragma once

// Test-only oracles, independent of the library implementation paths they
// check.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace oracles {

// Deterministic xorshift-style rng; keeps test values identical everywhere.
struct Rng {
  std::uint64_t state = 0x853C49E6748FEA9BULL;

  explicit Rng(std::uint64_t seed) : state(seed ^ 0x9E3779B97F4A7C15ULL) { next(); }

  std::uint64_t next() {
    state ^= state << 13;
    state ^= state >> 7;
    state ^= state << 17;
    return state;
  }

  double uniform(double lo, double hi) {
    const double u = static_cast<double>(next() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
  }

  int uniform_int(int lo, int hi) {  // inclusive
    return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1));
  }

  bool coin(double p = 0.5) { return uniform(0.0, 1.0) < p; }
};

// Dense Gaussian elimination with partial pivoting; the independent route for
// polynomial boundary systems.
inline std::vector<double> solve_dense(std::vector<std::vector<double>> a,
                                       std::vector<double> b) {
  const int n = static_cast<int>(b.size());
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r) {
      if (std::fabs(a[r][col]) > std::fabs(a[pivot][col])) pivot = r;
    }
    std::swap(a[col], a[pivot]);
    std::swap(b[col], b[pivot]);
    if (std::fabs(a[col][col]) < 1e-300) throw std::runtime_error("singular system");
    for (int r = col + 1; r < n; ++r) {
      const double f = a[r][col] / a[col][col];
      for (int c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n, 0.0);
  for (int r = n - 1; r >= 0; --r) {
    double acc = b[r];
    for (int c = r + 1; c < n; ++c) acc -= a[r][c] * x[c];
    x[r] = acc / a[r][r];
  }
  return x;
}

// Full quintic solve via the 6x6 boundary system.
inline std::vector<double> quintic_coeffs_dense(double x0, double v0, double a0, double xT,
                                                double vT, double aT, double T) {
  auto row = [&](double t, int deriv) {
    std::vector<double> r(6, 0.0);
    for (int k = deriv; k < 6; ++k) {
      double coef = 1.0;
      for (int d = 0; d < deriv; ++d) coef *= (k - d);
      r[k] = coef * std::pow(t, k - deriv);
    }
    return r;
  };
  return solve_dense({row(0, 0), row(0, 1), row(0, 2), row(T, 0), row(T, 1), row(T, 2)},
                     {x0, v0, a0, xT, vT, aT});
}

// Quartic (velocity-keeping) solve via the 5x5 boundary system.
inline std::vector<double> quartic_coeffs_dense(double x0, double v0, double a0, double vT,
                                                double aT, double T) {
  auto row = [&](double t, int deriv) {
    std::vector<double> r(5, 0.0);
    for (int k = deriv; k < 5; ++k) {
      double coef = 1.0;
      for (int d = 0; d < deriv; ++d) coef *= (k - d);
      r[k] = coef * std::pow(t, k - deriv);
    }
    return r;
  };
  return solve_dense({row(0, 0), row(0, 1), row(0, 2), row(T, 1), row(T, 2)},
                     {x0, v0, a0, vT, aT});
}

inline double poly_value(const std::vector<double>& c, double t, int deriv = 0) {
  double acc = 0.0;
  for (int k = static_cast<int>(c.size()) - 1; k >= deriv; --k) {
    double coef = 1.0;
    for (int d = 0; d < deriv; ++d) coef *= (k - d);
    acc = acc * t + coef * c[k];
  }
  return acc * 1.0;
}

}  // namespace oracles
