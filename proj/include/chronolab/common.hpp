#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace chronolab {

struct capacity_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct contract_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct convergence_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct io_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct sampling_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Hard cap on dense Hilbert-space dimension.  CHRONO_MAX_DIM lowers it (CI).
inline long max_hilbert_dim() {
  static long cap = [] {
    long d = 1L << 14;
    if (const char* env = std::getenv("CHRONO_MAX_DIM")) {
      long v = std::atol(env);
      if (v > 0 && v < d) d = v;
    }
    return d;
  }();
  return cap;
}

inline void check_capacity(long dim, const char* what) {
  if (dim <= 0 || dim > max_hilbert_dim())
    throw capacity_error(std::string(what) + ": dimension " +
                         std::to_string(dim) + " exceeds cap " +
                         std::to_string(max_hilbert_dim()));
}

// ---------------------------------------------------------------------------
// Counter-based PRNG.  Every draw is a pure function of (seed, stream, index),
// so realizations are reproducible under any scheduling and stable when the
// number of sites changes.

inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline std::uint64_t keyed_u64(std::uint64_t seed, std::uint64_t stream,
                               std::uint64_t index) {
  return mix64(mix64(seed ^ (0x9e3779b97f4a7c15ull * (stream + 1))) +
               0xbf58476d1ce4e5b9ull * index);
}

// uniform in [0,1)
inline double keyed_uniform(std::uint64_t seed, std::uint64_t stream,
                            std::uint64_t index) {
  return static_cast<double>(keyed_u64(seed, stream, index) >> 11) *
         0x1.0p-53;
}

inline double keyed_uniform_in(std::uint64_t seed, std::uint64_t stream,
                               std::uint64_t index, double lo, double hi) {
  return lo + (hi - lo) * keyed_uniform(seed, stream, index);
}

// standard Lorentzian (Cauchy) with location 0, scale gamma
inline double keyed_lorentzian(std::uint64_t seed, std::uint64_t stream,
                               std::uint64_t index, double gamma) {
  double u = keyed_uniform(seed, stream, index);
  return gamma * std::tan(M_PI * (u - 0.5));
}

// ---------------------------------------------------------------------------
// Least-squares line fit, used by localization and gap-scaling analyses.

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  std::size_t n = 0;
};

inline LineFit fit_line(const std::vector<double>& x,
                        const std::vector<double>& y) {
  LineFit f;
  f.n = x.size();
  if (x.size() != y.size() || x.size() < 2) return f;
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
    syy += y[i] * y[i];
  }
  double n = static_cast<double>(x.size());
  double den = n * sxx - sx * sx;
  if (std::abs(den) < 1e-300) return f;
  f.slope = (n * sxy - sx * sy) / den;
  f.intercept = (sy - f.slope * sx) / n;
  double ss_tot = syy - sy * sy / n;
  double ss_res = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double r = y[i] - (f.intercept + f.slope * x[i]);
    ss_res += r * r;
  }
  f.r2 = ss_tot > 1e-300 ? 1.0 - ss_res / ss_tot : 1.0;
  return f;
}

inline double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::size_t m = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + m, v.end());
  double hi = v[m];
  if (v.size() % 2) return hi;
  std::nth_element(v.begin(), v.begin() + m - 1, v.end());
  return 0.5 * (hi + v[m - 1]);
}

}  // namespace chronolab
