#pragma once

// Spectral and stroboscopic diagnostics: gap-ratio statistics on the
// quasi-energy circle, disorder-averaged spectral functions, stroboscopic
// correlators, discrete Fourier analysis with subharmonic-peak descriptors
// and pi/T eigenstate pairing.

#include <vector>

#include "chronolab/common.hpp"
#include "chronolab/opalg.hpp"

namespace chronolab::observables {

struct TimeSeries {
  double dt = 1.0;  // stroboscopic: one drive period per sample
  std::vector<double> values;
};

struct SubharmonicReport {
  double peak_height = 0.0;
  double peak_center = 0.0;    // cycles per period
  double peak_variance = 0.0;  // weighted second moment about the center
  bool locked = false;         // center within one DFT bin of 1/2
};

// Mean gap ratio r = <min(d_n, d_{n-1}) / max(d_n, d_{n-1})> with gaps
// taken on the quasi-energy circle (wrap-around gap included).  Zero gaps
// contribute r_n = 0 and set *degenerate.
inline double r_statistic_phases(std::vector<double> phases, double zone,
                                 bool* degenerate = nullptr) {
  if (phases.size() < 3)
    throw contract_error("r_statistic: need at least 3 levels");
  std::sort(phases.begin(), phases.end());
  std::size_t n = phases.size();
  std::vector<double> gaps(n);
  for (std::size_t k = 0; k + 1 < n; ++k) gaps[k] = phases[k + 1] - phases[k];
  gaps[n - 1] = zone - (phases[n - 1] - phases[0]);
  double sum = 0;
  for (std::size_t k = 0; k < n; ++k) {
    double a = gaps[k];
    double b = gaps[(k + n - 1) % n];
    if (a <= 0.0 || b <= 0.0) {
      if (degenerate) *degenerate = true;
      continue;  // r_n = 0
    }
    sum += std::min(a, b) / std::max(a, b);
  }
  return sum / static_cast<double>(n);
}

inline double r_statistic(const QuasiSpectrum& s, bool* degenerate = nullptr) {
  return r_statistic_phases(s.quasi, 2.0 * M_PI / s.period, degenerate);
}

// Frequency grid covering (-pi/T, pi/T] for spectral functions.
inline std::vector<double> omega_grid(double T, int n) {
  std::vector<double> w(n);
  double half = M_PI / T;
  for (int k = 0; k < n; ++k)
    w[k] = -half + (k + 1) * (2.0 * half) / n;
  return w;
}

// A(w) = (1/dim) sum_{ab} |<a|op|b>|^2 L_eta(w - wrap(e_a - e_b)), with the
// delta replaced by a zone-periodized Lorentzian so the sum rule survives
// peaks at the zone edge.
inline std::vector<double> spectral_function(const QuasiSpectrum& s,
                                             const cxmat& op, double eta,
                                             const std::vector<double>& grid) {
  if (eta <= 0) throw contract_error("spectral_function: eta must be > 0");
  if (s.vectors.size() == 0)
    throw contract_error("spectral_function: spectrum carries no vectors");
  Eigen::Index dim = s.vectors.rows();
  double zone = 2.0 * M_PI / s.period;
  cxmat m = s.vectors.adjoint() * op * s.vectors;
  std::vector<double> a(grid.size(), 0.0);
  double norm = 1.0 / (M_PI * static_cast<double>(dim));
  for (Eigen::Index al = 0; al < dim; ++al)
    for (Eigen::Index be = 0; be < dim; ++be) {
      double w2 = std::norm(m(al, be));
      if (w2 < 1e-18) continue;
      double w0 = s.quasi[al] - s.quasi[be];
      // wrap into (-zone/2, zone/2]
      w0 -= zone * std::floor(w0 / zone + 0.5);
      for (std::size_t k = 0; k < grid.size(); ++k) {
        double acc = 0;
        for (int img = -1; img <= 1; ++img) {
          double d = grid[k] - w0 - img * zone;
          acc += eta / (d * d + eta * eta);
        }
        a[k] += w2 * norm * acc;
      }
    }
  return a;
}

// value[n] = Re <psi0| U^-n op U^n op |psi0>, n = 0 .. n_periods-1
inline TimeSeries magnetization_trace(const UnitaryOperator& u,
                                      const cxvec& psi0,
                                      const HermitianOperator& op,
                                      int n_periods) {
  if (std::abs(psi0.norm() - 1.0) > 1e-10)
    throw contract_error("magnetization_trace: state not normalized");
  TimeSeries ts;
  ts.values.reserve(n_periods);
  cxvec psi = psi0;
  cxvec aux = op.matrix() * psi0;
  for (int n = 0; n < n_periods; ++n) {
    ts.values.push_back(std::real(psi.dot(op.matrix() * aux)));
    psi = u.matrix() * psi;
    aux = u.matrix() * aux;
  }
  return ts;
}

struct DftSpectrum {
  std::vector<double> freq;  // cycles per period, 0 .. 1/2 (one-sided)
  std::vector<double> mag;   // |X_k|
  std::size_t n_samples = 0;
};

inline DftSpectrum dft_series(const TimeSeries& ts) {
  std::size_t n = ts.values.size();
  if (n < 4) throw contract_error("dft_series: need at least 4 samples");
  DftSpectrum out;
  out.n_samples = n;
  for (std::size_t k = 0; k <= n / 2; ++k) {
    cx x = 0;
    for (std::size_t j = 0; j < n; ++j)
      x += ts.values[j] *
           std::exp(-I_UNIT * (2.0 * M_PI * k * j / static_cast<double>(n)));
    out.freq.push_back(static_cast<double>(k) / n);
    out.mag.push_back(std::abs(x));
  }
  return out;
}

// Peak descriptors in the window within 10% of 1/2 cycles per period.
inline SubharmonicReport subharmonic_peak(const DftSpectrum& s) {
  SubharmonicReport rep;
  double lo = 0.45, hi = 0.5;
  double wsum = 0, c1 = 0;
  bool any = false;
  for (std::size_t k = 0; k < s.freq.size(); ++k) {
    if (s.freq[k] < lo || s.freq[k] > hi) continue;
    any = true;
    rep.peak_height = std::max(rep.peak_height, s.mag[k]);
    wsum += s.mag[k];
    c1 += s.mag[k] * s.freq[k];
  }
  if (!any) throw contract_error("subharmonic_peak: empty window");
  rep.peak_center = wsum > 0 ? c1 / wsum : 0.5;
  double c2 = 0;
  for (std::size_t k = 0; k < s.freq.size(); ++k) {
    if (s.freq[k] < lo || s.freq[k] > hi) continue;
    double d = s.freq[k] - rep.peak_center;
    c2 += s.mag[k] * d * d;
  }
  rep.peak_variance = wsum > 0 ? c2 / wsum : 0.0;
  double bin = 1.0 / static_cast<double>(s.n_samples);
  rep.locked = std::abs(rep.peak_center - 0.5) <= bin;
  return rep;
}

// Fraction of levels with a partner at eps + pi/T (mod 2 pi/T) within tol,
// greedy nearest-partner matching.
inline double pi_pairing(const QuasiSpectrum& s, double tol) {
  if (tol <= 0) throw contract_error("pi_pairing: tol must be > 0");
  double zone = 2.0 * M_PI / s.period;
  double half = zone / 2.0;
  std::size_t n = s.quasi.size();
  if (n == 0) return 0.0;
  struct Cand {
    double dist;
    std::size_t a, b;
  };
  std::vector<Cand> cands;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      if (a == b) continue;
      double d = std::abs(s.quasi[b] - s.quasi[a] - half);
      d = std::min(d, std::abs(d - zone));
      if (d <= tol) cands.push_back({d, a, b});
    }
  std::sort(cands.begin(), cands.end(),
            [](const Cand& x, const Cand& y) { return x.dist < y.dist; });
  std::vector<bool> used(n, false);
  std::size_t matched = 0;
  for (const Cand& c : cands) {
    if (used[c.a] || used[c.b]) continue;
    used[c.a] = used[c.b] = true;
    matched += 2;
  }
  return static_cast<double>(matched) / static_cast<double>(n);
}

}  // namespace chronolab::observables
