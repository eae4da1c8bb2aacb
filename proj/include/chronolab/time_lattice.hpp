#pragma once

// Condensed matter in the time domain: tight-binding ring from an s:1
// resonance, Lloyd-model Anderson localization, disordered-ring effective
// potential and its Anderson spectrum, secular pendulum bands, RWA
// phase-space crystal, quantum-bouncer monodromy and Bose-Hubbard Mott
// physics on the time lattice.

#include <sstream>

#include "chronolab/common.hpp"
#include "chronolab/floquet_observables.hpp"
#include "chronolab/opalg.hpp"

namespace chronolab::timelattice {

// disorder stream ids (shared keyed-PRNG convention, see spin_models)
inline constexpr std::uint64_t STREAM_LLOYD_EPS = 8;
inline constexpr std::uint64_t STREAM_LLOYD_TM = 9;
inline constexpr std::uint64_t STREAM_RING_PHASE = 10;

// ---------------------------------------------------------------------------
// Tight-binding ring

struct TightBindingRing {
  long s = 2;
  std::vector<double> J;    // bond hoppings, bond j couples j and j+1 mod s
  std::vector<double> eps;  // on-site energies
  double T = 1.0;           // drive period, one lattice cell per T
};

inline TightBindingRing uniform_ring(long s, double J, double T = 1.0) {
  TightBindingRing r;
  r.s = s;
  r.J.assign(s, J);
  r.eps.assign(s, 0.0);
  r.T = T;
  return r;
}

inline void validate(const TightBindingRing& r) {
  if (r.s < 2) throw contract_error("tb_ring: s >= 2 required");
  if (static_cast<long>(r.J.size()) != r.s ||
      static_cast<long>(r.eps.size()) != r.s)
    throw contract_error("tb_ring: J and eps must have s entries");
  if (r.T <= 0) throw contract_error("tb_ring: T > 0 required");
}

// H = sum_j eps_j |j><j| - sum_j (J_j/2)(|j+1><j| + h.c.); for a uniform
// ring the dispersion is -J cos(2 pi m / s)
inline HermitianOperator build_ring(const TightBindingRing& r) {
  validate(r);
  check_capacity(r.s, "build_ring");
  cxmat h = cxmat::Zero(r.s, r.s);
  for (long j = 0; j < r.s; ++j) {
    h(j, j) += r.eps[j];
    long k = (j + 1) % r.s;
    h(k, j) += -0.5 * r.J[j];
    h(j, k) += -0.5 * r.J[j];
  }
  return HermitianOperator(std::move(h));
}

inline HermitianEigen tb_ring_eigensystem(const TightBindingRing& r) {
  return eig_hermitian(build_ring(r));
}

// ---------------------------------------------------------------------------
// Lloyd model: Lorentzian on-site disorder, all states localized

struct LloydReport {
  std::vector<double> energy;     // eigenvalues
  std::vector<double> length;     // per-state fitted intensity decay length
  std::vector<double> fit_r2;     // per-state fit quality
  std::vector<bool> accepted;     // fit_r2 >= 0.8 and decaying
  double l = 0.0;                 // median accepted length near band center
  double l_tm = 0.0;              // transfer-matrix estimate at E = 0
  double l_t = 0.0;               // l * T, localization length in time
  double participation = 0.0;     // mean participation ratio
  std::size_t n_accepted = 0;
};

namespace detail {

// exponential intensity fit |a_j|^2 ~ exp(-d/l) about the density maximum;
// d is the ring distance in lattice units (grid spacing dx).  With bin > 1
// the fit uses the per-bin envelope (max of log p), which removes the
// in-well oscillations of smooth potentials.
inline void ring_decay_fit(const std::vector<double>& p, double dx,
                           double* length, double* r2, long bin = 1) {
  long s = static_cast<long>(p.size());
  long j0 = 0;
  for (long j = 1; j < s; ++j)
    if (p[j] > p[j0]) j0 = j;
  // dense eigensolver tails below ~1e-28 of the peak are round-off noise,
  // not wavefunction: keep the resolvable dynamic range only
  double floor = std::max(1e-280, p[j0] * 1e-24);
  long n_bins = s / 2 / std::max<long>(bin, 1) + 1;
  std::vector<double> env(n_bins, -1.0);
  for (long j = 0; j < s; ++j) {
    if (p[j] < floor) continue;
    long d = std::abs(j - j0);
    d = std::min(d, s - d);
    long b = d / std::max<long>(bin, 1);
    env[b] = std::max(env[b], p[j]);
  }
  std::vector<double> xs, ys;
  for (long b = 0; b < n_bins; ++b) {
    if (env[b] <= 0) continue;
    xs.push_back((b + 0.5) * bin * dx);
    ys.push_back(std::log(env[b]));
  }
  auto f = fit_line(xs, ys);
  *r2 = f.n >= 4 && f.slope < 0 ? f.r2 : 0.0;
  *length = f.slope < 0 ? -1.0 / f.slope : 0.0;
}

}  // namespace detail

// Lyapunov exponent of the 1D chain eps_j a_j - (J/2)(a_{j+1} + a_{j-1})
// = E a_j with Lorentzian eps; returns the intensity localization length
// 1/(2 lambda)
inline double lloyd_transfer_length(double J, double gamma, double E,
                                    std::uint64_t seed, long n_sites = 200000) {
  if (J <= 0 || gamma <= 0)
    throw contract_error("lloyd_transfer_length: J, gamma > 0 required");
  double a = 1.0, b = 0.0;  // (a_j, a_{j-1})
  double log_sum = 0.0;
  for (long j = 0; j < n_sites; ++j) {
    double eps = keyed_lorentzian(seed, STREAM_LLOYD_TM, j, gamma);
    double next = -2.0 * (E - eps) / J * a - b;
    b = a;
    a = next;
    double norm = std::abs(a) + std::abs(b);
    if (norm > 1e100 || norm < 1e-100) {
      log_sum += std::log(std::hypot(a, b));
      a /= norm;
      b /= norm;
    }
  }
  log_sum += std::log(std::hypot(a, b));
  double lambda = log_sum / n_sites;
  if (lambda <= 0)
    throw convergence_error("lloyd_transfer_length: non-positive Lyapunov");
  return 1.0 / (2.0 * lambda);
}

inline LloydReport lloyd_localization(long s, double J, double gamma,
                                      std::uint64_t seed, double T = 1.0) {
  if (s < 8) throw contract_error("lloyd_localization: s >= 8 required");
  TightBindingRing r = uniform_ring(s, J, T);
  for (long j = 0; j < s; ++j)
    r.eps[j] = keyed_lorentzian(seed, STREAM_LLOYD_EPS, j, gamma);
  auto e = tb_ring_eigensystem(r);

  LloydReport rep;
  double pr_sum = 0.0;
  // max-aligned average of log|a_j|^2 over band-center states: its slope is
  // the typical (Lyapunov) decay, free of the per-state selection bias
  std::vector<double> log_acc(s / 2 + 1, 0.0);
  std::vector<long> log_cnt(s / 2 + 1, 0);
  for (long m = 0; m < s; ++m) {
    std::vector<double> p(s);
    double p4 = 0.0;
    for (long j = 0; j < s; ++j) {
      p[j] = std::norm(e.vectors(j, m));
      p4 += p[j] * p[j];
    }
    pr_sum += 1.0 / p4;
    double len = 0, r2 = 0;
    detail::ring_decay_fit(p, 1.0, &len, &r2);
    bool ok = gamma > 0 && r2 >= 0.8;
    rep.energy.push_back(e.values[m]);
    rep.length.push_back(len);
    rep.fit_r2.push_back(r2);
    rep.accepted.push_back(ok);
    if (ok) ++rep.n_accepted;
    // align at the maximum; only band-center states, where the Lloyd length
    // is flat in energy and comparable to the E = 0 Lyapunov value
    if (gamma > 0 && std::abs(e.values[m]) < 0.25 * J) {
      long j0 = 0;
      for (long j = 1; j < s; ++j)
        if (p[j] > p[j0]) j0 = j;
      for (long j = 0; j < s; ++j) {
        if (p[j] < 1e-280) continue;
        long d = std::abs(j - j0);
        d = std::min(d, s - d);
        log_acc[d] += std::log(p[j]);
        log_cnt[d] += 1;
      }
    }
  }
  rep.participation = pr_sum / s;
  if (gamma > 0) {
    // skip the steep conditioned core near the maximum and stop before the
    // two ring arms meet or the eigensolver noise floor (~1e-32 intensity)
    // flattens the tail
    std::vector<double> xs, ys;
    for (long d = std::max<long>(3, s / 20); d <= s * 7 / 20; ++d) {
      if (log_cnt[d] == 0) continue;
      double y = log_acc[d] / log_cnt[d];
      if (y < std::log(1e-28)) break;
      xs.push_back(static_cast<double>(d));
      ys.push_back(y);
    }
    auto f = fit_line(xs, ys);
    rep.l = f.slope < 0 ? -1.0 / f.slope : 0.0;
    rep.l_tm = lloyd_transfer_length(J, gamma, 0.0, seed);
    rep.l_t = rep.l * T;
  }
  return rep;
}

// lab-frame detection profile: the lattice site visited at time t advances
// one cell per period, so the profile repeats with period s*T exactly
inline observables::TimeSeries lloyd_time_profile(const std::vector<double>& p,
                                                  double T, long n_periods) {
  observables::TimeSeries ts;
  ts.dt = T;
  long s = static_cast<long>(p.size());
  for (long n = 0; n < n_periods; ++n) ts.values.push_back(p[n % s]);
  return ts;
}

// ---------------------------------------------------------------------------
// Disordered-ring effective potential U(Theta)

struct DisorderedRingSpec {
  double V0 = 1.0;          // overall amplitude
  double k0 = 4.0;          // harmonic envelope scale; corr length sqrt(2)/k0
  long K = 24;              // max harmonic retained
  double omega = 1.0;       // drive frequency (lab-frame mapping)
  std::uint64_t seed = 1;
};

inline void validate(const DisorderedRingSpec& spec) {
  if (spec.K < 1) throw contract_error("ring spec: K >= 1 required");
  if (spec.k0 <= 0) throw contract_error("ring spec: k0 > 0 required");
  if (spec.omega <= 0) throw contract_error("ring spec: omega > 0 required");
}

struct EffectivePotential {
  std::vector<double> theta;     // grid over [0, 2 pi)
  std::vector<double> u;         // real potential samples
  std::vector<cx> harmonic;      // c_k for k = 1..K, with c_{-k} = conj(c_k)
  bool truncation_warning = false;  // K < 3 k0
  double corr_length = 0.0;      // e^{-1/2} crossing of the autocorrelation
};

// U(Theta) = V0 sum_{k != 0} c_k e^{i k Theta}, c_k = g_k f_{-k} with
// g_k = i(-1)^k/(pi k); the drive harmonics f are engineered so that
// |c_k| = exp(-k^2 / 2 k0^2) with independent uniform phases
inline EffectivePotential effective_potential(const DisorderedRingSpec& spec) {
  validate(spec);
  EffectivePotential out;
  out.truncation_warning = static_cast<double>(spec.K) < 3.0 * spec.k0;
  for (long k = 1; k <= spec.K; ++k) {
    double mag = std::exp(-0.5 * k * k / (spec.k0 * spec.k0));
    double phi =
        keyed_uniform(spec.seed, STREAM_RING_PHASE, k) * 2.0 * M_PI;
    out.harmonic.push_back(mag * std::exp(I_UNIT * phi));
  }
  long m = std::max<long>(512, 8 * spec.K);
  double dx = 2.0 * M_PI / m;
  out.theta.resize(m);
  out.u.resize(m);
  for (long j = 0; j < m; ++j) {
    out.theta[j] = j * dx;
    double v = 0.0;
    for (long k = 1; k <= spec.K; ++k)
      v += 2.0 * std::real(out.harmonic[k - 1] *
                           std::exp(I_UNIT * static_cast<double>(k) *
                                    out.theta[j]));
    out.u[j] = spec.V0 * v;
  }
  // autocorrelation C(d) over the ring; report where it first reaches
  // C(0) e^{-1/2} (the Gaussian-width convention)
  double mean = 0;
  for (double v : out.u) mean += v;
  mean /= m;
  auto corr = [&](long d) {
    double c = 0;
    for (long j = 0; j < m; ++j)
      c += (out.u[j] - mean) * (out.u[(j + d) % m] - mean);
    return c / m;
  };
  double c0 = corr(0);
  double target = c0 * std::exp(-0.5);
  double prev = c0;
  for (long d = 1; d <= m / 2; ++d) {
    double c = corr(d);
    if (c <= target) {
      double frac = (prev - target) / std::max(prev - c, 1e-300);
      out.corr_length = (d - 1 + frac) * dx;
      break;
    }
    prev = c;
  }
  return out;
}

inline double potential_std(const EffectivePotential& pot) {
  double mean = 0, sq = 0;
  for (double v : pot.u) mean += v;
  mean /= pot.u.size();
  for (double v : pot.u) sq += (v - mean) * (v - mean);
  return std::sqrt(sq / pot.u.size());
}

// ---------------------------------------------------------------------------
// Anderson localization on the disordered ring: P^2/2 + U(Theta)

struct RingAndersonReport {
  std::vector<double> energy;
  std::vector<double> length;      // per-state decay length in Theta
  std::vector<double> fit_r2;
  std::vector<double> theta;           // density grid
  std::vector<std::vector<double>> density;  // per state |psi(Theta)|^2
  double u_std = 0.0;
  double localized_fraction = 0.0;   // R^2 >= 0.9 among E < u_std
  double localized_fraction_stretch = 0.0;  // same among E < 1.5 u_std
  observables::TimeSeries lab_profile;  // |psi_0(theta0 - omega t)|^2
};

inline RingAndersonReport ring_anderson(const DisorderedRingSpec& spec,
                                        long n_cut = 0) {
  validate(spec);
  if (n_cut == 0) n_cut = 4 * spec.K;
  if (n_cut < 4 * spec.K)
    throw contract_error("ring_anderson: plane-wave cutoff below 4K");
  long dim = 2 * n_cut + 1;
  check_capacity(dim, "ring_anderson");
  auto pot = effective_potential(spec);

  cxmat h = cxmat::Zero(dim, dim);
  for (long a = 0; a < dim; ++a) {
    double n = static_cast<double>(a - n_cut);
    h(a, a) = 0.5 * n * n;
    for (long k = 1; k <= spec.K; ++k) {
      if (a + k >= dim) break;
      // <n+k| U |n> = V0 c_k
      h(a + k, a) += spec.V0 * pot.harmonic[k - 1];
      h(a, a + k) += spec.V0 * std::conj(pot.harmonic[k - 1]);
    }
  }
  auto e = eig_hermitian(HermitianOperator(std::move(h)));

  RingAndersonReport rep;
  rep.u_std = potential_std(pot);
  long m = static_cast<long>(pot.theta.size());
  double dx = 2.0 * M_PI / m;
  rep.theta = pot.theta;

  long n_below = 0, n_loc = 0, n_below15 = 0, n_loc15 = 0;
  for (long st = 0; st < dim; ++st) {
    std::vector<double> p(m, 0.0);
    for (long j = 0; j < m; ++j) {
      cx amp = 0;
      for (long a = 0; a < dim; ++a)
        amp += e.vectors(a, st) *
               std::exp(I_UNIT * static_cast<double>(a - n_cut) *
                        pot.theta[j]);
      p[j] = std::norm(amp) / (2.0 * M_PI);
    }
    double len = 0, r2 = 0;
    // envelope bin of half the well spacing 2 pi / k0
    long bin = std::max<long>(1, static_cast<long>(m / (2.0 * spec.k0)));
    detail::ring_decay_fit(p, dx, &len, &r2, bin);
    rep.energy.push_back(e.values[st]);
    rep.length.push_back(len);
    rep.fit_r2.push_back(r2);
    rep.density.push_back(std::move(p));
    if (e.values[st] < rep.u_std) {
      ++n_below;
      if (r2 >= 0.9) ++n_loc;
    }
    if (e.values[st] < 1.5 * rep.u_std) {
      ++n_below15;
      if (r2 >= 0.9) ++n_loc15;
    }
  }
  rep.localized_fraction = n_below ? static_cast<double>(n_loc) / n_below : 0;
  rep.localized_fraction_stretch =
      n_below15 ? static_cast<double>(n_loc15) / n_below15 : 0;

  // lab frame: fixed angle theta0 sees Theta = theta0 - omega t; one grid
  // revolution is one drive period 2 pi / omega
  const std::vector<double>& p0 = rep.density.front();
  long j0 = 0;
  for (long j = 1; j < m; ++j)
    if (p0[j] > p0[j0]) j0 = j;
  rep.lab_profile.dt = 2.0 * M_PI / (spec.omega * m);
  for (long j = 0; j < m; ++j)
    rep.lab_profile.values.push_back(p0[((j0 - j) % m + m) % m]);
  return rep;
}

// ---------------------------------------------------------------------------
// Secular pendulum bands: H = P^2 / 2m + V0 cos(s Theta)

struct PendulumSpec {
  double mass = 1.0;
  double V0 = 0.0;
  long s = 2;
  long cutoff = 32;  // plane waves per Bloch sector
};

struct BandStructure {
  std::vector<double> q;                   // reduced-zone momenta
  std::vector<std::vector<double>> bands;  // bands[b][iq]
  double first_gap = 0.0;                  // at the zone edge
};

inline BandStructure secular_bands(const PendulumSpec& spec,
                                   long n_bands = 6) {
  if (spec.mass <= 0) throw contract_error("secular_bands: mass > 0 required");
  if (spec.s < 2) throw contract_error("secular_bands: s >= 2 required");
  long nb = std::min(n_bands, 2 * spec.cutoff + 1);
  BandStructure out;
  out.bands.assign(nb, {});
  long q_lo = -((spec.s - 1) / 2);
  long q_hi = spec.s / 2;  // zone edge for even s
  for (long q = q_lo; q <= q_hi; ++q) {
    long dim = 2 * spec.cutoff + 1;
    cxmat h = cxmat::Zero(dim, dim);
    for (long j = 0; j < dim; ++j) {
      double n = static_cast<double>(q + spec.s * (j - spec.cutoff));
      h(j, j) = n * n / (2.0 * spec.mass);
      if (j + 1 < dim) {
        h(j + 1, j) += 0.5 * spec.V0;  // cos(s Theta) couples n, n + s
        h(j, j + 1) += 0.5 * spec.V0;
      }
    }
    auto vals = eig_hermitian_values(HermitianOperator(std::move(h)));
    out.q.push_back(static_cast<double>(q));
    for (long b = 0; b < nb; ++b) out.bands[b].push_back(vals[b]);
  }
  // first gap at the zone edge (last q = s/2 for even s)
  std::size_t edge = out.q.size() - 1;
  out.first_gap = out.bands[1][edge] - out.bands[0][edge];
  return out;
}

inline std::string band_csv(const BandStructure& b) {
  std::ostringstream ss;
  ss << "q";
  for (std::size_t k = 0; k < b.bands.size(); ++k) ss << ",band" << k;
  ss << "\n";
  ss.precision(17);
  for (std::size_t iq = 0; iq < b.q.size(); ++iq) {
    ss << b.q[iq];
    for (std::size_t k = 0; k < b.bands.size(); ++k)
      ss << "," << b.bands[k][iq];
    ss << "\n";
  }
  return ss.str();
}

// ---------------------------------------------------------------------------
// RWA phase-space crystal

struct PhaseCrystalSpec {
  long s = 10;
  double mu = 3.2e-3;
  double lambda = 1.0 / 205.0;
  long n_max = 400;
};

inline void validate(const PhaseCrystalSpec& spec) {
  if (spec.lambda <= 0)
    throw contract_error("phase_crystal: lambda > 0 required");
  if (spec.n_max < 4 * spec.s)
    throw contract_error("phase_crystal: n_max >> s required");
}

// g = 1/4 (r^2 + lambda - 1)^2 + (mu/2)[(r e^{i theta})^s + h.c.] in the
// number basis: r^2 = lambda(2n+1) and (r e^{i theta})^s = (2 lambda)^{s/2}
// (a^dag)^s, so the matrix is diagonal plus an s-quantum ladder
inline HermitianOperator build_phase_crystal(const PhaseCrystalSpec& spec) {
  validate(spec);
  long dim = spec.n_max + 1;
  check_capacity(dim, "build_phase_crystal");
  cxmat h = cxmat::Zero(dim, dim);
  double pref = 0.5 * spec.mu * std::pow(2.0 * spec.lambda, 0.5 * spec.s);
  for (long n = 0; n < dim; ++n) {
    double d = 2.0 * spec.lambda * (n + 1.0) - 1.0;
    h(n, n) = 0.25 * d * d;
    if (n + spec.s < dim) {
      double amp = 1.0;
      for (long k = 1; k <= spec.s; ++k) amp *= static_cast<double>(n + k);
      amp = pref * std::sqrt(amp);
      h(n + spec.s, n) += amp;
      h(n, n + spec.s) += amp;
    }
  }
  return HermitianOperator(std::move(h));
}

struct PhaseCrystalReport {
  std::vector<std::vector<double>> sector_values;  // per m = n mod s
  std::vector<std::vector<bool>> truncation_flag;  // top-of-basis weight
  std::vector<double> lowest_band;                 // g(m), lowest per sector
  double bandwidth = 0.0;
  double gap_above = 0.0;  // lowest band to the next band
};

inline PhaseCrystalReport rwa_phase_crystal(const PhaseCrystalSpec& spec) {
  validate(spec);
  PhaseCrystalReport rep;
  double pref = 0.5 * spec.mu * std::pow(2.0 * spec.lambda, 0.5 * spec.s);
  double second_min = 1e300;
  for (long m = 0; m < spec.s; ++m) {
    std::vector<long> ns;
    for (long n = m; n <= spec.n_max; n += spec.s) ns.push_back(n);
    long dim = static_cast<long>(ns.size());
    cxmat h = cxmat::Zero(dim, dim);
    for (long j = 0; j < dim; ++j) {
      double d = 2.0 * spec.lambda * (ns[j] + 1.0) - 1.0;
      h(j, j) = 0.25 * d * d;
      if (j + 1 < dim) {
        double amp = 1.0;
        for (long k = 1; k <= spec.s; ++k)
          amp *= static_cast<double>(ns[j] + k);
        amp = pref * std::sqrt(amp);
        h(j + 1, j) += amp;
        h(j, j + 1) += amp;
      }
    }
    auto e = eig_hermitian(HermitianOperator(std::move(h)));
    std::vector<double> vals;
    std::vector<bool> flags;
    long top = static_cast<long>(0.95 * dim);
    for (long k = 0; k < dim; ++k) {
      vals.push_back(e.values[k]);
      double w = 0;
      for (long j = top; j < dim; ++j) w += std::norm(e.vectors(j, k));
      flags.push_back(w > 1e-8);  // truncation-sensitive eigenvalue
    }
    // band structure from converged levels only: truncation-flagged states
    // (weight at the top of the basis) are spurious
    long first = -1, second = -1;
    for (long k = 0; k < dim; ++k) {
      if (flags[k]) continue;
      if (first < 0) first = k;
      else if (second < 0) { second = k; break; }
    }
    if (first < 0)
      throw convergence_error("rwa_phase_crystal: no converged sector level");
    rep.lowest_band.push_back(vals[first]);
    if (second >= 0) second_min = std::min(second_min, vals[second]);
    rep.sector_values.push_back(std::move(vals));
    rep.truncation_flag.push_back(std::move(flags));
  }
  double lo = *std::min_element(rep.lowest_band.begin(),
                                rep.lowest_band.end());
  double hi = *std::max_element(rep.lowest_band.begin(),
                                rep.lowest_band.end());
  rep.bandwidth = hi - lo;
  rep.gap_above = second_min - hi;
  return rep;
}

// ---------------------------------------------------------------------------
// Quantum bouncer under a resonant drive

struct BouncerSpec {
  double lambda_drive = 0.06;
  double omega = 1.1;
  long s = 2;            // resonance order
  long basis = 120;      // unperturbed levels kept
  long steps = 512;      // time steps per period
  long grid_points = 4096;
  double z_max = 80.0;
};

struct BouncerReport {
  rvec energies;            // unperturbed bouncer levels
  UnitaryOperator monodromy{cxmat::Identity(1, 1)};
  QuasiSpectrum quasi;
  long n_res = 0;           // resonant unperturbed level (index)
  double e_res = 0.0;       // (s pi / omega)^2 / 2
  std::vector<long> resonant;  // indices of the s resonant Floquet states
  double splitting = 0.0;   // quasi-energy split modulo omega / s
  cxvec packet1, packet2;   // Wannier packets in the unperturbed basis
  double unitarity = 0.0;
};

namespace detail {

// lowest `count` eigenpairs of -1/2 d^2/dz^2 + z with hard walls at z = 0
// and z_max, finite differences on a uniform grid
inline void bouncer_basis(long grid_points, double z_max, long count,
                          rvec* energies, Eigen::MatrixXd* zmat) {
  long n = grid_points;
  double dz = z_max / (n + 1);
  std::vector<double> d(n), e(n - 1);
  for (long i = 0; i < n; ++i) d[i] = 1.0 / (dz * dz) + (i + 1) * dz;
  for (long i = 0; i + 1 < n; ++i) e[i] = -0.5 / (dz * dz);
  std::vector<double> vals(n), vecs(n * count);
  std::vector<lapack_int> isuppz(2 * count);
  lapack_int found = 0;
  lapack_int info = LAPACKE_dstevr(
      LAPACK_ROW_MAJOR, 'V', 'I', static_cast<lapack_int>(n), d.data(),
      e.data(), 0.0, 0.0, 1, static_cast<lapack_int>(count), 0.0, &found,
      vals.data(), vecs.data(), static_cast<lapack_int>(count),
      isuppz.data());
  if (info != 0 || found < count)
    throw convergence_error("bouncer_basis: dstevr failed");
  *energies = rvec(count);
  for (long k = 0; k < count; ++k) (*energies)[k] = vals[k];
  // z matrix elements on the grid (eigenvectors are l2-normalized)
  Eigen::MatrixXd psi(n, count);
  for (long i = 0; i < n; ++i)
    for (long k = 0; k < count; ++k) psi(i, k) = vecs[i * count + k];
  Eigen::VectorXd z(n);
  for (long i = 0; i < n; ++i) z[i] = (i + 1) * dz;
  *zmat = psi.transpose() * z.asDiagonal() * psi;
}

}  // namespace detail

inline BouncerReport bouncer_floquet(const BouncerSpec& spec) {
  if (spec.omega <= 0 || spec.s < 2)
    throw contract_error("bouncer: omega > 0, s >= 2 required");
  if (spec.steps < 256)
    throw contract_error("bouncer: >= 256 steps per period required");
  BouncerReport rep;
  rep.e_res = 0.5 * std::pow(spec.s * M_PI / spec.omega, 2.0);

  Eigen::MatrixXd zmat;
  detail::bouncer_basis(spec.grid_points, spec.z_max, spec.basis,
                        &rep.energies, &zmat);
  rep.n_res = 0;
  for (long k = 1; k < spec.basis; ++k)
    if (std::abs(rep.energies[k] - rep.e_res) <
        std::abs(rep.energies[rep.n_res] - rep.e_res))
      rep.n_res = k;
  if (spec.basis < 4 * (rep.n_res + 1))
    throw contract_error("bouncer: basis below 4x the resonant level");

  // monodromy by midpoint-sampled step exponentials
  double T = 2.0 * M_PI / spec.omega;
  double dt = T / spec.steps;
  cxmat u = cxmat::Identity(spec.basis, spec.basis);
  for (long k = 0; k < spec.steps; ++k) {
    double t = (k + 0.5) * dt;
    cxmat h = (spec.lambda_drive * std::cos(spec.omega * t)) *
              zmat.cast<cx>();
    h.diagonal() += rep.energies.cast<cx>();
    u = unitary_exp(HermitianOperator(std::move(h)), dt).matrix() * u;
  }
  rep.unitarity = unitarity_defect(u);
  rep.monodromy = UnitaryOperator(std::move(u));
  rep.quasi = eig_unitary(rep.monodromy, T);

  // resonant manifold: the s Floquet states with the most weight on the
  // unperturbed levels around n_res
  std::vector<std::pair<double, long>> weight;
  for (long f = 0; f < spec.basis; ++f) {
    double w = 0;
    for (long n = std::max(0L, rep.n_res - spec.s);
         n <= std::min(spec.basis - 1, rep.n_res + spec.s); ++n)
      w += std::norm(rep.quasi.vectors(n, f));
    weight.push_back({w, f});
  }
  std::sort(weight.rbegin(), weight.rend());
  for (long k = 0; k < spec.s; ++k) rep.resonant.push_back(weight[k].second);
  if (weight[spec.s - 1].first < 0.5)
    throw convergence_error("bouncer: resonant Floquet manifold not found");

  // splitting: distance of the pair's quasi-energy difference from the
  // nearest multiple of omega / s
  double de = std::abs(rep.quasi.quasi[rep.resonant[0]] -
                       rep.quasi.quasi[rep.resonant[1]]);
  double unit = spec.omega / spec.s;
  double frac = std::fmod(de, unit);
  rep.splitting = std::min(frac, unit - frac);

  // Wannier packets: relative phase chosen to maximize localization
  // (inverse participation in the unperturbed basis)
  cxvec ua = rep.quasi.vectors.col(rep.resonant[0]);
  cxvec ub = rep.quasi.vectors.col(rep.resonant[1]);
  double best = -1.0, best_chi = 0.0;
  for (long k = 0; k < 64; ++k) {
    double chi = 2.0 * M_PI * k / 64.0;
    cxvec phi = (ua + std::exp(I_UNIT * chi) * ub) / std::sqrt(2.0);
    double ipr = 0;
    for (long n = 0; n < spec.basis; ++n) ipr += std::norm(phi[n]) *
                                                 std::norm(phi[n]);
    if (ipr > best) {
      best = ipr;
      best_chi = chi;
    }
  }
  rep.packet1 = (ua + std::exp(I_UNIT * best_chi) * ub) / std::sqrt(2.0);
  rep.packet2 = (ua - std::exp(I_UNIT * best_chi) * ub) / std::sqrt(2.0);
  return rep;
}

// ---------------------------------------------------------------------------
// Bose-Hubbard on the time lattice: Mott insulator in time

struct BoseHubbardTimeSpec {
  long s = 5;
  double J = 1.0;
  Eigen::MatrixXd U;  // s x s interaction matrix, diagonal dominant
  long N = 5;
};

inline void validate(const BoseHubbardTimeSpec& spec) {
  if (spec.s < 2 || spec.N < 1)
    throw contract_error("bose_hubbard_time: s >= 2, N >= 1 required");
  if (spec.U.rows() != spec.s || spec.U.cols() != spec.s)
    throw contract_error("bose_hubbard_time: U must be s x s");
  double umax = spec.U.cwiseAbs().maxCoeff();
  if (umax > 0)
    for (long i = 0; i < spec.s; ++i)
      for (long j = 0; j < spec.s; ++j)
        if (i != j && std::abs(spec.U(i, j)) >= std::abs(spec.U(i, i)))
          throw contract_error(
              "bose_hubbard_time: on-site interaction must dominate");
}

struct MottReport {
  double energy0 = 0.0;
  double gap = 0.0;
  cxvec ground;
  rvec site_variance;  // per-site number variance
  cxmat coherence;     // <a_i^dag a_j>
};

// H = -(J/2) sum_j (a_{j+1}^dag a_j + h.c.) + (1/2) sum_i U_ii n_i (n_i - 1)
//     + (1/2) sum_{i != j} U_ij n_i n_j  on the fixed-N ring of s modes
inline MottReport bose_hubbard_time(const BoseHubbardTimeSpec& spec) {
  validate(spec);
  FockBasis basis(static_cast<int>(spec.s), static_cast<int>(spec.N));
  long dim = static_cast<long>(basis.size());
  cxmat h = cxmat::Zero(dim, dim);
  for (long j = 0; j < spec.s; ++j) {
    int a = static_cast<int>(j), b = static_cast<int>((j + 1) % spec.s);
    cxmat hop = hopping_operator(basis, b, a);
    h += -0.5 * spec.J * (hop + hop.adjoint());
  }
  for (long k = 0; k < dim; ++k) {
    const std::vector<int>& occ = basis.state(k);
    double v = 0;
    for (long i = 0; i < spec.s; ++i) {
      v += 0.5 * spec.U(i, i) * occ[i] * (occ[i] - 1.0);
      for (long j = 0; j < spec.s; ++j)
        if (i != j) v += 0.5 * spec.U(i, j) * occ[i] * occ[j];
    }
    h(k, k) += v;
  }
  auto e = eig_hermitian(HermitianOperator(std::move(h)));

  MottReport rep;
  rep.energy0 = e.values[0];
  rep.gap = dim > 1 ? e.values[1] - e.values[0] : 0.0;
  rep.ground = e.vectors.col(0);
  rep.site_variance = rvec(spec.s);
  for (long i = 0; i < spec.s; ++i) {
    double m1 = 0, m2 = 0;
    for (long k = 0; k < dim; ++k) {
      double w = std::norm(rep.ground[k]);
      double n = basis.state(k)[i];
      m1 += w * n;
      m2 += w * n * n;
    }
    rep.site_variance[i] = m2 - m1 * m1;
  }
  rep.coherence = cxmat::Zero(spec.s, spec.s);
  for (long i = 0; i < spec.s; ++i)
    for (long j = 0; j < spec.s; ++j) {
      cxmat hop = hopping_operator(basis, static_cast<int>(i),
                                   static_cast<int>(j));
      rep.coherence(i, j) = rep.ground.dot(hop * rep.ground);
    }
  return rep;
}

}  // namespace chronolab::timelattice
