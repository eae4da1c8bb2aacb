#pragma once

// Mean-field ring condensate: Gross-Pitaevskii ground state on a ring of
// unit length via split-step imaginary-time propagation, bright-soliton
// comparison profile, symmetry-breaking threshold search, center-of-mass
// current and wave-packet spreading estimates.

#include <mutex>
#include <sstream>

#include <fftw3.h>

#include "chronolab/common.hpp"
#include "chronolab/opalg.hpp"

namespace chronolab::ring {

struct RingGrid {
  int M = 256;  // points on the unit ring, x_k = k/M
  double dx() const { return 1.0 / M; }
  double x(int k) const { return static_cast<double>(k) / M; }
};

struct GPEParams {
  double gamma = 0.0;  // g0 (N-1)
  double alpha = 0.0;  // flux; ground-state searches run at alpha = 0
  double dtau = 1e-3;
  double tol = 1e-8;       // residual ||(H_GP - mu) phi||
  int max_iter = 200000;
  std::uint64_t noise_seed = 1;  // symmetry-breaking seed noise
  // strict: treat a missed tolerance as a convergence error.  Non-strict
  // returns the best state found (used by the threshold scan, where
  // relaxation is critically slow right at the bifurcation).
  bool strict = true;
};

struct MeanFieldState {
  RingGrid grid;
  cxvec phi;
  double mu = 0.0;
  double energy = 0.0;
  double residual = 0.0;
};

namespace detail {

// FFTW planning is not thread-safe; execution of separate plans is.
inline std::mutex& fftw_mutex() {
  static std::mutex m;
  return m;
}

struct FftPair {
  fftw_plan fwd = nullptr, bwd = nullptr;
  std::vector<cx> buf;
  explicit FftPair(int m) : buf(m) {
    std::lock_guard<std::mutex> lock(fftw_mutex());
    auto* p = reinterpret_cast<fftw_complex*>(buf.data());
    fwd = fftw_plan_dft_1d(m, p, p, FFTW_FORWARD, FFTW_ESTIMATE);
    bwd = fftw_plan_dft_1d(m, p, p, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  ~FftPair() {
    std::lock_guard<std::mutex> lock(fftw_mutex());
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(bwd);
  }
  FftPair(const FftPair&) = delete;
  FftPair& operator=(const FftPair&) = delete;
};

// momentum of Fourier mode n on the unit ring
inline double mode_k(int n, int m) {
  int nn = n <= m / 2 ? n : n - m;
  return 2.0 * M_PI * nn;
}

}  // namespace detail

inline void normalize_state(const RingGrid& g, cxvec& phi) {
  double norm = std::sqrt(phi.squaredNorm() * g.dx());
  if (norm <= 0) throw convergence_error("gpe: state collapsed to zero");
  phi /= norm;
}

// E[phi] = integral( |d phi|^2 / 2 + gamma |phi|^4 / 2 )
inline double gpe_energy(const RingGrid& g, const GPEParams& p,
                         const cxvec& phi, detail::FftPair& fft) {
  int m = g.M;
  std::copy(phi.data(), phi.data() + m, fft.buf.begin());
  fftw_execute(fft.fwd);
  double kin = 0;
  for (int n = 0; n < m; ++n) {
    double k = detail::mode_k(n, m);
    kin += 0.5 * k * k * std::norm(fft.buf[n]);
  }
  kin *= g.dx() / m;  // FFT normalization 1/m, integral weight dx
  double pot = 0;
  for (int n = 0; n < m; ++n) pot += std::norm(phi[n]) * std::norm(phi[n]);
  pot *= 0.5 * p.gamma * g.dx();
  return kin + pot;
}

// Imaginary-time split-step descent to the GP ground state.  The initial
// state is uniform plus small seeded noise (the uniform state is stationary
// even when it is not the minimum, so noise is required to break symmetry).
inline MeanFieldState gpe_ground_state(const GPEParams& p, const RingGrid& g) {
  if (g.M < 32) throw contract_error("gpe_ground_state: M >= 32 required");
  if (!std::isfinite(p.gamma))
    throw contract_error("gpe_ground_state: gamma must be finite");
  if (p.tol <= 0) throw contract_error("gpe_ground_state: tolerance > 0");
  int m = g.M;
  detail::FftPair fft(m);

  cxvec phi = cxvec::Constant(m, 1.0);
  for (int n = 0; n < m; ++n)
    phi[n] += cx(0.01 * (keyed_uniform(p.noise_seed, 0, n) - 0.5),
                 0.01 * (keyed_uniform(p.noise_seed, 1, n) - 0.5));
  normalize_state(g, phi);

  double dtau = p.dtau;
  double energy = gpe_energy(g, p, phi, fft);

  auto step = [&](const cxvec& in, double dt) {
    cxvec out = in;
    // half kinetic
    std::copy(out.data(), out.data() + m, fft.buf.begin());
    fftw_execute(fft.fwd);
    for (int n = 0; n < m; ++n) {
      double k = detail::mode_k(n, m);
      fft.buf[n] *= std::exp(-0.5 * dt * 0.5 * k * k) / static_cast<double>(m);
    }
    fftw_execute(fft.bwd);
    std::copy(fft.buf.begin(), fft.buf.end(), out.data());
    // potential
    for (int n = 0; n < m; ++n)
      out[n] *= std::exp(-dt * p.gamma * std::norm(out[n]));
    // half kinetic
    std::copy(out.data(), out.data() + m, fft.buf.begin());
    fftw_execute(fft.fwd);
    for (int n = 0; n < m; ++n) {
      double k = detail::mode_k(n, m);
      fft.buf[n] *= std::exp(-0.5 * dt * 0.5 * k * k) / static_cast<double>(m);
    }
    fftw_execute(fft.bwd);
    std::copy(fft.buf.begin(), fft.buf.end(), out.data());
    normalize_state(g, out);
    return out;
  };

  auto residual = [&](const cxvec& v, double& mu_out) {
    // H_GP v in real space
    std::copy(v.data(), v.data() + m, fft.buf.begin());
    fftw_execute(fft.fwd);
    for (int n = 0; n < m; ++n) {
      double k = detail::mode_k(n, m);
      fft.buf[n] *= 0.5 * k * k / static_cast<double>(m);
    }
    fftw_execute(fft.bwd);
    cxvec hv(m);
    for (int n = 0; n < m; ++n)
      hv[n] = fft.buf[n] + p.gamma * std::norm(v[n]) * v[n];
    mu_out = std::real(cx(v.dot(hv))) * g.dx();
    double r2 = 0;
    for (int n = 0; n < m; ++n) r2 += std::norm(hv[n] - mu_out * v[n]);
    return std::sqrt(r2 * g.dx());
  };

  // Phase 1: imaginary-time descent.  The finite-step fixed point carries a
  // splitting bias, so this phase only needs to get near the minimum; it
  // stops when the energy stops moving.
  double mu = 0;
  int it = 0;
  double e_prev_check = energy;
  for (; it < p.max_iter; ++it) {
    cxvec trial = step(phi, dtau);
    double e_trial = gpe_energy(g, p, trial, fft);
    if (e_trial <= energy + 1e-12 * (1.0 + std::abs(energy))) {
      phi = std::move(trial);
      energy = e_trial;
    } else {
      dtau *= 0.5;  // descent stalled at this step size
      if (dtau < 1e-12) break;
    }
    if ((it & 255) == 255) {
      if (energy > e_prev_check - 1e-10 * (1.0 + std::abs(energy))) break;
      e_prev_check = energy;
    }
  }

  // Phase 2: self-consistent polish.  Diagonalize H_GP at the frozen
  // density, mix the ground eigenvector back in, repeat; this removes the
  // splitting bias and reaches the requested stationarity residual.
  // circulant kinetic matrix: entries depend only on (a - b) mod m
  std::vector<cx> krow(m);
  for (int d = 0; d < m; ++d) {
    cx acc = 0;
    for (int n = 0; n < m; ++n) {
      double k = detail::mode_k(n, m);
      acc += 0.5 * k * k * std::exp(I_UNIT * k * g.x(d));
    }
    krow[d] = acc / static_cast<double>(m);
  }
  cxmat kinetic(m, m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) kinetic(a, b) = krow[(a - b + m) % m];
  double res = residual(phi, mu);
  double beta = 0.5, best = res;
  int stale = 0;
  for (int scf = 0; scf < 1000 && res > p.tol; ++scf) {
    cxmat h = kinetic;
    for (int n = 0; n < m; ++n) h(n, n) += p.gamma * std::norm(phi[n]);
    auto e = eig_hermitian(HermitianOperator(0.5 * (h + cxmat(h.adjoint()))));
    cxvec ground = e.vectors.col(0) * std::sqrt(static_cast<double>(m));
    cx phase = phi.dot(ground);
    if (std::abs(phase) > 0) ground *= std::conj(phase) / std::abs(phase);
    phi = (1.0 - beta) * phi + beta * ground;
    normalize_state(g, phi);
    res = residual(phi, mu);
    // damp the mixing when the iteration stops making progress
    if (res < 0.9 * best) {
      best = res;
      stale = 0;
    } else if (++stale >= 15) {
      beta = std::max(0.02, 0.5 * beta);
      stale = 0;
    }
  }
  energy = gpe_energy(g, p, phi, fft);
  if (res > p.tol && p.strict) {
    std::ostringstream ss;
    ss << "gpe_ground_state: residual " << res << " > tol " << p.tol
       << " after " << it << " iterations";
    throw convergence_error(ss.str());
  }
  MeanFieldState st;
  st.grid = g;
  st.phi = std::move(phi);
  st.mu = mu;
  st.energy = energy;
  st.residual = res;
  return st;
}

// Bright-soliton comparison profile phi ~ sech[(|gamma|/2)(x - x_cm)],
// wrapped onto the ring and normalized on the grid.
inline MeanFieldState soliton_profile(double gamma, double x_cm,
                                      const RingGrid& g) {
  if (gamma >= 0)
    throw contract_error("soliton_profile: gamma must be negative");
  MeanFieldState st;
  st.grid = g;
  st.phi = cxvec(g.M);
  double b = std::abs(gamma) / 2;
  for (int k = 0; k < g.M; ++k) {
    double d = g.x(k) - x_cm;
    d -= std::round(d);  // minimal image on the unit ring
    st.phi[k] = 1.0 / std::cosh(b * d);
  }
  normalize_state(g, st.phi);
  st.mu = -b * b / 2;
  return st;
}

inline double state_overlap(const MeanFieldState& a, const MeanFieldState& b) {
  if (a.grid.M != b.grid.M) throw contract_error("state_overlap: grid mismatch");
  return std::abs(cx(a.phi.dot(b.phi))) * a.grid.dx();
}

// max/mean density ratio; 1 for the uniform state, > 1 once symmetry breaks
inline double density_contrast(const MeanFieldState& st) {
  double mx = 0, mean = 0;
  for (int k = 0; k < st.grid.M; ++k) {
    double d = std::norm(st.phi[k]);
    mx = std::max(mx, d);
    mean += d;
  }
  mean /= st.grid.M;
  return mx / mean;
}

// Bisection for the symmetry-breaking threshold in gamma; the bracket must
// straddle the transition (uniform above, localized below).
inline double find_threshold(const RingGrid& g, double gamma_lo,
                             double gamma_hi, double rel_tol = 0.01,
                             double contrast_cut = 1.5) {
  if (gamma_lo >= gamma_hi)
    throw contract_error("find_threshold: need gamma_lo < gamma_hi");
  auto broken = [&](double gamma) {
    GPEParams p;
    p.gamma = gamma;
    // relaxation is critically slow right at the bifurcation; the density
    // contrast only needs a loosely converged state
    p.tol = 1e-5;
    p.strict = false;
    return density_contrast(gpe_ground_state(p, g)) > contrast_cut;
  };
  if (!broken(gamma_lo) || broken(gamma_hi))
    throw contract_error("find_threshold: bracket does not straddle");
  while ((gamma_hi - gamma_lo) > rel_tol * std::abs(gamma_lo)) {
    double mid = 0.5 * (gamma_lo + gamma_hi);
    if (broken(mid)) gamma_lo = mid;
    else gamma_hi = mid;
  }
  return 0.5 * (gamma_lo + gamma_hi);
}

// Center-of-mass velocity of momentum branch j at flux alpha: 2 pi j / N - alpha.
inline double cm_current(long j, long n_atoms, double alpha) {
  if (n_atoms < 1) throw contract_error("cm_current: N >= 1");
  return 2.0 * M_PI * static_cast<double>(j) / static_cast<double>(n_atoms) -
         alpha;
}

// Rotation period of the symmetry-broken density on the j = N branch.
inline double rotation_period(long n_atoms, double alpha) {
  double v = cm_current(n_atoms, n_atoms, alpha);
  if (v == 0.0) throw contract_error("rotation_period: zero current");
  return 1.0 / std::abs(v);
}

struct SpreadingEstimate {
  double sigma = 0.0;  // width at time t
  double t_c = 0.0;    // time at which the width reaches the ring length
};

// Free-particle spreading of the center of mass (mass N):
// sigma(t) = sigma0 sqrt(1 + (t / (N sigma0^2))^2).
inline SpreadingEstimate cm_spreading(double sigma0, long n_atoms, double t) {
  if (sigma0 <= 0 || n_atoms < 1)
    throw contract_error("cm_spreading: sigma0 > 0 and N >= 1 required");
  SpreadingEstimate e;
  double u = t / (n_atoms * sigma0 * sigma0);
  e.sigma = sigma0 * std::sqrt(1.0 + u * u);
  e.t_c = sigma0 < 1.0
              ? n_atoms * sigma0 * std::sqrt(1.0 - sigma0 * sigma0)
              : 0.0;
  return e;
}

inline std::string state_csv(const MeanFieldState& st) {
  std::ostringstream ss;
  ss << "x,re,im,density\n";
  ss.precision(17);
  for (int k = 0; k < st.grid.M; ++k)
    ss << st.grid.x(k) << "," << st.phi[k].real() << "," << st.phi[k].imag()
       << "," << std::norm(st.phi[k]) << "\n";
  return ss.str();
}

}  // namespace chronolab::ring
