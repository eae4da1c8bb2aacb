#pragma once

// Two-mode many-body Floquet model of the bouncing-atoms time crystal:
// effective Hamiltonian in the fixed-N two-mode Fock basis, cat/condensate
// ground-state classification in the wave-packet basis, tunneling-gap
// scaling with N, and measurement-collapse evolution.

#include <sstream>

#include "chronolab/common.hpp"
#include "chronolab/opalg.hpp"

namespace chronolab::twomode {

struct TwoModeParams {
  double J = 1.0;    // tunneling splitting
  double U = 0.0;    // intra-mode interaction integral
  double U12 = 0.0;  // cross-mode interaction integral
  long N = 2;        // particles
  double g0N = 0.0;  // mean-field constant, bookkeeping only
};

inline void validate(const TwoModeParams& p) {
  if (p.N < 2) throw contract_error("two_mode: N >= 2 required");
  if (p.J <= 0) throw contract_error("two_mode: J > 0 required");
}

// basis |n1, N - n1>, n1 = 0 .. N (index = n1)
inline long dim_of(const TwoModeParams& p) { return p.N + 1; }

// H = -(J/2)(n1 - n2) + (U - 2 U12)/4 [ (c1+)^2 c2^2 + h.c. + 2 n1 n2 ]
inline HermitianOperator build_two_mode(const TwoModeParams& p) {
  validate(p);
  long d = dim_of(p);
  double w = 0.25 * (p.U - 2.0 * p.U12);
  cxmat h = cxmat::Zero(d, d);
  for (long n1 = 0; n1 < d; ++n1) {
    double n2 = static_cast<double>(p.N - n1);
    h(n1, n1) += -0.5 * p.J * (n1 - n2) + 2.0 * w * n1 * n2;
    // (c1+)^2 c2^2 : |n1, n2> -> |n1+2, n2-2>
    if (n1 + 2 < d) {
      double amp = std::sqrt((n1 + 1.0) * (n1 + 2.0) * n2 * (n2 - 1.0));
      h(n1 + 2, n1) += w * amp;
      h(n1, n1 + 2) += w * amp;
    }
  }
  return HermitianOperator(std::move(h));
}

// Fock-space rotation for the mode change c1 = (u1 + u2)/sqrt(2),
// c2 = (u1 - u2)/sqrt(2): the (N+1)-dimensional image of the beam-splitter
// exp[(pi/4)(c1+ c2 - c2+ c1)].
inline cxmat wave_packet_rotation(long n_particles) {
  long d = n_particles + 1;
  check_capacity(d, "wave_packet_rotation");
  cxmat g = cxmat::Zero(d, d);  // generator c1+ c2 - c2+ c1, antihermitian
  for (long n1 = 0; n1 + 1 < d; ++n1) {
    double n2 = static_cast<double>(n_particles - n1);
    double amp = std::sqrt((n1 + 1.0) * n2);
    g(n1 + 1, n1) += amp;   // c1+ c2
    g(n1, n1 + 1) -= amp;   // -c2+ c1
  }
  HermitianOperator ih(cxmat(-I_UNIT * g));  // g = -i * (i g), i g Hermitian
  return unitary_exp(ih, -M_PI / 4).matrix();  // exp(+ (pi/4) g)
}

enum class GroundKind { condensate, cat };

struct GroundReport {
  GroundKind kind = GroundKind::condensate;
  bool marginal = false;      // within 10% of the threshold N|U-2U12| = J
  double number_variance = 0; // var(n1 - n2) in the wave-packet basis
  double edge_weight = 0;     // |<N,0>|^2 + |<0,N>|^2 in the wave-packet basis
  double gap = 0;             // E1 - E0
  cxvec ground;               // in the original (c1, c2) Fock basis
};

inline GroundReport classify_ground(const TwoModeParams& p) {
  validate(p);
  auto h = build_two_mode(p);
  auto e = eig_hermitian(h);
  long d = dim_of(p);
  GroundReport rep;
  rep.gap = e.values[1] - e.values[0];
  rep.ground = e.vectors.col(0);

  // rotate into the wave-packet (u1, u2) occupation basis
  cxvec psi_wp = wave_packet_rotation(p.N).adjoint() * rep.ground;
  double m1 = 0, m2 = 0;
  for (long n1 = 0; n1 < d; ++n1) {
    double diff = 2.0 * n1 - p.N;  // n1 - n2
    double w = std::norm(psi_wp[n1]);
    m1 += w * diff;
    m2 += w * diff * diff;
  }
  rep.number_variance = m2 - m1 * m1;
  rep.edge_weight = std::norm(psi_wp[0]) + std::norm(psi_wp[d - 1]);

  // ideal cat has var(n1 - n2) = N^2, a condensate only O(N)
  rep.kind = rep.number_variance > 0.5 * static_cast<double>(p.N) * p.N
                 ? GroundKind::cat
                 : GroundKind::condensate;
  double strength = p.N * std::abs(p.U - 2.0 * p.U12);
  rep.marginal = std::abs(strength - p.J) <= 0.1 * p.J;
  return rep;
}

namespace detail {

// In the wave-packet Fock basis |m, N-m> the Hamiltonian is exactly
// tridiagonal: diag w[(2m-N)^2 - N], off-diag -(J/2) sqrt((m+1)(N-m)) with
// w = (U - 2 U12)/4 (a beam-splitter rotation of the two-mode form, same
// spectrum).  The doublet splitting deep in the cat regime underflows
// double precision long before N = 60, so the two lowest eigenvalues are
// located by Sturm-sequence bisection in quad precision; only +-*/ are
// needed, so no quadmath library calls.
inline __float128 sturm_eigenvalue(const std::vector<__float128>& d,
                                   const std::vector<__float128>& e2,
                                   int which, __float128 lo, __float128 hi) {
  auto count_below = [&](__float128 x) {
    int cnt = 0;
    __float128 q = d[0] - x;
    if (q < 0) ++cnt;
    for (std::size_t i = 1; i < d.size(); ++i) {
      if (q == 0) q = 1e-300;
      q = d[i] - x - e2[i - 1] / q;
      if (q < 0) ++cnt;
    }
    return cnt;
  };
  for (int it = 0; it < 200 && hi - lo > 0; ++it) {
    __float128 mid = lo + (hi - lo) / 2;
    if (mid == lo || mid == hi) break;
    if (count_below(mid) > which) hi = mid;
    else lo = mid;
  }
  return lo + (hi - lo) / 2;
}

}  // namespace detail

inline double tunneling_gap(const TwoModeParams& p) {
  validate(p);
  long d = dim_of(p);
  __float128 w = (__float128(p.U) - 2 * __float128(p.U12)) / 4;
  std::vector<__float128> diag(d), off2(d - 1);
  for (long m = 0; m < d; ++m) {
    __float128 s = 2 * __float128(m) - __float128(p.N);
    diag[m] = w * (s * s - __float128(p.N));
    if (m + 1 < d) {
      __float128 e = -(__float128(p.J) / 2);
      off2[m] = e * e * __float128(m + 1) * __float128(p.N - m);
    }
  }
  // Gershgorin bounds (double-precision radii, padded)
  __float128 lo = diag[0], hi = diag[0];
  for (long m = 0; m < d; ++m) {
    double r = 0;
    if (m > 0)
      r += 0.5 * p.J * std::sqrt(static_cast<double>(m) * (p.N - m + 1));
    if (m + 1 < d)
      r += 0.5 * p.J * std::sqrt((m + 1.0) * (p.N - m));
    __float128 rr = __float128(r) * 1.001 + 1;
    lo = std::min(lo, diag[m] - rr);
    hi = std::max(hi, diag[m] + rr);
  }
  __float128 e0 = detail::sturm_eigenvalue(diag, off2, 0, lo, hi);
  __float128 e1 = detail::sturm_eigenvalue(diag, off2, 1, lo, hi);
  return static_cast<double>(e1 - e0);
}

struct GapScaling {
  std::vector<long> N;
  std::vector<double> gap;
  std::vector<long> excluded;  // N values whose gap hit the precision floor
  double alpha = 0.0;          // slope of log(1/gap) vs N
  double r2 = 0.0;
};

// Gap scaling at fixed ratio N |U - 2 U12| / J: attractive interaction per
// particle shrinks as 1/N so the mean-field constant stays put.
inline GapScaling gap_scaling(double ratio, double J,
                              const std::vector<long>& n_list) {
  if (!std::is_sorted(n_list.begin(), n_list.end()) || n_list.empty())
    throw contract_error("gap_scaling: N list must be ascending");
  GapScaling out;
  std::vector<double> xs, ys;
  for (long n : n_list) {
    TwoModeParams p;
    p.J = J;
    p.N = n;
    p.U = -ratio * J / static_cast<double>(n);
    p.U12 = 0.0;
    double gap = tunneling_gap(p);
    out.N.push_back(n);
    out.gap.push_back(gap);
    if (gap < 1e-14) {
      out.excluded.push_back(n);  // double-precision floor
      continue;
    }
    xs.push_back(static_cast<double>(n));
    ys.push_back(std::log(1.0 / gap));
  }
  auto fit = fit_line(xs, ys);
  out.alpha = fit.slope;
  out.r2 = fit.r2;
  return out;
}

inline std::string gap_csv(const GapScaling& s) {
  std::ostringstream ss;
  ss << "N,gap,log_inv_gap\n";
  ss.precision(17);
  for (std::size_t k = 0; k < s.N.size(); ++k)
    ss << s.N[k] << "," << s.gap[k] << "," << std::log(1.0 / s.gap[k]) << "\n";
  return ss.str();
}

struct CollapseResult {
  double outcome_probability = 0;
  cxvec projected;                  // wave-packet basis, normalized
  cxvec evolved;                    // wave-packet basis after n_steps
  std::vector<double> branch_trace; // chosen-branch occupation per step
};

// Single-particle measurement in wave-packet mode `branch` (0 or 1) applied
// to a state given in the wave-packet Fock basis; the projected state then
// evolves under the two-mode Hamiltonian stroboscopically with step dt and
// the chosen branch population (n_branch / N) is recorded.
inline CollapseResult collapse_evolve(const TwoModeParams& p,
                                      const cxvec& state_wp, int branch,
                                      int n_steps, double dt) {
  validate(p);
  long d = dim_of(p);
  if (state_wp.size() != d)
    throw contract_error("collapse_evolve: state dimension mismatch");
  if (branch != 0 && branch != 1)
    throw contract_error("collapse_evolve: branch must be 0 or 1");
  if (std::abs(state_wp.norm() - 1.0) > 1e-10)
    throw contract_error("collapse_evolve: state not normalized");

  // annihilate one particle in the chosen wave-packet mode: the result
  // lives in the (N-1)-particle space; index n1 counts mode-u1 particles
  cxvec reduced = cxvec::Zero(d - 1);
  for (long n1 = 0; n1 < d - 1; ++n1) {
    if (branch == 0)
      reduced[n1] = std::sqrt(n1 + 1.0) * state_wp[n1 + 1];
    else
      reduced[n1] = std::sqrt(static_cast<double>(p.N - n1)) * state_wp[n1];
  }
  CollapseResult res;
  double norm2 = reduced.squaredNorm();
  res.outcome_probability = norm2 / p.N;
  if (norm2 < 1e-28)
    throw contract_error("collapse_evolve: zero-probability outcome");
  res.projected = reduced / std::sqrt(norm2);

  // evolve the N-1 particle state under the same effective Hamiltonian
  TwoModeParams pm = p;
  pm.N = p.N - 1;
  auto h = build_two_mode(pm);
  auto rot = wave_packet_rotation(pm.N);           // wave-packet -> (c1,c2)
  auto u = unitary_exp(h, dt);
  cxvec psi = rot * res.projected;
  long dm = pm.N + 1;
  for (int s = 0; s < n_steps; ++s) {
    cxvec wp = rot.adjoint() * psi;
    double occ = 0;
    for (long n1 = 0; n1 < dm; ++n1) {
      double n_br = branch == 0 ? static_cast<double>(n1)
                                : static_cast<double>(pm.N - n1);
      occ += std::norm(wp[n1]) * n_br;
    }
    res.branch_trace.push_back(occ / pm.N);
    psi = u.matrix() * psi;
  }
  res.evolved = rot.adjoint() * psi;
  return res;
}

// ideal cat (|N,0> + |0,N>)/sqrt(2) in the wave-packet basis
inline cxvec ideal_cat(long n_particles) {
  cxvec v = cxvec::Zero(n_particles + 1);
  v[0] = 1.0 / std::sqrt(2.0);
  v[n_particles] = 1.0 / std::sqrt(2.0);
  return v;
}

}  // namespace chronolab::twomode
