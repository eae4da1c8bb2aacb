#pragma once

// One-period Floquet unitaries for the driven spin-chain models: binary
// drive with Ising interactions, the minimal flip+Ising drive, the MBL
// drive, the long-range variant, the trapped-ion three-pulse unitary and
// the dipolar NV-ensemble drive.
//
// z-basis convention is the one fixed in opalg.hpp: bit i of a basis index
// set means spin i points down (m_i = -1).  The ion model is assembled in
// the x-product basis where its interaction and disorder terms are
// diagonal.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "chronolab/common.hpp"
#include "chronolab/opalg.hpp"

namespace chronolab::spins {

enum class Boundary { open, periodic };

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool valid() const { return hi >= lo; }
};

// U = exp(-i t2 Hx) exp(-i t1 Hz),
// Hz = sum h_i sz_i + Jz sum sz_i sz_{i+1},
// Hx = sum J_i sx_i sx_{i+1} + Jz sum sz_i sz_{i+1}.
// Disorder enters through the products h_i*t1 and J_i*t2.
struct KhemaniSpec {
  int L = 8;
  double Jz = 0.15;
  double t1 = 1.0;
  double t2 = 1.0;
  Interval range_ht1{1.512, 1.551};
  Interval range_Jt2{0.393, 1.492};
  Boundary boundary = Boundary::open;
};

// U = exp(-i t2 sum J_i sz sz) exp(-i t1 sum h_i sx)
struct MinimalSpec {
  int L = 8;
  double t1 = 1.0;
  double t2 = 1.0;
  Interval range_ht1{M_PI / 2, M_PI / 2};  // h_i * t1
  double Jz = 1.0;
  double delta_J = 0.5;  // J_i in [Jz - dJ, Jz + dJ]
  Boundary boundary = Boundary::open;
};

// U = exp(-i t2 H_MBL) exp(+i t1_eff sum sx), t1_eff = (pi/2)(1 - epsilon),
// H_MBL = sum J_i sz sz + hz_i sz + hx_i sx
struct ElseSpec {
  int L = 8;
  double epsilon = 0.0;
  double t2 = 1.0;
  double J = 1.0;   // J_i in [J/2, 3J/2]
  double hz = 1.0;  // hz_i in [0, hz]
  double hx = 0.3;  // hx_i in [0, hx]
  Boundary boundary = Boundary::open;
};

// Long-range variant: couplings J_ij / |i-j|^alpha, fields hz_i; the
// nearest-neighbor sentinel (alpha_pow <= 0) reproduces the short-range
// drive with hx = 0.
struct YaoSpec {
  int L = 8;
  double epsilon = 0.0;
  double Jz = 0.1;
  double alpha_pow = 0.0;  // <= 0 means nearest-neighbor
  Interval range_J{0.0, 0.0};  // empty -> defaults to [0.8 Jz, 1.2 Jz]
  Interval range_hz{0.0, 1.0};
  double t2 = 1.0;
  Boundary boundary = Boundary::open;
  bool nearest_neighbor() const { return alpha_pow <= 0.0; }
};

// U = exp(-i H3 t3) exp(-i H2 t2) exp(-i H1 t1) in the x-product basis,
// H1 = Omega (1-eps) sum sy with Omega t1 = pi/2,
// H2 = sum_{i<j} (J0/|i-j|^alpha) sx sx, H3 = sum h_i sx, h_i in [0, W].
struct IonSpec {
  int L = 8;
  double epsilon = 0.0;
  double J0 = 0.0;
  double alpha_pow = 1.5;
  double W = 0.0;
  double t1 = 1.0;
  double t2 = 1.0;
  double t3 = 1.0;
};

// U = exp(-i H_y tau2) exp(-i H_x tau1) with dipolar couplings J/r^3
// (isotropic magnitude) and on-site disorder Delta_i sz.
struct NVSpec {
  int L = 8;
  double tau1 = 1.0;
  double tau2 = 1.0;
  double omega_x = 0.0;
  double omega_y = 0.0;
  Interval range_delta{0.0, 0.0};
  double J = 0.0;
  double min_separation = 0.15;
};

struct DisorderRealization {
  std::string model;
  std::uint64_t seed = 0;
  std::vector<double> h;        // field products or amplitudes, per site
  std::vector<double> J;        // bond couplings (products where stated)
  std::vector<double> hz;
  std::vector<double> hx;
  std::vector<double> delta;
  Eigen::MatrixXd Jij;          // pairwise couplings, zero where unused
  std::vector<std::array<double, 3>> positions;
};

namespace streams {
inline constexpr std::uint64_t h = 1, J = 2, hz = 3, hx = 4, delta = 5,
                               Jij = 6, positions = 7;
}

// ---------------------------------------------------------------------------
// Samplers.  All draws are keyed by (seed, stream, site index), so a
// realization is a pure function of (spec, seed) and individual couplings
// are stable when L changes.

inline DisorderRealization sample_khemani(const KhemaniSpec& s,
                                          std::uint64_t seed) {
  if (s.L < 2 || !s.range_ht1.valid() || !s.range_Jt2.valid())
    throw contract_error("sample_khemani: invalid spec");
  DisorderRealization r;
  r.model = "khemani";
  r.seed = seed;
  int nb = s.boundary == Boundary::periodic ? s.L : s.L - 1;
  for (int i = 0; i < s.L; ++i)
    r.h.push_back(keyed_uniform_in(seed, streams::h, i, s.range_ht1.lo,
                                   s.range_ht1.hi));
  for (int i = 0; i < nb; ++i)
    r.J.push_back(keyed_uniform_in(seed, streams::J, i, s.range_Jt2.lo,
                                   s.range_Jt2.hi));
  return r;
}

inline DisorderRealization sample_minimal(const MinimalSpec& s,
                                          std::uint64_t seed) {
  if (s.L < 2 || s.delta_J < 0 || !s.range_ht1.valid())
    throw contract_error("sample_minimal: invalid spec");
  DisorderRealization r;
  r.model = "minimal";
  r.seed = seed;
  int nb = s.boundary == Boundary::periodic ? s.L : s.L - 1;
  for (int i = 0; i < s.L; ++i)
    r.h.push_back(keyed_uniform_in(seed, streams::h, i, s.range_ht1.lo,
                                   s.range_ht1.hi));
  for (int i = 0; i < nb; ++i)
    r.J.push_back(keyed_uniform_in(seed, streams::J, i, s.Jz - s.delta_J,
                                   s.Jz + s.delta_J));
  return r;
}

inline DisorderRealization sample_else(const ElseSpec& s, std::uint64_t seed) {
  if (s.L < 2 || s.epsilon < 0 || s.epsilon >= 1)
    throw contract_error("sample_else: invalid spec");
  DisorderRealization r;
  r.model = "else";
  r.seed = seed;
  int nb = s.boundary == Boundary::periodic ? s.L : s.L - 1;
  for (int i = 0; i < nb; ++i)
    r.J.push_back(
        keyed_uniform_in(seed, streams::J, i, s.J / 2, 3 * s.J / 2));
  for (int i = 0; i < s.L; ++i) {
    r.hz.push_back(keyed_uniform_in(seed, streams::hz, i, 0.0, s.hz));
    r.hx.push_back(keyed_uniform_in(seed, streams::hx, i, 0.0, s.hx));
  }
  return r;
}

inline DisorderRealization sample_yao(const YaoSpec& s, std::uint64_t seed) {
  if (s.L < 2 || s.epsilon < 0 || s.epsilon >= 1)
    throw contract_error("sample_yao: invalid spec");
  Interval rj = s.range_J;
  if (rj.lo == 0.0 && rj.hi == 0.0) rj = {0.8 * s.Jz, 1.2 * s.Jz};
  DisorderRealization r;
  r.model = "yao";
  r.seed = seed;
  for (int i = 0; i < s.L; ++i)
    r.hz.push_back(
        keyed_uniform_in(seed, streams::hz, i, s.range_hz.lo, s.range_hz.hi));
  // pairwise couplings share the keyed index i*L+j so the alpha -> infinity
  // limit matches the nearest-neighbor sampling bond by bond
  r.Jij = Eigen::MatrixXd::Zero(s.L, s.L);
  for (int i = 0; i < s.L; ++i)
    for (int j = i + 1; j < s.L; ++j) {
      double base = keyed_uniform_in(
          seed, streams::Jij, static_cast<std::uint64_t>(i) * s.L + j, rj.lo,
          rj.hi);
      if (s.nearest_neighbor()) {
        if (j == i + 1) r.Jij(i, j) = base;
      } else {
        r.Jij(i, j) = base / std::pow(static_cast<double>(j - i), s.alpha_pow);
      }
    }
  return r;
}

inline DisorderRealization sample_ion(const IonSpec& s, std::uint64_t seed) {
  if (s.L < 2 || s.W < 0) throw contract_error("sample_ion: invalid spec");
  DisorderRealization r;
  r.model = "ion";
  r.seed = seed;
  for (int i = 0; i < s.L; ++i)
    r.h.push_back(keyed_uniform_in(seed, streams::h, i, 0.0, s.W));
  r.Jij = Eigen::MatrixXd::Zero(s.L, s.L);
  for (int i = 0; i < s.L; ++i)
    for (int j = i + 1; j < s.L; ++j)
      r.Jij(i, j) = s.J0 / std::pow(static_cast<double>(j - i), s.alpha_pow);
  return r;
}

inline DisorderRealization sample_nv(const NVSpec& s, std::uint64_t seed) {
  if (s.L < 2 || s.L > 12 || s.tau1 <= 0 || s.tau2 <= 0 ||
      !s.range_delta.valid())
    throw contract_error("sample_nv: invalid spec");
  DisorderRealization r;
  r.model = "nv";
  r.seed = seed;
  for (int i = 0; i < s.L; ++i)
    r.delta.push_back(keyed_uniform_in(seed, streams::delta, i,
                                       s.range_delta.lo, s.range_delta.hi));
  // positions uniform in the unit cube, rejection-sampled to keep the
  // pairwise minimum separation
  std::uint64_t attempt = 0;
  for (int i = 0; i < s.L; ++i) {
    bool placed = false;
    while (!placed) {
      if (attempt > 20000)
        throw sampling_error("sample_nv: min separation unreachable");
      std::array<double, 3> p{
          keyed_uniform(seed, streams::positions, 3 * attempt),
          keyed_uniform(seed, streams::positions, 3 * attempt + 1),
          keyed_uniform(seed, streams::positions, 3 * attempt + 2)};
      ++attempt;
      placed = true;
      for (const auto& q : r.positions) {
        double d2 = 0;
        for (int c = 0; c < 3; ++c)
          d2 += (p[c] - q[c]) * (p[c] - q[c]);
        if (d2 < s.min_separation * s.min_separation) {
          placed = false;
          break;
        }
      }
      if (placed) r.positions.push_back(p);
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// Dense builders (direct bit enumeration; no repeated Kronecker products).

// diag of sum_i f_i sz_i
inline rvec diag_z_field(int L, const std::vector<double>& f) {
  long dim = 1L << L;
  rvec d = rvec::Zero(dim);
  for (long n = 0; n < dim; ++n)
    for (int i = 0; i < L; ++i) d[n] += f[i] * spin_sign(n, i);
  return d;
}

// diag of sum_bonds J_b sz_i sz_{i+1}
inline rvec diag_zz_bonds(int L, const std::vector<double>& J,
                          Boundary boundary) {
  long dim = 1L << L;
  int nb = boundary == Boundary::periodic ? L : L - 1;
  rvec d = rvec::Zero(dim);
  for (long n = 0; n < dim; ++n)
    for (int b = 0; b < nb; ++b)
      d[n] += J[b] * spin_sign(n, b) * spin_sign(n, (b + 1) % L);
  return d;
}

// diag of sum_{i<j} Jij sz_i sz_j
inline rvec diag_zz_pairs(int L, const Eigen::MatrixXd& Jij) {
  long dim = 1L << L;
  rvec d = rvec::Zero(dim);
  for (long n = 0; n < dim; ++n)
    for (int i = 0; i < L; ++i)
      for (int j = i + 1; j < L; ++j)
        if (Jij(i, j) != 0.0)
          d[n] += Jij(i, j) * spin_sign(n, i) * spin_sign(n, j);
  return d;
}

inline cxmat diag_unitary(const rvec& phase_hamiltonian) {
  cxvec u(phase_hamiltonian.size());
  for (Eigen::Index n = 0; n < phase_hamiltonian.size(); ++n)
    u[n] = std::exp(-I_UNIT * phase_hamiltonian[n]);
  return cxmat(u.asDiagonal());
}

// product of independent single-site 2x2 unitaries u_i
inline cxmat site_product_unitary(int L, const std::vector<cxmat>& u) {
  cxmat full = u[0];
  // kron order matches the bit convention: site i advances with stride 2^i
  for (int i = 1; i < L; ++i) full = kron(u[i], full);
  return full;
}

inline cxmat uniform_rotation(int L, char axis, double half_angle) {
  // exp(-i half_angle * sigma_axis) on every site
  cxmat s = pauli(axis);
  cxmat u = std::cos(half_angle) * cxmat::Identity(2, 2) -
            I_UNIT * std::sin(half_angle) * s;
  std::vector<cxmat> us(L, u);
  return site_product_unitary(L, us);
}

// sum_bonds Jx_b sx_i sx_{i+1} + Jz * sum_bonds sz_i sz_{i+1}
inline cxmat dense_xx_plus_zz(int L, const std::vector<double>& Jx, double Jz,
                              Boundary boundary) {
  long dim = 1L << L;
  check_capacity(dim, "dense_xx_plus_zz");
  int nb = boundary == Boundary::periodic ? L : L - 1;
  cxmat m = cxmat::Zero(dim, dim);
  for (long n = 0; n < dim; ++n) {
    double dz = 0;
    for (int b = 0; b < nb; ++b) {
      dz += Jz * spin_sign(n, b) * spin_sign(n, (b + 1) % L);
      long flipped = n ^ (1L << b) ^ (1L << ((b + 1) % L));
      m(flipped, n) += Jx[b];
    }
    m(n, n) += dz;
  }
  return m;
}

namespace detail {
inline void require(bool ok, const char* msg) {
  if (!ok) throw contract_error(msg);
}
}  // namespace detail

// ---------------------------------------------------------------------------
// Floquet builders

inline UnitaryOperator build_floquet_khemani(const KhemaniSpec& s,
                                             const DisorderRealization& r) {
  int nb = s.boundary == Boundary::periodic ? s.L : s.L - 1;
  detail::require(r.model == "khemani" &&
                      r.h.size() == static_cast<std::size_t>(s.L) &&
                      r.J.size() == static_cast<std::size_t>(nb),
                  "build_floquet_khemani: realization mismatch");
  check_capacity(1L << s.L, "build_floquet_khemani");
  // t1*Hz phase: sampled (h_i t1) plus t1*Jz on the zz bonds
  rvec phase = diag_z_field(s.L, r.h) +
               diag_zz_bonds(s.L, std::vector<double>(nb, s.t1 * s.Jz),
                             s.boundary);
  // t2*Hx: sampled (J_i t2) xx couplings plus t2*Jz zz
  HermitianOperator hx(dense_xx_plus_zz(s.L, r.J, s.t2 * s.Jz, s.boundary));
  cxmat u = unitary_exp(hx, 1.0).matrix() * diag_unitary(phase);
  return UnitaryOperator(std::move(u));
}

// Parity-resolved quasi-energy spectra (Ising parity Prod sz is diagonal in
// the z basis; U is block diagonal in even/odd down-spin parity).  Much
// cheaper than the full Schur solve for level statistics at L = 10.
inline std::array<std::vector<double>, 2> khemani_sector_quasi(
    const KhemaniSpec& s, const DisorderRealization& r, double T) {
  int nb = s.boundary == Boundary::periodic ? s.L : s.L - 1;
  detail::require(r.model == "khemani",
                  "khemani_sector_quasi: realization mismatch");
  long dim = 1L << s.L;
  check_capacity(dim, "khemani_sector_quasi");
  rvec phase = diag_z_field(s.L, r.h) +
               diag_zz_bonds(s.L, std::vector<double>(nb, s.t1 * s.Jz),
                             s.boundary);
  cxmat hx = dense_xx_plus_zz(s.L, r.J, s.t2 * s.Jz, s.boundary);
  std::array<std::vector<long>, 2> idx;
  for (long n = 0; n < dim; ++n)
    idx[__builtin_popcountll(n) & 1].push_back(n);
  std::array<std::vector<double>, 2> out;
  for (int p = 0; p < 2; ++p) {
    long m = static_cast<long>(idx[p].size());
    cxmat hxb(m, m);
    for (long a = 0; a < m; ++a)
      for (long b = 0; b < m; ++b) hxb(a, b) = hx(idx[p][a], idx[p][b]);
    rvec phb(m);
    for (long a = 0; a < m; ++a) phb[a] = phase[idx[p][a]];
    cxmat u = unitary_exp(HermitianOperator(std::move(hxb)), 1.0).matrix() *
              diag_unitary(phb);
    out[p] = eig_unitary_values(UnitaryOperator(std::move(u)), T);
  }
  return out;
}

inline UnitaryOperator build_floquet_minimal(const MinimalSpec& s,
                                             const DisorderRealization& r) {
  int nb = s.boundary == Boundary::periodic ? s.L : s.L - 1;
  detail::require(r.model == "minimal" &&
                      r.h.size() == static_cast<std::size_t>(s.L) &&
                      r.J.size() == static_cast<std::size_t>(nb),
                  "build_floquet_minimal: realization mismatch");
  check_capacity(1L << s.L, "build_floquet_minimal");
  std::vector<cxmat> rots;
  for (int i = 0; i < s.L; ++i) {
    cxmat u = std::cos(r.h[i]) * cxmat::Identity(2, 2) -
              I_UNIT * std::sin(r.h[i]) * pauli('x');
    rots.push_back(u);  // exp(-i (h_i t1) sx)
  }
  cxmat u1 = site_product_unitary(s.L, rots);
  std::vector<double> Jt(nb);
  for (int b = 0; b < nb; ++b) Jt[b] = s.t2 * r.J[b];
  cxmat u = diag_unitary(diag_zz_bonds(s.L, Jt, s.boundary)) * u1;
  return UnitaryOperator(std::move(u));
}

inline UnitaryOperator build_floquet_else(const ElseSpec& s,
                                          const DisorderRealization& r) {
  int nb = s.boundary == Boundary::periodic ? s.L : s.L - 1;
  detail::require(r.model == "else" &&
                      r.J.size() == static_cast<std::size_t>(nb) &&
                      r.hz.size() == static_cast<std::size_t>(s.L) &&
                      r.hx.size() == static_cast<std::size_t>(s.L),
                  "build_floquet_else: realization mismatch");
  long dim = 1L << s.L;
  check_capacity(dim, "build_floquet_else");
  double t1 = (M_PI / 2) * (1.0 - s.epsilon);
  cxmat u1 = uniform_rotation(s.L, 'x', -t1);  // exp(+i t1 sum sx)
  bool hx_zero = true;
  for (double v : r.hx) hx_zero = hx_zero && v == 0.0;
  cxmat u2;
  if (hx_zero) {
    rvec phase =
        s.t2 * (diag_zz_bonds(s.L, r.J, s.boundary) + diag_z_field(s.L, r.hz));
    u2 = diag_unitary(phase);
  } else {
    cxmat h = cxmat::Zero(dim, dim);
    rvec dz = diag_zz_bonds(s.L, r.J, s.boundary) + diag_z_field(s.L, r.hz);
    for (long n = 0; n < dim; ++n) {
      h(n, n) = dz[n];
      for (int i = 0; i < s.L; ++i) h(n ^ (1L << i), n) += r.hx[i];
    }
    u2 = unitary_exp(HermitianOperator(std::move(h)), s.t2).matrix();
  }
  return UnitaryOperator(cxmat(u2 * u1));
}

inline UnitaryOperator build_floquet_yao(const YaoSpec& s,
                                         const DisorderRealization& r) {
  detail::require(r.model == "yao" && r.Jij.rows() == s.L &&
                      r.hz.size() == static_cast<std::size_t>(s.L),
                  "build_floquet_yao: realization mismatch");
  check_capacity(1L << s.L, "build_floquet_yao");
  double t1 = (M_PI / 2) * (1.0 - s.epsilon);
  cxmat u1 = uniform_rotation(s.L, 'x', t1);  // exp(-i t1 sum sx)
  Eigen::MatrixXd Jij = r.Jij;
  if (s.boundary == Boundary::open) {
    // couplings already restricted to i<j on the open chain
  }
  rvec phase =
      s.t2 * (diag_zz_pairs(s.L, Jij) + diag_z_field(s.L, r.hz));
  return UnitaryOperator(cxmat(diag_unitary(phase) * u1));
}

// Ion model, assembled in the x-product basis: bit i set means spin i is
// down along x; sx_i is diagonal with sign spin_sign(n, i).
inline UnitaryOperator build_floquet_ion(const IonSpec& s,
                                         const DisorderRealization& r) {
  detail::require(r.model == "ion" &&
                      r.h.size() == static_cast<std::size_t>(s.L) &&
                      r.Jij.rows() == s.L,
                  "build_floquet_ion: realization mismatch");
  check_capacity(1L << s.L, "build_floquet_ion");
  // sy represented in the x basis
  cxmat sy_x(2, 2);
  sy_x << 0, I_UNIT, -I_UNIT, 0;
  double theta = (M_PI / 2) * (1.0 - s.epsilon);  // Omega t1 (1 - eps)
  cxmat u_site = std::cos(theta) * cxmat::Identity(2, 2) -
                 I_UNIT * std::sin(theta) * sy_x;
  cxmat u1 = site_product_unitary(s.L, std::vector<cxmat>(s.L, u_site));
  rvec phase2 = s.t2 * diag_zz_pairs(s.L, r.Jij);
  rvec phase3 = s.t3 * diag_z_field(s.L, r.h);
  cxmat u = diag_unitary(phase3) * diag_unitary(phase2) * u1;
  return UnitaryOperator(std::move(u));
}

// NV ensemble: piecewise drive along x then y, both pieces carrying the
// dipolar interaction and the on-site disorder.
inline UnitaryOperator build_floquet_nv(const NVSpec& s,
                                        const DisorderRealization& r) {
  detail::require(r.model == "nv" &&
                      r.delta.size() == static_cast<std::size_t>(s.L) &&
                      r.positions.size() == static_cast<std::size_t>(s.L),
                  "build_floquet_nv: realization mismatch");
  long dim = 1L << s.L;
  check_capacity(dim, "build_floquet_nv");
  // dipolar piece: sum_{i<j} (J/r^3)(sx sx + sy sy - sz sz) + sum Delta_i sz
  cxmat hdd = cxmat::Zero(dim, dim);
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(s.L, s.L);
  for (int i = 0; i < s.L; ++i)
    for (int j = i + 1; j < s.L; ++j) {
      double d2 = 0;
      for (int k = 0; k < 3; ++k) {
        double diff = r.positions[i][k] - r.positions[j][k];
        d2 += diff * diff;
      }
      c(i, j) = s.J / std::pow(std::sqrt(d2), 3);
    }
  for (long n = 0; n < dim; ++n) {
    double dz = 0;
    for (int i = 0; i < s.L; ++i) {
      dz += r.delta[i] * spin_sign(n, i);
      for (int j = i + 1; j < s.L; ++j) {
        if (c(i, j) == 0.0) continue;
        dz -= c(i, j) * spin_sign(n, i) * spin_sign(n, j);
        // sx sx + sy sy flips antiparallel pairs with amplitude 2
        if (spin_sign(n, i) != spin_sign(n, j))
          hdd(n ^ (1L << i) ^ (1L << j), n) += 2.0 * c(i, j);
      }
    }
    hdd(n, n) += dz;
  }
  cxmat hx = hdd, hy = hdd;
  for (long n = 0; n < dim; ++n)
    for (int i = 0; i < s.L; ++i) {
      hx(n ^ (1L << i), n) += s.omega_x;
      hy(n ^ (1L << i), n) +=
          static_cast<double>(spin_sign(n, i)) * I_UNIT * s.omega_y;
    }
  cxmat ux = unitary_exp(HermitianOperator(std::move(hx)), s.tau1).matrix();
  cxmat uy = unitary_exp(HermitianOperator(std::move(hy)), s.tau2).matrix();
  return UnitaryOperator(cxmat(uy * ux));
}

}  // namespace chronolab::spins
