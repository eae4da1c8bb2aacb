#include <catch2/catch_amalgamated.hpp>

#include "chronolab/floquet_observables.hpp"
#include "chronolab/spin_models.hpp"

using namespace chronolab;
using namespace chronolab::spins;

namespace {

// Ising parity prod_i sz_i, diagonal in the z-product basis.
cxmat parity_z(int L) {
  long dim = 1L << L;
  cxmat p = cxmat::Zero(dim, dim);
  for (long n = 0; n < dim; ++n)
    p(n, n) = (__builtin_popcountll(n) & 1) ? -1.0 : 1.0;
  return p;
}

long flip_all(long n, int L) { return n ^ ((1L << L) - 1); }

}  // namespace

TEST_CASE("sampling is deterministic and interval-bounded") {
  KhemaniSpec ks;  // defaults carry the pi-spin-glass intervals
  auto r1 = sample_khemani(ks, 1234);
  auto r2 = sample_khemani(ks, 1234);
  REQUIRE(r1.h == r2.h);
  REQUIRE(r1.J == r2.J);
  auto r3 = sample_khemani(ks, 1235);
  REQUIRE(r1.h != r3.h);

  for (double v : r1.h) {
    REQUIRE(v >= 1.512);
    REQUIRE(v <= 1.551);
  }
  for (double v : r1.J) {
    REQUIRE(v >= 0.393);
    REQUIRE(v <= 1.492);
  }

  ElseSpec es;
  auto re = sample_else(es, 7);
  for (double v : re.J) {
    REQUIRE(v >= 0.5);
    REQUIRE(v <= 1.5);
  }
  for (double v : re.hz) {
    REQUIRE(v >= 0.0);
    REQUIRE(v <= 1.0);
  }
  for (double v : re.hx) {
    REQUIRE(v >= 0.0);
    REQUIRE(v <= 0.3);
  }
}

TEST_CASE("sampled couplings are stable when L grows") {
  ElseSpec e8;
  ElseSpec e10 = e8;
  e10.L = 10;
  auto r8 = sample_else(e8, 99);
  auto r10 = sample_else(e10, 99);
  for (int i = 0; i < e8.L; ++i) REQUIRE(r8.hz[i] == r10.hz[i]);
  for (int i = 0; i < e8.L - 1; ++i) REQUIRE(r8.J[i] == r10.J[i]);
}

TEST_CASE("nv positions respect the minimum separation") {
  NVSpec s;
  s.L = 8;
  auto r = sample_nv(s, 3);
  REQUIRE(r.positions.size() == 8);
  for (int i = 0; i < 8; ++i)
    for (int j = i + 1; j < 8; ++j) {
      double d2 = 0;
      for (int c = 0; c < 3; ++c) {
        double diff = r.positions[i][c] - r.positions[j][c];
        d2 += diff * diff;
      }
      REQUIRE(std::sqrt(d2) >= s.min_separation);
    }
  // an impossible packing must fail loudly
  NVSpec bad;
  bad.L = 12;
  bad.min_separation = 0.9;
  REQUIRE_THROWS_AS(sample_nv(bad, 1), sampling_error);
}

TEST_CASE("khemani pure-z-rotation limit at L=2") {
  KhemaniSpec s;
  s.L = 2;
  s.Jz = 0.0;
  s.range_ht1 = {M_PI / 2, M_PI / 2};
  s.range_Jt2 = {0.0, 0.0};
  auto r = sample_khemani(s, 1);
  auto u = build_floquet_khemani(s, r);

  cxmat expect = kron(unitary_exp(pauli_site(1, 0, 'z'), M_PI / 2).matrix(),
                      unitary_exp(pauli_site(1, 0, 'z'), M_PI / 2).matrix());
  REQUIRE(max_abs(u.matrix() - expect) < 1e-12);

  // conjugation sends sx -> -sx on each site
  for (int i = 0; i < 2; ++i) {
    cxmat sx = pauli_site(2, i, 'x').matrix();
    cxmat conj = u.matrix() * sx * u.matrix().adjoint();
    REQUIRE(max_abs(conj + sx) < 1e-12);
  }
}

TEST_CASE("khemani unitary commutes with Ising parity") {
  KhemaniSpec s;
  s.L = 6;
  auto r = sample_khemani(s, 42);
  auto u = build_floquet_khemani(s, r);
  cxmat p = parity_z(6);
  REQUIRE(max_abs(u.matrix() * p - p * u.matrix()) <= 1e-10);
}

TEST_CASE("khemani parity sectors reproduce the full spectrum") {
  KhemaniSpec s;
  s.L = 6;
  auto r = sample_khemani(s, 5);
  auto u = build_floquet_khemani(s, r);
  auto full = eig_unitary_values(u, 1.0);
  auto sect = khemani_sector_quasi(s, r, 1.0);
  std::vector<double> merged = sect[0];
  merged.insert(merged.end(), sect[1].begin(), sect[1].end());
  std::sort(merged.begin(), merged.end());
  REQUIRE(merged.size() == full.size());
  for (std::size_t k = 0; k < merged.size(); ++k)
    REQUIRE(merged[k] == Catch::Approx(full[k]).margin(1e-9));
}

TEST_CASE("minimal drive at exact flip: global flip and cat eigenvectors") {
  MinimalSpec s;
  s.L = 4;
  auto r = sample_minimal(s, 11);
  auto u = build_floquet_minimal(s, r);
  long dim = 1L << s.L;

  // U|{m}>_z lands on |{-m}>_z up to a phase
  for (long n = 0; n < dim; ++n) {
    cxvec v = cxvec::Zero(dim);
    v[n] = 1.0;
    cxvec out = u.matrix() * v;
    long nf = flip_all(n, s.L);
    REQUIRE(std::abs(std::abs(out[nf]) - 1.0) < 1e-12);
  }

  // cat combinations are eigenvectors
  for (long n : {0L, 3L, 5L}) {
    long nf = flip_all(n, s.L);
    for (double sign : {1.0, -1.0}) {
      cxvec cat = cxvec::Zero(dim);
      cat[n] = 1.0 / std::sqrt(2.0);
      cat[nf] = sign / std::sqrt(2.0);
      cxvec out = u.matrix() * cat;
      // out must be parallel to cat
      cx ovl = cat.dot(out);
      REQUIRE(std::abs(std::abs(ovl) - 1.0) < 1e-12);
      REQUIRE((out - ovl * cat).norm() < 1e-12);
    }
  }

  // U^2 is diagonal in the z-product basis
  cxmat u2 = u.matrix() * u.matrix();
  for (long a = 0; a < dim; ++a)
    for (long b = 0; b < dim; ++b)
      if (a != b) REQUIRE(std::abs(u2(a, b)) < 1e-12);
}

TEST_CASE("else drive: soluble limit diagonal energies and exact flip") {
  ElseSpec s;
  s.L = 6;
  s.hx = 0.0;
  auto r = sample_else(s, 21);

  // with h = 0 the second factor is diagonal: phases t2 * (E2 + E1)
  auto u = build_floquet_else(s, r);
  long dim = 1L << s.L;
  for (long n = 0; n < dim; ++n) {
    double e = 0;
    for (int b = 0; b < s.L - 1; ++b)
      e += r.J[b] * spin_sign(n, b) * spin_sign(n, b + 1);
    for (int i = 0; i < s.L; ++i) e += r.hz[i] * spin_sign(n, i);
    // column n of U: amplitude on the flipped state carries exp(-i t2 E(flip))
    long nf = flip_all(n, s.L);
    cx amp = u.matrix()(nf, n);
    double ef = 0;
    for (int b = 0; b < s.L - 1; ++b)
      ef += r.J[b] * spin_sign(nf, b) * spin_sign(nf, b + 1);
    for (int i = 0; i < s.L; ++i) ef += r.hz[i] * spin_sign(nf, i);
    REQUIRE(std::abs(std::abs(amp) - 1.0) < 1e-12);
    // phase of amp relative to the known global-flip phase i^L
    cx expect = std::pow(I_UNIT, s.L) * std::exp(-I_UNIT * s.t2 * ef);
    REQUIRE(std::abs(amp - expect) < 1e-12);
    (void)e;
  }
}

TEST_CASE("else drive: exact pi/T pairing in the soluble limit") {
  ElseSpec s;
  s.L = 6;
  s.hx = 0.0;
  s.hz = 0.0;
  auto r = sample_else(s, 8);
  auto u = build_floquet_else(s, r);
  auto spec = eig_unitary(u, 1.0);
  REQUIRE(observables::pi_pairing(spec, 1e-9) == Catch::Approx(1.0));
}

TEST_CASE("yao nearest-neighbor sentinel vs steep power law") {
  YaoSpec nn;
  nn.L = 6;
  nn.Jz = 0.1;
  nn.alpha_pow = 0.0;  // sentinel
  YaoSpec lr = nn;
  lr.alpha_pow = 12.0;
  auto rn = sample_yao(nn, 77);
  auto rl = sample_yao(lr, 77);
  auto un = build_floquet_yao(nn, rn);
  auto ul = build_floquet_yao(lr, rl);
  REQUIRE(max_abs(un.matrix() - ul.matrix()) <= 1e-3);
}

TEST_CASE("yao perfect-flip limit alternates with period 2T") {
  YaoSpec s;
  s.L = 5;
  s.epsilon = 0.0;
  s.range_hz = {0.0, 0.0};
  auto r = sample_yao(s, 2);
  auto u = build_floquet_yao(s, r);
  long dim = 1L << s.L;
  cxvec up = cxvec::Zero(dim);
  up[0] = 1.0;  // all spins up along z
  auto ts = observables::magnetization_trace(u, up, pauli_site(s.L, 2, 'z'), 8);
  for (int n = 0; n < 8; ++n)
    REQUIRE(ts.values[n] == Catch::Approx(n % 2 ? -1.0 : 1.0).margin(1e-12));
}

TEST_CASE("ion drive: exact alternation of <sx> at epsilon=0, W=0") {
  IonSpec s;
  s.L = 8;
  s.epsilon = 0.0;
  s.J0 = 0.5;
  s.W = 0.0;
  auto r = sample_ion(s, 13);
  auto u = build_floquet_ion(s, r);
  long dim = 1L << s.L;
  // |down...down>_x is the all-bits-set basis state in the x-product basis
  cxvec psi = cxvec::Zero(dim);
  psi[dim - 1] = 1.0;
  // sx_i is diagonal in this basis
  cxmat sx = cxmat::Zero(dim, dim);
  for (long n = 0; n < dim; ++n) sx(n, n) = spin_sign(n, 3);
  auto ts =
      observables::magnetization_trace(u, psi, HermitianOperator(sx), 12);
  for (int n = 0; n < 12; ++n)
    REQUIRE(std::abs(ts.values[n] - (n % 2 ? -1.0 : 1.0)) < 1e-10);
}

TEST_CASE("ion drive: detuned non-interacting spins split the subharmonic") {
  IonSpec s;
  s.L = 2;
  s.epsilon = 0.06;
  s.J0 = 0.0;
  s.W = 0.0;
  auto r = sample_ion(s, 1);
  auto u = build_floquet_ion(s, r);
  cxvec psi = cxvec::Zero(4);
  psi[3] = 1.0;  // |down down>_x
  cxmat sx = cxmat::Zero(4, 4);
  for (long n = 0; n < 4; ++n) sx(n, n) = spin_sign(n, 0);
  auto ts =
      observables::magnetization_trace(u, psi, HermitianOperator(sx), 200);
  // closed form: rotation by pi(1-eps) per period about y
  for (int n = 0; n < 200; ++n)
    REQUIRE(ts.values[n] ==
            Catch::Approx(std::cos(n * M_PI * (1 - s.epsilon))).margin(1e-9));
  auto rep = observables::subharmonic_peak(observables::dft_series(ts));
  REQUIRE_FALSE(rep.locked);
}

TEST_CASE("nv drive: pure y rotation limit") {
  NVSpec s;
  s.L = 3;
  s.J = 0.0;
  s.range_delta = {0.0, 0.0};
  s.omega_x = 0.0;
  s.omega_y = M_PI / 2;  // Omega_y * tau2 = pi/2 -> rotation by pi
  s.tau1 = 1.0;
  s.tau2 = 1.0;
  auto r = sample_nv(s, 4);
  auto u = build_floquet_nv(s, r);
  cxmat expect = cxmat::Identity(1, 1);
  cxmat usite = unitary_exp(pauli_site(1, 0, 'y'), M_PI / 2).matrix();
  for (int i = 0; i < s.L; ++i) expect = kron(usite, expect);
  REQUIRE(max_abs(u.matrix() - expect) < 1e-12);
}

TEST_CASE("nv dipolar piece is hermitian-assembled and flip-flop symmetric") {
  NVSpec s;
  s.L = 5;
  s.J = 1.0;
  s.range_delta = {0.0, 0.5};
  s.omega_x = 0.4;
  s.omega_y = 0.7;
  auto r = sample_nv(s, 9);
  auto u = build_floquet_nv(s, r);
  REQUIRE(unitarity_defect(u.matrix()) < 1e-10);
  // total z magnetization is conserved by the dipolar piece alone
  NVSpec nodrive = s;
  nodrive.omega_x = 0.0;
  nodrive.omega_y = 0.0;
  auto u0 = build_floquet_nv(nodrive, r);
  long dim = 1L << s.L;
  cxmat mz = cxmat::Zero(dim, dim);
  for (long n = 0; n < dim; ++n)
    for (int i = 0; i < s.L; ++i) mz(n, n) += spin_sign(n, i);
  REQUIRE(max_abs(u0.matrix() * mz - mz * u0.matrix()) < 1e-10);
}

TEST_CASE("builders reject mismatched realizations") {
  KhemaniSpec ks;
  ElseSpec es;
  auto rk = sample_khemani(ks, 1);
  auto re = sample_else(es, 1);
  REQUIRE_THROWS_AS(build_floquet_else(es, rk), contract_error);
  REQUIRE_THROWS_AS(build_floquet_khemani(ks, re), contract_error);
  KhemaniSpec big = ks;
  big.L = 10;
  REQUIRE_THROWS_AS(build_floquet_khemani(big, rk), contract_error);
}
