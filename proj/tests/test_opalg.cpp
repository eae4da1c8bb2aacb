#include <catch2/catch_amalgamated.hpp>

#include "chronolab/opalg.hpp"

using namespace chronolab;

namespace {

cxmat random_hermitian(int n, std::uint64_t seed) {
  cxmat m(n, n);
  std::uint64_t idx = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      m(i, j) = cx(keyed_uniform(seed, 0, idx++) - 0.5,
                   keyed_uniform(seed, 1, idx++) - 0.5);
  return 0.5 * (m + cxmat(m.adjoint()));
}

}  // namespace

TEST_CASE("kron basics") {
  cxmat i2 = cxmat::Identity(2, 2);
  REQUIRE(max_abs(kron(i2, i2) - cxmat::Identity(4, 4)) == 0.0);

  // bit-flip action: (sx x sx)|00> = |11>
  cxmat sx = pauli('x');
  cxvec v00 = cxvec::Zero(4);
  v00[0] = 1.0;
  cxvec out = kron(sx, sx) * v00;
  REQUIRE(std::abs(out[3] - cx(1.0)) < 1e-15);
  REQUIRE(out.head(3).cwiseAbs().maxCoeff() < 1e-15);

  cxmat a = cxmat::Random(2, 2), b = cxmat::Random(3, 3);
  REQUIRE(kron(a, b).rows() == 6);
  REQUIRE(kron(a, b).cols() == 6);
}

TEST_CASE("kron capacity cap") {
  cxmat big = cxmat::Identity(1 << 7, 1 << 7);
  cxmat huge = kron(big, big);  // 2^14, exactly at the cap
  REQUIRE(huge.rows() == (1 << 14));
  cxmat two = cxmat::Identity(2, 2);
  REQUIRE_THROWS_AS(kron(huge, two), capacity_error);
}

TEST_CASE("pauli_site eigenbasis and algebra") {
  // sz|up> = +|up>
  auto sz = pauli_site(1, 0, 'z');
  cxvec up = cxvec::Zero(2);
  up[0] = 1.0;
  REQUIRE(std::abs((sz.matrix() * up - up).norm()) < 1e-15);

  // disjoint supports commute
  auto z0 = pauli_site(2, 0, 'z');
  auto x1 = pauli_site(2, 1, 'x');
  REQUIRE(max_abs(z0.matrix() * x1.matrix() - x1.matrix() * z0.matrix()) ==
          0.0);

  // P^2 = I, Tr P = 0
  for (char ax : {'x', 'y', 'z'}) {
    auto p = pauli_site(3, 1, ax);
    REQUIRE(max_abs(p.matrix() * p.matrix() - cxmat::Identity(8, 8)) < 1e-15);
    REQUIRE(std::abs(p.matrix().trace()) < 1e-15);
  }

  REQUIRE_THROWS_AS(pauli_site(3, 3, 'z'), std::out_of_range);
}

TEST_CASE("pauli_site same-site anticommutation, cross-site commutation") {
  auto x = pauli_site(2, 0, 'x');
  auto y = pauli_site(2, 0, 'y');
  auto z1 = pauli_site(2, 1, 'z');
  REQUIRE(max_abs(x.matrix() * y.matrix() + y.matrix() * x.matrix()) == 0.0);
  REQUIRE(max_abs(x.matrix() * z1.matrix() - z1.matrix() * x.matrix()) == 0.0);
}

TEST_CASE("unitary_exp Pauli identity and group property") {
  auto sx = pauli_site(1, 0, 'x');
  // exp(-i sx pi/2) = -i sx
  auto u = unitary_exp(sx, M_PI / 2);
  REQUIRE(max_abs(u.matrix() - cxmat(-I_UNIT * sx.matrix())) < 1e-14);

  auto id = unitary_exp(sx, 0.0);
  REQUIRE(max_abs(id.matrix() - cxmat::Identity(2, 2)) < 1e-15);

  HermitianOperator h(random_hermitian(8, 42));
  auto u1 = unitary_exp(h, 0.3);
  auto u2 = unitary_exp(h, 0.7);
  auto u12 = unitary_exp(h, 1.0);
  REQUIRE(max_abs(u12.matrix() - cxmat(u2.matrix() * u1.matrix())) < 1e-10);
}

TEST_CASE("unitary_exp rejects non-Hermitian input") {
  cxmat m(2, 2);
  m << 0, 1, 0, 0;
  REQUIRE_THROWS_AS(HermitianOperator(m), contract_error);
}

TEST_CASE("eig_hermitian basics and reconstruction oracle") {
  auto sz = pauli_site(1, 0, 'z');
  auto e = eig_hermitian(sz);
  REQUIRE(e.values[0] == Catch::Approx(-1.0));
  REQUIRE(e.values[1] == Catch::Approx(1.0));

  cxmat d = cxvec::LinSpaced(5, 3.0, -1.0).asDiagonal();
  auto ed = eig_hermitian(HermitianOperator(d));
  for (int k = 1; k < 5; ++k) REQUIRE(ed.values[k] >= ed.values[k - 1]);
  REQUIRE(ed.values[0] == Catch::Approx(-1.0));
  REQUIRE(ed.values[4] == Catch::Approx(3.0));

  // spectral-sum reconstruction of a random 8x8
  HermitianOperator h(random_hermitian(8, 7));
  auto eh = eig_hermitian(h);
  cxmat rec = eh.vectors * eh.values.asDiagonal().toDenseMatrix().cast<cx>() *
              eh.vectors.adjoint();
  REQUIRE(max_abs(rec - h.matrix()) < 1e-9);
  REQUIRE(unitarity_defect(eh.vectors) < 1e-9);
}

TEST_CASE("eig_unitary identity and Hermitian round trip") {
  UnitaryOperator id(cxmat::Identity(6, 6));
  auto qs = eig_unitary(id, 1.0);
  for (double q : qs.quasi) REQUIRE(std::abs(q) < 1e-12);

  // quasi-energies of exp(-iH) equal spectrum of H mod 2*pi at T=1
  HermitianOperator h(random_hermitian(8, 99));
  auto u = unitary_exp(h, 1.0);
  auto spec = eig_unitary(u, 1.0);
  auto eh = eig_hermitian(h);
  std::vector<double> expected;
  for (Eigen::Index k = 0; k < 8; ++k) {
    double v = std::fmod(eh.values[k], 2 * M_PI);
    if (v < 0) v += 2 * M_PI;
    expected.push_back(v);
  }
  std::sort(expected.begin(), expected.end());
  for (int k = 0; k < 8; ++k)
    REQUIRE(spec.quasi[k] == Catch::Approx(expected[k]).margin(1e-9));
}

TEST_CASE("eig_unitary rejects non-unitary input") {
  cxmat m = 2.0 * cxmat::Identity(3, 3);
  REQUIRE_THROWS_AS(UnitaryOperator(m), contract_error);
}

TEST_CASE("eigenphases invariant under eigenvector global phase") {
  HermitianOperator h(random_hermitian(6, 5));
  auto u = unitary_exp(h, 0.4);
  auto s1 = eig_unitary(u, 1.0);
  // rebuild U from phase-rotated eigenvectors; quasi-energies must agree
  cxmat v = s1.vectors * cx(std::cos(1.1), std::sin(1.1));
  cxvec lam(6);
  for (int k = 0; k < 6; ++k)
    lam[k] = std::exp(-I_UNIT * s1.quasi[k] * 1.0);
  UnitaryOperator u2(cxmat(v * lam.asDiagonal() * v.adjoint()));
  auto s2 = eig_unitary(u2, 1.0);
  for (int k = 0; k < 6; ++k)
    REQUIRE(s2.quasi[k] == Catch::Approx(s1.quasi[k]).margin(1e-9));
}

TEST_CASE("FockBasis enumeration and size") {
  FockBasis b(2, 3);
  REQUIRE(b.size() == 4);  // binomial(3+1, 1)
  FockBasis b3(3, 4);
  REQUIRE(b3.size() == 15);  // binomial(6, 2)
  // bijection
  for (std::size_t k = 0; k < b3.size(); ++k)
    REQUIRE(b3.index_of(b3.state(k)) == static_cast<long>(k));
}

TEST_CASE("fock_operators ladder algebra") {
  FockBasis b(2, 1);
  auto ops = fock_operators(b);
  // a1^dag a1 |1,0> = |1,0>
  long i10 = b.index_of({1, 0});
  REQUIRE(std::abs(ops.number[0](i10, i10) - cx(1.0)) < 1e-15);

  // sum_j n_j = N on the fixed-N basis
  FockBasis b2(3, 4);
  auto ops2 = fock_operators(b2);
  cxmat total = ops2.number[0] + ops2.number[1] + ops2.number[2];
  REQUIRE(max_abs(total - 4.0 * cxmat::Identity(b2.size(), b2.size())) <
          1e-15);

  // hopping a2^dag a1 on |2,0> -> sqrt(2)*sqrt(1) |1,1>
  FockBasis bh(2, 2);
  cxmat hop = hopping_operator(bh, 1, 0);
  long i20 = bh.index_of({2, 0});
  long i11 = bh.index_of({1, 1});
  REQUIRE(std::abs(hop(i11, i20) - cx(std::sqrt(2.0))) < 1e-14);
}

TEST_CASE("fock commutator on number-conserving bilinears") {
  // [a_i, a_j^dag] = delta_ij restricted to the fixed-N sector:
  // a_j^dag a_i (as fixed-N bilinear) vs a_i a_j^dag assembled through the
  // N+1 sector must differ by delta_ij * I.
  FockBasis b(3, 3);
  FockBasis upper(3, 4);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      cxmat adag_a = hopping_operator(b, j, i);  // a_j^dag a_i on N
      cxmat ai_up = annihilation_matrix(upper, b, i);
      cxmat aj_up = annihilation_matrix(upper, b, j);
      cxmat a_adag = ai_up * aj_up.adjoint();  // a_i a_j^dag on N
      cxmat comm = a_adag - adag_a;
      cxmat expect = cxmat::Zero(b.size(), b.size());
      if (i == j) expect = cxmat::Identity(b.size(), b.size());
      REQUIRE(max_abs(comm - expect) < 1e-13);
    }
}
