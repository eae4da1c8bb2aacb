#pragma once

// Dense complex operator algebra: Pauli strings, tensor products, matrix
// exponentials, Hermitian/unitary eigendecomposition and fixed-N bosonic
// Fock-space operators.  Everything is double precision, dense, and capped
// at max_hilbert_dim().

#include <Eigen/Dense>
#include <lapacke.h>

#include <complex>
#include <map>
#include <vector>

#include "chronolab/common.hpp"

namespace chronolab {

using cx = std::complex<double>;
using cxmat = Eigen::MatrixXcd;
using cxvec = Eigen::VectorXcd;
using rvec = Eigen::VectorXd;

inline constexpr cx I_UNIT{0.0, 1.0};

inline double max_abs(const cxmat& m) {
  return m.size() ? m.cwiseAbs().maxCoeff() : 0.0;
}

inline bool is_finite(const cxmat& m) {
  return m.allFinite();
}

inline double hermiticity_defect(const cxmat& m) {
  return max_abs(m - m.adjoint());
}

inline double unitarity_defect(const cxmat& m) {
  return max_abs(m.adjoint() * m - cxmat::Identity(m.rows(), m.cols()));
}

// Hermitian to |M - M^dag|_max <= 1e-12 |M|_max, checked at construction.
class HermitianOperator {
 public:
  explicit HermitianOperator(cxmat m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols())
      throw contract_error("HermitianOperator: matrix not square");
    if (!is_finite(m_))
      throw contract_error("HermitianOperator: non-finite entries");
    double scale = std::max(max_abs(m_), 1.0);
    if (hermiticity_defect(m_) > 1e-12 * scale)
      throw contract_error("HermitianOperator: hermiticity violated");
  }
  const cxmat& matrix() const { return m_; }
  Eigen::Index dim() const { return m_.rows(); }

 private:
  cxmat m_;
};

// Unitary to |U^dag U - I|_max <= 1e-10, checked at construction.
class UnitaryOperator {
 public:
  explicit UnitaryOperator(cxmat m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols())
      throw contract_error("UnitaryOperator: matrix not square");
    if (!is_finite(m_))
      throw contract_error("UnitaryOperator: non-finite entries");
    if (unitarity_defect(m_) > 1e-10)
      throw contract_error("UnitaryOperator: unitarity violated");
  }
  const cxmat& matrix() const { return m_; }
  Eigen::Index dim() const { return m_.rows(); }

 private:
  cxmat m_;
};

inline cxmat kron(const cxmat& a, const cxmat& b) {
  if (!is_finite(a) || !is_finite(b))
    throw contract_error("kron: non-finite entries");
  long rows = static_cast<long>(a.rows()) * b.rows();
  long cols = static_cast<long>(a.cols()) * b.cols();
  check_capacity(std::max(rows, cols), "kron");
  cxmat out(rows, cols);
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline cxmat pauli(char axis) {
  cxmat s(2, 2);
  switch (axis) {
    case 'x': s << 0, 1, 1, 0; break;
    case 'y': s << 0, -I_UNIT, I_UNIT, 0; break;
    case 'z': s << 1, 0, 0, -1; break;
    default: throw contract_error("pauli: axis must be x, y or z");
  }
  return s;
}

// Basis convention used throughout: basis index n encodes the z-product
// state with m_i = +1 (up) when bit i of n is clear, m_i = -1 when set.
inline int spin_sign(long n, int site) { return (n >> site) & 1 ? -1 : 1; }

// I x ... x sigma_axis(site i) x ... x I on 2^L
inline HermitianOperator pauli_site(int L, int i, char axis) {
  if (L < 1 || L > 14) throw capacity_error("pauli_site: L out of range");
  if (i < 0 || i >= L)
    throw std::out_of_range("pauli_site: site index out of range");
  long dim = 1L << L;
  check_capacity(dim, "pauli_site");
  cxmat m = cxmat::Zero(dim, dim);
  for (long n = 0; n < dim; ++n) {
    switch (axis) {
      case 'z': m(n, n) = spin_sign(n, i); break;
      case 'x': m(n ^ (1L << i), n) = 1.0; break;
      case 'y':
        m(n ^ (1L << i), n) = static_cast<double>(spin_sign(n, i)) * I_UNIT;
        break;
      default: throw contract_error("pauli_site: axis must be x, y or z");
    }
  }
  return HermitianOperator(std::move(m));
}

struct HermitianEigen {
  rvec values;   // ascending
  cxmat vectors; // columns, orthonormal
};

inline HermitianEigen eig_hermitian(const HermitianOperator& h) {
  const cxmat& m = h.matrix();
  if (m.rows() == 0) throw contract_error("eig_hermitian: empty input");
  HermitianEigen out;
  out.vectors = m;  // zheevd overwrites with eigenvectors
  out.values.resize(m.rows());
  lapack_int n = static_cast<lapack_int>(m.rows());
  lapack_int info = LAPACKE_zheevd(
      LAPACK_COL_MAJOR, 'V', 'U', n,
      reinterpret_cast<lapack_complex_double*>(out.vectors.data()), n,
      out.values.data());
  if (info != 0)
    throw convergence_error("eig_hermitian: zheevd failed, info=" +
                            std::to_string(info));
  return out;
}

inline rvec eig_hermitian_values(const HermitianOperator& h) {
  const cxmat& m = h.matrix();
  if (m.rows() == 0) throw contract_error("eig_hermitian: empty input");
  cxmat work = m;
  rvec w(m.rows());
  lapack_int n = static_cast<lapack_int>(m.rows());
  lapack_int info = LAPACKE_zheevd(
      LAPACK_COL_MAJOR, 'N', 'U', n,
      reinterpret_cast<lapack_complex_double*>(work.data()), n, w.data());
  if (info != 0)
    throw convergence_error("eig_hermitian: zheevd failed, info=" +
                            std::to_string(info));
  return w;
}

// U = exp(-i H t) via spectral decomposition
inline UnitaryOperator unitary_exp(const HermitianOperator& h, double t) {
  HermitianEigen e = eig_hermitian(h);
  cxvec phase(e.values.size());
  for (Eigen::Index k = 0; k < e.values.size(); ++k)
    phase[k] = std::exp(-I_UNIT * e.values[k] * t);
  cxmat u = e.vectors * phase.asDiagonal() * e.vectors.adjoint();
  return UnitaryOperator(std::move(u));
}

struct QuasiSpectrum {
  double period = 1.0;
  std::vector<double> quasi;  // ascending, in [0, 2*pi/period)
  cxmat vectors;              // columns matching quasi; may be empty
};

namespace detail {

inline std::vector<cx> schur_eigenvalues(cxmat& u, bool want_vectors) {
  lapack_int n = static_cast<lapack_int>(u.rows());
  std::vector<cx> w(n);
  lapack_int sdim = 0;
  cxmat vs;
  if (want_vectors) vs.resize(n, n);
  lapack_int info = LAPACKE_zgees(
      LAPACK_COL_MAJOR, want_vectors ? 'V' : 'N', 'N', nullptr, n,
      reinterpret_cast<lapack_complex_double*>(u.data()), n, &sdim,
      reinterpret_cast<lapack_complex_double*>(w.data()),
      want_vectors ? reinterpret_cast<lapack_complex_double*>(vs.data())
                   : nullptr,
      want_vectors ? n : 1);
  if (info != 0)
    throw convergence_error("eig_unitary: zgees failed, info=" +
                            std::to_string(info));
  if (want_vectors) u = vs;  // Schur vectors = eigenvectors for normal input
  return w;
}

inline double quasi_from_eigenvalue(cx lambda, double T) {
  // U v = exp(-i eps T) v, eps mapped to [0, 2*pi/T)
  double eps = -std::arg(lambda) / T;
  double zone = 2.0 * M_PI / T;
  eps = std::fmod(eps, zone);
  if (eps < 0) eps += zone;
  if (eps >= zone) eps = 0.0;
  return eps;
}

}  // namespace detail

// Quasi-energies via complex Schur decomposition of U.  For a unitary
// (normal) matrix the Schur form is diagonal and the Schur vectors are the
// eigenvectors; the residual is checked against 1e-9 * dim.
inline QuasiSpectrum eig_unitary(const UnitaryOperator& u, double T) {
  cxmat work = u.matrix();
  std::vector<cx> w = detail::schur_eigenvalues(work, true);
  Eigen::Index n = u.dim();
  // post-normalize eigenvalues onto the unit circle
  for (auto& lam : w) lam /= std::abs(lam);
  double resid = 0.0;
  {
    cxvec lamv(n);
    for (Eigen::Index k = 0; k < n; ++k) lamv[k] = w[k];
    resid = max_abs(u.matrix() * work - work * lamv.asDiagonal());
  }
  if (resid > 1e-9 * static_cast<double>(n))
    throw convergence_error("eig_unitary: eigenpair residual " +
                            std::to_string(resid) + " too large");
  QuasiSpectrum out;
  out.period = T;
  out.quasi.resize(n);
  std::vector<Eigen::Index> order(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    out.quasi[k] = detail::quasi_from_eigenvalue(w[k], T);
    order[k] = k;
  }
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return out.quasi[a] < out.quasi[b];
  });
  QuasiSpectrum sorted;
  sorted.period = T;
  sorted.quasi.resize(n);
  sorted.vectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    sorted.quasi[k] = out.quasi[order[k]];
    sorted.vectors.col(k) = work.col(order[k]);
  }
  return sorted;
}

// Eigenphases only (no vectors); used by level-statistics ensembles.
inline std::vector<double> eig_unitary_values(const UnitaryOperator& u,
                                              double T) {
  cxmat work = u.matrix();
  std::vector<cx> w = detail::schur_eigenvalues(work, false);
  std::vector<double> quasi(w.size());
  for (std::size_t k = 0; k < w.size(); ++k)
    quasi[k] = detail::quasi_from_eigenvalue(w[k] / std::abs(w[k]), T);
  std::sort(quasi.begin(), quasi.end());
  return quasi;
}

// ---------------------------------------------------------------------------
// Fixed-N bosonic Fock space over M modes, occupation tuples in
// lexicographic order.

class FockBasis {
 public:
  FockBasis(int modes, int particles) : modes_(modes), particles_(particles) {
    if (modes < 1 || particles < 0)
      throw contract_error("FockBasis: invalid modes/particles");
    std::vector<int> occ(modes, 0);
    enumerate(occ, 0, particles);
    check_capacity(static_cast<long>(states_.size()), "FockBasis");
    for (std::size_t k = 0; k < states_.size(); ++k) index_[states_[k]] = k;
  }

  int modes() const { return modes_; }
  int particles() const { return particles_; }
  std::size_t size() const { return states_.size(); }
  const std::vector<int>& state(std::size_t k) const { return states_[k]; }

  // -1 if the tuple is not in the basis
  long index_of(const std::vector<int>& occ) const {
    auto it = index_.find(occ);
    return it == index_.end() ? -1 : static_cast<long>(it->second);
  }

 private:
  void enumerate(std::vector<int>& occ, int mode, int left) {
    if (mode == modes_ - 1) {
      occ[mode] = left;
      states_.push_back(occ);
      return;
    }
    for (int n = 0; n <= left; ++n) {
      occ[mode] = n;
      enumerate(occ, mode + 1, left - n);
    }
  }

  int modes_;
  int particles_;
  std::vector<std::vector<int>> states_;
  std::map<std::vector<int>, std::size_t> index_;
};

// Rectangular annihilation matrix a_j : basis(N) -> basis(N-1),
// a_j |..n_j..> = sqrt(n_j) |..n_j-1..>.
inline cxmat annihilation_matrix(const FockBasis& from, const FockBasis& to,
                                 int mode) {
  if (to.modes() != from.modes() || to.particles() != from.particles() - 1)
    throw contract_error("annihilation_matrix: basis mismatch");
  cxmat a = cxmat::Zero(to.size(), from.size());
  for (std::size_t k = 0; k < from.size(); ++k) {
    std::vector<int> occ = from.state(k);
    if (occ[mode] == 0) continue;
    double amp = std::sqrt(static_cast<double>(occ[mode]));
    occ[mode] -= 1;
    long j = to.index_of(occ);
    a(j, k) = amp;
  }
  return a;
}

// a_i^dag a_j on the fixed-N basis
inline cxmat hopping_operator(const FockBasis& basis, int i, int j) {
  cxmat m = cxmat::Zero(basis.size(), basis.size());
  for (std::size_t k = 0; k < basis.size(); ++k) {
    std::vector<int> occ = basis.state(k);
    if (occ[j] == 0) continue;
    double amp = std::sqrt(static_cast<double>(occ[j]));
    occ[j] -= 1;
    amp *= std::sqrt(static_cast<double>(occ[i] + 1));
    occ[i] += 1;
    long t = basis.index_of(occ);
    m(t, k) = amp;
  }
  return m;
}

// (a_i^dag)^2 a_j^2 on the fixed-N basis
inline cxmat pair_exchange_operator(const FockBasis& basis, int i, int j) {
  cxmat m = cxmat::Zero(basis.size(), basis.size());
  for (std::size_t k = 0; k < basis.size(); ++k) {
    std::vector<int> occ = basis.state(k);
    if (occ[j] < 2) continue;
    double amp = std::sqrt(static_cast<double>(occ[j])) *
                 std::sqrt(static_cast<double>(occ[j] - 1));
    occ[j] -= 2;
    amp *= std::sqrt(static_cast<double>(occ[i] + 1));
    occ[i] += 1;
    amp *= std::sqrt(static_cast<double>(occ[i] + 1));
    occ[i] += 1;
    long t = basis.index_of(occ);
    m(t, k) = amp;
  }
  return m;
}

inline cxmat number_operator(const FockBasis& basis, int mode) {
  cxmat m = cxmat::Zero(basis.size(), basis.size());
  for (std::size_t k = 0; k < basis.size(); ++k)
    m(k, k) = basis.state(k)[mode];
  return m;
}

struct FockModeOperators {
  // a[j] maps the fixed-N basis to the (N-1)-particle basis; creation is
  // the adjoint.  number[j] = a_j^dag a_j on the fixed-N basis.
  std::vector<cxmat> a;
  std::vector<cxmat> number;
};

inline FockModeOperators fock_operators(const FockBasis& basis) {
  FockModeOperators ops;
  if (basis.particles() > 0) {
    FockBasis lower(basis.modes(), basis.particles() - 1);
    for (int j = 0; j < basis.modes(); ++j)
      ops.a.push_back(annihilation_matrix(basis, lower, j));
  }
  for (int j = 0; j < basis.modes(); ++j)
    ops.number.push_back(number_operator(basis, j));
  return ops;
}

}  // namespace chronolab
