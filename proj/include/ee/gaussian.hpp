#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "ee/dispersion.hpp"
#include "ee/fourier.hpp"
#include "ee/lattice.hpp"
#include "ee/region.hpp"

namespace ee {

enum class EntropyMethod { dense, chain_decomposition };

inline const char* method_name(EntropyMethod m) {
  return m == EntropyMethod::dense ? "dense" : "chains";
}

// Ground-state two-point kernels of the oscillator lattice over displacement
// vectors D in [0, N-1]^d:
//   X(D) = <q_0 q_D> = (1/2N^d) sum_k cos(k.D) / omega(k)
//   P(D) = <p_0 p_D> = (1/2N^d) sum_k cos(k.D) * omega(k)
// Antiperiodicity flips the sign under D -> D + N e_i, which extends the
// tables to arbitrary displacements. Building the kernel once and slicing
// regions out of it is the production path; it never forms V.
template <typename Scalar = double>
struct CorrelationKernel {
  LatticeGeometry geom;
  std::string source;  // dispersion spec string
  VectorX<Scalar> x_tab, p_tab;
  Scalar omega_min = 0;

  // kernel value at a displacement with components in (-N, N)
  Scalar x_at(const Coord& d) const { return lookup(x_tab, d); }
  Scalar p_at(const Coord& d) const { return lookup(p_tab, d); }

 private:
  Scalar lookup(const VectorX<Scalar>& tab, Coord d) const {
    int sign = 1;
    long idx = 0;
    for (int i = 0; i < geom.dims; ++i) {
      int c = d[i];
      if (c < 0) {
        c += geom.edge;
        sign = -sign;
      }
      idx = idx * geom.edge + c;
    }
    return Scalar(sign) * tab[idx];
  }
};

template <typename Scalar = double>
CorrelationKernel<Scalar> make_correlation_kernel(const Dispersion<Scalar>& disp,
                                                  const LatticeGeometry& geom, int threads = 0) {
  const VectorX<Scalar> w = checked_grid_frequencies(disp, geom);
  const Scalar pref = Scalar(1) / (Scalar(2) * Scalar(geom.sites()));
  CorrelationKernel<Scalar> k;
  k.geom = geom;
  k.source = disp.spec;
  k.omega_min = w.minCoeff();
  displacement_transform<Scalar>(geom, w.cwiseInverse(), threads, k.x_tab);
  displacement_transform<Scalar>(geom, w, threads, k.p_tab);
  k.x_tab *= pref;
  k.p_tab *= pref;
  return k;
}

// Position/momentum two-point matrices restricted to a region, in the
// region's canonical site order.
template <typename Scalar = double>
struct CorrelationPair {
  MatrixX<Scalar> X, P;
  Region region;
  std::string source;
};

template <typename Scalar>
CorrelationPair<Scalar> correlations(const CorrelationKernel<Scalar>& kernel,
                                     const Region& region) {
  if (!(region.geometry() == kernel.geom))
    throw std::invalid_argument("correlations: region geometry does not match kernel");
  const auto coords = region.coords();
  const long n = region.size();
  CorrelationPair<Scalar> out{MatrixX<Scalar>(n, n), MatrixX<Scalar>(n, n), region,
                              kernel.source};
  for (long i = 0; i < n; ++i) {
    for (long j = 0; j <= i; ++j) {
      Coord d{0, 0, 0};
      for (int a = 0; a < kernel.geom.dims; ++a) d[a] = coords[i][a] - coords[j][a];
      const Scalar x = kernel.x_at(d);
      const Scalar p = kernel.p_at(d);
      out.X(i, j) = x;
      out.X(j, i) = x;
      out.P(i, j) = p;
      out.P(j, i) = p;
    }
  }
  return out;
}

template <typename Scalar>
CorrelationPair<Scalar> correlations(const Dispersion<Scalar>& disp, const LatticeGeometry& geom,
                                     const Region& region, int threads = 0) {
  return correlations(make_correlation_kernel(disp, geom, threads), region);
}

// Cross-check path: X = V^{-1/2}/2 and P = V^{+1/2}/2 by full symmetric
// eigendecomposition of a dense coupling matrix, restricted to the region.
// Slow and memory-hungry; exists to validate the momentum-sum path.
template <typename Scalar>
CorrelationPair<Scalar> correlations_from_coupling(const MatrixX<Scalar>& dense,
                                                   const Region& region,
                                                   const std::string& source = "dense-V") {
  const LatticeGeometry& geom = region.geometry();
  if (dense.rows() != geom.sites() || dense.cols() != geom.sites())
    throw std::invalid_argument("correlations_from_coupling: V size does not match lattice");
  Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> es(dense);
  if (es.info() != Eigen::Success)
    throw numerical_error("correlations_from_coupling: eigensolve failed");
  if (es.eigenvalues().minCoeff() <= Scalar(0))
    throw regularization_error("correlations_from_coupling: V is not positive definite");
  const VectorX<Scalar> omega = es.eigenvalues().cwiseSqrt();

  const long n = region.size();
  Eigen::VectorXi idx(n);
  for (long i = 0; i < n; ++i) idx[i] = static_cast<int>(region.sites()[i]);
  const MatrixX<Scalar> U = es.eigenvectors()(idx, Eigen::all);
  CorrelationPair<Scalar> out{
      U * (Scalar(0.5) * omega.cwiseInverse()).asDiagonal() * U.transpose(),
      U * (Scalar(0.5) * omega).asDiagonal() * U.transpose(), region, source};
  return out;
}

// Modal entropy of one symplectic eigenvalue:
//   f(nu) = (nu+1/2) ln(nu+1/2) - (nu-1/2) ln(nu-1/2),  f(1/2) = 0.
template <typename Scalar>
Scalar modal_entropy(Scalar nu) {
  const Scalar a = nu + Scalar(0.5);
  const Scalar b = nu - Scalar(0.5);
  Scalar s = a * std::log(a);
  if (b > Scalar(0)) s -= b * std::log(b);
  return s;
}

// Symplectic spectrum of (X, P): nu_j = sqrt(eig(sqrt(X) P sqrt(X))), returned
// in descending order. All eigenproblems stay symmetric.
template <typename Scalar>
VectorX<Scalar> symplectic_eigenvalues(const MatrixX<Scalar>& X, const MatrixX<Scalar>& P) {
  if (!X.allFinite() || !P.allFinite())
    throw numerical_error("symplectic_eigenvalues: non-finite correlation input");
  Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> esx(X);
  if (esx.info() != Eigen::Success)
    throw numerical_error("symplectic_eigenvalues: eigensolve of X failed");
  if (esx.eigenvalues().minCoeff() <= Scalar(0))
    throw numerical_error("symplectic_eigenvalues: X is not positive definite");
  const MatrixX<Scalar> sx = esx.operatorSqrt();
  MatrixX<Scalar> M = sx * P * sx;
  M = ((M + M.transpose()) / Scalar(2)).eval();  // kill roundoff asymmetry
  Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> esm(M);
  if (esm.info() != Eigen::Success)
    throw numerical_error("symplectic_eigenvalues: eigensolve of sqrt(X) P sqrt(X) failed");
  VectorX<Scalar> nu = esm.eigenvalues().cwiseMax(Scalar(0)).cwiseSqrt();
  return nu.reverse().eval();
}

// Von Neumann entropy in nats, plus diagnostics. nu_min is the smallest
// symplectic eigenvalue before clamping at the Heisenberg bound 1/2;
// clamped_count says how many modes violated it by more than 1e-9 (an honest
// computation keeps this at 0).
template <typename Scalar = double>
struct EntropyResult {
  Scalar value = 0;
  long region_size = 0;
  EntropyMethod method = EntropyMethod::dense;
  Scalar nu_min = std::numeric_limits<Scalar>::quiet_NaN();
  long clamped_count = 0;
};

template <typename Scalar>
EntropyResult<Scalar> entropy_from_correlations(const CorrelationPair<Scalar>& corr) {
  EntropyResult<Scalar> res;
  res.method = EntropyMethod::dense;
  res.region_size = corr.region.size();
  if (corr.region.empty()) return res;

  const VectorX<Scalar> nu = symplectic_eigenvalues(corr.X, corr.P);
  res.nu_min = nu[nu.size() - 1];
  Scalar sum = 0;
  for (long j = 0; j < nu.size(); ++j) {  // descending nu: fixed reduction order
    if (nu[j] < Scalar(0.5) - Scalar(1e-9)) ++res.clamped_count;
    sum += modal_entropy(std::max(nu[j], Scalar(0.5)));
  }
  res.value = sum;
  return res;
}

template <typename Scalar>
EntropyResult<Scalar> entropy(const Dispersion<Scalar>& disp, const LatticeGeometry& geom,
                              const Region& region, int threads = 0) {
  if (region.empty()) return EntropyResult<Scalar>{};
  return entropy_from_correlations(correlations(disp, geom, region, threads));
}

template <typename Scalar>
EntropyResult<Scalar> entropy(const CorrelationKernel<Scalar>& kernel, const Region& region) {
  if (region.empty()) return EntropyResult<Scalar>{};
  return entropy_from_correlations(correlations(kernel, region));
}

}  // namespace ee
