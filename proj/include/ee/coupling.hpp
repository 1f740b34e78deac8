#pragma once

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "ee/dispersion.hpp"
#include "ee/fourier.hpp"
#include "ee/lattice.hpp"

namespace ee {

inline constexpr long kDenseSiteCap = 4096;  // O(sites^3) eigensolves beyond this are not desk-scale
inline constexpr double kSparsityFlush = 1e-12;

// Real-space potential matrix V of the oscillator Hamiltonian
// H = (1/2) sum p^2 + (1/2) q^T V q, in units with unit oscillator mass.
// V is the inverse Fourier transform of omega(k)^2 on the antiperiodic grid:
// symmetric, positive definite, and Toeplitz up to the antiperiodic sign flip
// V(D + N e_i) = -V(D). For factorized dispersions the per-axis chain
// matrices with V = V^1 (x) ... (x) V^d are kept alongside the dense form.
template <typename Scalar = double>
struct CouplingMatrix {
  LatticeGeometry geom;
  std::string source;
  MatrixX<Scalar> dense;
  VectorX<Scalar> spectrum;                // omega^2 per mode, lexicographic
  VectorX<Scalar> kernel;                  // V(D) over D in [0, N-1]^d
  std::vector<MatrixX<Scalar>> axis_factors;  // empty unless factorized

  Scalar at(Coord d) const {
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
    return Scalar(sign) * kernel[idx];
  }
};

namespace detail {

// V(D) = (1/N^d) sum_k omega^2(k) e^{i k.D}; the sine part must vanish and is
// asserted below 1e-10 before being discarded.
template <typename Scalar>
VectorX<Scalar> coupling_kernel(const VectorX<Scalar>& omega, const LatticeGeometry& geom,
                                int threads) {
  VectorX<Scalar> re, im;
  displacement_transform<Scalar>(geom, omega.cwiseAbs2().eval(), threads, re, &im);
  const Scalar pref = Scalar(1) / Scalar(geom.sites());
  const Scalar worst = im.cwiseAbs().maxCoeff() * pref;
  if (worst > Scalar(1e-10))
    throw numerical_error("coupling transform left imaginary residue " + std::to_string(worst));
  re *= pref;
  for (long i = 0; i < re.size(); ++i)
    if (std::abs(re[i]) < Scalar(kSparsityFlush)) re[i] = Scalar(0);
  return re;
}

}  // namespace detail

// N x N chain matrix of one axis of a factorized dispersion; its spectrum on
// the 1D antiperiodic grid is |f_axis(k)|^2.
template <typename Scalar>
MatrixX<Scalar> axis_chain_matrix(const Dispersion<Scalar>& disp, const LatticeGeometry& geom,
                                  int axis) {
  if (disp.kind != DispersionKind::factorized)
    throw std::invalid_argument("axis_chain_matrix: dispersion is not factorized");
  if (axis < 0 || axis >= geom.dims)
    throw std::invalid_argument("axis_chain_matrix: axis outside lattice");

  const LatticeGeometry chain(1, geom.edge);
  const Scalar step = std::numbers::pi_v<Scalar> / Scalar(geom.edge);
  VectorX<Scalar> omega(geom.edge);
  for (int n = 0; n < geom.edge; ++n)
    omega[n] = std::abs(disp.factors[axis](Scalar(2 * n + 1) * step));
  const VectorX<Scalar> kern = detail::coupling_kernel(omega, chain, 1);

  MatrixX<Scalar> M(geom.edge, geom.edge);
  for (int i = 0; i < geom.edge; ++i)
    for (int j = 0; j < geom.edge; ++j) {
      int d = i - j;
      int sign = 1;
      if (d < 0) {
        d += geom.edge;
        sign = -sign;
      }
      M(i, j) = Scalar(sign) * kern[d];
    }
  return M;
}

template <typename Scalar>
CouplingMatrix<Scalar> build_coupling(const Dispersion<Scalar>& disp, const LatticeGeometry& geom,
                                      int threads = 0) {
  if (geom.sites() > kDenseSiteCap)
    throw std::invalid_argument("build_coupling: " + std::to_string(geom.sites()) +
                                " sites exceeds the dense cap of " +
                                std::to_string(kDenseSiteCap) + "; use the chain path");
  CouplingMatrix<Scalar> V;
  V.geom = geom;
  V.source = disp.spec;
  V.spectrum = checked_grid_frequencies(disp, geom).cwiseAbs2();

  const VectorX<Scalar> omega = V.spectrum.cwiseSqrt();
  V.kernel = detail::coupling_kernel(omega, geom, threads);

  const long n = geom.sites();
  V.dense.resize(n, n);
  for (long i = 0; i < n; ++i) {
    const Coord ci = geom.coord_of(i);
    for (long j = 0; j <= i; ++j) {
      const Coord cj = geom.coord_of(j);
      Coord d{0, 0, 0};
      for (int a = 0; a < geom.dims; ++a) d[a] = ci[a] - cj[a];
      const Scalar v = V.at(d);
      V.dense(i, j) = v;
      V.dense(j, i) = v;
    }
  }

  if (disp.kind == DispersionKind::factorized) {
    V.axis_factors.reserve(geom.dims);
    for (int a = 0; a < geom.dims; ++a) V.axis_factors.push_back(axis_chain_matrix(disp, geom, a));
  }
  return V;
}

// Largest Chebyshev displacement (with antiperiodic wrap, i.e. components
// folded into [-N/2, N/2]) carrying |V| > 1e-10.
template <typename Scalar>
int coupling_range(const CouplingMatrix<Scalar>& V) {
  const LatticeGeometry& g = V.geom;
  int range = 0;
  for (long idx = 0; idx < V.kernel.size(); ++idx) {
    if (std::abs(V.kernel[idx]) <= Scalar(1e-10)) continue;
    const Coord d = g.coord_of(idx);
    int cheb = 0;
    for (int a = 0; a < g.dims; ++a) {
      const int folded = std::min(d[a], g.edge - d[a]);
      cheb = std::max(cheb, folded);
    }
    range = std::max(range, cheb);
  }
  return range;
}

// Plain-text dump: one `i j V_ij` line per nonzero, header comment first.
template <typename Scalar>
void write_coupling(std::ostream& os, const CouplingMatrix<Scalar>& V) {
  os << "# coupling matrix: d=" << V.geom.dims << " N=" << V.geom.edge
     << " dispersion=" << V.source << "\n";
  const long n = V.geom.sites();
  for (long i = 0; i < n; ++i)
    for (long j = 0; j < n; ++j)
      if (V.dense(i, j) != Scalar(0)) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g", static_cast<double>(V.dense(i, j)));
        os << i << " " << j << " " << buf << "\n";
      }
}

}  // namespace ee
