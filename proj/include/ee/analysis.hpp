#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "ee/chains.hpp"
#include "ee/dispersion.hpp"
#include "ee/gaussian.hpp"
#include "ee/region.hpp"

namespace ee {

template <typename Scalar = double>
struct SweepPoint {
  int edge;    // N
  int width;   // L
  Scalar entropy;
};

enum class FitModel { total, per_transverse_site };

template <typename Scalar = double>
struct ScalingFit {
  Scalar slope = 0;
  Scalar intercept = 0;
  Scalar residual = 0;  // max |y - (c ln L + b)|, never hidden
  int points = 0;
  bool acceptance_grade = false;  // >= 3 points spanning >= 2 octaves in L
};

// Unweighted least squares of y against ln L, with y = S (total) or
// y = S / N^{d-1} (per transverse site). Two distinct widths are the minimum;
// acceptance-grade fits want three points over two octaves.
template <typename Scalar>
ScalingFit<Scalar> fit_log_scaling(const std::vector<SweepPoint<Scalar>>& pts, FitModel model,
                                   int dims) {
  if (pts.size() < 2) throw std::invalid_argument("fit_log_scaling: need at least 2 points");
  std::vector<Scalar> x(pts.size()), y(pts.size());
  for (size_t i = 0; i < pts.size(); ++i) {
    x[i] = std::log(Scalar(pts[i].width));
    Scalar layer = 1;
    for (int a = 0; a < dims - 1; ++a) layer *= Scalar(pts[i].edge);
    y[i] = model == FitModel::total ? pts[i].entropy : pts[i].entropy / layer;
  }
  Scalar xbar = 0, ybar = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    xbar += x[i];
    ybar += y[i];
  }
  xbar /= Scalar(x.size());
  ybar /= Scalar(y.size());
  Scalar sxx = 0, sxy = 0, xmin = x[0], xmax = x[0];
  for (size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - xbar) * (x[i] - xbar);
    sxy += (x[i] - xbar) * (y[i] - ybar);
    xmin = std::min(xmin, x[i]);
    xmax = std::max(xmax, x[i]);
  }
  if (!(sxx > Scalar(0)))
    throw std::invalid_argument("fit_log_scaling: degenerate abscissae (all widths equal)");

  ScalingFit<Scalar> fit;
  fit.slope = sxy / sxx;
  fit.intercept = ybar - fit.slope * xbar;
  fit.points = static_cast<int>(pts.size());
  for (size_t i = 0; i < x.size(); ++i)
    fit.residual = std::max(fit.residual, std::abs(y[i] - (fit.slope * x[i] + fit.intercept)));
  fit.acceptance_grade =
      pts.size() >= 3 && xmax - xmin >= Scalar(2) * std::log(Scalar(2)) - Scalar(1e-12);
  return fit;
}

// S_A + S_B - S_{A u B} - S_{A n B}; nonnegative up to roundoff for every
// Gaussian ground state (strong subadditivity is exact).
template <typename Scalar = double>
struct SSAReport {
  Scalar s_a = 0, s_b = 0, s_union = 0, s_intersect = 0;
  Scalar slack = 0;
  std::string shape_a, shape_b;
};

template <typename Scalar>
SSAReport<Scalar> check_ssa(const Dispersion<Scalar>& disp, const LatticeGeometry& geom,
                            const Region& a, const Region& b, int threads = 0) {
  require_same_geometry(a, b, "check_ssa");
  if (!(a.geometry() == geom))
    throw std::invalid_argument("check_ssa: regions do not live on the given lattice");
  const CorrelationKernel<Scalar> kernel = make_correlation_kernel(disp, geom, threads);
  SSAReport<Scalar> rep;
  rep.shape_a = a.shape();
  rep.shape_b = b.shape();
  rep.s_a = entropy(kernel, a).value;
  rep.s_b = entropy(kernel, b).value;
  rep.s_union = entropy(kernel, union_of(a, b)).value;
  rep.s_intersect = entropy(kernel, intersect(a, b)).value;
  rep.slack = rep.s_a + rep.s_b - rep.s_union - rep.s_intersect;
  return rep;
}

// Leading-order bounds for a rectangle seen as the intersection of two belts,
// plus the exact SSA upper bound S_A + S_B - S_{A u B}. The leading-order
// bounds assume N, L_x, L_y, N-L_x, N-L_y all large; at small sizes they can
// fail marginally, so each carries its own holds flag instead of throwing.
template <typename Scalar = double>
struct RectangleBounds {
  int lx = 0, ly = 0;
  Scalar s_rect = 0, s_belt_x = 0, s_belt_y = 0, s_union = 0;
  Scalar paper_upper = 0, paper_lower = 0, exact_upper = 0;
  bool paper_upper_holds = false, paper_lower_holds = false, exact_upper_holds = false;
  bool equal_partition = false;
  Scalar ep_upper = 0, ep_lower = 0;  // sharpened bounds when L_x = L_y = N/2
  bool ep_upper_holds = false, ep_lower_holds = false;
};

template <typename Scalar>
RectangleBounds<Scalar> rectangle_bounds(const Dispersion<Scalar>& disp,
                                         const LatticeGeometry& geom, int lx, int ly,
                                         int threads = 0) {
  if (geom.dims != 2) throw std::invalid_argument("rectangle_bounds: two-dimensional only");
  if (lx < 1 || lx > geom.edge - 1 || ly < 1 || ly > geom.edge - 1)
    throw std::invalid_argument("rectangle_bounds: extents must lie in [1, N-1]");
  if (geom.sites() > kDenseSiteCap)
    throw std::invalid_argument("rectangle_bounds: lattice exceeds the dense site cap");

  const Scalar N = Scalar(geom.edge);
  const CorrelationKernel<Scalar> kernel = make_correlation_kernel(disp, geom, threads);
  const Region beltx = belt(geom, 0, 0, lx);
  const Region belty = belt(geom, 1, 0, ly);
  const Region rect = intersect(beltx, belty);

  RectangleBounds<Scalar> rep;
  rep.lx = lx;
  rep.ly = ly;
  rep.s_belt_x = entropy(kernel, beltx).value;
  rep.s_belt_y = entropy(kernel, belty).value;
  rep.s_union = entropy(kernel, union_of(beltx, belty)).value;
  rep.s_rect = entropy(kernel, rect).value;

  rep.paper_upper = N / 3 * std::log(Scalar(lx) * Scalar(ly));
  rep.paper_lower =
      std::max(Scalar(lx) / 3 * std::log(Scalar(ly)), Scalar(ly) / 3 * std::log(Scalar(lx)));
  rep.exact_upper = rep.s_belt_x + rep.s_belt_y - rep.s_union;
  const Scalar tol = Scalar(1e-8);
  rep.paper_upper_holds = rep.paper_upper >= rep.s_rect - tol;
  rep.paper_lower_holds = rep.s_rect >= rep.paper_lower - tol;
  rep.exact_upper_holds = rep.exact_upper >= rep.s_rect - tol;

  rep.equal_partition = (geom.edge % 2 == 0) && lx == geom.edge / 2 && ly == geom.edge / 2;
  if (rep.equal_partition) {
    rep.ep_upper = N / 3 * std::log(N / 2);
    rep.ep_lower = N / 6 * std::log(N / 2);
    rep.ep_upper_holds = rep.ep_upper >= rep.s_rect - tol;
    rep.ep_lower_holds = rep.s_rect >= rep.ep_lower - tol;
  }
  return rep;
}

// Leading-order bounds for the 2^d equal partition in d dimensions:
//   (d N^{d-1}/3) ln(N/2)  >=  S  >=  ((N/2)^{d-1}/3) ln(N/2).
template <typename Scalar = double>
struct EqualPartitionBounds {
  Scalar upper = 0, lower = 0;
};

template <typename Scalar = double>
EqualPartitionBounds<Scalar> equal_partition_bounds(int dims, int edge) {
  if (edge % 2 != 0) throw std::invalid_argument("equal_partition_bounds: N must be even");
  const Scalar N = Scalar(edge);
  Scalar layer = 1, half_layer = 1;
  for (int a = 0; a < dims - 1; ++a) {
    layer *= N;
    half_layer *= N / 2;
  }
  return {Scalar(dims) * layer / 3 * std::log(N / 2), half_layer / 3 * std::log(N / 2)};
}

// Belt-entropy growth coefficient for a closed Bose surface, fitted over a
// sweep at fixed L/N (pairs are anchored so the largest width runs on the
// given geometry), against the prediction that every surface-intersecting
// chain contributes (2/3) ln L:  gamma = (2/3) * critical_chain_count / N.
template <typename Scalar = double>
struct GammaReport {
  std::vector<SweepPoint<Scalar>> points;
  ScalingFit<Scalar> fit;
  int critical_count = 0;
  Scalar predicted = 0;
  Scalar fitted = 0;
  Scalar rel_deviation = 0;
};

template <typename Scalar>
GammaReport<Scalar> closed_surface_gamma(const Dispersion<Scalar>& disp,
                                         const LatticeGeometry& geom, std::vector<int> widths,
                                         int threads = 0) {
  if (disp.kind != DispersionKind::closed_surface)
    throw std::invalid_argument("closed_surface_gamma: dispersion must be closed_surface");
  if (!(disp.beta > 0 && disp.beta < 2))
    throw std::invalid_argument("closed_surface_gamma: no Bose surface (need 0 < beta < 2)");
  if (widths.size() < 2)
    throw std::invalid_argument("closed_surface_gamma: need at least two widths");
  std::sort(widths.begin(), widths.end());
  const int lref = widths.back();

  GammaReport<Scalar> rep;
  for (int L : widths) {
    if (L < 1 || (static_cast<long>(geom.edge) * L) % lref != 0)
      throw std::invalid_argument("closed_surface_gamma: width " + std::to_string(L) +
                                  " breaks the fixed L/N ladder (N*" + std::to_string(L) +
                                  " not divisible by " + std::to_string(lref) + ")");
    const int n = static_cast<int>(static_cast<long>(geom.edge) * L / lref);
    if (L > n - 1)
      throw std::invalid_argument("closed_surface_gamma: width " + std::to_string(L) +
                                  " leaves no complement at N = " + std::to_string(n));
    const LatticeGeometry g(geom.dims, n);
    const ChainDecomposition<Scalar> dec =
        decompose_belt(disp, g, belt(g, 0, 0, L), ChainOptions{false, threads});
    rep.points.push_back({n, L, dec.total.value});
  }
  rep.fit = fit_log_scaling(rep.points, FitModel::per_transverse_site, geom.dims);
  rep.critical_count = critical_chain_count(disp, geom, 0);
  rep.predicted = Scalar(2) / 3 * Scalar(rep.critical_count) / Scalar(geom.edge);
  rep.fitted = rep.fit.slope;
  rep.rel_deviation = std::abs(rep.fitted - rep.predicted) / rep.predicted;
  return rep;
}

}  // namespace ee
