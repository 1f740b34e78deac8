#pragma once

#include <array>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace ee {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

// Lattice coordinate. Components beyond the active dimension are zero.
using Coord = std::array<int, 3>;

struct regularization_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct numerical_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// d-dimensional N^d Cartesian lattice, lattice constant a = 1.
struct LatticeGeometry {
  int dims = 2;
  int edge = 8;

  LatticeGeometry() = default;
  LatticeGeometry(int d, int n) : dims(d), edge(n) {
    if (d < 1 || d > 3)
      throw std::invalid_argument("LatticeGeometry: dims must be 1, 2 or 3 (got " +
                                  std::to_string(d) + ")");
    if (n < 2)
      throw std::invalid_argument("LatticeGeometry: edge must be >= 2 (got " +
                                  std::to_string(n) + ")");
  }

  long sites() const {
    long s = 1;
    for (int i = 0; i < dims; ++i) s *= edge;
    return s;
  }

  int wrap(int x) const {
    x %= edge;
    return x < 0 ? x + edge : x;
  }

  // Site index, lexicographic in coordinates with the first axis most significant.
  long index_of(const Coord& c) const {
    long idx = 0;
    for (int i = 0; i < dims; ++i) idx = idx * edge + c[i];
    return idx;
  }

  Coord coord_of(long idx) const {
    Coord c{0, 0, 0};
    for (int i = dims - 1; i >= 0; --i) {
      c[i] = static_cast<int>(idx % edge);
      idx /= edge;
    }
    return c;
  }

  bool contains(const Coord& c) const {
    for (int i = 0; i < dims; ++i)
      if (c[i] < 0 || c[i] >= edge) return false;
    return true;
  }

  bool operator==(const LatticeGeometry&) const = default;
};

// Antiperiodic momentum grid: k_i = (2 n_i + 1) pi / N with n_i in {0,..,N-1},
// ordered lexicographically in (n_1,..,n_d). No component is ever 0 mod 2pi,
// so dispersions vanishing only on the k-axes stay strictly positive on it.
template <typename Scalar = double>
struct KGrid {
  LatticeGeometry geom;
  MatrixX<Scalar> points;  // N^d rows, dims columns

  long size() const { return points.rows(); }
  VectorX<Scalar> point(long m) const { return points.row(m).transpose(); }
};

template <typename Scalar = double>
KGrid<Scalar> make_kgrid(const LatticeGeometry& geom) {
  const long n = geom.sites();
  KGrid<Scalar> grid{geom, MatrixX<Scalar>(n, geom.dims)};
  const Scalar step = std::numbers::pi_v<Scalar> / Scalar(geom.edge);
  for (long m = 0; m < n; ++m) {
    const Coord idx = geom.coord_of(m);
    for (int i = 0; i < geom.dims; ++i)
      grid.points(m, i) = Scalar(2 * idx[i] + 1) * step;
  }
  return grid;
}

}  // namespace ee
