#pragma once

#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "ee/lattice.hpp"

namespace ee {

enum class DispersionKind { factorized, closed_surface, point_gapless, gapped, custom };

inline const char* kind_name(DispersionKind k) {
  switch (k) {
    case DispersionKind::factorized: return "factorized";
    case DispersionKind::closed_surface: return "closed_surface";
    case DispersionKind::point_gapless: return "point_gapless";
    case DispersionKind::gapped: return "gapped";
    case DispersionKind::custom: return "custom";
  }
  return "?";
}

// Nonnegative frequency omega(k) on the Brillouin zone. The zero set of the
// factorized kind covers the k_i = 0 axes (a Bose surface); closed_surface has
// the closed zero set sin^2(kx/2)+sin^2(ky/2) = beta; point_gapless vanishes at
// k = 0 only; gapped is bounded below by the mass.
template <typename Scalar = double>
struct Dispersion {
  DispersionKind kind = DispersionKind::factorized;
  int dims = 2;

  // factorized / gapped: one factor per axis, each vanishing linearly at k -> 0.
  std::vector<std::function<Scalar(Scalar)>> factors;
  Scalar alpha{1};  // closed_surface scale
  Scalar beta{0};   // closed_surface offset; surface nonempty iff 0 < beta < 2
  Scalar mass{0};   // gapped
  VectorX<Scalar> table;  // custom: omega tabulated on the antiperiodic grid
  int table_edge = 0;

  std::string spec = "ebl";  // printable form for reports and file headers
};

template <typename Scalar = double>
Scalar default_factor(Scalar k) {
  return Scalar(2) * std::sin(k / Scalar(2));
}

template <typename Scalar = double>
Dispersion<Scalar> ebl_dispersion(int dims = 2) {
  Dispersion<Scalar> d;
  d.kind = DispersionKind::factorized;
  d.dims = dims;
  d.factors.assign(dims, [](Scalar k) { return default_factor(k); });
  d.spec = "ebl";
  return d;
}

template <typename Scalar = double>
Dispersion<Scalar> factorized_dispersion(std::vector<std::function<Scalar(Scalar)>> factors) {
  if (factors.empty() || factors.size() > 3)
    throw std::invalid_argument("factorized_dispersion: need 1..3 factors");
  Dispersion<Scalar> d;
  d.kind = DispersionKind::factorized;
  d.dims = static_cast<int>(factors.size());
  d.factors = std::move(factors);
  d.spec = "factorized";
  return d;
}

template <typename Scalar = double>
Dispersion<Scalar> closed_surface_dispersion(Scalar alpha, Scalar beta) {
  if (!(alpha > 0)) throw std::invalid_argument("closed_surface: alpha must be > 0");
  if (!(beta >= 0)) throw std::invalid_argument("closed_surface: beta must be >= 0");
  Dispersion<Scalar> d;
  d.kind = DispersionKind::closed_surface;
  d.dims = 2;
  d.alpha = alpha;
  d.beta = beta;
  std::ostringstream os;
  os << "closed:alpha=" << alpha << ",beta=" << beta;
  d.spec = os.str();
  return d;
}

template <typename Scalar = double>
Dispersion<Scalar> point_gapless_dispersion(int dims = 2) {
  Dispersion<Scalar> d;
  d.kind = DispersionKind::point_gapless;
  d.dims = dims;
  d.spec = "point";
  return d;
}

template <typename Scalar = double>
Dispersion<Scalar> gapped_dispersion(int dims, Scalar mass) {
  if (!(mass > 0)) throw std::invalid_argument("gapped: mass must be > 0");
  Dispersion<Scalar> d;
  d.kind = DispersionKind::gapped;
  d.dims = dims;
  d.mass = mass;
  d.factors.assign(dims, [](Scalar k) { return default_factor(k); });
  std::ostringstream os;
  os << "gapped:m=" << mass;
  d.spec = os.str();
  return d;
}

// omega tabulated over the antiperiodic grid of geom, lexicographic mode order.
template <typename Scalar = double>
Dispersion<Scalar> custom_dispersion(const LatticeGeometry& geom, VectorX<Scalar> table,
                                     const std::string& spec = "custom") {
  if (table.size() != geom.sites())
    throw std::invalid_argument("custom_dispersion: table size " + std::to_string(table.size()) +
                                " != site count " + std::to_string(geom.sites()));
  for (long m = 0; m < table.size(); ++m)
    if (!(table[m] > Scalar(0)) || !std::isfinite(table[m]))
      throw std::invalid_argument("custom_dispersion: table entry " + std::to_string(m) +
                                  " is not a positive finite frequency");
  Dispersion<Scalar> d;
  d.kind = DispersionKind::custom;
  d.dims = geom.dims;
  d.table = std::move(table);
  d.table_edge = geom.edge;
  d.spec = spec;
  return d;
}

template <typename Scalar>
Scalar eval_dispersion(const Dispersion<Scalar>& disp, const VectorX<Scalar>& k) {
  if (k.size() != disp.dims)
    throw std::invalid_argument("eval_dispersion: k has wrong dimension");
  for (long i = 0; i < k.size(); ++i)
    if (std::isnan(k[i])) throw std::invalid_argument("eval_dispersion: NaN momentum component");

  switch (disp.kind) {
    case DispersionKind::factorized: {
      Scalar w = 1;
      for (int i = 0; i < disp.dims; ++i) w *= disp.factors[i](k[i]);
      return std::abs(w);
    }
    case DispersionKind::closed_surface: {
      const Scalar sx = std::sin(k[0] / 2), sy = std::sin(k[1] / 2);
      return disp.alpha * std::abs(sx * sx + sy * sy - disp.beta);
    }
    case DispersionKind::point_gapless: {
      Scalar s2 = 0;
      for (int i = 0; i < disp.dims; ++i) {
        const Scalar s = Scalar(2) * std::sin(k[i] / 2);
        s2 += s * s;
      }
      return std::sqrt(s2);
    }
    case DispersionKind::gapped: {
      Scalar w = 1;
      for (int i = 0; i < disp.dims; ++i) w *= disp.factors[i](k[i]);
      return std::sqrt(disp.mass * disp.mass + w * w);
    }
    case DispersionKind::custom: {
      // Tabulated kinds are defined on grid points only; recover the index.
      const LatticeGeometry geom(disp.dims, disp.table_edge);
      const Scalar step = std::numbers::pi_v<Scalar> / Scalar(geom.edge);
      Coord idx{0, 0, 0};
      for (int i = 0; i < disp.dims; ++i) {
        const Scalar n = (k[i] / step - 1) / 2;
        const long ni = std::lround(static_cast<double>(n));
        if (std::abs(n - Scalar(ni)) > Scalar(1e-9) || ni < 0 || ni >= geom.edge)
          throw std::invalid_argument("eval_dispersion: custom dispersion queried off-grid");
        idx[i] = static_cast<int>(ni);
      }
      return disp.table[geom.index_of(idx)];
    }
  }
  throw std::logic_error("eval_dispersion: unknown kind");
}

// omega over all modes of the antiperiodic grid, lexicographic mode order.
template <typename Scalar>
VectorX<Scalar> grid_frequencies(const Dispersion<Scalar>& disp, const LatticeGeometry& geom) {
  if (disp.dims != geom.dims)
    throw std::invalid_argument("grid_frequencies: dispersion/geometry dimension mismatch");
  if (disp.kind == DispersionKind::custom) {
    if (disp.table_edge != geom.edge)
      throw std::invalid_argument("grid_frequencies: custom table built for N=" +
                                  std::to_string(disp.table_edge));
    return disp.table;
  }
  const KGrid<Scalar> grid = make_kgrid<Scalar>(geom);
  VectorX<Scalar> w(grid.size());
  for (long m = 0; m < grid.size(); ++m) w[m] = eval_dispersion(disp, grid.point(m));
  return w;
}

// Throws regularization_error naming the offending mode if any grid frequency
// is not strictly positive (the antiperiodic grid is supposed to miss the zero set).
template <typename Scalar>
VectorX<Scalar> checked_grid_frequencies(const Dispersion<Scalar>& disp,
                                         const LatticeGeometry& geom) {
  VectorX<Scalar> w = grid_frequencies(disp, geom);
  for (long m = 0; m < w.size(); ++m) {
    if (!(w[m] > Scalar(0)) || !std::isfinite(w[m])) {
      const Coord idx = geom.coord_of(m);
      std::ostringstream os;
      os << "regularization failure: omega <= 0 at k = (";
      for (int i = 0; i < geom.dims; ++i)
        os << (i ? "," : "") << (2 * idx[i] + 1) << "pi/" << geom.edge;
      os << "), omega = " << w[m] << " [" << disp.spec << "]";
      throw regularization_error(os.str());
    }
  }
  return w;
}

template <typename Scalar>
struct MinFrequency {
  VectorX<Scalar> k;
  Scalar omega;
  long mode_index;
};

// Exhaustive scan; first minimizer in lexicographic mode order.
template <typename Scalar>
MinFrequency<Scalar> min_grid_frequency(const Dispersion<Scalar>& disp, const KGrid<Scalar>& grid) {
  if (grid.size() == 0) throw std::invalid_argument("min_grid_frequency: empty grid");
  long best = 0;
  Scalar wbest = eval_dispersion(disp, grid.point(0));
  for (long m = 1; m < grid.size(); ++m) {
    const Scalar w = eval_dispersion(disp, grid.point(m));
    if (w < wbest) {
      wbest = w;
      best = m;
    }
  }
  return {grid.point(best), wbest, best};
}

// Number of fixed-k_perp grid lines along `axis` whose continuum 1D dispersion
// has a real zero: closed-surface lines with 0 <= beta - sin^2(k_perp/2) <= 1.
template <typename Scalar>
int critical_chain_count(const Dispersion<Scalar>& disp, const LatticeGeometry& geom, int axis) {
  if (disp.kind != DispersionKind::closed_surface)
    throw std::invalid_argument("critical_chain_count: dispersion must be closed_surface");
  if (!(disp.beta > 0 && disp.beta < 2))
    throw std::invalid_argument("critical_chain_count: no Bose surface (need 0 < beta < 2)");
  if (geom.dims != 2 || (axis != 0 && axis != 1))
    throw std::invalid_argument("critical_chain_count: closed_surface lives in d = 2");
  const Scalar step = std::numbers::pi_v<Scalar> / Scalar(geom.edge);
  int count = 0;
  for (int n = 0; n < geom.edge; ++n) {
    const Scalar kperp = Scalar(2 * n + 1) * step;
    const Scalar s = std::sin(kperp / 2);
    const Scalar t = disp.beta - s * s;
    if (t >= Scalar(0) && t <= Scalar(1)) ++count;
  }
  return count;
}

template <typename Scalar>
int critical_chain_count(const Dispersion<Scalar>& disp, const KGrid<Scalar>& grid, int axis) {
  return critical_chain_count(disp, grid.geom, axis);
}

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

inline double parse_number(const std::string& s, const std::string& what) {
  try {
    size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("could not parse " + what + " from '" + s + "'");
  }
}

}  // namespace detail

// Grammar: ebl | closed:alpha=<f>,beta=<f> | point | gapped:m=<f> | custom:<path>.
// A custom result carries only the path (in .spec); fill the table with
// load_custom_table once the geometry is known.
inline Dispersion<double> parse_dispersion(const std::string& text, int dims) {
  const auto colon = text.find(':');
  const std::string head = text.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : text.substr(colon + 1);

  if (head == "ebl") return ebl_dispersion<double>(dims);
  if (head == "point") return point_gapless_dispersion<double>(dims);
  if (head == "gapped") {
    double m = 1.0;
    for (const auto& kv : detail::split(rest, ',')) {
      if (kv.empty()) continue;
      const auto eq = kv.find('=');
      if (eq == std::string::npos || kv.substr(0, eq) != "m")
        throw std::invalid_argument("gapped dispersion takes m=<f>, got '" + kv + "'");
      m = detail::parse_number(kv.substr(eq + 1), "gapped mass");
    }
    return gapped_dispersion<double>(dims, m);
  }
  if (head == "closed") {
    double alpha = 1.0, beta = -1.0;
    for (const auto& kv : detail::split(rest, ',')) {
      if (kv.empty()) continue;
      const auto eq = kv.find('=');
      const std::string key = eq == std::string::npos ? kv : kv.substr(0, eq);
      if (eq == std::string::npos)
        throw std::invalid_argument("closed dispersion parameter '" + kv + "' has no value");
      const double v = detail::parse_number(kv.substr(eq + 1), "closed parameter " + key);
      if (key == "alpha")
        alpha = v;
      else if (key == "beta")
        beta = v;
      else
        throw std::invalid_argument("closed dispersion knows alpha and beta, not '" + key + "'");
    }
    if (beta < 0) throw std::invalid_argument("closed dispersion requires beta=<f>");
    if (dims != 2) throw std::invalid_argument("closed dispersion is two-dimensional");
    return closed_surface_dispersion<double>(alpha, beta);
  }
  if (head == "custom") {
    if (rest.empty()) throw std::invalid_argument("custom dispersion requires a file path");
    Dispersion<double> d;  // table filled by load_custom_table once geometry is known
    d.kind = DispersionKind::custom;
    d.dims = dims;
    d.spec = text;
    return d;
  }
  throw std::invalid_argument("unknown dispersion '" + text +
                              "' (expected ebl | closed:... | point | gapped:m=<f> | custom:<path>)");
}

// Reads N^d whitespace-separated positive frequencies in lexicographic mode
// order; lines starting with '#' are comments.
inline Dispersion<double> load_custom_table(const std::string& path, const LatticeGeometry& geom) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("custom dispersion: cannot open '" + path + "'");
  std::vector<double> vals;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream is(line);
    double v;
    while (is >> v) vals.push_back(v);
  }
  if (static_cast<long>(vals.size()) != geom.sites())
    throw std::invalid_argument("custom dispersion: '" + path + "' has " +
                                std::to_string(vals.size()) + " values, expected " +
                                std::to_string(geom.sites()));
  VectorX<double> table = Eigen::Map<VectorX<double>>(vals.data(), vals.size());
  return custom_dispersion(geom, std::move(table), "custom:" + path);
}

}  // namespace ee
