#pragma once

#include <algorithm>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ee/lattice.hpp"

namespace ee {

// A subset of lattice sites. Value type: set operations return new regions and
// record provenance in `shape`. Site order is canonical (lexicographic in
// coordinates, which equals ascending site index).
class Region {
 public:
  Region(LatticeGeometry geom, std::vector<long> sites, std::string shape)
      : geom_(geom), sites_(std::move(sites)), shape_(std::move(shape)) {
    std::sort(sites_.begin(), sites_.end());
    sites_.erase(std::unique(sites_.begin(), sites_.end()), sites_.end());
    if (!sites_.empty() && (sites_.front() < 0 || sites_.back() >= geom_.sites()))
      throw std::invalid_argument("Region: site index outside lattice");
  }

  const LatticeGeometry& geometry() const { return geom_; }
  const std::vector<long>& sites() const { return sites_; }
  const std::string& shape() const { return shape_; }
  long size() const { return static_cast<long>(sites_.size()); }
  bool empty() const { return sites_.empty(); }

  bool contains(long idx) const {
    return std::binary_search(sites_.begin(), sites_.end(), idx);
  }
  bool contains(const Coord& c) const { return contains(geom_.index_of(c)); }

  std::vector<Coord> coords() const {
    std::vector<Coord> out;
    out.reserve(sites_.size());
    for (long s : sites_) out.push_back(geom_.coord_of(s));
    return out;
  }

  bool operator==(const Region& other) const {
    return geom_ == other.geom_ && sites_ == other.sites_;
  }

 private:
  LatticeGeometry geom_;
  std::vector<long> sites_;
  std::string shape_;
};

inline void require_same_geometry(const Region& a, const Region& b, const char* op) {
  if (!(a.geometry() == b.geometry()))
    throw std::invalid_argument(std::string(op) + ": regions live on different lattices");
}

inline const char* axis_letter(int axis) {
  static const char* names[3] = {"x", "y", "z"};
  return names[axis];
}

inline int parse_axis(const std::string& s) {
  if (s == "x" || s == "0") return 0;
  if (s == "y" || s == "1") return 1;
  if (s == "z" || s == "2") return 2;
  throw std::invalid_argument("unknown axis '" + s + "' (expected x, y or z)");
}

// Width-L slab perpendicular to `axis`, full extent along the other axes,
// offset wrapping periodically. 1 <= L <= N-1 so the complement is nonempty.
inline Region belt(const LatticeGeometry& geom, int axis, int offset, int width) {
  if (axis < 0 || axis >= geom.dims) throw std::invalid_argument("belt: axis outside lattice");
  if (width < 1 || width > geom.edge - 1)
    throw std::invalid_argument("belt: width " + std::to_string(width) + " outside [1, " +
                                std::to_string(geom.edge - 1) + "]");
  std::vector<long> sites;
  sites.reserve(static_cast<size_t>(width) * geom.sites() / geom.edge);
  const long n = geom.sites();
  for (long i = 0; i < n; ++i) {
    const Coord c = geom.coord_of(i);
    const int rel = geom.wrap(c[axis] - offset);
    if (rel < width) sites.push_back(i);
  }
  std::ostringstream os;
  os << "belt:" << axis_letter(axis) << "," << geom.wrap(offset) << "," << width;
  return Region(geom, std::move(sites), os.str());
}

// Axis-aligned box with the given corner offset and per-axis extents,
// wrapping periodically. An extent equal to N spans the whole axis.
inline Region rectangle(const LatticeGeometry& geom, const Coord& offset, const Coord& extent) {
  std::vector<long> sites;
  for (int i = 0; i < geom.dims; ++i)
    if (extent[i] < 1 || extent[i] > geom.edge)
      throw std::invalid_argument("rectangle: extent outside [1, N] on axis " +
                                  std::string(axis_letter(i)));
  const long n = geom.sites();
  for (long i = 0; i < n; ++i) {
    const Coord c = geom.coord_of(i);
    bool in = true;
    for (int a = 0; a < geom.dims && in; ++a)
      in = geom.wrap(c[a] - offset[a]) < extent[a];
    if (in) sites.push_back(i);
  }
  std::ostringstream os;
  os << "rect:";
  for (int a = 0; a < geom.dims; ++a) os << geom.wrap(offset[a]) << ",";
  for (int a = 0; a < geom.dims; ++a) os << extent[a] << (a + 1 < geom.dims ? "," : "");
  return Region(geom, std::move(sites), os.str());
}

inline Region mask_from_predicate(const LatticeGeometry& geom,
                                  const std::function<bool(const Coord&)>& pred,
                                  const std::string& shape = "mask") {
  std::vector<long> sites;
  const long n = geom.sites();
  for (long i = 0; i < n; ++i)
    if (pred(geom.coord_of(i))) sites.push_back(i);
  return Region(geom, std::move(sites), shape);
}

// Sites with squared Euclidean distance <= r^2 from (cx, cy); distances are
// taken in the fundamental domain (no wrap), matching how the disk is drawn.
inline Region disk(const LatticeGeometry& geom, double cx, double cy, double r) {
  if (geom.dims != 2) throw std::invalid_argument("disk: regions are two-dimensional");
  std::ostringstream os;
  os << "disk:" << cx << "," << cy << "," << r;
  return mask_from_predicate(
      geom,
      [cx, cy, r](const Coord& c) {
        const double dx = c[0] - cx, dy = c[1] - cy;
        return dx * dx + dy * dy <= r * r;
      },
      os.str());
}

inline Region union_of(const Region& a, const Region& b) {
  require_same_geometry(a, b, "union");
  std::vector<long> sites;
  sites.reserve(a.sites().size() + b.sites().size());
  std::set_union(a.sites().begin(), a.sites().end(), b.sites().begin(), b.sites().end(),
                 std::back_inserter(sites));
  return Region(a.geometry(), std::move(sites), "union(" + a.shape() + ";" + b.shape() + ")");
}

inline Region intersect(const Region& a, const Region& b) {
  require_same_geometry(a, b, "intersect");
  std::vector<long> sites;
  std::set_intersection(a.sites().begin(), a.sites().end(), b.sites().begin(), b.sites().end(),
                        std::back_inserter(sites));
  return Region(a.geometry(), std::move(sites), "intersect(" + a.shape() + ";" + b.shape() + ")");
}

inline Region complement(const Region& a) {
  std::vector<long> sites;
  sites.reserve(a.geometry().sites() - a.size());
  const long n = a.geometry().sites();
  auto it = a.sites().begin();
  for (long i = 0; i < n; ++i) {
    if (it != a.sites().end() && *it == i)
      ++it;
    else
      sites.push_back(i);
  }
  return Region(a.geometry(), std::move(sites), "complement(" + a.shape() + ")");
}

inline Region translate(const Region& a, const Coord& v) {
  const LatticeGeometry& g = a.geometry();
  std::vector<long> sites;
  sites.reserve(a.sites().size());
  for (long s : a.sites()) {
    Coord c = g.coord_of(s);
    for (int i = 0; i < g.dims; ++i) c[i] = g.wrap(c[i] + v[i]);
    sites.push_back(g.index_of(c));
  }
  std::ostringstream os;
  os << "translate(" << a.shape() << ";";
  for (int i = 0; i < g.dims; ++i) os << v[i] << (i + 1 < g.dims ? "," : ")");
  return Region(g, std::move(sites), os.str());
}

// Reflection x_axis -> N-1-x_axis (about the lattice midplane).
inline Region mirror(const Region& a, int axis) {
  const LatticeGeometry& g = a.geometry();
  if (axis < 0 || axis >= g.dims) throw std::invalid_argument("mirror: axis outside lattice");
  std::vector<long> sites;
  sites.reserve(a.sites().size());
  for (long s : a.sites()) {
    Coord c = g.coord_of(s);
    c[axis] = g.edge - 1 - c[axis];
    sites.push_back(g.index_of(c));
  }
  return Region(g, std::move(sites),
                "mirror(" + a.shape() + ";" + axis_letter(axis) + ")");
}

struct BeltShape {
  int axis;
  int offset;
  int width;
};

// Structural belt detection: works on any region whose site set happens to be
// a belt, however it was built. Along the belt axis the occupied coordinates
// form one cyclic run of length < N, each carrying the full transverse layer.
inline std::optional<BeltShape> detect_belt(const Region& r) {
  const LatticeGeometry& g = r.geometry();
  const int N = g.edge;
  const long layer = g.sites() / N;
  if (r.empty() || r.size() % layer != 0) return std::nullopt;
  const long width = r.size() / layer;
  if (width < 1 || width > N - 1) return std::nullopt;
  for (int axis = 0; axis < g.dims; ++axis) {
    std::vector<long> per_coord(N, 0);
    for (long s : r.sites()) ++per_coord[g.coord_of(s)[axis]];
    std::vector<int> occ;
    bool uniform = true;
    for (int x = 0; x < N && uniform; ++x) {
      if (per_coord[x] == layer)
        occ.push_back(x);
      else if (per_coord[x] != 0)
        uniform = false;
    }
    if (!uniform || static_cast<long>(occ.size()) != width) continue;
    // one cyclic run: exactly one gap when walking the occupied coordinates
    int breaks = 0, offset = occ[0];
    for (size_t i = 0; i < occ.size(); ++i) {
      const int next = occ[(i + 1) % occ.size()];
      if (g.wrap(next - occ[i]) != 1) {
        ++breaks;
        offset = next;
      }
    }
    if (breaks != 1) continue;
    return BeltShape{axis, offset, static_cast<int>(width)};
  }
  return std::nullopt;
}

namespace detail {

inline std::vector<std::string> split_fields(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else
      cur += c;
  }
  out.push_back(cur);
  return out;
}

inline int parse_int(const std::string& s, const std::string& what) {
  try {
    size_t pos = 0;
    const int v = std::stoi(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("could not parse " + what + " from '" + s + "'");
  }
}

inline double parse_real(const std::string& s, const std::string& what) {
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

// 0/1 grid file: N^d digits in lexicographic site order, whitespace optional,
// '#' comments allowed.
inline Region mask_from_file(const LatticeGeometry& geom, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("mask: cannot open '" + path + "'");
  std::vector<long> sites;
  long idx = 0;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    for (char c : line) {
      if (c == ' ' || c == '\t' || c == '\r') continue;
      if (c != '0' && c != '1')
        throw std::invalid_argument("mask: unexpected character '" + std::string(1, c) +
                                    "' in '" + path + "'");
      if (idx >= geom.sites())
        throw std::invalid_argument("mask: more than " + std::to_string(geom.sites()) +
                                    " cells in '" + path + "'");
      if (c == '1') sites.push_back(idx);
      ++idx;
    }
  }
  if (idx != geom.sites())
    throw std::invalid_argument("mask: '" + path + "' has " + std::to_string(idx) +
                                " cells, expected " + std::to_string(geom.sites()));
  return Region(geom, std::move(sites), "mask:" + path);
}

// Region literals: belt:x,0,L | rect:x0,y0,Lx,Ly | disk:cx,cy,r | mask:<path>
// (rect takes 2d fields: d offsets then d extents).
inline Region parse_region(const LatticeGeometry& geom, const std::string& text) {
  const auto colon = text.find(':');
  const std::string head = text.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : text.substr(colon + 1);
  if (head == "belt") {
    const auto f = detail::split_fields(rest);
    if (f.size() != 3) throw std::invalid_argument("belt literal is belt:<axis>,<offset>,<width>");
    return belt(geom, parse_axis(f[0]), detail::parse_int(f[1], "belt offset"),
                detail::parse_int(f[2], "belt width"));
  }
  if (head == "rect") {
    const auto f = detail::split_fields(rest);
    if (static_cast<int>(f.size()) != 2 * geom.dims)
      throw std::invalid_argument("rect literal needs " + std::to_string(2 * geom.dims) +
                                  " fields (offsets then extents)");
    Coord off{0, 0, 0}, ext{1, 1, 1};
    for (int i = 0; i < geom.dims; ++i) {
      off[i] = detail::parse_int(f[i], "rect offset");
      ext[i] = detail::parse_int(f[geom.dims + i], "rect extent");
    }
    return rectangle(geom, off, ext);
  }
  if (head == "disk") {
    const auto f = detail::split_fields(rest);
    if (f.size() != 3) throw std::invalid_argument("disk literal is disk:<cx>,<cy>,<r>");
    return disk(geom, detail::parse_real(f[0], "disk cx"), detail::parse_real(f[1], "disk cy"),
                detail::parse_real(f[2], "disk radius"));
  }
  if (head == "mask") {
    if (rest.empty()) throw std::invalid_argument("mask literal is mask:<path>");
    return mask_from_file(geom, rest);
  }
  throw std::invalid_argument("unknown region literal '" + text +
                              "' (expected belt:… | rect:… | disk:… | mask:<path>)");
}

}  // namespace ee
