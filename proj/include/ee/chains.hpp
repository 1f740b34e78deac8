#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "ee/dispersion.hpp"
#include "ee/gaussian.hpp"
#include "ee/parallel.hpp"
#include "ee/region.hpp"

namespace ee {

// One decoupled chain of the partial Fourier transform: transverse momentum
// k_perp, the effective 1D dispersion along the belt axis, and the
// contiguous-block entropy of the belt's width.
template <typename Scalar = double>
struct ChainEntry {
  long transverse_index = 0;  // lexicographic over transverse axes
  VectorX<Scalar> k_perp;     // d-1 components
  VectorX<Scalar> omega_1d;   // on the 1D antiperiodic grid
  EntropyResult<Scalar> block;
};

template <typename Scalar = double>
struct ChainDecomposition {
  LatticeGeometry geom;
  int axis = 0;
  int width = 0;
  bool factorized_shortcut = false;
  std::vector<ChainEntry<Scalar>> per_chain;  // N^{d-1} entries
  EntropyResult<Scalar> total;                // method = chain_decomposition
};

struct ChainOptions {
  bool force_full = false;  // defeat the factorized single-chain shortcut
  int threads = 0;
};

namespace detail {

// Transverse momentum and effective 1D dispersion of chain `tindex`.
template <typename Scalar>
ChainEntry<Scalar> chain_frame(const Dispersion<Scalar>& disp, const LatticeGeometry& geom,
                               int axis, long tindex, const std::vector<int>& transverse_axes) {
  const int N = geom.edge;
  const Scalar step = std::numbers::pi_v<Scalar> / Scalar(N);

  ChainEntry<Scalar> entry;
  entry.transverse_index = tindex;
  entry.k_perp.resize(static_cast<long>(transverse_axes.size()));
  VectorX<Scalar> k(geom.dims);
  long rem = tindex;
  for (int t = static_cast<int>(transverse_axes.size()) - 1; t >= 0; --t) {
    const int n = static_cast<int>(rem % N);
    rem /= N;
    entry.k_perp[t] = Scalar(2 * n + 1) * step;
    k[transverse_axes[t]] = entry.k_perp[t];
  }

  entry.omega_1d.resize(N);
  for (int n = 0; n < N; ++n) {
    k[axis] = Scalar(2 * n + 1) * step;
    entry.omega_1d[n] = eval_dispersion(disp, k);
  }
  return entry;
}

// Transverse Fourier modes don't mix sites across the belt's flat boundaries,
// so the belt entropy is the sum of 1D block entropies of the decoupled
// chains. Each chain is solved through the regular momentum-sum machinery
// with its effective dispersion tabulated on the 1D grid.
template <typename Scalar>
ChainEntry<Scalar> solve_chain(const Dispersion<Scalar>& disp, const LatticeGeometry& geom,
                               int axis, int width, long tindex,
                               const std::vector<int>& transverse_axes) {
  ChainEntry<Scalar> entry = chain_frame(disp, geom, axis, tindex, transverse_axes);
  const LatticeGeometry chain_geom(1, geom.edge);
  const Dispersion<Scalar> chain_disp =
      custom_dispersion(chain_geom, entry.omega_1d, disp.spec + "|chain");
  const Region block = belt(chain_geom, 0, 0, width);
  entry.block = entropy(chain_disp, chain_geom, block, 1);
  return entry;
}

}  // namespace detail

// Belt entropy by chain decomposition. The region must be a belt (any region
// whose site set is one qualifies); its offset is irrelevant by translation
// symmetry and is normalized away. For factorized dispersions every chain has
// the same entropy (the transverse factor only rescales omega), so one chain
// is solved unless opts.force_full asks otherwise.
template <typename Scalar>
ChainDecomposition<Scalar> decompose_belt(const Dispersion<Scalar>& disp,
                                          const LatticeGeometry& geom, const Region& region,
                                          const ChainOptions& opts = {}) {
  if (!(region.geometry() == geom))
    throw std::invalid_argument("decompose_belt: region geometry mismatch");
  const std::optional<BeltShape> shape = detect_belt(region);
  if (!shape)
    throw std::invalid_argument("decompose_belt: region '" + region.shape() +
                                "' is not a belt; the transform would mix sites across "
                                "its boundary");
  const int axis = shape->axis;
  const int width = shape->width;

  std::vector<int> transverse_axes;
  for (int a = 0; a < geom.dims; ++a)
    if (a != axis) transverse_axes.push_back(a);
  long nchains = 1;
  for (size_t i = 0; i < transverse_axes.size(); ++i) nchains *= geom.edge;

  ChainDecomposition<Scalar> dec;
  dec.geom = geom;
  dec.axis = axis;
  dec.width = width;
  dec.factorized_shortcut =
      disp.kind == DispersionKind::factorized && !opts.force_full && nchains > 1;
  dec.per_chain.resize(nchains);

  if (dec.factorized_shortcut) {
    const ChainEntry<Scalar> first =
        detail::solve_chain(disp, geom, axis, width, 0, transverse_axes);
    dec.per_chain[0] = first;
    for (long t = 1; t < nchains; ++t) {
      ChainEntry<Scalar> e = detail::chain_frame(disp, geom, axis, t, transverse_axes);
      e.block = first.block;  // scale invariance: transverse factor only rescales omega
      dec.per_chain[t] = std::move(e);
    }
  } else {
    parallel_for(nchains, resolve_threads(opts.threads), [&](long t) {
      dec.per_chain[t] = detail::solve_chain(disp, geom, axis, width, t, transverse_axes);
    });
  }

  EntropyResult<Scalar>& tot = dec.total;
  tot.method = EntropyMethod::chain_decomposition;
  tot.region_size = region.size();
  tot.value = 0;
  tot.clamped_count = 0;
  tot.nu_min = dec.per_chain.front().block.nu_min;
  for (const ChainEntry<Scalar>& e : dec.per_chain) {  // fixed transverse order
    tot.value += e.block.value;
    tot.clamped_count += e.block.clamped_count;
    if (e.block.nu_min < tot.nu_min) tot.nu_min = e.block.nu_min;
  }
  return dec;
}

template <typename Scalar = double>
struct ChainProfileRow {
  long index;
  VectorX<Scalar> k_perp;
  Scalar entropy;
};

template <typename Scalar>
std::vector<ChainProfileRow<Scalar>> chain_entropy_profile(const ChainDecomposition<Scalar>& dec) {
  std::vector<ChainProfileRow<Scalar>> rows;
  rows.reserve(dec.per_chain.size());
  for (const ChainEntry<Scalar>& e : dec.per_chain)
    rows.push_back({e.transverse_index, e.k_perp, e.block.value});
  return rows;
}

template <typename Scalar>
void write_profile_csv(std::ostream& os, const ChainDecomposition<Scalar>& dec) {
  os << "k_perp_index,k_perp_value,S_chain\n";
  char buf[64];
  for (const ChainEntry<Scalar>& e : dec.per_chain) {
    os << e.transverse_index << ",";
    for (long i = 0; i < e.k_perp.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", static_cast<double>(e.k_perp[i]));
      os << (i ? ";" : "") << buf;
    }
    std::snprintf(buf, sizeof buf, "%.17g", static_cast<double>(e.block.value));
    os << "," << buf << "\n";
  }
}

}  // namespace ee
