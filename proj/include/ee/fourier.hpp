#pragma once

#include <cmath>
#include <vector>

#include "ee/lattice.hpp"
#include "ee/parallel.hpp"

namespace ee {

// cos(pi m/N) and sin(pi m/N) for m in [0, 2N), folded onto the first quadrant
// before evaluation so that the symmetries cos(2N-m) = cos(m), cos(N-m) = -cos(m),
// sin(2N-m) = -sin(m), sin(N-m) = sin(m) hold bit-for-bit. Pairwise
// cancellations in lattice sums then cancel exactly instead of to ~1e-16.
template <typename Scalar = double>
struct TrigTable {
  std::vector<Scalar> cos_t, sin_t;
  int period;  // 2N

  explicit TrigTable(int edge) : cos_t(2 * edge), sin_t(2 * edge), period(2 * edge) {
    const int N = edge;
    for (int m = 0; m < 2 * N; ++m) {
      int r = m;
      int cs = 1, ss = 1;
      if (r > N) {
        r = 2 * N - r;
        ss = -ss;
      }
      if (2 * r > N) {
        r = N - r;
        cs = -cs;
      }
      Scalar c, s;
      if (2 * r == N) {
        c = Scalar(0);
        s = Scalar(1);
      } else {
        const Scalar a = std::numbers::pi_v<Scalar> * Scalar(r) / Scalar(N);
        c = std::cos(a);
        s = std::sin(a);
      }
      cos_t[m] = Scalar(cs) * c;
      sin_t[m] = Scalar(ss) * s;
    }
  }
};

// out_cos[D] = sum_m w_m cos(k_m . D) over the antiperiodic grid, for every
// displacement D in [0, N-1]^d (lexicographic), optionally also the sine sum.
// The phase is pi*M/N with the integer M = sum_i (2 n_i + 1) D_i accumulated
// incrementally mod 2N, so phases are exact and the mode order is fixed.
template <typename Scalar>
void displacement_transform(const LatticeGeometry& geom, const VectorX<Scalar>& weights,
                            int threads, VectorX<Scalar>& out_cos,
                            VectorX<Scalar>* out_sin = nullptr) {
  const int N = geom.edge;
  const int P = 2 * N;
  const long nsites = geom.sites();
  if (weights.size() != nsites)
    throw std::invalid_argument("displacement_transform: weight count != mode count");
  const TrigTable<Scalar> tab(N);
  out_cos.resize(nsites);
  if (out_sin) out_sin->resize(nsites);
  const Scalar* w = weights.data();
  const Scalar* ct = tab.cos_t.data();
  const Scalar* st = tab.sin_t.data();
  const bool want_sin = out_sin != nullptr;

  parallel_for(nsites, resolve_threads(threads), [&](long didx) {
    const Coord D = geom.coord_of(didx);
    Scalar sc = 0, ss = 0;
    switch (geom.dims) {
      case 1: {
        int m = D[0] % P;
        const int s0 = (2 * D[0]) % P;
        for (int n = 0; n < N; ++n) {
          sc += w[n] * ct[m];
          if (want_sin) ss += w[n] * st[m];
          m += s0;
          if (m >= P) m -= P;
        }
      } break;
      case 2: {
        long idx = 0;
        int m0 = D[0] % P;
        const int s0 = (2 * D[0]) % P;
        const int s1 = (2 * D[1]) % P;
        for (int n0 = 0; n0 < N; ++n0) {
          int m = m0 + D[1];
          if (m >= P) m -= P;
          for (int n1 = 0; n1 < N; ++n1) {
            sc += w[idx] * ct[m];
            if (want_sin) ss += w[idx] * st[m];
            ++idx;
            m += s1;
            if (m >= P) m -= P;
          }
          m0 += s0;
          if (m0 >= P) m0 -= P;
        }
      } break;
      case 3: {
        long idx = 0;
        int m0 = D[0] % P;
        const int s0 = (2 * D[0]) % P;
        const int s1 = (2 * D[1]) % P;
        const int s2 = (2 * D[2]) % P;
        for (int n0 = 0; n0 < N; ++n0) {
          int m1 = m0 + D[1];
          if (m1 >= P) m1 -= P;
          for (int n1 = 0; n1 < N; ++n1) {
            int m = m1 + D[2];
            if (m >= P) m -= P;
            for (int n2 = 0; n2 < N; ++n2) {
              sc += w[idx] * ct[m];
              if (want_sin) ss += w[idx] * st[m];
              ++idx;
              m += s2;
              if (m >= P) m -= P;
            }
            m1 += s1;
            if (m1 >= P) m1 -= P;
          }
          m0 += s0;
          if (m0 >= P) m0 -= P;
        }
      } break;
    }
    out_cos[didx] = sc;
    if (want_sin) (*out_sin)[didx] = ss;
  });
}

}  // namespace ee
