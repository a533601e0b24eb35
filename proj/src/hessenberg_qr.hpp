#pragma once

// Complex Hessenberg QR with Wilkinson shifts (eigenvalues only) and a
// banded LU used for inverse iteration.  Templated on the real scalar so the
// same code runs in double and in extended precision: the Heine-Stieltjes
// pencil is strongly non-normal and its eigenvalues need a working precision
// that grows with the degree.

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "mp_complex.hpp"

namespace heun::detail {

template <class R>
struct Givens {
  R c;      // real
  Cx<R> s;  // complex
};

// G = [c, s; -conj(s), c] with G * [x; y] = [r; 0]
template <class R>
Givens<R> make_givens(const Cx<R>& x, const Cx<R>& y, Cx<R>& r) {
  const R ax = abs(x), ay = abs(y);
  if (ay == R(0)) {
    r = x;
    return {R(1), Cx<R>(R(0))};
  }
  if (ax == R(0)) {
    r = Cx<R>(ay);
    return {R(0), conj(y) / Cx<R>(ay)};
  }
  R rho;
  if (ax >= ay) {
    const R q = ay / ax;
    rho = ax * sqrt(R(1) + q * q);
  } else {
    const R q = ax / ay;
    rho = ay * sqrt(R(1) + q * q);
  }
  const R c = ax / rho;
  const Cx<R> phase = x / Cx<R>(ax);
  const Cx<R> s = phase * conj(y) / Cx<R>(rho);
  r = phase * Cx<R>(rho);
  return {c, s};
}

// Eigenvalues of an upper Hessenberg matrix (dense storage, row major).
template <class R>
std::vector<Cx<R>> hessenberg_eigenvalues(std::vector<Cx<R>> h, int n, const R& eps) {
  auto H = [&](int i, int j) -> Cx<R>& { return h[static_cast<size_t>(i) * n + j]; };
  std::vector<Cx<R>> ev(static_cast<size_t>(n));

  auto wilkinson = [&](int m) -> Cx<R> {
    // eigenvalue of the trailing 2x2 of the active block closest to H(m,m)
    const Cx<R> a = H(m - 1, m - 1), b = H(m - 1, m), c = H(m, m - 1), d = H(m, m);
    const Cx<R> half(R(1) / R(2));
    const Cx<R> tr = (a + d) * half;
    const Cx<R> det = a * d - b * c;
    const Cx<R> disc = sqrt(tr * tr - det);
    const Cx<R> e1 = tr + disc, e2 = tr - disc;
    return abs(e1 - d) <= abs(e2 - d) ? e1 : e2;
  };

  int ihi = n - 1;
  int iters_this_block = 0;
  long total_iters = 0;
  const long max_total = 60L * n + 200;
  while (ihi >= 0) {
    // deflate tiny subdiagonals
    int l = ihi;
    while (l > 0) {
      const R small = eps * (abs(H(l - 1, l - 1)) + abs(H(l, l)));
      if (abs(H(l, l - 1)) <= small) {
        H(l, l - 1) = Cx<R>(R(0));
        break;
      }
      --l;
    }
    if (l == ihi) {
      ev[static_cast<size_t>(ihi)] = H(ihi, ihi);
      --ihi;
      iters_this_block = 0;
      continue;
    }
    if (++total_iters > max_total)
      throw std::runtime_error("hessenberg_eigenvalues: QR iteration cap reached");

    Cx<R> shift = wilkinson(ihi);
    if (++iters_this_block % 16 == 0) {
      // exceptional shift to break limit cycles
      shift = H(ihi, ihi) + Cx<R>(abs(H(ihi, ihi - 1)) * R(3) / R(2));
    }

    // implicit single-shift sweep on the active block l..ihi; entries outside
    // the block never feed back into its eigenvalues, so updates stay local
    Cx<R> x = H(l, l) - shift;
    Cx<R> y = H(l + 1, l);
    for (int k = l; k < ihi; ++k) {
      Cx<R> r;
      const Givens<R> g = make_givens(x, y, r);
      const int c0 = k > l ? k - 1 : k;
      for (int col = c0; col <= ihi; ++col) {
        const Cx<R> t1 = H(k, col), t2 = H(k + 1, col);
        H(k, col) = Cx<R>(g.c) * t1 + g.s * t2;
        H(k + 1, col) = Cx<R>(g.c) * t2 - conj(g.s) * t1;
      }
      const int rmax = k + 2 <= ihi ? k + 2 : ihi;
      for (int row = l; row <= rmax; ++row) {
        const Cx<R> t1 = H(row, k), t2 = H(row, k + 1);
        H(row, k) = Cx<R>(g.c) * t1 + conj(g.s) * t2;
        H(row, k + 1) = Cx<R>(g.c) * t2 - g.s * t1;
      }
      if (k < ihi - 1) {
        x = H(k + 1, k);
        y = H(k + 2, k);
      }
    }
  }
  return ev;
}

// Banded LU with partial pivoting, kl = 1 subdiagonal, ku = 2 superdiagonals
// (the pencil's profile); pivoting widens the upper band to ku + kl.
// Storage: LAPACK-style band, rows = 2*kl + ku + 1.
template <class R>
class BandedLU {
 public:
  BandedLU(int n, int kl, int ku) : n_(n), kl_(kl), ku_(ku), rows_(2 * kl + ku + 1) {
    ab_.assign(static_cast<size_t>(rows_) * n_, Cx<R>(R(0)));
    piv_.assign(static_cast<size_t>(n_), 0);
  }

  // entry (i, j) of the full matrix, |i - j| within the band
  Cx<R>& at(int i, int j) { return ab_[static_cast<size_t>(kl_ + ku_ + i - j) * n_ + j]; }

  void factor() {
    for (int j = 0; j < n_; ++j) {
      // pivot among rows j..min(j+kl, n-1)
      int p = j;
      R best = abs(at(j, j));
      for (int i = j + 1; i <= std::min(j + kl_, n_ - 1); ++i) {
        const R v = abs(at(i, j));
        if (v > best) {
          best = v;
          p = i;
        }
      }
      piv_[static_cast<size_t>(j)] = p;
      if (best == R(0)) {
        at(j, j) = Cx<R>(R(1e-300));  // keep the solve finite; inverse iteration normalizes
        continue;
      }
      if (p != j)
        for (int col = j; col <= std::min(j + kl_ + ku_, n_ - 1); ++col) {
          Cx<R> tmp = at(j, col);
          at(j, col) = at(p, col);
          at(p, col) = tmp;
        }
      for (int i = j + 1; i <= std::min(j + kl_, n_ - 1); ++i) {
        const Cx<R> m = at(i, j) / at(j, j);
        at(i, j) = m;
        for (int col = j + 1; col <= std::min(j + kl_ + ku_, n_ - 1); ++col)
          at(i, col) -= m * at(j, col);
      }
    }
    factored_ = true;
  }

  void solve_in_place(std::vector<Cx<R>>& b) const {
    for (int j = 0; j < n_ - 1; ++j) {
      const int p = piv_[static_cast<size_t>(j)];
      if (p != j) std::swap(b[static_cast<size_t>(j)], b[static_cast<size_t>(p)]);
      for (int i = j + 1; i <= std::min(j + kl_, n_ - 1); ++i)
        b[static_cast<size_t>(i)] -= cat(i, j) * b[static_cast<size_t>(j)];
    }
    for (int i = n_ - 1; i >= 0; --i) {
      Cx<R> s = b[static_cast<size_t>(i)];
      for (int j = i + 1; j <= std::min(i + kl_ + ku_, n_ - 1); ++j)
        s -= cat(i, j) * b[static_cast<size_t>(j)];
      b[static_cast<size_t>(i)] = s / cat(i, i);
    }
  }

 private:
  Cx<R> cat(int i, int j) const { return ab_[static_cast<size_t>(kl_ + ku_ + i - j) * n_ + j]; }

  int n_, kl_, ku_, rows_;
  std::vector<Cx<R>> ab_;
  std::vector<int> piv_;
  bool factored_ = false;
};

}  // namespace heun::detail
