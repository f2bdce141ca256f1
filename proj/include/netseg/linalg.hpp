#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

#include "netseg/error.hpp"

namespace netseg {

/// Square row-major matrix.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  explicit DenseMatrix(std::size_t n, double fill = 0.0) : n_(n), data_(n * n, fill) {}

  std::size_t size() const { return n_; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * n_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * n_ + c]; }
  std::span<double> row(std::size_t r) { return {data_.data() + r * n_, n_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * n_, n_}; }

  double frobenius_norm() const {
    double s = 0.0;
    for (double v : data_) s += v * v;
    return std::sqrt(s);
  }

  double off_diagonal_norm() const {
    double s = 0.0;
    for (std::size_t r = 0; r < n_; ++r) {
      for (std::size_t c = 0; c < n_; ++c) {
        if (r != c) s += (*this)(r, c) * (*this)(r, c);
      }
    }
    return std::sqrt(s);
  }

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

struct EigenDecomposition {
  std::vector<double> values;  ///< ascending
  DenseMatrix vectors;         ///< row i is the unit eigenvector of values[i]
  std::size_t sweeps = 0;
  double off_norm = 0.0;       ///< off-diagonal norm at exit
};

/// Cyclic Jacobi eigensolver for a symmetric matrix. Sweeps over all (p, q)
/// pairs, annihilating a_pq with a plane rotation, until the off-diagonal
/// Frobenius norm is at most `tolerance`.
inline EigenDecomposition symmetric_eigen(DenseMatrix a, double tolerance = 1e-10, std::size_t max_sweeps = 100) {
  const std::size_t n = a.size();
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = r + 1; c < n; ++c) {
      if (std::abs(a(r, c) - a(c, r)) > 1e-12 * (1.0 + std::abs(a(r, c)))) {
        throw InputError("matrix is not symmetric");
      }
    }
  }
  DenseMatrix v(n);  // rows hold the accumulated rotations (eigenvectors)
  for (std::size_t i = 0; i < n; ++i) v(i, i) = 1.0;

  EigenDecomposition out;
  const double skip = n > 1 ? 0.1 * tolerance / static_cast<double>(n) : 0.0;
  std::size_t sweep = 0;
  double off = a.off_diagonal_norm();
  for (; sweep < max_sweeps && off > tolerance; ++sweep) {
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) <= skip) continue;
        const double app = a(p, p);
        const double aqq = a(q, q);
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        auto rp = a.row(p);
        auto rq = a.row(q);
        for (std::size_t k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          const double akp = rp[k];
          const double akq = rq[k];
          const double np = c * akp - s * akq;
          const double nq = s * akp + c * akq;
          rp[k] = np;
          rq[k] = nq;
          a(k, p) = np;
          a(k, q) = nq;
        }
        a(p, p) = app - t * apq;
        a(q, q) = aqq + t * apq;
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        auto vp = v.row(p);
        auto vq = v.row(q);
        for (std::size_t k = 0; k < n; ++k) {
          const double x = vp[k];
          const double y = vq[k];
          vp[k] = c * x - s * y;
          vq[k] = s * x + c * y;
        }
      }
    }
    off = a.off_diagonal_norm();
  }
  out.sweeps = sweep;
  out.off_norm = off;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto x, auto y) { return a(x, x) < a(y, y); });
  out.values.resize(n);
  out.vectors = DenseMatrix(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.values[i] = a(order[i], order[i]);
    auto src = v.row(order[i]);
    std::copy(src.begin(), src.end(), out.vectors.row(i).begin());
  }
  return out;
}

}  // namespace netseg
