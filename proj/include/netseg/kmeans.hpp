#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "netseg/error.hpp"
#include "netseg/random.hpp"

namespace netseg {

struct KMeansResult {
  std::vector<std::uint32_t> labels;
  std::vector<double> centroids;  ///< k × dim, row-major
  double inertia = 0.0;
  std::vector<double> inertia_trace;  ///< inertia after each assignment step of the winning restart
};

namespace detail {

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

inline KMeansResult kmeans_once(std::span<const double> points, std::size_t dim, std::size_t k,
                                std::size_t max_iters, Rng& rng) {
  const std::size_t n = points.size() / dim;
  auto point = [&](std::size_t i) { return points.subspan(i * dim, dim); };
  KMeansResult res;
  res.centroids.assign(k * dim, 0.0);
  auto centroid = [&](std::size_t c) { return std::span<double>(res.centroids).subspan(c * dim, dim); };

  // k-means++ seeding.
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  std::size_t first = rng.below(n);
  std::copy(point(first).begin(), point(first).end(), centroid(0).begin());
  for (std::size_t c = 1; c < k; ++c) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      nearest[i] = std::min(nearest[i], squared_distance(point(i), centroid(c - 1)));
      total += nearest[i];
    }
    std::size_t pick = n - 1;
    if (total > 0.0) {
      double r = rng.uniform() * total;
      for (std::size_t i = 0; i < n; ++i) {
        r -= nearest[i];
        if (r < 0.0) {
          pick = i;
          break;
        }
      }
    } else {
      pick = rng.below(n);
    }
    std::copy(point(pick).begin(), point(pick).end(), centroid(c).begin());
  }

  res.labels.assign(n, 0);
  std::vector<double> dist(n, 0.0);
  std::vector<std::size_t> counts(k);
  // Assigns every point to its nearest centroid; returns whether any label changed.
  auto assign = [&](bool first) {
    bool changed = first;
    double inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      std::uint32_t best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < k; ++c) {
        const double d = squared_distance(point(i), centroid(c));
        if (d < best_d) {
          best_d = d;
          best = static_cast<std::uint32_t>(c);
        }
      }
      if (best != res.labels[i]) changed = true;
      res.labels[i] = best;
      dist[i] = best_d;
      inertia += best_d;
    }
    res.inertia = inertia;
    res.inertia_trace.push_back(inertia);
    return changed;
  };

  bool settled = false;
  for (std::size_t iter = 0; iter < max_iters; ++iter) {
    if (!assign(iter == 0)) {
      settled = true;
      break;
    }

    std::fill(res.centroids.begin(), res.centroids.end(), 0.0);
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      auto c = centroid(res.labels[i]);
      auto p = point(i);
      for (std::size_t d = 0; d < dim; ++d) c[d] += p[d];
      ++counts[res.labels[i]];
    }
    for (std::size_t c = 0; c < k; ++c) {
      auto cc = centroid(c);
      if (counts[c] == 0) {
        // Re-seed an empty cluster at the point worst served by its centroid.
        std::size_t far = 0;
        for (std::size_t i = 1; i < n; ++i) {
          if (dist[i] > dist[far]) far = i;
        }
        std::copy(point(far).begin(), point(far).end(), cc.begin());
        dist[far] = 0.0;
        continue;
      }
      for (auto& x : cc) x /= static_cast<double>(counts[c]);
    }
  }
  // Iteration cap hit right after a centroid update: re-assign once more.
  if (!settled) assign(false);
  return res;
}

}  // namespace detail

/// Lloyd's k-means with k-means++ seeding; the restart with the lowest
/// inertia wins. `points` holds n × dim coordinates, row-major.
inline KMeansResult kmeans(std::span<const double> points, std::size_t dim, std::size_t k, std::size_t restarts,
                           std::size_t max_iters, std::uint64_t seed) {
  if (dim == 0 || points.size() % dim != 0) throw InputError("point buffer does not match dimension");
  const std::size_t n = points.size() / dim;
  if (k == 0 || k > n) throw InputError("k-means needs 1 <= k <= point count");
  Rng rng(seed);
  KMeansResult best;
  best.inertia = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < std::max<std::size_t>(1, restarts); ++r) {
    auto res = detail::kmeans_once(points, dim, k, std::max<std::size_t>(1, max_iters), rng);
    if (res.inertia < best.inertia) best = std::move(res);
  }
  return best;
}

}  // namespace netseg
