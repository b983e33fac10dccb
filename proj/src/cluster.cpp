#include "frameind/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <unordered_map>

#include "frameind/errors.hpp"

namespace frameind {

namespace {

// Condensed index of the unordered pair {i, j}, i < j.
inline std::size_t condensed_index(std::size_t n, std::size_t i, std::size_t j) {
  return i * (2 * n - i - 1) / 2 + (j - i - 1);
}

}  // namespace

Metric parse_metric(const std::string& name) {
  if (name == "euclidean") return Metric::Euclidean;
  if (name == "manhattan") return Metric::Manhattan;
  if (name == "cosine") return Metric::Cosine;
  throw UsageError("unknown metric '" + name + "' (expected euclidean, manhattan or cosine)");
}

Linkage parse_linkage(const std::string& name) {
  if (name == "single") return Linkage::Single;
  if (name == "complete") return Linkage::Complete;
  if (name == "average") return Linkage::Average;
  if (name == "ward") return Linkage::Ward;
  throw UsageError("unknown linkage '" + name + "' (expected single, complete, average or ward)");
}

const char* to_string(Metric metric) {
  switch (metric) {
    case Metric::Euclidean: return "euclidean";
    case Metric::Manhattan: return "manhattan";
    case Metric::Cosine: return "cosine";
  }
  return "?";
}

const char* to_string(Linkage linkage) {
  switch (linkage) {
    case Linkage::Single: return "single";
    case Linkage::Complete: return "complete";
    case Linkage::Average: return "average";
    case Linkage::Ward: return "ward";
  }
  return "?";
}

double metric_distance(const Vector& a, const Vector& b, Metric metric) {
  if (a.size() != b.size()) {
    throw DataError("metric_distance: dimension mismatch (" + std::to_string(a.size()) + " vs " +
                    std::to_string(b.size()) + ")");
  }
  switch (metric) {
    case Metric::Euclidean: {
      double sum = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        sum += d * d;
      }
      return std::sqrt(sum);
    }
    case Metric::Manhattan: {
      double sum = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) sum += std::abs(a[i] - b[i]);
      return sum;
    }
    case Metric::Cosine: {
      double dot = 0.0;
      double na = 0.0;
      double nb = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
      }
      // A zero vector has no direction; call it maximally dissimilar.
      if (na == 0.0 || nb == 0.0) return 1.0;
      const double d = 1.0 - dot / std::sqrt(na * nb);
      return std::clamp(d, 0.0, 2.0);
    }
  }
  return 0.0;
}

DistanceMatrix::DistanceMatrix(std::size_t n, Metric metric)
    : n_(n), metric_(metric), condensed_(n < 2 ? 0 : n * (n - 1) / 2, 0.0) {}

double DistanceMatrix::at(std::size_t i, std::size_t j) const {
  if (i == j) return 0.0;
  if (i > j) std::swap(i, j);
  return condensed_[condensed_index(n_, i, j)];
}

void DistanceMatrix::set(std::size_t i, std::size_t j, double value) {
  if (i == j) return;
  if (i > j) std::swap(i, j);
  condensed_[condensed_index(n_, i, j)] = value;
}

DistanceMatrix pairwise_distances(const std::vector<Vector>& rows, Metric metric) {
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (double x : rows[i]) {
      if (!std::isfinite(x)) {
        throw DataError("pairwise_distances: non-finite value in row " + std::to_string(i));
      }
    }
  }
  DistanceMatrix dist(rows.size(), metric);
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
    for (std::size_t j = i + 1; j < rows.size(); ++j) {
      dist.set(i, j, metric_distance(rows[i], rows[j], metric));
    }
  }
  return dist;
}

DistanceMatrix pairwise_distances(const FeatureMatrix& features, Metric metric) {
  return pairwise_distances(features.rows, metric);
}

std::size_t Dendrogram::inversion_count() const {
  std::size_t count = 0;
  for (std::size_t i = 1; i < merges.size(); ++i) {
    if (merges[i].height < merges[i - 1].height) ++count;
  }
  return count;
}

AgglomerationResult agglomerate(const DistanceMatrix& dist, Linkage linkage, std::size_t k) {
  const std::size_t n = dist.size();
  if (n == 0) throw UsageError("agglomerate: empty distance matrix");
  if (k < 1 || k > n) {
    throw UsageError("agglomerate: k must be between 1 and " + std::to_string(n) + ", got " +
                     std::to_string(k));
  }
  if (linkage == Linkage::Ward && dist.metric() != Metric::Euclidean) {
    throw UsageError("ward requires euclidean affinity");
  }

  // Ward's update runs over squared euclidean distances; the working value
  // for a pair of clusters is then twice the variance-objective increase of
  // merging them.
  const bool squared = linkage == Linkage::Ward;

  std::vector<double> work(n < 2 ? 0 : n * (n - 1) / 2);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = dist.at(i, j);
      work[condensed_index(n, i, j)] = squared ? d * d : d;
    }
  }
  auto work_at = [&](std::size_t i, std::size_t j) -> double& {
    if (i > j) std::swap(i, j);
    return work[condensed_index(n, i, j)];
  };

  std::vector<char> active(n, 1);
  std::vector<int> row_id(n);            // cluster id currently held by each row
  std::vector<std::size_t> row_size(n, 1);
  std::vector<std::size_t> instance_row(n);  // original instance -> row
  std::vector<std::vector<std::size_t>> members(n);
  for (std::size_t i = 0; i < n; ++i) {
    row_id[i] = static_cast<int>(i);
    instance_row[i] = i;
    members[i] = {i};
  }

  // Per-row nearest-partner cache. The tie rule "smallest (min id, max id)
  // pair" decomposes: the winning pair's lower id is the smallest cluster id
  // participating in any minimum-distance pair, and its partner is that
  // cluster's smallest-id partner at that distance. Selection therefore only
  // needs each row's minimum distance, validated lazily: a dirty entry is a
  // lower bound (the Lance-Williams update never moves a pair below
  // min(d(j,a), d(j,b)) for these linkages), recomputed only when it wins.
  std::vector<double> best_dist(n, 0.0);
  std::vector<std::size_t> partner(n, 0);
  std::vector<char> dirty(n, 0);

  auto recompute = [&](std::size_t r) {
    bool found = false;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == r || !active[j]) continue;
      const double d = work_at(r, j);
      if (!found || d < best_dist[r]) {
        best_dist[r] = d;
        partner[r] = j;
        found = true;
      }
    }
    dirty[r] = 0;
  };
  if (n > 1) {
    for (std::size_t r = 0; r < n; ++r) recompute(r);
  }

  Dendrogram dendrogram;
  dendrogram.leaf_count = n;
  dendrogram.merges.reserve(n - 1);

  std::vector<int> raw_labels(n, 0);
  std::size_t active_count = n;
  auto snapshot = [&]() {
    for (std::size_t i = 0; i < n; ++i) raw_labels[i] = row_id[instance_row[i]];
  };
  if (active_count == k) snapshot();

  for (std::size_t step = 0; step + 1 < n; ++step) {
    // The cluster with the smallest id among rows achieving the global
    // minimum distance; validate lazily until the claim is exact.
    std::size_t u = n;
    while (true) {
      u = n;
      for (std::size_t r = 0; r < n; ++r) {
        if (!active[r]) continue;
        if (u == n || best_dist[r] < best_dist[u] ||
            (best_dist[r] == best_dist[u] && row_id[r] < row_id[u])) {
          u = r;
        }
      }
      if (!dirty[u]) break;
      recompute(u);
    }
    // Its smallest-id partner at exactly that distance.
    const double merge_value = best_dist[u];
    std::size_t v = n;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == u || !active[j]) continue;
      if (work_at(u, j) == merge_value && (v == n || row_id[j] < row_id[v])) v = j;
    }

    std::size_t a = u;
    std::size_t b = v;
    if (a > b) std::swap(a, b);  // merge into the lower row

    const int id_lo = std::min(row_id[u], row_id[v]);
    const int id_hi = std::max(row_id[u], row_id[v]);
    const int new_id = static_cast<int>(n + step);
    const std::size_t size_a = row_size[a];
    const std::size_t size_b = row_size[b];
    const double height = squared ? std::sqrt(merge_value / 2.0) : merge_value;
    dendrogram.merges.push_back({id_lo, id_hi, height, new_id, size_a + size_b});

    // Lance-Williams update of row a against every other active row.
    for (std::size_t j = 0; j < n; ++j) {
      if (!active[j] || j == a || j == b) continue;
      const double daj = work_at(a, j);
      const double dbj = work_at(b, j);
      double updated = 0.0;
      switch (linkage) {
        case Linkage::Single:
          updated = std::min(daj, dbj);
          break;
        case Linkage::Complete:
          updated = std::max(daj, dbj);
          break;
        case Linkage::Average:
          updated = (static_cast<double>(size_a) * daj + static_cast<double>(size_b) * dbj) /
                    static_cast<double>(size_a + size_b);
          break;
        case Linkage::Ward: {
          const double size_j = static_cast<double>(row_size[j]);
          const double sa = static_cast<double>(size_a);
          const double sb = static_cast<double>(size_b);
          updated = ((sa + size_j) * daj + (sb + size_j) * dbj - size_j * merge_value) /
                    (sa + sb + size_j);
          break;
        }
      }
      work_at(a, j) = updated;
    }

    active[b] = 0;
    row_id[a] = new_id;
    row_size[a] = size_a + size_b;
    for (std::size_t instance : members[b]) instance_row[instance] = a;
    members[a].insert(members[a].end(), members[b].begin(), members[b].end());
    members[b].clear();
    --active_count;

    // A distance to the new cluster at or below a row's cached minimum makes
    // the new cluster an exact nearest partner; rows whose partner was one
    // of the merged rows otherwise keep their value as a lower bound.
    for (std::size_t j = 0; j < n; ++j) {
      if (!active[j] || j == a) continue;
      const double d = work_at(a, j);
      if (d <= best_dist[j]) {
        best_dist[j] = d;
        partner[j] = a;
        dirty[j] = 0;
      } else if (partner[j] == a || partner[j] == b) {
        partner[j] = a;
        dirty[j] = 1;
      }
    }
    recompute(a);

    if (active_count == k) snapshot();
  }

  AgglomerationResult result;
  result.dendrogram = std::move(dendrogram);
  result.labels = relabel_dense(raw_labels);
  return result;
}

std::vector<int> relabel_dense(const std::vector<int>& labels) {
  std::vector<int> out(labels.size());
  std::unordered_map<int, int> remap;
  int next = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto [it, inserted] = remap.try_emplace(labels[i], next);
    if (inserted) ++next;
    out[i] = it->second;
  }
  return out;
}

void write_dendrogram_tsv(std::ostream& out, const Dendrogram& dendrogram) {
  char height[64];
  for (std::size_t i = 0; i < dendrogram.merges.size(); ++i) {
    const Merge& merge = dendrogram.merges[i];
    std::snprintf(height, sizeof(height), "%.12g", merge.height);
    out << i << '\t' << merge.left << '\t' << merge.right << '\t' << height << '\t' << merge.size
        << '\n';
  }
}

}  // namespace frameind
