#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "frameind/features.hpp"

namespace frameind {

enum class Metric { Euclidean, Manhattan, Cosine };
enum class Linkage { Single, Complete, Average, Ward };

Metric parse_metric(const std::string& name);
Linkage parse_linkage(const std::string& name);
const char* to_string(Metric metric);
const char* to_string(Linkage linkage);

double metric_distance(const Vector& a, const Vector& b, Metric metric);

// Symmetric pairwise distances with zero diagonal, stored as the condensed
// upper triangle.
class DistanceMatrix {
 public:
  DistanceMatrix(std::size_t n, Metric metric);

  std::size_t size() const { return n_; }
  Metric metric() const { return metric_; }
  double at(std::size_t i, std::size_t j) const;
  void set(std::size_t i, std::size_t j, double value);

 private:
  std::size_t n_;
  Metric metric_;
  std::vector<double> condensed_;
};

DistanceMatrix pairwise_distances(const std::vector<Vector>& rows, Metric metric);
DistanceMatrix pairwise_distances(const FeatureMatrix& features, Metric metric);

// One agglomeration step. Cluster ids: leaves are 0..n-1 and the merge at
// step t creates id n+t; left < right.
struct Merge {
  int left = 0;
  int right = 0;
  double height = 0.0;
  int id = 0;
  std::size_t size = 0;
};

struct Dendrogram {
  std::size_t leaf_count = 0;
  std::vector<Merge> merges;  // exactly leaf_count - 1 entries

  // Merges whose height drops below the previous one. Possible for average
  // and ward linkage; single and complete are monotone.
  std::size_t inversion_count() const;
};

struct AgglomerationResult {
  Dendrogram dendrogram;
  // Dense labels 0..k-1 in order of first appearance over instance order.
  std::vector<int> labels;
};

// Greedy agglomeration over the Lance-Williams working matrix. Ward operates
// on squared euclidean distances and reports heights as the square root of
// the variance-objective increase. Ties pick the pair with the smallest
// (min cluster id, max cluster id).
AgglomerationResult agglomerate(const DistanceMatrix& dist, Linkage linkage, std::size_t k);

// Renumbers labels to 0..k-1 in order of first appearance.
std::vector<int> relabel_dense(const std::vector<int>& labels);

// TSV dump: merge_index, left, right, height, size.
void write_dendrogram_tsv(std::ostream& out, const Dendrogram& dendrogram);

}  // namespace frameind
