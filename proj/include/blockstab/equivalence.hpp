#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "blockstab/network.hpp"

namespace blockstab {

/// Symmetric, non-negative, zero-diagonal dissimilarities between labelled items.
struct DissimilarityMatrix {
  std::vector<std::string> labels;
  std::vector<double> values;  // row-major, labels.size()^2

  std::size_t size() const { return labels.size(); }
  double operator()(std::size_t i, std::size_t j) const { return values[i * size() + j]; }
  double& operator()(std::size_t i, std::size_t j) { return values[i * size() + j]; }
};

/// Leaves are nodes 0..n-1; merge m creates node n+m.
struct Merge {
  std::size_t left = 0;
  std::size_t right = 0;
  double height = 0.0;
  std::size_t node = 0;
};

struct Dendrogram {
  std::vector<std::string> labels;  // leaf labels
  std::vector<Merge> merges;        // n-1 merges in agglomeration order

  std::size_t leaves() const { return labels.size(); }
};

enum class Linkage { ward, complete };

/// Structural-equivalence distance for a loop-free undirected network:
/// d(i,j) = sqrt(sum over s != i,j of (a_is - a_js)^2).
DissimilarityMatrix corrected_euclidean(const Network& net);

/// Euclidean distances between rows of a point set.
DissimilarityMatrix euclidean_distances(const std::vector<std::string>& labels,
                                        const std::vector<std::vector<double>>& points);

/// Throws ErrorKind::invalid_dissimilarity on asymmetric, negative or
/// non-zero-diagonal input.
void validate(const DissimilarityMatrix& d);

/// Agglomerative clustering via the Lance-Williams recurrence on squared
/// dissimilarities. Merge heights are the square roots of the updated values,
/// so a two-item merge happens at the item distance. Equal merge costs go to
/// the pair whose (smaller, larger) cluster labels are lexicographically
/// smallest; a cluster's label is its smallest leaf label.
Dendrogram hierarchical_cluster(const DissimilarityMatrix& d, Linkage linkage = Linkage::ward);

inline Dendrogram ward_cluster(const DissimilarityMatrix& d) { return hierarchical_cluster(d, Linkage::ward); }

/// Flat clustering into k groups (undo the k-1 last merges). Returns the
/// cluster of every leaf, numbered 1..k by smallest member label.
std::vector<int> cut_dendrogram(const Dendrogram& dend, std::size_t k);

nlohmann::json dendrogram_to_json(const Dendrogram& dend);

/// Indented text tree, one line per node, for terminal inspection.
std::string render_dendrogram(const Dendrogram& dend);

}  // namespace blockstab
