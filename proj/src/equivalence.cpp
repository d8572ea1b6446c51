#include "blockstab/equivalence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <fmt/format.h>

#include "blockstab/error.hpp"

namespace blockstab {

DissimilarityMatrix corrected_euclidean(const Network& net) {
  const std::size_t n = net.size();
  DissimilarityMatrix d{net.vertices(), std::vector<double>(n * n, 0.0)};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      // a_ii, a_jj are zero and the a_ij/a_ji terms cancel, so only third
      // vertices contribute.
      std::size_t diff = 0;
      for (std::size_t s = 0; s < n; ++s) {
        if (s == i || s == j) continue;
        diff += net.adjacent(i, s) != net.adjacent(j, s);
      }
      d(i, j) = d(j, i) = std::sqrt(static_cast<double>(diff));
    }
  }
  return d;
}

DissimilarityMatrix euclidean_distances(const std::vector<std::string>& labels,
                                        const std::vector<std::vector<double>>& points) {
  if (labels.size() != points.size()) throw Error(ErrorKind::invalid_argument, "label/point count mismatch");
  const std::size_t n = points.size();
  DissimilarityMatrix d{labels, std::vector<double>(n * n, 0.0)};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (points[i].size() != points[j].size()) throw Error(ErrorKind::invalid_argument, "ragged point set");
      double ss = 0.0;
      for (std::size_t c = 0; c < points[i].size(); ++c) {
        double delta = points[i][c] - points[j][c];
        ss += delta * delta;
      }
      d(i, j) = d(j, i) = std::sqrt(ss);
    }
  }
  return d;
}

void validate(const DissimilarityMatrix& d) {
  const std::size_t n = d.size();
  if (d.values.size() != n * n) throw Error(ErrorKind::invalid_dissimilarity, "matrix is not square");
  for (std::size_t i = 0; i < n; ++i) {
    if (d(i, i) != 0.0) throw Error(ErrorKind::invalid_dissimilarity, "non-zero diagonal at " + d.labels[i]);
    for (std::size_t j = i + 1; j < n; ++j) {
      if (!(d(i, j) >= 0.0)) {
        throw Error(ErrorKind::invalid_dissimilarity, "negative entry at " + d.labels[i] + "," + d.labels[j]);
      }
      if (d(i, j) != d(j, i)) {
        throw Error(ErrorKind::invalid_dissimilarity, "asymmetric entry at " + d.labels[i] + "," + d.labels[j]);
      }
    }
  }
}

Dendrogram hierarchical_cluster(const DissimilarityMatrix& d, Linkage linkage) {
  validate(d);
  const std::size_t n = d.size();
  if (n < 2) throw Error(ErrorKind::invalid_argument, "clustering needs at least two items");

  // Squared dissimilarities between active clusters, indexed by slot.
  std::vector<double> sq(n * n);
  for (std::size_t i = 0; i < n * n; ++i) sq[i] = d.values[i] * d.values[i];
  std::vector<bool> active(n, true);
  std::vector<double> sizes(n, 1.0);
  std::vector<std::size_t> node(n);
  std::iota(node.begin(), node.end(), 0);
  std::vector<std::string> name = d.labels;

  auto key = [&](std::size_t a, std::size_t b) {
    return std::minmax(name[a], name[b]);
  };

  Dendrogram dend{d.labels, {}};
  dend.merges.reserve(n - 1);
  for (std::size_t step = 0; step + 1 < n; ++step) {
    std::size_t bi = n, bj = n;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      if (!active[i]) continue;
      for (std::size_t j = i + 1; j < n; ++j) {
        if (!active[j]) continue;
        const double v = sq[i * n + j];
        const double tol = 1e-12 * std::max(1.0, std::abs(best));
        if (bi == n || v < best - tol || (v <= best + tol && key(i, j) < key(bi, bj))) {
          best = v;
          bi = i;
          bj = j;
        }
      }
    }

    const double ni = sizes[bi], nj = sizes[bj];
    for (std::size_t k = 0; k < n; ++k) {
      if (!active[k] || k == bi || k == bj) continue;
      const double dki = sq[k * n + bi], dkj = sq[k * n + bj];
      double updated = 0.0;
      if (linkage == Linkage::ward) {
        const double nk = sizes[k];
        updated = ((ni + nk) * dki + (nj + nk) * dkj - nk * best) / (ni + nj + nk);
      } else {
        updated = std::max(dki, dkj);
      }
      sq[k * n + bi] = sq[bi * n + k] = updated;
    }
    dend.merges.push_back({node[bi], node[bj], std::sqrt(std::max(0.0, best)), n + step});
    active[bj] = false;
    sizes[bi] = ni + nj;
    node[bi] = n + step;
    name[bi] = std::min(name[bi], name[bj]);
  }
  return dend;
}

std::vector<int> cut_dendrogram(const Dendrogram& dend, std::size_t k) {
  const std::size_t n = dend.leaves();
  if (k < 1 || k > n) {
    throw Error(ErrorKind::invalid_argument, fmt::format("k = {} outside [1, {}]", k, n));
  }
  std::vector<std::size_t> parent(2 * n - 1);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t m = 0; m < n - k; ++m) {
    const auto& merge = dend.merges[m];
    parent[find(merge.left)] = merge.node;
    parent[find(merge.right)] = merge.node;
  }

  // Number clusters by their smallest member label.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return dend.labels[a] < dend.labels[b]; });
  std::vector<int> out(n, 0);
  std::vector<int> id_of_root(2 * n - 1, 0);
  int next = 0;
  for (auto leaf : order) {
    auto root = find(leaf);
    if (id_of_root[root] == 0) id_of_root[root] = ++next;
    out[leaf] = id_of_root[root];
  }
  return out;
}

nlohmann::json dendrogram_to_json(const Dendrogram& dend) {
  nlohmann::json merges = nlohmann::json::array();
  for (const auto& m : dend.merges) merges.push_back({m.left, m.right, m.height});
  return {{"labels", dend.labels}, {"merges", std::move(merges)}};
}

std::string render_dendrogram(const Dendrogram& dend) {
  const std::size_t n = dend.leaves();
  if (n == 0) return {};
  std::ostringstream out;
  // Iterative DFS from the root; internal node m is dend.merges[m - n].
  std::vector<std::pair<std::size_t, std::size_t>> stack{{n == 1 ? 0 : 2 * n - 2, 0}};
  while (!stack.empty()) {
    auto [node, depth] = stack.back();
    stack.pop_back();
    std::string indent(depth * 2, ' ');
    if (node < n) {
      out << indent << "- " << dend.labels[node] << '\n';
    } else {
      const auto& m = dend.merges[node - n];
      out << indent << "+ " << fmt::format("{:.4f}", m.height) << '\n';
      stack.emplace_back(m.right, depth + 1);
      stack.emplace_back(m.left, depth + 1);
    }
  }
  return out.str();
}

}  // namespace blockstab
