#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "blockstab/network.hpp"

namespace blockstab {

enum class RoleKind { core, semi_periphery, periphery };

struct Role {
  RoleKind kind = RoleKind::core;
  int core_index = 0;  // 1..k for cores, 0 otherwise

  friend bool operator==(const Role&, const Role&) = default;
};

std::string role_name(RoleKind kind);

/// Vertex -> cluster map with a role per cluster.
///
/// Fits produced here number core i as cluster i, the semi-periphery as k+1
/// and the periphery as k+2; other producers may use any IDs.
struct Partition {
  std::vector<std::string> vertices;
  std::vector<int> cluster;   // parallel to vertices
  std::map<int, Role> roles;  // every cluster ID used in `cluster`

  std::optional<int> cluster_of(const std::string& vertex) const;
  std::vector<std::string> members(int cluster_id) const;
  std::size_t core_count() const;
  bool in_core(std::size_t i) const { return roles.at(cluster[i]).kind == RoleKind::core; }

  /// Throws unless vertices are unique, every cluster has a role, there is
  /// at most one semi-periphery and one periphery cluster, and core indices
  /// are distinct.
  void validate() const;
};

enum class BlockType { null, complete };

/// Ideal block types between positions. Positions 0..k-1 are the cores,
/// position k the semi-periphery when present. Blocks are symmetric.
class ImageSpec {
public:
  ImageSpec(std::size_t k_cores, bool has_semi_periphery);

  std::size_t k_cores() const { return k_; }
  bool has_semi_periphery() const { return semi_; }
  std::size_t positions() const { return k_ + (semi_ ? 1 : 0); }

  BlockType type(std::size_t p, std::size_t q) const { return types_[p * positions() + q]; }
  std::uint32_t weight(std::size_t p, std::size_t q) const { return weights_[p * positions() + q]; }
  void set_type(std::size_t p, std::size_t q, BlockType t);
  void set_weight(std::size_t p, std::size_t q, std::uint32_t w);

private:
  std::size_t k_;
  bool semi_;
  std::vector<BlockType> types_;
  std::vector<std::uint32_t> weights_;
};

/// k complete core blocks on the diagonal, null elsewhere, plus a null
/// semi-periphery position. Each bridging pair (1-based core indices) turns
/// its off-diagonal block complete.
ImageSpec default_image(std::size_t k, const std::vector<std::pair<int, int>>& bridging = {});

/// Inconsistency counts per unordered position pair (stored at p <= q).
struct BlockCounts {
  std::size_t positions = 0;
  std::vector<std::uint64_t> counts;

  std::uint64_t at(std::size_t p, std::size_t q) const {
    return p <= q ? counts[p * positions + q] : counts[q * positions + p];
  }
};

struct CriterionValue {
  std::uint64_t value = 0;
  BlockCounts blocks;
};

/// Weighted count of ties that disagree with the image. Every unordered pair
/// of non-periphery vertices is counted once: an absent tie in a complete
/// block or a present tie in a null block.
CriterionValue criterion(const Network& net, const Partition& p, const ImageSpec& img);

struct StrippedNetwork {
  Network reduced;
  std::vector<std::string> periphery;
};

/// Separates the isolates (the periphery) from the rest of the network.
StrippedNetwork strip_periphery(const Network& net);

/// Maximal groups of at least `min_size` vertices that are pairwise adjacent
/// with identical outside neighbourhoods (equal closed neighbourhoods).
/// Groups are sorted by their first vertex in network order.
std::vector<std::vector<std::string>> extract_exact_cores(const Network& net, std::size_t min_size = 2);

struct FrozenGroup {
  std::vector<std::string> members;
  int core_index = 1;  // 1-based
};

struct BlockmodelFit {
  Partition partition;
  std::uint64_t criterion_value = 0;
  BlockCounts block_inconsistencies;
  std::size_t restarts_run = 0;
  std::uint64_t seed = 0;
};

/// Steepest-descent relocation search with random restarts.
///
/// Even restarts draw a random assignment of the free vertices to the k
/// cores and the semi-periphery; odd restarts grow each core from the
/// closed neighbourhood of a random vertex, weighted by triangle count.
/// Frozen groups stay in their cores. The search then
/// repeatedly applies the best strictly improving single-vertex relocation
/// or pairwise exchange until none is left. Cores are never emptied. The
/// restart with the lowest criterion wins; ties go to the lexicographically
/// smallest assignment vector after canonical core numbering. Restart r uses
/// seed + r, so the result does not depend on `threads`.
BlockmodelFit local_search(const Network& net, const ImageSpec& img, const std::vector<FrozenGroup>& frozen,
                           std::size_t restarts, std::uint64_t seed, std::size_t threads = 1);

struct FitOptions {
  std::size_t restarts = 0;  // 0: 50 for up to 300 non-isolated vertices, 20 above
  std::uint64_t seed = 20100101;
  bool freeze_cliques = false;
  std::size_t min_clique_size = 2;
  std::size_t threads = 1;
  std::optional<ImageSpec> image;  // defaults to default_image(k)
};

std::size_t default_restarts(std::size_t n);

/// Periphery stripping, optional exact-clique freezing, local search, and
/// re-attachment of the periphery (cluster k+2).
BlockmodelFit fit_blockmodel(const Network& net, std::size_t k, const FitOptions& opts = {});

struct BridgingResult {
  std::vector<std::pair<int, int>> pairs;  // core indices, first < second
  std::vector<int> bridging_cores;         // cores in pairs with >= 2 other cores
};

/// Off-diagonal core blocks whose tie density reaches `density_threshold`.
BridgingResult detect_bridging_cores(const Network& net, const Partition& p, double density_threshold = 0.8);

struct BlockmodelSummary {
  std::size_t n = 0;
  std::size_t cores = 0;
  double pct_semi_periphery = 0.0;
  double pct_periphery = 0.0;
  double avg_core_size = 0.0;
  bool avg_core_size_defined = false;  // false when there are no cores
};

BlockmodelSummary summarize_blockmodel(const Partition& p);

/// {clusters: [{id, role, members}], criterion, seed, restarts}.
nlohmann::json fit_to_json(const BlockmodelFit& fit);
Partition partition_from_json(const nlohmann::json& doc);

/// Adjacency matrix permuted by cluster as CSV: `cluster,vertex,<ids...>`
/// header, then one row per vertex, clusters in ID order.
std::string blockmodel_matrix_csv(const Network& net, const Partition& p);

}  // namespace blockstab
