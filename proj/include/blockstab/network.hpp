#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

namespace blockstab {

/// One bibliographic unit with its (deduplicated) authors.
struct PublicationRecord {
  std::string pub_id;
  std::vector<std::string> author_ids;  // sorted, unique
  int year = 0;
  std::string discipline;  // empty when the input has no discipline column
  std::string field;       // empty when the input has no field column
};

/// Inclusive year range.
struct PeriodSpec {
  std::string label;
  int start_year = 0;
  int end_year = 0;

  bool contains(int year) const { return year >= start_year && year <= end_year; }
};

/// Throws unless every period has start <= end and the list is ordered and non-overlapping.
void validate_periods(const std::vector<PeriodSpec>& periods);

/// Undirected loop-free co-authorship network over a dense adjacency matrix.
///
/// Vertices are kept in the order given at construction (build_network sorts
/// them by ID). `weight(i, j)` counts the shared records; the blockmodel only
/// looks at `adjacent(i, j)`.
class Network {
public:
  Network() = default;
  explicit Network(std::vector<std::string> vertices);

  std::size_t size() const { return vertices_.size(); }
  const std::vector<std::string>& vertices() const { return vertices_; }
  const std::string& label(std::size_t i) const { return vertices_[i]; }

  bool adjacent(std::size_t i, std::size_t j) const { return weights_[i * size() + j] > 0; }
  std::uint32_t weight(std::size_t i, std::size_t j) const { return weights_[i * size() + j]; }

  /// Adds `w` to the weight of the undirected edge {i, j}; i == j is rejected.
  void add_tie(std::size_t i, std::size_t j, std::uint32_t w = 1);

  std::size_t degree(std::size_t i) const;
  std::size_t edge_count() const;

  /// Index of a vertex ID, or nullopt.
  std::optional<std::size_t> index_of(const std::string& id) const;

  friend bool operator==(const Network&, const Network&) = default;

private:
  std::vector<std::string> vertices_;
  std::vector<std::uint32_t> weights_;
};

/// Reads `pub_id,author_id,year[,discipline][,field]` rows (comma or tab
/// separated, detected from the header). Rows are grouped by pub_id in order
/// of first appearance.
std::vector<PublicationRecord> parse_publications(std::istream& in);

/// Co-authorship network of the records published within `period`.
/// With a roster, authors outside it are dropped before ties are created.
Network build_network(const std::vector<PublicationRecord>& records, const PeriodSpec& period,
                      const std::optional<std::set<std::string>>& roster = std::nullopt);

/// Share of realized ties, 2|E| / (n(n-1)).
double density(const Network& net);

/// IDs of degree-0 vertices, in vertex order.
std::vector<std::string> isolates(const Network& net);

/// Restriction to `keep`, preserving the original vertex order.
Network induced_subnetwork(const Network& net, const std::set<std::string>& keep);

/// {vertices: [...], edges: [[i, j, weight], ...]} with i < j.
nlohmann::json network_to_json(const Network& net);
Network network_from_json(const nlohmann::json& doc);

}  // namespace blockstab
