#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "blockstab/blockmodel.hpp"

namespace blockstab {

/// Unit -> cluster label, without roles.
using FlatPartition = std::map<std::string, int>;

enum class Scope {
  cores_only,  // each core is a cluster; non-core vertices are left out
  full,        // every cluster (semi-periphery and periphery included)
};

FlatPartition flatten(const Partition& p, Scope scope);

/// Two period partitions with the turnover between their unit sets.
struct TemporalPair {
  FlatPartition first;
  FlatPartition second;
  std::vector<std::string> newcomers;   // only in `second`
  std::vector<std::string> departures;  // only in `first`
  std::vector<std::string> persistent;  // in both
};

TemporalPair align(const FlatPartition& first, const FlatPartition& second);

/// With Scope::cores_only, vertices in cores in exactly one period take the
/// newcomer (into-cores) or departure (out-of-cores) role.
TemporalPair align(const Partition& first, const Partition& second, Scope scope = Scope::cores_only);

struct PairCounts {
  std::uint64_t a = 0;  // together in both
  std::uint64_t b = 0;  // together in the first only
  std::uint64_t c = 0;  // together in the second only
  std::uint64_t d = 0;  // apart in both

  std::uint64_t total() const { return a + b + c + d; }
  friend bool operator==(const PairCounts&, const PairCounts&) = default;
};

/// Pair counts from the contingency table of two aligned label vectors.
PairCounts pair_counts(std::span<const int> u, std::span<const int> v);

/// Keyed variant; throws unless both partitions cover the same units.
PairCounts pair_counts(const FlatPartition& u, const FlatPartition& v);

// nullopt marks a zero denominator; it is never folded into 0.
std::optional<double> rand_index(const PairCounts& pc);
std::optional<double> wallace_split(const PairCounts& pc);  // a / (a + b)
std::optional<double> wallace_merge(const PairCounts& pc);  // a / (a + c)

/// Hubert-Arabie adjusted Rand index. When both partitions are trivial in
/// the same way the index is 1 if they are equal and an error otherwise.
double adjusted_rand(std::span<const int> u, std::span<const int> v);
double adjusted_rand(const FlatPartition& u, const FlatPartition& v);

/// Wallace indices adjusted with their exact expectation under the
/// fixed-cluster-size permutation null; nullopt when undefined.
std::optional<double> adjusted_wallace_split(std::span<const int> u, std::span<const int> v);
std::optional<double> adjusted_wallace_merge(std::span<const int> u, std::span<const int> v);

enum class TurnoverMode { both, newcomers_only, departures_only };

/// U' and V' over a common unit set. Newcomers sit in the synthetic cluster
/// `u_extra` on the first-period side, departures in `v_extra` on the
/// second-period side.
struct ModifiedPartitionPair {
  std::vector<std::string> units;
  std::vector<int> u_prime;
  std::vector<int> v_prime;
  int u_extra = 0;
  int v_extra = 0;
  TurnoverMode mode = TurnoverMode::both;
};

ModifiedPartitionPair modified_partitions(const TemporalPair& tp, TurnoverMode mode);

using PairIndex = std::optional<double> (*)(const PairCounts&);

struct McAdjustment {
  double value = 0.0;     // (raw - expected) / (1 - expected)
  double raw = 0.0;
  double expected = 0.0;  // mean over defined replicates
  std::size_t replicates_used = 0;
  std::size_t replicates_skipped = 0;
};

/// Monte-Carlo chance correction. Each replicate shuffles the labels of both
/// partitions (cluster sizes preserved) with seed + replicate index.
/// Throws ErrorKind::undefined_value when the raw index is undefined, when
/// every replicate is undefined, or when the expected value is 1.
McAdjustment mc_adjust(PairIndex index, std::span<const int> u, std::span<const int> v, std::size_t replicates,
                       std::uint64_t seed);

struct IndexValue {
  std::optional<double> adjusted;
  std::optional<double> raw;
};

/// The nine stability indices in report column order.
struct StabilityReport {
  static constexpr std::array<std::string_view, 9> kNames = {"ARI",   "AWI'",  "AWI''", "MARI1", "MAWIS1",
                                                            "MAWIM1", "MARI2", "MAWIS2", "MAWIM2"};

  std::array<IndexValue, 9> indices;
  PairCounts persistent_counts;
  PairCounts newcomer_counts;   // variant 1 (U', V' with newcomers)
  PairCounts departure_counts;  // variant 2 (U', V' with departures)
  std::size_t persistent_units = 0;
  std::size_t newcomers = 0;
  std::size_t departures = 0;
  std::size_t replicates = 0;
  std::uint64_t seed = 0;
};

/// ARI and adjusted Wallace indices over persistent units; variant 1
/// (newcomers only) and variant 2 (departures only) Monte-Carlo adjusted.
StabilityReport stability_report(const TemporalPair& tp, std::size_t replicates = 5000,
                                 std::uint64_t seed = 20100101);

nlohmann::json report_to_json(const StabilityReport& report);

std::string format_index(const std::optional<double>& value);

/// Deterministic summation order for replicate means.
double pairwise_sum(std::span<const double> values);

}  // namespace blockstab
