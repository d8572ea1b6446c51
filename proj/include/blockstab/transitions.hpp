#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "blockstab/blockmodel.hpp"

namespace blockstab {

enum class GroupRole { core, semi_periphery, periphery, into_cores, out_of_cores, newcomers, departures };

std::string group_role_name(GroupRole role);

struct FlowGroup {
  std::string id;
  GroupRole role = GroupRole::core;
  std::size_t size = 0;
  int cluster = 0;  // cluster ID for real groups, 0 for pseudo groups

  bool pseudo() const {
    return role == GroupRole::into_cores || role == GroupRole::out_of_cores || role == GroupRole::newcomers ||
           role == GroupRole::departures;
  }
};

/// Cross-tabulation of first-period groups (rows) against second-period
/// groups (columns). The pseudo row and column are always last.
struct FlowTable {
  enum class Scope { cores_only, full };

  Scope scope = Scope::cores_only;
  std::vector<FlowGroup> rows;
  std::vector<FlowGroup> cols;
  std::vector<std::size_t> counts;  // rows.size() x cols.size()

  std::size_t at(std::size_t r, std::size_t c) const { return counts[r * cols.size() + c]; }
};

/// cores_only: period-1 cores plus an into-cores row against period-2 cores
/// plus an out-of-cores column. full: every cluster plus newcomer and
/// departure groups.
FlowTable core_flows(const Partition& first, const Partition& second,
                     FlowTable::Scope scope = FlowTable::Scope::cores_only);

struct TransitionEvents {
  struct MergeEvent {
    std::vector<std::string> sources;
    std::string target;
  };
  struct SplitEvent {
    std::string source;
    std::vector<std::string> targets;
  };
  std::vector<MergeEvent> merges;
  std::vector<SplitEvent> splits;
  std::vector<std::string> dissolved;
  std::vector<std::string> emerged;
};

struct TransitionThresholds {
  double share = 0.5;             // successor needs flow / |u| above this
  double split_min_share = 0.25;  // each split branch needs ceil(this * |u|) members
};

/// Successor rule: core u continues in core v when flow(u, v) / |u| exceeds
/// `share`. Two or more cores continuing in the same v form a merge; a core
/// without a successor that sends at least ceil(split_min_share * |u|)
/// members to each of two or more cores splits. A core dissolves when the
/// out-of-cores column takes a strict majority of it; a core emerges when
/// the into-cores row supplies a strict majority of it.
TransitionEvents classify_events(const FlowTable& ft, const TransitionThresholds& thresholds = {});

struct IntoOut {
  double pct_into = 0.0;  // share of period-2 core members not in period-1 cores
  double pct_out = 0.0;   // share of period-1 core members not in period-2 cores
};

IntoOut into_out_percentages(const Partition& first, const Partition& second);

/// {rows: [{id, role, size, color}], cols: [...], links: [[row, col, count]]}.
nlohmann::json emit_flow_json(const FlowTable& ft);

struct AlluvialStyle {
  double width = 800.0;
  double height = 400.0;
  double margin = 20.0;
  double gap = 4.0;
  double bar_height = 24.0;
};

/// Two rows of rectangles (widths proportional to group sizes) joined by
/// ribbons for the flows between real groups. Cores are black, pseudo
/// groups gray.
std::string emit_alluvial_svg(const FlowTable& ft, const AlluvialStyle& style = {});

}  // namespace blockstab
