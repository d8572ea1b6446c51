#include "blockstab/transitions.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "blockstab/error.hpp"

namespace blockstab {

std::string group_role_name(GroupRole role) {
  switch (role) {
    case GroupRole::core: return "core";
    case GroupRole::semi_periphery: return "semi-periphery";
    case GroupRole::periphery: return "periphery";
    case GroupRole::into_cores: return "into-cores";
    case GroupRole::out_of_cores: return "out-of-cores";
    case GroupRole::newcomers: return "newcomers";
    case GroupRole::departures: return "departures";
  }
  return "unknown";
}

namespace {

struct Side {
  std::vector<FlowGroup> groups;
  std::map<std::string, std::size_t> group_of;  // vertex -> group index
};

// Real groups of one period: cores by index, then semi-periphery, periphery.
Side real_groups(const Partition& p, bool cores_only) {
  std::vector<std::pair<std::tuple<int, int>, int>> order;  // ((rank, core index), cluster)
  for (const auto& [id, role] : p.roles) {
    if (cores_only && role.kind != RoleKind::core) continue;
    const int rank = role.kind == RoleKind::core ? 0 : role.kind == RoleKind::semi_periphery ? 1 : 2;
    order.push_back({{rank, role.core_index}, id});
  }
  std::sort(order.begin(), order.end());
  Side side;
  std::map<int, std::size_t> index_of_cluster;
  for (const auto& [key, id] : order) {
    const Role& role = p.roles.at(id);
    FlowGroup g;
    g.cluster = id;
    switch (role.kind) {
      case RoleKind::core:
        g.role = GroupRole::core;
        g.id = fmt::format("C{}", role.core_index);
        break;
      case RoleKind::semi_periphery:
        g.role = GroupRole::semi_periphery;
        g.id = "semi-periphery";
        break;
      case RoleKind::periphery:
        g.role = GroupRole::periphery;
        g.id = "periphery";
        break;
    }
    index_of_cluster[id] = side.groups.size();
    side.groups.push_back(g);
  }
  for (std::size_t i = 0; i < p.vertices.size(); ++i) {
    auto it = index_of_cluster.find(p.cluster[i]);
    if (it == index_of_cluster.end()) continue;
    side.group_of[p.vertices[i]] = it->second;
    ++side.groups[it->second].size;
  }
  return side;
}

}  // namespace

FlowTable core_flows(const Partition& first, const Partition& second, FlowTable::Scope scope) {
  const bool cores_only = scope == FlowTable::Scope::cores_only;
  Side top = real_groups(first, cores_only);
  Side bottom = real_groups(second, cores_only);

  FlowTable ft;
  ft.scope = scope;
  ft.rows = top.groups;
  ft.cols = bottom.groups;
  const FlowGroup extra_row{cores_only ? "into-cores" : "newcomers",
                            cores_only ? GroupRole::into_cores : GroupRole::newcomers, 0, 0};
  const FlowGroup extra_col{cores_only ? "out-of-cores" : "departures",
                            cores_only ? GroupRole::out_of_cores : GroupRole::departures, 0, 0};
  ft.rows.push_back(extra_row);
  ft.cols.push_back(extra_col);
  const std::size_t pseudo_row = ft.rows.size() - 1, pseudo_col = ft.cols.size() - 1;
  ft.counts.assign(ft.rows.size() * ft.cols.size(), 0);

  for (const auto& [vertex, r] : top.group_of) {
    auto it = bottom.group_of.find(vertex);
    const std::size_t c = it == bottom.group_of.end() ? pseudo_col : it->second;
    ++ft.counts[r * ft.cols.size() + c];
  }
  for (const auto& [vertex, c] : bottom.group_of) {
    if (!top.group_of.count(vertex)) ++ft.counts[pseudo_row * ft.cols.size() + c];
  }
  for (std::size_t c = 0; c < ft.cols.size(); ++c) ft.rows[pseudo_row].size += ft.at(pseudo_row, c);
  for (std::size_t r = 0; r < ft.rows.size(); ++r) ft.cols[pseudo_col].size += ft.at(r, pseudo_col);
  return ft;
}

TransitionEvents classify_events(const FlowTable& ft, const TransitionThresholds& t) {
  if (ft.scope != FlowTable::Scope::cores_only) {
    throw Error(ErrorKind::invalid_argument, "event classification needs a cores-only flow table");
  }
  if (!(t.share > 0.0 && t.share < 1.0) || !(t.split_min_share > 0.0 && t.split_min_share < 1.0)) {
    throw Error(ErrorKind::invalid_argument, "transition thresholds must lie in (0, 1)");
  }
  const std::size_t cores1 = ft.rows.size() - 1, cores2 = ft.cols.size() - 1;
  const std::size_t into = cores1, out = cores2;

  TransitionEvents ev;
  std::map<std::size_t, std::vector<std::size_t>> predecessors;
  for (std::size_t u = 0; u < cores1; ++u) {
    const auto size = static_cast<double>(ft.rows[u].size);
    if (size == 0.0) continue;
    std::optional<std::size_t> successor;
    for (std::size_t v = 0; v < cores2; ++v) {
      const auto flow = ft.at(u, v);
      if (static_cast<double>(flow) / size > t.share && (!successor || flow > ft.at(u, *successor))) successor = v;
    }
    if (successor) {
      predecessors[*successor].push_back(u);
    } else {
      const auto min_branch = static_cast<std::size_t>(std::ceil(t.split_min_share * size));
      std::vector<std::string> branches;
      for (std::size_t v = 0; v < cores2; ++v) {
        const auto flow = ft.at(u, v);
        if (flow > 0 && flow >= min_branch) branches.push_back(ft.cols[v].id);
      }
      if (branches.size() >= 2) ev.splits.push_back({ft.rows[u].id, std::move(branches)});
    }
    if (2 * ft.at(u, out) > ft.rows[u].size) ev.dissolved.push_back(ft.rows[u].id);
  }
  for (const auto& [v, sources] : predecessors) {
    if (sources.size() < 2) continue;
    TransitionEvents::MergeEvent merge{{}, ft.cols[v].id};
    for (auto u : sources) merge.sources.push_back(ft.rows[u].id);
    ev.merges.push_back(std::move(merge));
  }
  for (std::size_t v = 0; v < cores2; ++v) {
    if (ft.cols[v].size > 0 && 2 * ft.at(into, v) > ft.cols[v].size) ev.emerged.push_back(ft.cols[v].id);
  }
  return ev;
}

IntoOut into_out_percentages(const Partition& first, const Partition& second) {
  std::set<std::string> c1, c2;
  for (std::size_t i = 0; i < first.vertices.size(); ++i) {
    if (first.in_core(i)) c1.insert(first.vertices[i]);
  }
  for (std::size_t i = 0; i < second.vertices.size(); ++i) {
    if (second.in_core(i)) c2.insert(second.vertices[i]);
  }
  if (c1.empty() || c2.empty()) throw Error(ErrorKind::undefined_value, "into/out-of-cores shares need cores in both periods");
  std::size_t out = 0, into = 0;
  for (const auto& v : c1) out += !c2.count(v);
  for (const auto& v : c2) into += !c1.count(v);
  return {static_cast<double>(into) / static_cast<double>(c2.size()),
          static_cast<double>(out) / static_cast<double>(c1.size())};
}

namespace {

std::string color_of(const FlowGroup& g) {
  switch (g.role) {
    case GroupRole::core: return "#000000";
    case GroupRole::semi_periphery: return "#555555";
    case GroupRole::periphery: return "#cccccc";
    default: return "#999999";
  }
}

std::string xml_escape(const std::string& text) {
  std::string out;
  for (char ch : text) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += ch;
    }
  }
  return out;
}

}  // namespace

nlohmann::json emit_flow_json(const FlowTable& ft) {
  auto groups = [](const std::vector<FlowGroup>& gs) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& g : gs) {
      arr.push_back({{"id", g.id}, {"role", group_role_name(g.role)}, {"size", g.size}, {"color", color_of(g)}});
    }
    return arr;
  };
  nlohmann::json links = nlohmann::json::array();
  for (std::size_t r = 0; r < ft.rows.size(); ++r) {
    for (std::size_t c = 0; c < ft.cols.size(); ++c) {
      if (auto n = ft.at(r, c)) links.push_back({r, c, n});
    }
  }
  return {{"scope", ft.scope == FlowTable::Scope::cores_only ? "cores_only" : "full"},
          {"rows", groups(ft.rows)},
          {"cols", groups(ft.cols)},
          {"links", std::move(links)}};
}

std::string emit_alluvial_svg(const FlowTable& ft, const AlluvialStyle& style) {
  std::vector<std::size_t> top, bottom;  // indices of non-empty groups
  std::size_t top_total = 0, bottom_total = 0;
  for (std::size_t r = 0; r < ft.rows.size(); ++r) {
    if (ft.rows[r].size) {
      top.push_back(r);
      top_total += ft.rows[r].size;
    }
  }
  for (std::size_t c = 0; c < ft.cols.size(); ++c) {
    if (ft.cols[c].size) {
      bottom.push_back(c);
      bottom_total += ft.cols[c].size;
    }
  }
  if (top.empty() && bottom.empty()) throw Error(ErrorKind::invalid_argument, "flow table is empty");

  const double span = style.width - 2.0 * style.margin;
  const auto widest = static_cast<double>(std::max(top.size(), bottom.size()));
  const double scale = (span - style.gap * (widest - 1.0)) / static_cast<double>(std::max(top_total, bottom_total));
  const double top_y = style.margin;
  const double bottom_y = style.height - style.margin - style.bar_height;

  std::vector<double> row_x(ft.rows.size(), 0.0), col_x(ft.cols.size(), 0.0);
  double x = style.margin;
  for (auto r : top) {
    row_x[r] = x;
    x += static_cast<double>(ft.rows[r].size) * scale + style.gap;
  }
  x = style.margin;
  for (auto c : bottom) {
    col_x[c] = x;
    x += static_cast<double>(ft.cols[c].size) * scale + style.gap;
  }

  std::ostringstream svg;
  svg << R"(<?xml version="1.0" encoding="UTF-8"?>)" << '\n';
  svg << fmt::format(
      R"(<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{:.2f}" height="{:.2f}" viewBox="0 0 {:.2f} {:.2f}">)",
      style.width, style.height, style.width, style.height)
      << '\n';

  // Ribbons first so the bars are drawn on top of their ends.
  std::vector<double> row_offset(ft.rows.size(), 0.0), col_offset(ft.cols.size(), 0.0);
  const double y0 = top_y + style.bar_height, y1 = bottom_y, ymid = 0.5 * (y0 + y1);
  for (auto r : top) {
    for (auto c : bottom) {
      const auto count = ft.at(r, c);
      if (count == 0) continue;
      const double w = static_cast<double>(count) * scale;
      if (!ft.rows[r].pseudo() && !ft.cols[c].pseudo()) {
        const double xa = row_x[r] + row_offset[r], xb = col_x[c] + col_offset[c];
        svg << fmt::format(
            R"(<path class="ribbon" d="M {0:.2f},{1:.2f} C {0:.2f},{2:.2f} {3:.2f},{2:.2f} {3:.2f},{4:.2f} L {5:.2f},{4:.2f} C {5:.2f},{2:.2f} {6:.2f},{2:.2f} {6:.2f},{1:.2f} Z" fill="#808080" fill-opacity="0.5"><title>{7} to {8}: {9}</title></path>)",
            xa, y0, ymid, xb, y1, xb + w, xa + w, xml_escape(ft.rows[r].id), xml_escape(ft.cols[c].id), count)
            << '\n';
      }
      row_offset[r] += w;
      col_offset[c] += w;
    }
  }

  auto bar = [&](const FlowGroup& g, double bx, double by) {
    svg << fmt::format(
        R"(<rect x="{:.2f}" y="{:.2f}" width="{:.2f}" height="{:.2f}" fill="{}"><title>{} ({})</title></rect>)", bx,
        by, static_cast<double>(g.size) * scale, style.bar_height, color_of(g), xml_escape(g.id), g.size)
        << '\n';
  };
  for (auto r : top) bar(ft.rows[r], row_x[r], top_y);
  for (auto c : bottom) bar(ft.cols[c], col_x[c], bottom_y);
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace blockstab
