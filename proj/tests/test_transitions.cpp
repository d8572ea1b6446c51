#include <doctest.h>

#include <cmath>
#include <regex>

#include "blockstab/error.hpp"
#include "blockstab/transitions.hpp"
#include "support/synthetic.hpp"

using namespace blockstab;

namespace {

// cores: list of member lists; everyone else given goes to the semi-periphery.
Partition make(const std::vector<std::vector<std::string>>& cores, const std::vector<std::string>& semi = {}) {
  Partition p;
  for (std::size_t c = 0; c < cores.size(); ++c) {
    const int id = static_cast<int>(c + 1);
    p.roles[id] = Role{RoleKind::core, id};
    for (const auto& v : cores[c]) {
      p.vertices.push_back(v);
      p.cluster.push_back(id);
    }
  }
  if (!semi.empty()) {
    const int id = static_cast<int>(cores.size() + 1);
    p.roles[id] = Role{RoleKind::semi_periphery, 0};
    for (const auto& v : semi) {
      p.vertices.push_back(v);
      p.cluster.push_back(id);
    }
  }
  return p;
}

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

void check_marginals(const FlowTable& ft) {
  for (std::size_t r = 0; r < ft.rows.size(); ++r) {
    std::size_t s = 0;
    for (std::size_t c = 0; c < ft.cols.size(); ++c) s += ft.at(r, c);
    CHECK(s == ft.rows[r].size);
  }
  for (std::size_t c = 0; c < ft.cols.size(); ++c) {
    std::size_t s = 0;
    for (std::size_t r = 0; r < ft.rows.size(); ++r) s += ft.at(r, c);
    CHECK(s == ft.cols[c].size);
  }
}

}  // namespace

TEST_CASE("identical cores give a diagonal table") {
  const auto p = make({{"a", "b"}, {"c", "d", "e"}});
  const auto ft = core_flows(p, p);
  REQUIRE(ft.rows.size() == 3);
  REQUIRE(ft.cols.size() == 3);
  CHECK(ft.at(0, 0) == 2);
  CHECK(ft.at(1, 1) == 3);
  CHECK(ft.at(0, 1) == 0);
  CHECK(ft.rows[2].size == 0);
  CHECK(ft.cols[2].size == 0);
  CHECK(ft.rows[2].role == GroupRole::into_cores);
  CHECK(ft.cols[2].role == GroupRole::out_of_cores);
}

TEST_CASE("a split core spreads across its row") {
  const auto ft = core_flows(make({{"x1", "x2", "x3", "x4"}}), make({{"x1", "x2"}, {"x3", "x4"}}));
  CHECK(ft.at(0, 0) == 2);
  CHECK(ft.at(0, 1) == 2);
  CHECK(ft.at(0, 2) == 0);
}

TEST_CASE("marginals hold for random partitions in both scopes") {
  Rng rng(19);
  for (int rep = 0; rep < 30; ++rep) {
    auto random_partition = [&](std::size_t offset) {
      Partition p;
      const std::size_t k = 1 + synth::uniform_index(rng, 4);
      for (std::size_t c = 1; c <= k + 2; ++c)
        p.roles[static_cast<int>(c)] = c <= k ? Role{RoleKind::core, static_cast<int>(c)}
                                              : Role{c == k + 1 ? RoleKind::semi_periphery : RoleKind::periphery, 0};
      for (std::size_t i = offset; i < offset + 30; ++i) {
        p.vertices.push_back(synth::vid(i));
        p.cluster.push_back(1 + static_cast<int>(synth::uniform_index(rng, k + 2)));
      }
      return p;
    };
    const auto p1 = random_partition(0), p2 = random_partition(10);
    check_marginals(core_flows(p1, p2, FlowTable::Scope::cores_only));
    const auto full = core_flows(p1, p2, FlowTable::Scope::full);
    check_marginals(full);
    CHECK(full.rows.back().size == 10);  // newcomers
    CHECK(full.cols.back().size == 10);  // departures
  }
}

TEST_CASE("merge, split, dissolve and emerge") {
  const auto merge = classify_events(core_flows(make({{"a", "b", "c"}, {"d", "e", "f"}}),
                                                make({{"a", "b", "c", "d", "e", "f"}})));
  REQUIRE(merge.merges.size() == 1);
  CHECK(merge.merges[0].sources == std::vector<std::string>{"C1", "C2"});
  CHECK(merge.splits.empty());

  const auto split = classify_events(
      core_flows(make({{"a", "b", "c", "d", "e", "f"}}), make({{"a", "b"}, {"c", "d"}, {"e", "f"}})));
  REQUIRE(split.splits.size() == 1);
  CHECK(split.splits[0].targets == std::vector<std::string>{"C1", "C2", "C3"});

  const auto gone = classify_events(core_flows(make({{"a", "b"}, {"c", "d"}}), make({{"c", "d"}, {"x", "y"}}, {"a", "b"})));
  CHECK(gone.dissolved == std::vector<std::string>{"C1"});
  CHECK(gone.emerged == std::vector<std::string>{"C2"});

  CHECK_THROWS_AS(classify_events(core_flows(make({{"a"}}), make({{"a"}})), {1.0, 0.25}), Error);
  CHECK_THROWS_AS(classify_events(core_flows(make({{"a"}}), make({{"a"}}), FlowTable::Scope::full)), Error);
}

TEST_CASE("events do not depend on core numbering") {
  const auto p1 = make({{"a", "b", "c"}, {"d", "e", "f"}, {"g", "h", "i", "j"}});
  const auto p2 = make({{"g", "h"}, {"a", "b", "c", "d", "e", "f"}, {"i", "j"}});
  const auto relabeled1 = make({{"g", "h", "i", "j"}, {"d", "e", "f"}, {"a", "b", "c"}});
  const auto e1 = classify_events(core_flows(p1, p2));
  const auto e2 = classify_events(core_flows(relabeled1, p2));
  REQUIRE(e1.merges.size() == 1);
  REQUIRE(e2.merges.size() == 1);
  CHECK(e1.merges[0].target == e2.merges[0].target);
  REQUIRE(e1.splits.size() == 1);
  REQUIRE(e2.splits.size() == 1);
  CHECK(e1.splits[0].targets == e2.splits[0].targets);
}

TEST_CASE("into and out of cores") {
  const auto same = into_out_percentages(make({{"a", "b"}}), make({{"b", "a"}}));
  CHECK(same.pct_into == 0.0);
  CHECK(same.pct_out == 0.0);
  const auto io = into_out_percentages(make({{"A", "B", "C", "D"}}), make({{"C", "D", "E"}, {"F", "G", "H"}}));
  CHECK(io.pct_out == doctest::Approx(2.0 / 4.0));
  CHECK(io.pct_into == doctest::Approx(4.0 / 6.0));
  CHECK_THROWS_AS(into_out_percentages(make({}, {"a"}), make({{"a", "b"}})), Error);
}

TEST_CASE("flow json") {
  const auto ft = core_flows(make({{"a", "b"}}, {"s"}), make({{"a", "b", "s"}}));
  const auto j = emit_flow_json(ft);
  CHECK(j.at("rows").size() == 2);
  CHECK(j.at("rows")[0].at("color") == "#000000");
  CHECK(j.at("rows")[1].at("role") == "into-cores");
  CHECK(j.at("links").size() == 2);
}

TEST_CASE("alluvial svg structure") {
  const auto p = make({{"a", "b"}, {"c", "d", "e"}});
  const auto svg = emit_alluvial_svg(core_flows(p, p));
  CHECK(svg.rfind("<?xml", 0) == 0);
  CHECK(count(svg, "<rect") == 4);
  CHECK(count(svg, "class=\"ribbon\"") == 2);
  CHECK(count(svg, "<svg") == count(svg, "</svg>"));
  CHECK(count(svg, "<path") == count(svg, "</path>"));

  Partition empty;
  CHECK_THROWS_AS(emit_alluvial_svg(core_flows(empty, empty)), Error);
}

TEST_CASE("ribbon widths follow the counts") {
  const auto p1 = make({{"a", "b", "c", "d", "e", "f"}, {"g", "h"}});
  const auto p2 = make({{"a", "b"}, {"c", "d", "e", "f", "g", "h"}});
  AlluvialStyle style;
  const auto svg = emit_alluvial_svg(core_flows(p1, p2), style);
  // A ribbon's top edge runs from its first point to its closing point.
  const std::regex start(R"(class="ribbon" d="M ([0-9.]+),[^"]* ([0-9.]+),[0-9.]+ Z")");
  std::vector<double> widths;
  for (std::sregex_iterator it(svg.begin(), svg.end(), start), end; it != end; ++it)
    widths.push_back(std::stod((*it)[2]) - std::stod((*it)[1]));
  REQUIRE(widths.size() == 3);
  // Ribbons a-b (2), c-f (4), g-h (2) share one scale.
  std::sort(widths.begin(), widths.end());
  CHECK(widths[0] == doctest::Approx(widths[1]).epsilon(0.01));
  CHECK(std::abs(widths[2] - 2 * widths[0]) <= 1.0);
}
