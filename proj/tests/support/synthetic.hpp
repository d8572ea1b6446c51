#pragma once

// Synthetic inputs and brute-force oracles shared by the unit and acceptance tests.
// Nothing here calls into the library code it is meant to check.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "blockstab/network.hpp"
#include "blockstab/rng.hpp"

namespace synth {

using blockstab::Network;
using blockstab::Rng;
using blockstab::uniform_index;
using blockstab::uniform_real;

inline std::string vid(std::size_t i) { return fmt::format("v{:04d}", i); }

/// Labels 0..k-1 with every label used at least once (n >= k).
inline std::vector<int> random_labels(std::size_t n, std::size_t k, Rng& rng) {
  std::vector<int> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<int>(i < k ? i : uniform_index(rng, k));
  blockstab::shuffle(std::span<int>(out), rng);
  return out;
}

/// Labels with a fixed size profile, shuffled.
inline std::vector<int> labels_with_sizes(const std::vector<std::size_t>& sizes, Rng& rng) {
  std::vector<int> out;
  for (std::size_t c = 0; c < sizes.size(); ++c) out.insert(out.end(), sizes[c], static_cast<int>(c));
  blockstab::shuffle(std::span<int>(out), rng);
  return out;
}

struct BrutePairs {
  std::uint64_t a = 0, b = 0, c = 0, d = 0;
};

/// O(n^2) enumeration of unordered pairs.
inline BrutePairs brute_pair_counts(const std::vector<int>& u, const std::vector<int>& v) {
  BrutePairs p;
  for (std::size_t i = 0; i < u.size(); ++i) {
    for (std::size_t j = i + 1; j < u.size(); ++j) {
      const bool su = u[i] == u[j], sv = v[i] == v[j];
      if (su && sv) ++p.a;
      else if (su) ++p.b;
      else if (sv) ++p.c;
      else ++p.d;
    }
  }
  return p;
}

inline Network random_graph(std::size_t n, double p, Rng& rng) {
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < n; ++i) ids.push_back(vid(i));
  Network net(ids);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (uniform_real(rng) < p) net.add_tie(i, j);
    }
  }
  return net;
}

/// Role-consistent minimum of the default-image criterion: isolates are
/// periphery, every other vertex goes to one of k non-empty cores or the
/// semi-periphery (position k).
inline std::uint64_t exhaustive_minimum(const Network& net, std::size_t k) {
  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < net.size(); ++i) {
    bool any = false;
    for (std::size_t j = 0; j < net.size(); ++j) any = any || (i != j && net.weight(i, j) > 0);
    if (any) active.push_back(i);
  }
  const std::size_t m = active.size();
  std::vector<std::size_t> pos(m, 0);
  std::uint64_t best = std::numeric_limits<std::uint64_t>::max();
  while (true) {
    std::vector<bool> used(k, false);
    for (auto p : pos) {
      if (p < k) used[p] = true;
    }
    if (std::all_of(used.begin(), used.end(), [](bool b) { return b; })) {
      std::uint64_t cost = 0;
      for (std::size_t x = 0; x < m; ++x) {
        for (std::size_t y = x + 1; y < m; ++y) {
          const bool tie = net.weight(active[x], active[y]) > 0;
          const bool complete = pos[x] == pos[y] && pos[x] < k;
          cost += complete != tie ? 1 : 0;
        }
      }
      best = std::min(best, cost);
    }
    std::size_t i = 0;
    while (i < m && ++pos[i] == k + 1) pos[i++] = 0;
    if (i == m) break;
  }
  return best;
}

/// Planted cores plus sparse hangers-on and isolates.
struct Planted {
  Network net;
  std::vector<int> truth;     // core c -> c + 1, semi -> 0, isolate -> -1
  std::uint64_t semi_ties = 0;  // criterion of the planted partition
};

/// `cores` cliques with sizes in [min_size, max_size], `semi` vertices with
/// one or two ties into distinct cores, `isolates` degree-0 vertices. Vertex
/// IDs are shuffled so the planted structure is not visible in the order.
inline Planted planted_network(std::size_t cores, std::size_t min_size, std::size_t max_size, std::size_t semi,
                               std::size_t isolates, Rng& rng) {
  std::vector<int> role;
  std::vector<std::vector<std::size_t>> members(cores);
  for (std::size_t c = 0; c < cores; ++c) {
    const std::size_t size = min_size + uniform_index(rng, max_size - min_size + 1);
    for (std::size_t s = 0; s < size; ++s) {
      members[c].push_back(role.size());
      role.push_back(static_cast<int>(c + 1));
    }
  }
  const std::size_t first_semi = role.size();
  role.insert(role.end(), semi, 0);
  role.insert(role.end(), isolates, -1);
  const std::size_t n = role.size();

  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  blockstab::shuffle(std::span<std::size_t>(perm), rng);
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < n; ++i) ids.push_back(vid(i));

  Planted out{Network(ids), std::vector<int>(n), 0};
  for (std::size_t i = 0; i < n; ++i) out.truth[perm[i]] = role[i];
  for (const auto& group : members) {
    for (std::size_t x = 0; x < group.size(); ++x) {
      for (std::size_t y = x + 1; y < group.size(); ++y) out.net.add_tie(perm[group[x]], perm[group[y]]);
    }
  }
  for (std::size_t s = first_semi; s < first_semi + semi; ++s) {
    const std::size_t ties = std::min<std::size_t>(cores, 1 + uniform_index(rng, 2));
    std::vector<std::size_t> targets(cores);
    std::iota(targets.begin(), targets.end(), std::size_t{0});
    blockstab::shuffle(std::span<std::size_t>(targets), rng);
    for (std::size_t t = 0; t < ties; ++t) {
      const auto& group = members[targets[t]];
      out.net.add_tie(perm[s], perm[group[uniform_index(rng, group.size())]]);
      ++out.semi_ties;
    }
  }
  return out;
}

struct CorpusDiscipline {
  std::string name;
  std::string field;
  std::size_t cores = 3;   // planted cores per period
  std::size_t n = 60;      // researchers per period (approximate)
};

/// Writes a two-period publication table. Each discipline has planted cores
/// that publish together, hangers-on with two-author papers, and solo
/// authors. Between periods cores persist, merge or split and researchers
/// join and leave.
inline void write_corpus(const std::string& path, const std::vector<CorpusDiscipline>& disciplines,
                         std::uint64_t seed) {
  Rng rng(seed);
  std::ofstream out(path);
  out << "pub_id,author_id,year,discipline,field\n";
  std::size_t pub = 0;
  for (std::size_t d = 0; d < disciplines.size(); ++d) {
    const auto& disc = disciplines[d];
    std::size_t next_id = 0;
    auto fresh = [&] { return fmt::format("{}{:04d}", char('A' + d), next_id++); };
    auto paper = [&](const std::vector<std::string>& authors, int year) {
      const std::string id = fmt::format("P{:06d}", pub++);
      for (const auto& a : authors) out << id << ',' << a << ',' << year << ',' << disc.name << ',' << disc.field << '\n';
    };
    auto publish_period = [&](const std::vector<std::vector<std::string>>& cores, std::size_t n, int base_year) {
      std::vector<std::string> core_members;
      for (const auto& c : cores) {
        core_members.insert(core_members.end(), c.begin(), c.end());
        for (int r = 0; r < 2; ++r) paper(c, base_year + static_cast<int>(uniform_index(rng, 10)));
      }
      const std::size_t rest = n > core_members.size() ? n - core_members.size() : 0;
      for (std::size_t i = 0; i < rest; ++i) {
        const std::string who = fresh();
        const int year = base_year + static_cast<int>(uniform_index(rng, 10));
        if (i % 2 == 0 && !core_members.empty()) {
          paper({who, core_members[uniform_index(rng, core_members.size())]}, year);
        } else {
          paper({who}, year);
        }
      }
    };

    std::vector<std::vector<std::string>> first(disc.cores);
    for (auto& c : first) {
      const std::size_t size = 4 + uniform_index(rng, 6);
      for (std::size_t s = 0; s < size; ++s) c.push_back(fresh());
    }
    publish_period(first, disc.n, 1991);

    std::vector<std::vector<std::string>> second;
    for (std::size_t c = 0; c < first.size(); ++c) {
      auto group = first[c];
      if (group.size() > 4 && uniform_index(rng, 2) == 0) group.pop_back();  // departure
      if (uniform_index(rng, 2) == 0) group.push_back(fresh());             // newcomer
      if (c % 4 == 1 && group.size() >= 8) {                                 // split
        const auto half = group.begin() + static_cast<std::ptrdiff_t>(group.size() / 2);
        second.emplace_back(group.begin(), half);
        second.emplace_back(half, group.end());
      } else {
        second.push_back(group);
      }
    }
    while (second.size() > disc.cores) {  // merge the last two
      auto tail = second.back();
      second.pop_back();
      second.back().insert(second.back().end(), tail.begin(), tail.end());
    }
    while (second.size() < disc.cores) {
      std::vector<std::string> group;
      for (int s = 0; s < 5; ++s) group.push_back(fresh());
      second.push_back(group);
    }
    publish_period(second, disc.n + disc.n / 10, 2001);
  }
}

}  // namespace synth
