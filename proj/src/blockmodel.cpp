#include "blockstab/blockmodel.hpp"

#include <algorithm>
#include <atomic>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

#include <fmt/format.h>

#include "blockstab/error.hpp"
#include "blockstab/rng.hpp"

namespace blockstab {

std::string role_name(RoleKind kind) {
  switch (kind) {
    case RoleKind::core: return "core";
    case RoleKind::semi_periphery: return "semi-periphery";
    case RoleKind::periphery: return "periphery";
  }
  return "unknown";
}

std::optional<int> Partition::cluster_of(const std::string& vertex) const {
  auto it = std::find(vertices.begin(), vertices.end(), vertex);
  if (it == vertices.end()) return std::nullopt;
  return cluster[static_cast<std::size_t>(it - vertices.begin())];
}

std::vector<std::string> Partition::members(int cluster_id) const {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    if (cluster[i] == cluster_id) out.push_back(vertices[i]);
  }
  return out;
}

std::size_t Partition::core_count() const {
  return static_cast<std::size_t>(
      std::count_if(roles.begin(), roles.end(), [](const auto& r) { return r.second.kind == RoleKind::core; }));
}

void Partition::validate() const {
  if (vertices.size() != cluster.size()) throw Error(ErrorKind::invalid_argument, "partition size mismatch");
  std::set<std::string> seen;
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    if (!seen.insert(vertices[i]).second) {
      throw Error(ErrorKind::invalid_argument, "vertex '" + vertices[i] + "' assigned twice");
    }
    if (!roles.count(cluster[i])) {
      throw Error(ErrorKind::invalid_argument, fmt::format("cluster {} has no role", cluster[i]));
    }
  }
  int semi = 0, per = 0;
  std::set<int> core_indices;
  for (const auto& [id, role] : roles) {
    if (role.kind == RoleKind::semi_periphery) ++semi;
    if (role.kind == RoleKind::periphery) ++per;
    if (role.kind == RoleKind::core && (role.core_index < 1 || !core_indices.insert(role.core_index).second)) {
      throw Error(ErrorKind::invalid_argument, fmt::format("invalid or repeated core index {}", role.core_index));
    }
  }
  if (semi > 1 || per > 1) throw Error(ErrorKind::invalid_argument, "more than one semi-periphery or periphery");
}

ImageSpec::ImageSpec(std::size_t k_cores, bool has_semi_periphery)
    : k_(k_cores),
      semi_(has_semi_periphery),
      types_(positions() * positions(), BlockType::null),
      weights_(positions() * positions(), 1) {
  if (k_cores == 0) throw Error(ErrorKind::invalid_argument, "image needs at least one core");
}

void ImageSpec::set_type(std::size_t p, std::size_t q, BlockType t) {
  if (p >= positions() || q >= positions()) throw Error(ErrorKind::invalid_argument, "block position out of range");
  types_[p * positions() + q] = types_[q * positions() + p] = t;
}

void ImageSpec::set_weight(std::size_t p, std::size_t q, std::uint32_t w) {
  if (p >= positions() || q >= positions()) throw Error(ErrorKind::invalid_argument, "block position out of range");
  weights_[p * positions() + q] = weights_[q * positions() + p] = w;
}

ImageSpec default_image(std::size_t k, const std::vector<std::pair<int, int>>& bridging) {
  ImageSpec img(k, true);
  for (std::size_t c = 0; c < k; ++c) img.set_type(c, c, BlockType::complete);
  for (auto [i, j] : bridging) {
    if (i < 1 || j < 1 || static_cast<std::size_t>(i) > k || static_cast<std::size_t>(j) > k || i == j) {
      throw Error(ErrorKind::invalid_argument, fmt::format("invalid bridging pair ({}, {}) for k = {}", i, j, k));
    }
    img.set_type(static_cast<std::size_t>(i - 1), static_cast<std::size_t>(j - 1), BlockType::complete);
  }
  return img;
}

namespace {

constexpr std::size_t kExcluded = std::numeric_limits<std::size_t>::max();

// Image position of every network vertex (kExcluded for the periphery).
std::vector<std::size_t> positions_of(const Network& net, const Partition& p, const ImageSpec& img) {
  if (p.vertices.size() != net.size()) {
    throw Error(ErrorKind::invalid_argument, "partition does not cover exactly the network vertices");
  }
  std::map<std::string, std::size_t> where;
  for (std::size_t i = 0; i < p.vertices.size(); ++i) where.emplace(p.vertices[i], i);
  std::vector<std::size_t> out(net.size());
  for (std::size_t v = 0; v < net.size(); ++v) {
    auto it = where.find(net.label(v));
    if (it == where.end()) throw Error(ErrorKind::invalid_argument, "vertex '" + net.label(v) + "' missing from partition");
    const Role& role = p.roles.at(p.cluster[it->second]);
    switch (role.kind) {
      case RoleKind::core:
        if (role.core_index < 1 || static_cast<std::size_t>(role.core_index) > img.k_cores()) {
          throw Error(ErrorKind::invalid_argument, fmt::format("core {} not in the image", role.core_index));
        }
        out[v] = static_cast<std::size_t>(role.core_index - 1);
        break;
      case RoleKind::semi_periphery:
        if (!img.has_semi_periphery()) throw Error(ErrorKind::invalid_argument, "image has no semi-periphery");
        out[v] = img.k_cores();
        break;
      case RoleKind::periphery:
        out[v] = kExcluded;
        break;
    }
  }
  return out;
}

}  // namespace

CriterionValue criterion(const Network& net, const Partition& p, const ImageSpec& img) {
  const auto pos = positions_of(net, p, img);
  const std::size_t K = img.positions();
  CriterionValue result{0, {K, std::vector<std::uint64_t>(K * K, 0)}};
  for (std::size_t i = 0; i < net.size(); ++i) {
    if (pos[i] == kExcluded) continue;
    for (std::size_t j = i + 1; j < net.size(); ++j) {
      if (pos[j] == kExcluded) continue;
      const auto [a, b] = std::minmax(pos[i], pos[j]);
      const bool tie = net.adjacent(i, j);
      const bool inconsistent = img.type(a, b) == BlockType::complete ? !tie : tie;
      if (inconsistent) {
        ++result.blocks.counts[a * K + b];
        result.value += img.weight(a, b);
      }
    }
  }
  return result;
}

StrippedNetwork strip_periphery(const Network& net) {
  StrippedNetwork out;
  out.periphery = isolates(net);
  std::set<std::string> keep(net.vertices().begin(), net.vertices().end());
  for (const auto& v : out.periphery) keep.erase(v);
  out.reduced = out.periphery.empty() ? net : induced_subnetwork(net, keep);
  return out;
}

std::vector<std::vector<std::string>> extract_exact_cores(const Network& net, std::size_t min_size) {
  const std::size_t n = net.size();
  // Closed neighbourhood rows; equal rows <=> adjacent with equal outside ties.
  std::map<std::vector<bool>, std::vector<std::size_t>> classes;
  for (std::size_t v = 0; v < n; ++v) {
    std::vector<bool> row(n);
    for (std::size_t u = 0; u < n; ++u) row[u] = (u == v) || net.adjacent(v, u);
    classes[row].push_back(v);
  }
  std::vector<std::vector<std::size_t>> groups;
  for (auto& [row, members] : classes) {
    if (members.size() >= std::max<std::size_t>(min_size, 2)) groups.push_back(members);
  }
  std::sort(groups.begin(), groups.end());
  std::vector<std::vector<std::string>> out;
  for (const auto& g : groups) {
    std::vector<std::string> ids;
    for (auto v : g) ids.push_back(net.label(v));
    out.push_back(std::move(ids));
  }
  return out;
}

namespace {

// Incremental state for one restart.
//
// For vertex v and position r, the cost of all pairs (v, u) with v placed at
// r is G[r] - cw[r][pos v] + L[v][r], where cw = weight * [complete],
// m = weight * (1 - 2 [complete]), G[r] = sum_s cw[r][s] * size[s] and
// L[v][r] = sum_s links[v][s] * m[r][s].
class Search {
public:
  Search(const Network& net, const ImageSpec& img, const std::vector<int>& frozen_pos)
      : n_(net.size()), K_(img.positions()), k_(img.k_cores()), frozen_(frozen_pos) {
    adj_.resize(n_ * n_);
    nbrs_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = 0; j < n_; ++j) {
        adj_[i * n_ + j] = net.adjacent(i, j);
        if (adj_[i * n_ + j]) nbrs_[i].push_back(static_cast<std::uint32_t>(j));
      }
    }
    cw_.resize(K_ * K_);
    m_.resize(K_ * K_);
    for (std::size_t r = 0; r < K_; ++r) {
      for (std::size_t s = 0; s < K_; ++s) {
        const auto w = static_cast<std::int64_t>(img.weight(r, s));
        const bool complete = img.type(r, s) == BlockType::complete;
        cw_[r * K_ + s] = complete ? w : 0;
        m_[r * K_ + s] = complete ? -w : w;
      }
    }
  }

  void reset(std::vector<std::size_t> pos) {
    pos_ = std::move(pos);
    size_.assign(K_, 0);
    for (auto p : pos_) ++size_[p];
    links_.assign(n_ * K_, 0);
    for (std::size_t v = 0; v < n_; ++v) {
      for (auto u : nbrs_[v]) ++links_[v * K_ + pos_[u]];
    }
    G_.assign(K_, 0);
    for (std::size_t r = 0; r < K_; ++r) {
      for (std::size_t s = 0; s < K_; ++s) G_[r] += cw_[r * K_ + s] * size_[s];
    }
    L_.assign(n_ * K_, 0);
    for (std::size_t v = 0; v < n_; ++v) {
      for (std::size_t r = 0; r < K_; ++r) {
        std::int64_t acc = 0;
        for (std::size_t s = 0; s < K_; ++s) acc += links_[v * K_ + s] * m_[r * K_ + s];
        L_[v * K_ + r] = acc;
      }
    }
  }

  std::int64_t cost(std::size_t v, std::size_t r) const {
    return G_[r] - cw_[r * K_ + pos_[v]] + L_[v * K_ + r];
  }

  std::int64_t total() const {
    std::int64_t twice = 0;
    for (std::size_t v = 0; v < n_; ++v) twice += cost(v, pos_[v]);
    return twice / 2;
  }

  void move(std::size_t v, std::size_t q) {
    const std::size_t p = pos_[v];
    for (std::size_t r = 0; r < K_; ++r) G_[r] += cw_[r * K_ + q] - cw_[r * K_ + p];
    for (auto u : nbrs_[v]) {
      --links_[u * K_ + p];
      ++links_[u * K_ + q];
      for (std::size_t r = 0; r < K_; ++r) L_[u * K_ + r] += m_[r * K_ + q] - m_[r * K_ + p];
    }
    --size_[p];
    ++size_[q];
    pos_[v] = q;
  }

  // Applies the best strictly improving move; returns false at a local optimum.
  bool step() {
    // (delta, vertex, target, kind, partner): lexicographic order decides.
    using Key = std::tuple<std::int64_t, std::size_t, std::size_t, int, std::size_t>;
    std::optional<Key> best;
    auto offer = [&](const Key& key) {
      if (std::get<0>(key) < 0 && (!best || key < *best)) best = key;
    };

    constexpr auto kInf = std::numeric_limits<std::int64_t>::max() / 4;
    min_rel_.assign(K_ * K_, kInf);
    members_.assign(K_, {});
    for (std::size_t v = 0; v < n_; ++v) {
      if (frozen_[v] >= 0) continue;
      const std::size_t p = pos_[v];
      members_[p].push_back(v);
      const std::int64_t here = cost(v, p);
      const bool may_leave = p >= k_ || size_[p] > 1;
      for (std::size_t q = 0; q < K_; ++q) {
        if (q == p) continue;
        const std::int64_t delta = cost(v, q) - here;
        min_rel_[p * K_ + q] = std::min(min_rel_[p * K_ + q], delta);
        if (may_leave) offer({delta, v, q, 0, 0});
      }
    }

    for (std::size_t p = 0; p < K_; ++p) {
      for (std::size_t q = p + 1; q < K_; ++q) {
        if (members_[p].empty() || members_[q].empty()) continue;
        const std::int64_t pair0 = pair_term(p, q, false), pair1 = pair_term(p, q, true);
        const std::int64_t bound = min_rel_[p * K_ + q] + min_rel_[q * K_ + p] - std::max(pair0, pair1);
        const std::int64_t threshold = best ? std::get<0>(*best) : 0;
        if (bound > threshold || (!best && bound >= 0)) continue;
        for (auto v : members_[p]) {
          const std::int64_t dv = cost(v, q) - cost(v, p);
          for (auto u : members_[q]) {
            const std::int64_t du = cost(u, p) - cost(u, q);
            const std::int64_t delta = dv + du - (adj_[v * n_ + u] ? pair1 : pair0);
            if (v < u) {
              offer({delta, v, q, 1, u});
            } else {
              offer({delta, u, p, 1, v});
            }
          }
        }
      }
    }

    if (!best) return false;
    const auto [delta, v, target, kind, partner] = *best;
    if (kind == 0) {
      move(v, target);
    } else {
      const std::size_t from = pos_[v];
      move(v, target);
      move(partner, from);
    }
    return true;
  }

  const std::vector<std::size_t>& positions() const { return pos_; }
  const std::vector<std::int64_t>& sizes() const { return size_; }

private:
  // Change of the (v, u) pair cost counted inside the two relocation deltas of
  // an exchange between positions p and q.
  std::int64_t pair_term(std::size_t p, std::size_t q, bool tie) const {
    auto c = [&](std::size_t r, std::size_t s) { return cw_[r * K_ + s] + (tie ? m_[r * K_ + s] : 0); };
    return (c(q, q) - c(p, q)) + (c(p, p) - c(p, q));
  }

  std::size_t n_, K_, k_;
  std::vector<int> frozen_;
  std::vector<std::uint8_t> adj_;
  std::vector<std::vector<std::uint32_t>> nbrs_;
  std::vector<std::int64_t> cw_, m_;
  std::vector<std::size_t> pos_;
  std::vector<std::int64_t> size_, links_, G_, L_;
  std::vector<std::int64_t> min_rel_;
  std::vector<std::vector<std::size_t>> members_;
};

struct RestartResult {
  std::int64_t value = 0;
  std::vector<std::size_t> pos;
};

// Renumbers cores that hold no frozen group by their first vertex.
void canonicalize(std::vector<std::size_t>& pos, std::size_t k, const std::vector<bool>& frozen_core) {
  std::vector<std::size_t> free_slots;
  for (std::size_t c = 0; c < k; ++c) {
    if (!frozen_core[c]) free_slots.push_back(c);
  }
  std::vector<std::size_t> first_seen;
  std::vector<bool> seen(k, false);
  for (auto p : pos) {
    if (p < k && !frozen_core[p] && !seen[p]) {
      seen[p] = true;
      first_seen.push_back(p);
    }
  }
  std::vector<std::size_t> relabel(k);
  std::iota(relabel.begin(), relabel.end(), 0);
  for (std::size_t i = 0; i < first_seen.size(); ++i) relabel[first_seen[i]] = free_slots[i];
  for (auto& p : pos) {
    if (p < k) p = relabel[p];
  }
}

}  // namespace

BlockmodelFit local_search(const Network& net, const ImageSpec& img, const std::vector<FrozenGroup>& frozen,
                           std::size_t restarts, std::uint64_t seed, std::size_t threads) {
  const std::size_t n = net.size();
  const std::size_t k = img.k_cores();
  const std::size_t K = img.positions();
  if (restarts == 0) throw Error(ErrorKind::invalid_argument, "restarts must be positive");

  std::vector<int> frozen_pos(n, -1);
  std::vector<bool> frozen_core(k, false);
  for (const auto& group : frozen) {
    if (group.core_index < 1 || static_cast<std::size_t>(group.core_index) > k) {
      throw Error(ErrorKind::invalid_argument, fmt::format("frozen group targets core {} of {}", group.core_index, k));
    }
    for (const auto& id : group.members) {
      auto v = net.index_of(id);
      if (!v) throw Error(ErrorKind::invalid_argument, "frozen vertex '" + id + "' not in network");
      if (frozen_pos[*v] >= 0) throw Error(ErrorKind::invalid_argument, "frozen groups overlap at '" + id + "'");
      frozen_pos[*v] = group.core_index - 1;
    }
    if (!group.members.empty()) frozen_core[static_cast<std::size_t>(group.core_index - 1)] = true;
  }
  std::vector<std::size_t> free_vertices;
  for (std::size_t v = 0; v < n; ++v) {
    if (frozen_pos[v] < 0) free_vertices.push_back(v);
  }
  const auto open_cores = static_cast<std::size_t>(std::count(frozen_core.begin(), frozen_core.end(), false));
  if (open_cores > free_vertices.size()) {
    throw Error(ErrorKind::infeasible, fmt::format("k = {} cores cannot be filled: {} free vertices for {} open cores", k,
                                                   free_vertices.size(), open_cores));
  }

  // Seed weight: triangles through a vertex.
  std::vector<std::uint64_t> weight(n, 0), degree(n, 0);
  {
    std::vector<std::vector<std::size_t>> nbrs(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i != j && net.adjacent(i, j)) nbrs[i].push_back(j);
      }
    }
    for (std::size_t v = 0; v < n; ++v) {
      const auto& nb = nbrs[v];
      degree[v] = nb.size();
      for (std::size_t a = 0; a < nb.size(); ++a) {
        for (std::size_t b = a + 1; b < nb.size(); ++b) weight[v] += net.adjacent(nb[a], nb[b]) ? 1 : 0;
      }
    }
  }

  auto run = [&](std::size_t r) {
    Rng rng(seed + r);
    std::vector<std::size_t> pos(n);
    std::vector<std::size_t> size(K, 0);
    if (r % 2 == 0) {
      for (std::size_t v = 0; v < n; ++v) {
        pos[v] = frozen_pos[v] >= 0 ? static_cast<std::size_t>(frozen_pos[v]) : uniform_index(rng, K);
      }
    } else {
      // Odd restarts: each open core starts from the closed neighbourhood of a
      // random vertex weighted by its triangle count (degree when no triangles
      // are left); the rest starts in the semi-periphery.
      const std::size_t unset = K;
      for (std::size_t v = 0; v < n; ++v) pos[v] = frozen_pos[v] >= 0 ? static_cast<std::size_t>(frozen_pos[v]) : unset;
      for (std::size_t c = 0; c < k; ++c) {
        if (frozen_core[c]) continue;
        std::uint64_t total = 0;
        const bool any = std::any_of(free_vertices.begin(), free_vertices.end(),
                                     [&](std::size_t v) { return pos[v] == unset && weight[v] > 0; });
        auto w_of = [&](std::size_t v) -> std::uint64_t { return any ? weight[v] : degree[v] + 1; };
        for (auto v : free_vertices) total += pos[v] == unset ? w_of(v) : 0;
        if (total == 0) break;
        std::uint64_t pick = uniform_index(rng, total);
        std::size_t seed_vertex = free_vertices.front();
        for (auto v : free_vertices) {
          if (pos[v] != unset) continue;
          const std::uint64_t w = w_of(v);
          if (pick < w) {
            seed_vertex = v;
            break;
          }
          pick -= w;
        }
        pos[seed_vertex] = c;
        for (auto v : free_vertices) {
          if (pos[v] == unset && net.adjacent(seed_vertex, v)) pos[v] = c;
        }
      }
      for (auto v : free_vertices) {
        if (pos[v] == unset) pos[v] = img.has_semi_periphery() ? k : uniform_index(rng, K);
      }
    }
    for (std::size_t v = 0; v < n; ++v) ++size[pos[v]];
    for (std::size_t c = 0; c < k; ++c) {
      if (size[c] > 0) continue;
      std::vector<std::size_t> donors;
      for (auto v : free_vertices) {
        if (pos[v] >= k || size[pos[v]] > 1) donors.push_back(v);
      }
      const std::size_t v = donors[uniform_index(rng, donors.size())];
      --size[pos[v]];
      pos[v] = c;
      ++size[c];
    }
    Search search(net, img, frozen_pos);
    search.reset(std::move(pos));
    while (search.step()) {
    }
    RestartResult result{search.total(), search.positions()};
    canonicalize(result.pos, k, frozen_core);
    return result;
  };

  std::vector<RestartResult> results(restarts);
  const std::size_t workers = std::max<std::size_t>(1, std::min(threads, restarts));
  if (workers == 1) {
    for (std::size_t r = 0; r < restarts; ++r) results[r] = run(r);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t r = next++; r < restarts; r = next++) results[r] = run(r);
      });
    }
  }

  const auto& best = *std::min_element(results.begin(), results.end(), [](const auto& a, const auto& b) {
    return std::tie(a.value, a.pos) < std::tie(b.value, b.pos);
  });

  BlockmodelFit fit;
  fit.partition.vertices = net.vertices();
  fit.partition.cluster.resize(n);
  for (std::size_t v = 0; v < n; ++v) {
    const int id = static_cast<int>(best.pos[v]) + 1;  // cores 1..k, semi-periphery k+1
    fit.partition.cluster[v] = id;
    fit.partition.roles[id] =
        best.pos[v] < k ? Role{RoleKind::core, id} : Role{RoleKind::semi_periphery, 0};
  }
  auto check = criterion(net, fit.partition, img);
  if (check.value != static_cast<std::uint64_t>(best.value)) {
    throw std::logic_error("local search bookkeeping diverged from the criterion");
  }
  fit.criterion_value = check.value;
  fit.block_inconsistencies = std::move(check.blocks);
  fit.restarts_run = restarts;
  fit.seed = seed;
  return fit;
}

std::size_t default_restarts(std::size_t n) { return n <= 300 ? 50 : 20; }

BlockmodelFit fit_blockmodel(const Network& net, std::size_t k, const FitOptions& opts) {
  if (k < 1) throw Error(ErrorKind::invalid_argument, "k must be at least 1");
  ImageSpec img = opts.image ? *opts.image : default_image(k);
  if (img.k_cores() != k) throw Error(ErrorKind::invalid_argument, "image core count differs from k");

  auto stripped = strip_periphery(net);
  if (stripped.reduced.size() == 0) {
    throw Error(ErrorKind::infeasible, fmt::format("no tied vertices to form {} core(s)", k));
  }

  std::vector<FrozenGroup> frozen;
  if (opts.freeze_cliques) {
    auto groups = extract_exact_cores(stripped.reduced, opts.min_clique_size);
    std::stable_sort(groups.begin(), groups.end(),
                     [](const auto& a, const auto& b) { return a.size() > b.size(); });
    for (std::size_t i = 0; i < groups.size() && i < k; ++i) {
      frozen.push_back({groups[i], static_cast<int>(i + 1)});
    }
  }

  const std::size_t restarts = opts.restarts ? opts.restarts : default_restarts(stripped.reduced.size());
  BlockmodelFit reduced_fit = local_search(stripped.reduced, img, frozen, restarts, opts.seed, opts.threads);

  BlockmodelFit fit = reduced_fit;
  fit.partition.vertices = net.vertices();
  fit.partition.cluster.assign(net.size(), 0);
  std::map<std::string, int> reduced_cluster;
  for (std::size_t i = 0; i < reduced_fit.partition.vertices.size(); ++i) {
    reduced_cluster.emplace(reduced_fit.partition.vertices[i], reduced_fit.partition.cluster[i]);
  }
  const int periphery_id = static_cast<int>(k) + 2;
  for (std::size_t v = 0; v < net.size(); ++v) {
    auto it = reduced_cluster.find(net.label(v));
    fit.partition.cluster[v] = it != reduced_cluster.end() ? it->second : periphery_id;
  }
  if (!stripped.periphery.empty()) fit.partition.roles[periphery_id] = Role{RoleKind::periphery, 0};
  return fit;
}

BridgingResult detect_bridging_cores(const Network& net, const Partition& p, double density_threshold) {
  if (!(density_threshold > 0.0 && density_threshold <= 1.0)) {
    throw Error(ErrorKind::invalid_argument, "density threshold must lie in (0, 1]");
  }
  std::map<int, std::vector<std::size_t>> cores;  // core index -> network indices
  for (std::size_t i = 0; i < p.vertices.size(); ++i) {
    const Role& role = p.roles.at(p.cluster[i]);
    if (role.kind != RoleKind::core) continue;
    auto v = net.index_of(p.vertices[i]);
    if (!v) throw Error(ErrorKind::invalid_argument, "vertex '" + p.vertices[i] + "' not in network");
    cores[role.core_index].push_back(*v);
  }
  BridgingResult out;
  std::map<int, int> partners;
  for (auto a = cores.begin(); a != cores.end(); ++a) {
    for (auto b = std::next(a); b != cores.end(); ++b) {
      std::size_t ties = 0;
      for (auto u : a->second) {
        for (auto v : b->second) ties += net.adjacent(u, v);
      }
      const double block_density =
          static_cast<double>(ties) / static_cast<double>(a->second.size() * b->second.size());
      if (block_density >= density_threshold) {
        out.pairs.emplace_back(a->first, b->first);
        ++partners[a->first];
        ++partners[b->first];
      }
    }
  }
  for (auto [core, count] : partners) {
    if (count >= 2) out.bridging_cores.push_back(core);
  }
  return out;
}

BlockmodelSummary summarize_blockmodel(const Partition& p) {
  BlockmodelSummary s;
  s.n = p.vertices.size();
  s.cores = p.core_count();
  std::size_t semi = 0, per = 0, core_members = 0;
  for (auto c : p.cluster) {
    switch (p.roles.at(c).kind) {
      case RoleKind::core: ++core_members; break;
      case RoleKind::semi_periphery: ++semi; break;
      case RoleKind::periphery: ++per; break;
    }
  }
  if (s.n > 0) {
    s.pct_semi_periphery = 100.0 * static_cast<double>(semi) / static_cast<double>(s.n);
    s.pct_periphery = 100.0 * static_cast<double>(per) / static_cast<double>(s.n);
  }
  if (s.cores > 0) {
    s.avg_core_size = static_cast<double>(core_members) / static_cast<double>(s.cores);
    s.avg_core_size_defined = true;
  }
  return s;
}

nlohmann::json fit_to_json(const BlockmodelFit& fit) {
  const auto& p = fit.partition;
  nlohmann::json clusters = nlohmann::json::array();
  for (const auto& [id, role] : p.roles) {
    auto members = p.members(id);
    if (members.empty()) continue;
    nlohmann::json entry{{"id", id}, {"role", role_name(role.kind)}, {"members", members}};
    if (role.kind == RoleKind::core) entry["core_index"] = role.core_index;
    clusters.push_back(std::move(entry));
  }
  return {{"clusters", std::move(clusters)},
          {"criterion", fit.criterion_value},
          {"seed", fit.seed},
          {"restarts", fit.restarts_run}};
}

Partition partition_from_json(const nlohmann::json& doc) {
  Partition p;
  try {
    for (const auto& entry : doc.at("clusters")) {
      const int id = entry.at("id").get<int>();
      const auto role = entry.at("role").get<std::string>();
      if (role == "core") {
        p.roles[id] = Role{RoleKind::core, entry.value("core_index", id)};
      } else if (role == "semi-periphery") {
        p.roles[id] = Role{RoleKind::semi_periphery, 0};
      } else if (role == "periphery") {
        p.roles[id] = Role{RoleKind::periphery, 0};
      } else {
        throw Error(ErrorKind::parse, "unknown role '" + role + "'");
      }
      for (const auto& m : entry.at("members")) {
        p.vertices.push_back(m.get<std::string>());
        p.cluster.push_back(id);
      }
    }
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorKind::parse, std::string("partition JSON: ") + ex.what());
  }
  p.validate();
  return p;
}

std::string blockmodel_matrix_csv(const Network& net, const Partition& p) {
  std::vector<std::pair<int, std::size_t>> order;  // (cluster, network index)
  for (std::size_t v = 0; v < net.size(); ++v) {
    auto c = p.cluster_of(net.label(v));
    if (!c) throw Error(ErrorKind::invalid_argument, "vertex '" + net.label(v) + "' missing from partition");
    order.emplace_back(*c, v);
  }
  std::stable_sort(order.begin(), order.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::ostringstream out;
  out << "cluster,vertex";
  for (const auto& [c, v] : order) out << ',' << net.label(v);
  out << '\n';
  for (const auto& [c, v] : order) {
    out << c << ',' << net.label(v);
    for (const auto& [c2, u] : order) out << ',' << (net.adjacent(v, u) ? 1 : 0);
    out << '\n';
  }
  return out.str();
}

}  // namespace blockstab
