#include "blockstab/stability.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <fmt/format.h>

#include "blockstab/error.hpp"
#include "blockstab/rng.hpp"

namespace blockstab {

FlatPartition flatten(const Partition& p, Scope scope) {
  FlatPartition out;
  for (std::size_t i = 0; i < p.vertices.size(); ++i) {
    if (scope == Scope::full || p.in_core(i)) out.emplace(p.vertices[i], p.cluster[i]);
  }
  return out;
}

TemporalPair align(const FlatPartition& first, const FlatPartition& second) {
  TemporalPair tp{first, second, {}, {}, {}};
  for (const auto& [unit, label] : first) {
    (second.count(unit) ? tp.persistent : tp.departures).push_back(unit);
  }
  for (const auto& [unit, label] : second) {
    if (!first.count(unit)) tp.newcomers.push_back(unit);
  }
  return tp;
}

TemporalPair align(const Partition& first, const Partition& second, Scope scope) {
  return align(flatten(first, scope), flatten(second, scope));
}

namespace {

std::uint64_t choose2(std::uint64_t x) { return x * (x - (x > 0)) / 2; }

// Labels renumbered to 0..r-1 in order of first appearance.
std::vector<std::uint32_t> dense_labels(std::span<const int> labels, std::size_t& count) {
  std::map<int, std::uint32_t> ids;
  std::vector<std::uint32_t> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    out[i] = ids.try_emplace(labels[i], static_cast<std::uint32_t>(ids.size())).first->second;
  }
  count = ids.size();
  return out;
}

struct Marginals {
  std::uint64_t together = 0;  // sum over cells of C(n_ij, 2)
  std::uint64_t rows = 0;      // sum over rows of C(a_i, 2)
  std::uint64_t cols = 0;      // sum over columns of C(b_j, 2)
  std::uint64_t n = 0;
};

// Contingency statistics for dense labels; `cells` is scratch of size r*c.
Marginals contingency(std::span<const std::uint32_t> u, std::span<const std::uint32_t> v, std::size_t r,
                      std::size_t c, std::vector<std::uint32_t>& cells) {
  cells.assign(r * c, 0);
  std::vector<std::uint64_t> row(r, 0), col(c, 0);
  for (std::size_t i = 0; i < u.size(); ++i) {
    ++cells[u[i] * c + v[i]];
    ++row[u[i]];
    ++col[v[i]];
  }
  Marginals m;
  m.n = u.size();
  for (auto x : cells) m.together += choose2(x);
  for (auto x : row) m.rows += choose2(x);
  for (auto x : col) m.cols += choose2(x);
  return m;
}

Marginals contingency(std::span<const int> u, std::span<const int> v) {
  if (u.size() != v.size()) throw Error(ErrorKind::invalid_argument, "partitions cover different unit counts");
  std::size_t r = 0, c = 0;
  auto du = dense_labels(u, r);
  auto dv = dense_labels(v, c);
  std::vector<std::uint32_t> cells;
  return contingency(du, dv, r, c, cells);
}

PairCounts from_marginals(const Marginals& m) {
  PairCounts pc;
  pc.a = m.together;
  pc.b = m.rows - m.together;
  pc.c = m.cols - m.together;
  pc.d = choose2(m.n) - pc.a - pc.b - pc.c;
  return pc;
}

std::pair<std::vector<int>, std::vector<int>> aligned(const FlatPartition& u, const FlatPartition& v) {
  if (u.size() != v.size()) throw Error(ErrorKind::invalid_argument, "partitions cover different unit sets");
  std::pair<std::vector<int>, std::vector<int>> out;
  auto it = v.begin();
  for (const auto& [unit, label] : u) {
    if (it->first != unit) throw Error(ErrorKind::invalid_argument, "partitions cover different unit sets");
    out.first.push_back(label);
    out.second.push_back(it->second);
    ++it;
  }
  return out;
}

std::optional<double> ratio(double num, double den) {
  if (den == 0.0) return std::nullopt;
  return num / den;
}

}  // namespace

PairCounts pair_counts(std::span<const int> u, std::span<const int> v) { return from_marginals(contingency(u, v)); }

PairCounts pair_counts(const FlatPartition& u, const FlatPartition& v) {
  auto [lu, lv] = aligned(u, v);
  return pair_counts(lu, lv);
}

std::optional<double> rand_index(const PairCounts& pc) {
  return ratio(static_cast<double>(pc.a + pc.d), static_cast<double>(pc.total()));
}

std::optional<double> wallace_split(const PairCounts& pc) {
  return ratio(static_cast<double>(pc.a), static_cast<double>(pc.a + pc.b));
}

std::optional<double> wallace_merge(const PairCounts& pc) {
  return ratio(static_cast<double>(pc.a), static_cast<double>(pc.a + pc.c));
}

double adjusted_rand(std::span<const int> u, std::span<const int> v) {
  const auto m = contingency(u, v);
  if (m.n < 2) throw Error(ErrorKind::undefined_value, "adjusted Rand index needs at least two units");
  const double expected = static_cast<double>(m.rows) * static_cast<double>(m.cols) / static_cast<double>(choose2(m.n));
  const double maximum = 0.5 * static_cast<double>(m.rows + m.cols);
  const double den = maximum - expected;
  if (den == 0.0) {
    if (m.together == m.rows && m.together == m.cols) return 1.0;
    throw Error(ErrorKind::undefined_value, "adjusted Rand index has a zero denominator");
  }
  return (static_cast<double>(m.together) - expected) / den;
}

double adjusted_rand(const FlatPartition& u, const FlatPartition& v) {
  auto [lu, lv] = aligned(u, v);
  return adjusted_rand(lu, lv);
}

namespace {

std::optional<double> adjusted_wallace(std::span<const int> u, std::span<const int> v, bool split) {
  const auto m = contingency(u, v);
  if (m.n < 2) return std::nullopt;
  const double expected = static_cast<double>(m.rows) * static_cast<double>(m.cols) / static_cast<double>(choose2(m.n));
  const double base = static_cast<double>(split ? m.rows : m.cols);
  return ratio(static_cast<double>(m.together) - expected, base - expected);
}

}  // namespace

std::optional<double> adjusted_wallace_split(std::span<const int> u, std::span<const int> v) {
  return adjusted_wallace(u, v, true);
}

std::optional<double> adjusted_wallace_merge(std::span<const int> u, std::span<const int> v) {
  return adjusted_wallace(u, v, false);
}

ModifiedPartitionPair modified_partitions(const TemporalPair& tp, TurnoverMode mode) {
  ModifiedPartitionPair out;
  out.mode = mode;
  int max_first = 0, max_second = 0;
  for (const auto& [unit, label] : tp.first) max_first = std::max(max_first, label);
  for (const auto& [unit, label] : tp.second) max_second = std::max(max_second, label);
  out.u_extra = max_first + 1;
  out.v_extra = max_second + 1;

  std::map<std::string, std::pair<int, int>> rows;
  for (const auto& unit : tp.persistent) rows[unit] = {tp.first.at(unit), tp.second.at(unit)};
  if (mode != TurnoverMode::departures_only) {
    for (const auto& unit : tp.newcomers) rows[unit] = {out.u_extra, tp.second.at(unit)};
  }
  if (mode != TurnoverMode::newcomers_only) {
    for (const auto& unit : tp.departures) rows[unit] = {tp.first.at(unit), out.v_extra};
  }
  for (const auto& [unit, labels] : rows) {
    out.units.push_back(unit);
    out.u_prime.push_back(labels.first);
    out.v_prime.push_back(labels.second);
  }
  return out;
}

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double x : values) s += x;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

McAdjustment mc_adjust(PairIndex index, std::span<const int> u, std::span<const int> v, std::size_t replicates,
                       std::uint64_t seed) {
  if (replicates == 0) throw Error(ErrorKind::invalid_argument, "replicates must be positive");
  std::size_t r = 0, c = 0;
  auto du = dense_labels(u, r);
  auto dv = dense_labels(v, c);
  if (du.size() != dv.size()) throw Error(ErrorKind::invalid_argument, "partitions cover different unit counts");
  std::vector<std::uint32_t> cells;

  const auto raw = index(from_marginals(contingency(du, dv, r, c, cells)));
  if (!raw) throw Error(ErrorKind::undefined_value, "index undefined for the observed partitions");

  std::vector<double> values;
  values.reserve(replicates);
  McAdjustment out;
  out.raw = *raw;
  auto pu = du, pv = dv;
  for (std::size_t rep = 0; rep < replicates; ++rep) {
    Rng rng(seed + rep);
    pu = du;
    pv = dv;
    shuffle<std::uint32_t>(pu, rng);
    shuffle<std::uint32_t>(pv, rng);
    if (auto value = index(from_marginals(contingency(pu, pv, r, c, cells)))) {
      values.push_back(*value);
    } else {
      ++out.replicates_skipped;
    }
  }
  out.replicates_used = values.size();
  if (values.empty()) throw Error(ErrorKind::undefined_value, "index undefined in every replicate");
  out.expected = pairwise_sum(values) / static_cast<double>(values.size());
  if (out.expected == 1.0) throw Error(ErrorKind::undefined_value, "expected index value is 1");
  out.value = (out.raw - out.expected) / (1.0 - out.expected);
  return out;
}

namespace {

IndexValue mc_value(PairIndex index, const PairCounts& counts, std::span<const int> u, std::span<const int> v,
                    std::size_t replicates, std::uint64_t seed) {
  IndexValue out{std::nullopt, index(counts)};
  try {
    out.adjusted = mc_adjust(index, u, v, replicates, seed).value;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::undefined_value) throw;
  }
  return out;
}

}  // namespace

StabilityReport stability_report(const TemporalPair& tp, std::size_t replicates, std::uint64_t seed) {
  StabilityReport rep;
  rep.replicates = replicates;
  rep.seed = seed;
  rep.persistent_units = tp.persistent.size();
  rep.newcomers = tp.newcomers.size();
  rep.departures = tp.departures.size();

  std::vector<int> u, v;
  for (const auto& unit : tp.persistent) {
    u.push_back(tp.first.at(unit));
    v.push_back(tp.second.at(unit));
  }
  rep.persistent_counts = pair_counts(u, v);
  try {
    rep.indices[0].adjusted = adjusted_rand(u, v);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::undefined_value) throw;
  }
  rep.indices[0].raw = rand_index(rep.persistent_counts);
  rep.indices[1] = {adjusted_wallace_split(u, v), wallace_split(rep.persistent_counts)};
  rep.indices[2] = {adjusted_wallace_merge(u, v), wallace_merge(rep.persistent_counts)};

  const std::array<PairIndex, 3> family = {rand_index, wallace_split, wallace_merge};
  const std::array<TurnoverMode, 2> modes = {TurnoverMode::newcomers_only, TurnoverMode::departures_only};
  for (std::size_t variant = 0; variant < 2; ++variant) {
    const auto mp = modified_partitions(tp, modes[variant]);
    const auto counts = pair_counts(mp.u_prime, mp.v_prime);
    (variant == 0 ? rep.newcomer_counts : rep.departure_counts) = counts;
    for (std::size_t i = 0; i < 3; ++i) {
      rep.indices[3 + 3 * variant + i] = mc_value(family[i], counts, mp.u_prime, mp.v_prime, replicates, seed);
    }
  }
  return rep;
}

std::string format_index(const std::optional<double>& value) {
  return value ? fmt::format("{:.4f}", *value) : std::string{};
}

nlohmann::json report_to_json(const StabilityReport& report) {
  auto opt = [](const std::optional<double>& x) { return x ? nlohmann::json(*x) : nlohmann::json(nullptr); };
  auto counts = [](const PairCounts& pc) {
    return nlohmann::json{{"a", pc.a}, {"b", pc.b}, {"c", pc.c}, {"d", pc.d}};
  };
  nlohmann::json indices = nlohmann::json::object();
  for (std::size_t i = 0; i < report.indices.size(); ++i) {
    indices[std::string(StabilityReport::kNames[i])] = {{"adjusted", opt(report.indices[i].adjusted)},
                                                        {"raw", opt(report.indices[i].raw)}};
  }
  return {{"indices", std::move(indices)},
          {"pair_counts",
           {{"persistent", counts(report.persistent_counts)},
            {"newcomers", counts(report.newcomer_counts)},
            {"departures", counts(report.departure_counts)}}},
          {"units",
           {{"persistent", report.persistent_units},
            {"newcomers", report.newcomers},
            {"departures", report.departures}}},
          {"monte_carlo", {{"replicates", report.replicates}, {"seed", report.seed}}}};
}

}  // namespace blockstab
