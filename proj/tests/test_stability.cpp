#include <doctest.h>

#include <algorithm>
#include <set>

#include "blockstab/error.hpp"
#include "blockstab/stability.hpp"
#include "support/synthetic.hpp"

using namespace blockstab;

namespace {

std::span<const int> sp(const std::vector<int>& v) { return {v.data(), v.size()}; }

// Pair-count ARI with E[a] = (a+b)(a+c)/total.
double ari_oracle(const synth::BrutePairs& p) {
  const double n = static_cast<double>(p.a + p.b + p.c + p.d);
  const double su = static_cast<double>(p.a + p.b), sv = static_cast<double>(p.a + p.c);
  const double e = su * sv / n;
  return (static_cast<double>(p.a) - e) / (0.5 * (su + sv) - e);
}

Partition cores_partition(const std::vector<std::pair<std::string, int>>& rows) {
  Partition p;
  for (const auto& [v, c] : rows) {
    p.vertices.push_back(v);
    p.cluster.push_back(c);
    p.roles[c] = c > 0 ? Role{RoleKind::core, c} : Role{RoleKind::semi_periphery, 0};
  }
  return p;
}

}  // namespace

TEST_CASE("align splits units into turnover sets") {
  const auto tp = align(FlatPartition{{"A", 1}, {"B", 1}}, FlatPartition{{"B", 1}, {"C", 2}});
  CHECK(tp.newcomers == std::vector<std::string>{"C"});
  CHECK(tp.departures == std::vector<std::string>{"A"});
  CHECK(tp.persistent == std::vector<std::string>{"B"});

  const auto same = align(FlatPartition{{"A", 1}}, FlatPartition{{"A", 3}});
  CHECK(same.newcomers.empty());
  CHECK(same.departures.empty());

  Rng rng(6);
  for (int rep = 0; rep < 20; ++rep) {
    FlatPartition u, v;
    for (std::size_t i = 0; i < 30; ++i) {
      if (synth::uniform_index(rng, 3)) u[synth::vid(i)] = 1;
      if (synth::uniform_index(rng, 3)) v[synth::vid(i)] = 1;
    }
    const auto t = align(u, v);
    std::vector<std::string> both, only_u, only_v;
    for (const auto& [k, _] : u) (v.count(k) ? both : only_u).push_back(k);
    for (const auto& [k, _] : v)
      if (!u.count(k)) only_v.push_back(k);
    CHECK(t.persistent == both);
    CHECK(t.departures == only_u);
    CHECK(t.newcomers == only_v);
  }
}

TEST_CASE("core-scoped alignment routes role changes through turnover") {
  const auto p1 = cores_partition({{"a", 1}, {"b", 1}, {"c", 0}});
  const auto p2 = cores_partition({{"a", 1}, {"c", 1}, {"b", 0}});
  const auto tp = align(p1, p2, Scope::cores_only);
  CHECK(tp.persistent == std::vector<std::string>{"a"});
  CHECK(tp.departures == std::vector<std::string>{"b"});
  CHECK(tp.newcomers == std::vector<std::string>{"c"});
  const auto full = align(p1, p2, Scope::full);
  CHECK(full.persistent.size() == 3);
}

TEST_CASE("pair counts on the worked example and edge cases") {
  const std::vector<int> u{0, 0, 0, 1, 1}, v{0, 0, 1, 1, 1};
  CHECK(pair_counts(sp(u), sp(v)) == PairCounts{2, 2, 2, 4});
  const auto same = pair_counts(sp(u), sp(u));
  CHECK(same.b == 0);
  CHECK(same.c == 0);
  const std::vector<int> singles{0, 1, 2, 3};
  CHECK(pair_counts(sp(singles), sp(singles)) == PairCounts{0, 0, 0, 6});
  CHECK_THROWS_AS(pair_counts(FlatPartition{{"a", 1}}, FlatPartition{{"b", 1}}), Error);
}

TEST_CASE("contingency pair counts equal enumeration") {
  Rng rng(10);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 1 + synth::uniform_index(rng, 60);
    const auto u = synth::random_labels(n, 1 + synth::uniform_index(rng, n), rng);
    const auto v = synth::random_labels(n, 1 + synth::uniform_index(rng, n), rng);
    const auto pc = pair_counts(sp(u), sp(v));
    const auto bf = synth::brute_pair_counts(u, v);
    CHECK(pc == PairCounts{bf.a, bf.b, bf.c, bf.d});
    CHECK(pc.total() == n * (n - 1) / 2);
    if (pc.total() == 0) continue;
    CHECK(*rand_index(pc) >= 0.0);
    CHECK(*rand_index(pc) <= 1.0);
    const auto swapped = pair_counts(sp(v), sp(u));
    CHECK(wallace_split(pc) == wallace_merge(swapped));
  }
}

TEST_CASE("rand and wallace values") {
  const PairCounts ex{2, 2, 2, 4};
  CHECK(*rand_index(ex) == doctest::Approx(0.6));
  CHECK(*wallace_split(ex) == doctest::Approx(0.5));
  CHECK(*wallace_merge(ex) == doctest::Approx(0.5));
  CHECK(*rand_index({0, 3, 0, 0}) == 0.0);
  const PairCounts split{2, 4, 0, 0};
  CHECK(*wallace_split(split) == doctest::Approx(1.0 / 3.0));
  CHECK(*wallace_merge(split) == 1.0);
  CHECK_FALSE(rand_index({0, 0, 0, 0}).has_value());
  CHECK_FALSE(wallace_split({0, 0, 1, 2}).has_value());
  CHECK_FALSE(wallace_merge({0, 1, 0, 2}).has_value());
}

TEST_CASE("adjusted rand") {
  const std::vector<int> u{0, 0, 0, 1, 1}, v{0, 0, 1, 1, 1};
  CHECK(adjusted_rand(sp(u), sp(v)) == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
  CHECK(adjusted_rand(sp(u), sp(u)) == doctest::Approx(1.0));
  const std::vector<int> one{0, 0, 0}, singles{0, 1, 2};
  CHECK(adjusted_rand(sp(one), sp(one)) == 1.0);
  CHECK(adjusted_rand(sp(singles), sp(singles)) == 1.0);
  CHECK(adjusted_rand(sp(one), sp(singles)) == 0.0);

  Rng rng(11);
  double mean = 0.0;
  for (int rep = 0; rep < 1000; ++rep) {
    const auto a = synth::labels_with_sizes({5, 5, 10}, rng);
    const auto b = synth::labels_with_sizes({8, 12}, rng);
    const double ari = adjusted_rand(sp(a), sp(b));
    mean += ari / 1000.0;
    if (rep < 50) {
      CHECK(ari == doctest::Approx(ari_oracle(synth::brute_pair_counts(a, b))));
      CHECK(ari == doctest::Approx(adjusted_rand(sp(b), sp(a))));
      auto relabeled = a;
      for (auto& x : relabeled) x = 7 - x;
      CHECK(ari == doctest::Approx(adjusted_rand(sp(relabeled), sp(b))));
    }
  }
  CHECK(std::abs(mean) < 0.02);
}

TEST_CASE("adjusted wallace matches the pair-count expectation") {
  Rng rng(13);
  for (int rep = 0; rep < 30; ++rep) {
    const auto a = synth::random_labels(25, 3, rng);
    const auto b = synth::random_labels(25, 4, rng);
    const auto p = synth::brute_pair_counts(a, b);
    const double total = static_cast<double>(p.a + p.b + p.c + p.d);
    const double su = static_cast<double>(p.a + p.b), sv = static_cast<double>(p.a + p.c);
    const double ea = su * sv / total;
    CHECK(*adjusted_wallace_split(sp(a), sp(b)) == doctest::Approx((static_cast<double>(p.a) - ea) / (su - ea)));
    CHECK(*adjusted_wallace_merge(sp(a), sp(b)) == doctest::Approx((static_cast<double>(p.a) - ea) / (sv - ea)));
  }
}

TEST_CASE("modified partitions") {
  TemporalPair plain = align(FlatPartition{{"a", 1}, {"b", 1}, {"c", 2}}, FlatPartition{{"a", 1}, {"b", 2}, {"c", 2}});
  for (auto mode : {TurnoverMode::both, TurnoverMode::newcomers_only, TurnoverMode::departures_only}) {
    const auto m = modified_partitions(plain, mode);
    CHECK(m.u_prime == std::vector<int>{1, 1, 2});
    CHECK(m.v_prime == std::vector<int>{1, 2, 2});
  }

  const auto tp = align(FlatPartition{{"a", 1}, {"b", 1}, {"d", 2}}, FlatPartition{{"a", 1}, {"b", 1}, {"x", 1}});
  const auto nm = modified_partitions(tp, TurnoverMode::newcomers_only);
  CHECK(nm.units == std::vector<std::string>{"a", "b", "x"});
  CHECK(nm.u_prime[2] == nm.u_extra);
  CHECK(nm.v_prime[2] == 1);
  CHECK(nm.u_extra > 2);

  const auto both = modified_partitions(tp, TurnoverMode::both);
  CHECK(both.units.size() == 4);
  // Brute force over U', V'.
  FlatPartition up, vp;
  for (std::size_t i = 0; i < both.units.size(); ++i) {
    up[both.units[i]] = both.u_prime[i];
    vp[both.units[i]] = both.v_prime[i];
  }
  CHECK(up.at("d") == 2);
  CHECK(vp.at("d") == both.v_extra);
  CHECK(up.at("x") == both.u_extra);
  const auto bf = synth::brute_pair_counts(both.u_prime, both.v_prime);
  CHECK(pair_counts(up, vp) == PairCounts{bf.a, bf.b, bf.c, bf.d});
}

TEST_CASE("monte carlo adjustment") {
  const std::vector<int> u{0, 0, 1, 1, 2, 2}, v{0, 0, 1, 1, 2, 2};
  CHECK(mc_adjust(rand_index, u, v, 200, 1).value == 1.0);

  Rng rng(14);
  const auto a = synth::random_labels(30, 3, rng);
  const auto b = synth::random_labels(30, 4, rng);
  const auto m1 = mc_adjust(wallace_split, a, b, 500, 9);
  const auto m2 = mc_adjust(wallace_split, a, b, 500, 9);
  CHECK(m1.value == m2.value);
  CHECK(m1.value == doctest::Approx((m1.raw - m1.expected) / (1.0 - m1.expected)));
  auto relabeled = a;
  for (auto& x : relabeled) x += 10;
  CHECK(mc_adjust(wallace_split, relabeled, b, 500, 9).value == doctest::Approx(m1.value));

  const std::vector<int> one{0, 0, 0}, singles{0, 1, 2};
  CHECK_THROWS_AS(mc_adjust(wallace_split, singles, one, 50, 1), Error);
  CHECK_THROWS_AS(mc_adjust(rand_index, one, one, 50, 1), Error);
}

TEST_CASE("pairwise summation") {
  std::vector<double> v(1001, 0.1);
  CHECK(pairwise_sum(v) == doctest::Approx(100.1));
  CHECK(pairwise_sum({}) == 0.0);
}

TEST_CASE("stability report") {
  const FlatPartition p{{"a", 1}, {"b", 1}, {"c", 2}, {"d", 2}, {"e", 3}, {"f", 3}};
  const auto same = stability_report(align(p, p), 100, 1);
  for (const auto& v : same.indices) {
    REQUIRE(v.adjusted.has_value());
    CHECK(*v.adjusted == doctest::Approx(1.0));
  }

  // One pure split plus one departure, recomputed from first principles.
  const FlatPartition first{{"a", 1}, {"b", 1}, {"c", 1}, {"d", 1}, {"e", 2}, {"f", 2}, {"g", 2}};
  const FlatPartition second{{"a", 1}, {"b", 1}, {"c", 3}, {"d", 3}, {"e", 2}, {"f", 2}};
  const auto tp = align(first, second);
  REQUIRE(tp.departures == std::vector<std::string>{"g"});
  const auto r = stability_report(tp, 2000, 3);
  const std::vector<int> u{1, 1, 1, 1, 2, 2}, v{1, 1, 3, 3, 2, 2};
  const auto pc = synth::brute_pair_counts(u, v);
  CHECK(pc.a == 3);
  CHECK(pc.b == 4);
  CHECK(pc.c == 0);
  CHECK(*r.indices[0].adjusted == doctest::Approx(ari_oracle(pc)));
  CHECK(*r.indices[1].raw == doctest::Approx(3.0 / 7.0));
  CHECK(*r.indices[2].raw == doctest::Approx(1.0));
  // No newcomers: variant 1 raw indices equal the persistent ones.
  CHECK(*r.indices[4].raw == doctest::Approx(3.0 / 7.0));
  // Variant 2 puts g in the departure cluster of V'.
  const std::vector<int> u2{1, 1, 1, 1, 2, 2, 2}, v2{1, 1, 3, 3, 2, 2, 9};
  const auto pc2 = synth::brute_pair_counts(u2, v2);
  CHECK(*r.indices[7].raw == doctest::Approx(static_cast<double>(pc2.a) / static_cast<double>(pc2.a + pc2.b)));
  CHECK(r.departures == 1);
  CHECK(r.replicates == 2000);

  const auto j = report_to_json(r);
  CHECK(j.at("indices").at("MAWIS2").at("adjusted").get<double>() == doctest::Approx(*r.indices[7].adjusted));
  CHECK(format_index(std::nullopt).empty());
  CHECK(format_index(0.123456) == "0.1235");
}
