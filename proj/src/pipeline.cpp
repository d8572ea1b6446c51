#include "blockstab/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <thread>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include "blockstab/analysis.hpp"
#include "blockstab/blockmodel.hpp"
#include "blockstab/error.hpp"
#include "blockstab/transitions.hpp"

namespace blockstab {

namespace fs = std::filesystem;
using nlohmann::json;

KSpec parse_k(const std::string& text) {
  auto to_size = [&](const std::string& s) {
    std::size_t used = 0;
    unsigned long v = 0;
    try {
      v = std::stoul(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size() || s.empty() || v == 0) throw Error(ErrorKind::invalid_argument, "invalid k '" + text + "'");
    return static_cast<std::size_t>(v);
  };
  const std::string prefix = "scan:";
  if (text.rfind(prefix, 0) == 0) {
    const auto body = text.substr(prefix.size());
    const auto dots = body.find("..");
    if (dots == std::string::npos) throw Error(ErrorKind::invalid_argument, "invalid k scan '" + text + "'");
    KSpec k{to_size(body.substr(0, dots)), to_size(body.substr(dots + 2))};
    if (k.min > k.max) throw Error(ErrorKind::invalid_argument, "empty k scan '" + text + "'");
    return k;
  }
  const auto v = to_size(text);
  return {v, v};
}

PeriodSpec parse_period(const std::string& label, const std::string& text) {
  auto to_year = [&](const std::string& s) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size() || s.empty()) throw Error(ErrorKind::invalid_argument, "invalid period '" + text + "'");
    return v;
  };
  const auto dots = text.find("..");
  if (dots == std::string::npos) {
    const int y = to_year(text);
    return {label, y, y};
  }
  PeriodSpec p{label, to_year(text.substr(0, dots)), to_year(text.substr(dots + 2))};
  if (p.start_year > p.end_year) throw Error(ErrorKind::invalid_argument, "period '" + label + "' ends before it starts");
  return p;
}

KSpec RunConfig::k_for(const std::string& discipline) const {
  auto it = k_by_discipline.find(discipline);
  return it == k_by_discipline.end() ? default_k : it->second;
}

RunConfig load_config(const fs::path& path) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(path.string(), tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw Error(ErrorKind::parse, std::string("config: ") + e.what());
  }
  RunConfig c;
  const fs::path base = path.parent_path();
  auto resolve = [&](const std::string& p) { return fs::path(p).is_absolute() ? fs::path(p) : base / p; };
  auto get = [&](const std::string& key) { return tree.get_optional<std::string>(key); };
  auto number = [&](const std::string& key, auto fallback) {
    using T = decltype(fallback);
    auto text = get(key);
    if (!text) return fallback;
    try {
      std::size_t used = 0;
      T value{};
      if constexpr (std::is_floating_point_v<T>) {
        value = std::stod(*text, &used);
      } else {
        value = static_cast<T>(std::stoull(*text, &used));
      }
      if (used != text->size()) throw std::invalid_argument(key);
      return value;
    } catch (const std::exception&) {
      throw Error(ErrorKind::parse, "config: invalid value for '" + key + "'");
    }
  };
  auto flag = [&](const std::string& key, bool fallback) {
    auto text = get(key);
    if (!text) return fallback;
    if (*text == "true" || *text == "yes" || *text == "1") return true;
    if (*text == "false" || *text == "no" || *text == "0") return false;
    throw Error(ErrorKind::parse, "config: invalid flag for '" + key + "'");
  };

  if (auto v = get("input")) c.input = resolve(*v);
  if (auto v = get("out")) c.out_dir = resolve(*v);
  if (auto v = get("roster")) c.roster = resolve(*v);
  c.seed = number("seed", c.seed);
  c.restarts = number("restarts", c.restarts);
  c.replicates = number("replicates", c.replicates);
  c.workers = number("workers", c.workers);
  c.freeze_cliques = flag("freeze_cliques", c.freeze_cliques);
  c.refit_bridging = flag("refit_bridging", c.refit_bridging);
  if (auto v = get("scope")) {
    if (*v == "cores_only") {
      c.scope = Scope::cores_only;
    } else if (*v == "full") {
      c.scope = Scope::full;
    } else {
      throw Error(ErrorKind::parse, "config: scope must be cores_only or full");
    }
  }
  if (auto periods = tree.get_child_optional("periods")) {
    for (const auto& [label, node] : *periods) c.periods.push_back(parse_period(label, node.data()));
  }
  if (auto ks = tree.get_child_optional("k")) {
    for (const auto& [name, node] : *ks) {
      if (name == "default") {
        c.default_k = parse_k(node.data());
      } else {
        c.k_by_discipline[name] = parse_k(node.data());
      }
    }
  }
  c.bridging_density = number("thresholds.bridging_density", c.bridging_density);
  c.transition_share = number("thresholds.transition_share", c.transition_share);
  c.split_min_share = number("thresholds.split_min_share", c.split_min_share);
  if (get("analysis.k")) c.discipline_k = number("analysis.k", std::size_t{0});
  c.k_max = number("analysis.k_max", c.k_max);
  c.gap_references = number("analysis.gap_references", c.gap_references);
  return c;
}

void CommandResult::append(const CommandResult& other) {
  info.insert(info.end(), other.info.begin(), other.info.end());
  warnings.insert(warnings.end(), other.warnings.begin(), other.warnings.end());
  errors.insert(errors.end(), other.errors.begin(), other.errors.end());
}

std::string slug(const std::string& name) {
  std::string out;
  for (unsigned char ch : name) out += std::isalnum(ch) || ch == '-' || ch == '.' ? static_cast<char>(ch) : '_';
  if (out.empty() || out == "." || out == "..") out = "_" + out;
  return out;
}

void write_file_atomic(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::io, "cannot write " + tmp.string());
    out << content;
    if (!out.flush()) throw Error(ErrorKind::io, "cannot write " + tmp.string());
  }
  fs::rename(tmp, path);
}

namespace {

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "missing file " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::parse, path.string() + ": " + e.what());
  }
}

struct DisciplineEntry {
  std::string name;
  std::string field;
  std::vector<std::string> periods;  // labels with a network, in config order
};

struct Index {
  std::vector<PeriodSpec> periods;
  std::vector<DisciplineEntry> disciplines;
};

Index read_index(const RunConfig& config) {
  const auto doc = read_json(config.out_dir / "index.json");
  Index idx;
  for (const auto& p : doc.at("periods")) {
    idx.periods.push_back({p.at("label").get<std::string>(), p.at("start").get<int>(), p.at("end").get<int>()});
  }
  for (const auto& d : doc.at("disciplines")) {
    idx.disciplines.push_back({d.at("name").get<std::string>(), d.at("field").get<std::string>(),
                               d.at("periods").get<std::vector<std::string>>()});
  }
  return idx;
}

fs::path network_path(const RunConfig& c, const std::string& disc, const std::string& period) {
  return c.out_dir / "networks" / slug(disc) / (slug(period) + ".json");
}

fs::path fit_path(const RunConfig& c, const std::string& disc, const std::string& period, const std::string& suffix) {
  return c.out_dir / "fits" / slug(disc) / (slug(period) + suffix);
}

// Runs `task(i)` for i in [0, n) on up to `workers` threads; results keep index order.
CommandResult for_each_parallel(std::size_t n, std::size_t workers,
                                 const std::function<CommandResult(std::size_t)>& task) {
  std::vector<CommandResult> results(n);
  auto guarded = [&](std::size_t i) {
    try {
      results[i] = task(i);
    } catch (const std::exception& e) {
      results[i].errors.push_back(e.what());
    }
  };
  const std::size_t threads = std::max<std::size_t>(1, std::min(workers, n));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) guarded(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) guarded(i);
      });
    }
  }
  CommandResult all;
  for (const auto& r : results) all.append(r);
  return all;
}

std::string f4(double v) { return fmt::format("{:.4f}", v); }

}  // namespace

CommandResult cmd_build(const RunConfig& config) {
  CommandResult result;
  if (config.periods.empty()) throw Error(ErrorKind::invalid_argument, "no periods configured");
  validate_periods(config.periods);
  std::ifstream in(config.input);
  if (!in) throw Error(ErrorKind::io, "cannot open input " + config.input.string());
  const auto records = parse_publications(in);

  std::optional<std::set<std::string>> roster;
  if (config.roster) {
    std::ifstream rf(*config.roster);
    if (!rf) throw Error(ErrorKind::io, "cannot open roster " + config.roster->string());
    roster.emplace();
    std::string line;
    while (std::getline(rf, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) roster->insert(line);
    }
  }

  std::map<std::string, std::vector<PublicationRecord>> by_discipline;
  std::map<std::string, std::string> field_of;
  for (const auto& rec : records) {
    const std::string name = rec.discipline.empty() ? "all" : rec.discipline;
    by_discipline[name].push_back(rec);
    auto [it, inserted] = field_of.try_emplace(name, rec.field);
    if (!inserted && it->second != rec.field && !rec.field.empty()) {
      if (it->second.empty()) {
        it->second = rec.field;
      } else {
        result.warnings.push_back(name + ": conflicting field '" + rec.field + "' ignored");
      }
    }
  }

  json disciplines = json::array();
  for (const auto& [name, recs] : by_discipline) {
    json periods = json::array();
    for (const auto& period : config.periods) {
      try {
        const Network net = build_network(recs, period, roster);
        write_file_atomic(network_path(config, name, period.label), network_to_json(net).dump(1) + "\n");
        const std::string dens = net.size() >= 2 ? f4(density(net)) : std::string("n/a");
        result.info.push_back(fmt::format("{} {}: N={} edges={} density={}", name, period.label, net.size(),
                                          net.edge_count(), dens));
        periods.push_back(period.label);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::empty_network) throw;
        result.warnings.push_back(name + " " + period.label + ": no publications in period, skipped");
      }
    }
    disciplines.push_back({{"name", name}, {"field", field_of[name]}, {"periods", std::move(periods)}});
  }
  json periods = json::array();
  for (const auto& p : config.periods) periods.push_back({{"label", p.label}, {"start", p.start_year}, {"end", p.end_year}});
  write_file_atomic(config.out_dir / "index.json",
                    json{{"periods", std::move(periods)}, {"disciplines", std::move(disciplines)}}.dump(1) + "\n");
  return result;
}

CommandResult cmd_fit(const RunConfig& config) {
  const Index idx = read_index(config);
  std::vector<std::pair<std::string, std::string>> cells;
  for (const auto& d : idx.disciplines) {
    for (const auto& p : d.periods) cells.emplace_back(d.name, p);
  }
  return for_each_parallel(cells.size(), config.workers, [&](std::size_t i) {
    CommandResult r;
    const auto& [disc, period] = cells[i];
    const std::string cell = disc + " " + period;
    Network net;
    try {
      net = network_from_json(read_json(network_path(config, disc, period)));
    } catch (const Error& e) {
      r.errors.push_back(cell + ": " + e.what());
      return r;
    }
    const KSpec ks = config.k_for(disc);
    FitOptions opts;
    opts.restarts = config.restarts;
    opts.seed = config.seed;
    opts.freeze_cliques = config.freeze_cliques;
    opts.threads = config.workers;

    std::optional<std::pair<std::size_t, BlockmodelFit>> best;
    std::string scan_csv = "k,criterion\n";
    for (std::size_t k = ks.min; k <= ks.max; ++k) {
      try {
        BlockmodelFit fit = fit_blockmodel(net, k, opts);
        if (config.refit_bridging && k >= 2) {
          auto bridges = detect_bridging_cores(net, fit.partition, config.bridging_density);
          if (!bridges.pairs.empty()) {
            FitOptions refit = opts;
            refit.image = default_image(k, bridges.pairs);
            fit = fit_blockmodel(net, k, refit);
          }
        }
        scan_csv += fmt::format("{},{}\n", k, fit.criterion_value);
        if (ks.scan()) {
          write_file_atomic(fit_path(config, disc, period, fmt::format(".k{}.partition.json", k)),
                            fit_to_json(fit).dump(1) + "\n");
        }
        if (!best || fit.criterion_value < best->second.criterion_value) best.emplace(k, std::move(fit));
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::infeasible) throw;
        scan_csv += fmt::format("{},\n", k);
        r.errors.push_back(fmt::format("{}: k = {} infeasible: {}", cell, k, e.what()));
      }
    }
    if (ks.scan()) write_file_atomic(fit_path(config, disc, period, ".scan.csv"), scan_csv);
    if (!best) return r;

    auto& [k, fit] = *best;
    json doc = fit_to_json(fit);
    doc["k"] = k;
    doc["discipline"] = disc;
    doc["period"] = period;
    if (fit.partition.core_count() >= 2) {
      auto bridges = detect_bridging_cores(net, fit.partition, config.bridging_density);
      doc["bridging_pairs"] = bridges.pairs;
      doc["bridging_cores"] = bridges.bridging_cores;
    } else {
      doc["bridging_pairs"] = json::array();
      doc["bridging_cores"] = json::array();
    }
    write_file_atomic(fit_path(config, disc, period, ".partition.json"), doc.dump(1) + "\n");
    write_file_atomic(fit_path(config, disc, period, ".matrix.csv"), blockmodel_matrix_csv(net, fit.partition));
    const auto s = summarize_blockmodel(fit.partition);
    r.info.push_back(fmt::format("{}: k={} criterion={} seed={} restarts={} cores={} semi={}% per={}%", cell, k,
                                 fit.criterion_value, fit.seed, fit.restarts_run, s.cores,
                                 f4(s.pct_semi_periphery), f4(s.pct_periphery)));
    return r;
  });
}

namespace {

struct PeriodPair {
  std::string discipline;
  std::string first;
  std::string second;
};

std::vector<PeriodPair> consecutive_pairs(const Index& idx) {
  std::vector<PeriodPair> out;
  for (const auto& d : idx.disciplines) {
    for (std::size_t i = 0; i + 1 < d.periods.size(); ++i) out.push_back({d.name, d.periods[i], d.periods[i + 1]});
  }
  return out;
}

Partition read_partition(const RunConfig& c, const std::string& disc, const std::string& period) {
  return partition_from_json(read_json(fit_path(c, disc, period, ".partition.json")));
}

std::optional<double> opt_number(const json& v) {
  if (v.is_null()) return std::nullopt;
  return v.get<double>();
}

}  // namespace

CommandResult cmd_stability(const RunConfig& config) {
  const Index idx = read_index(config);
  const auto pairs = consecutive_pairs(idx);
  std::vector<std::optional<StabilityReport>> reports(pairs.size());
  CommandResult result = for_each_parallel(pairs.size(), config.workers, [&](std::size_t i) {
    CommandResult r;
    const auto& pp = pairs[i];
    try {
      const auto p1 = read_partition(config, pp.discipline, pp.first);
      const auto p2 = read_partition(config, pp.discipline, pp.second);
      reports[i] = stability_report(align(p1, p2, config.scope), config.replicates, config.seed);
      r.info.push_back(fmt::format("{} {}->{}: ARI={} MAWIS2={}", pp.discipline, pp.first, pp.second,
                                   format_index(reports[i]->indices[0].adjusted),
                                   format_index(reports[i]->indices[7].adjusted)));
    } catch (const Error& e) {
      r.errors.push_back(fmt::format("{} {}->{}: {}", pp.discipline, pp.first, pp.second, e.what()));
    }
    return r;
  });

  std::string csv = "discipline,period1,period2";
  for (auto name : StabilityReport::kNames) csv += "," + std::string(name);
  csv += "\n";
  json entries = json::array();
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (!reports[i]) continue;
    csv += fmt::format("{},{},{}", pairs[i].discipline, pairs[i].first, pairs[i].second);
    for (const auto& v : reports[i]->indices) csv += "," + format_index(v.adjusted);
    csv += "\n";
    entries.push_back({{"discipline", pairs[i].discipline},
                       {"period1", pairs[i].first},
                       {"period2", pairs[i].second},
                       {"scope", config.scope == Scope::cores_only ? "cores_only" : "full"},
                       {"report", report_to_json(*reports[i])}});
  }
  write_file_atomic(config.out_dir / "stability.csv", csv);
  write_file_atomic(config.out_dir / "stability.json",
                    json{{"seed", config.seed}, {"replicates", config.replicates}, {"reports", std::move(entries)}}
                            .dump(1) +
                        "\n");
  return result;
}

CommandResult cmd_transitions(const RunConfig& config) {
  const Index idx = read_index(config);
  const auto pairs = consecutive_pairs(idx);
  TransitionThresholds thresholds{config.transition_share, config.split_min_share};
  return for_each_parallel(pairs.size(), config.workers, [&](std::size_t i) {
    CommandResult r;
    const auto& pp = pairs[i];
    const std::string cell = fmt::format("{} {}->{}", pp.discipline, pp.first, pp.second);
    try {
      const auto p1 = read_partition(config, pp.discipline, pp.first);
      const auto p2 = read_partition(config, pp.discipline, pp.second);
      const FlowTable ft = core_flows(p1, p2, FlowTable::Scope::cores_only);
      const auto events = classify_events(ft, thresholds);
      const fs::path dir =
          config.out_dir / "transitions" / slug(pp.discipline) / (slug(pp.first) + "--" + slug(pp.second));
      json ev = json::object();
      json merges = json::array(), splits = json::array();
      for (const auto& m : events.merges) merges.push_back({{"sources", m.sources}, {"target", m.target}});
      for (const auto& s : events.splits) splits.push_back({{"source", s.source}, {"targets", s.targets}});
      ev["merges"] = std::move(merges);
      ev["splits"] = std::move(splits);
      ev["dissolved"] = events.dissolved;
      ev["emerged"] = events.emerged;
      ev["share"] = thresholds.share;
      ev["split_min_share"] = thresholds.split_min_share;
      try {
        const auto io = into_out_percentages(p1, p2);
        ev["pct_into"] = io.pct_into;
        ev["pct_out"] = io.pct_out;
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::undefined_value) throw;
        ev["pct_into"] = nullptr;
        ev["pct_out"] = nullptr;
      }
      write_file_atomic(dir / "flows.json", emit_flow_json(ft).dump(1) + "\n");
      write_file_atomic(dir / "flows.svg", emit_alluvial_svg(ft));
      write_file_atomic(dir / "events.json", ev.dump(1) + "\n");
      r.info.push_back(fmt::format("{}: {} merges, {} splits, {} dissolved, {} emerged", cell, events.merges.size(),
                                   events.splits.size(), events.dissolved.size(), events.emerged.size()));
    } catch (const Error& e) {
      r.errors.push_back(cell + ": " + e.what());
    }
    return r;
  });
}

CommandResult cmd_analyze(const RunConfig& config) {
  CommandResult result;
  const Index idx = read_index(config);
  const auto stability_doc = read_json(config.out_dir / "stability.json");

  std::map<std::string, StabilityReport> reports;  // first period pair per discipline
  for (const auto& entry : stability_doc.at("reports")) {
    const auto disc = entry.at("discipline").get<std::string>();
    if (reports.count(disc)) continue;
    StabilityReport rep;
    const auto& indices = entry.at("report").at("indices");
    for (std::size_t i = 0; i < 9; ++i) {
      const auto& v = indices.at(std::string(StabilityReport::kNames[i]));
      rep.indices[i] = {opt_number(v.at("adjusted")), opt_number(v.at("raw"))};
    }
    reports.emplace(disc, rep);
  }

  std::vector<DisciplineInput> inputs;
  for (const auto& d : idx.disciplines) {
    DisciplineInput in;
    in.name = d.name;
    in.field = d.field;
    if (d.periods.size() >= 2) {
      try {
        auto facts = [&](const std::string& period) {
          const auto net = network_from_json(read_json(network_path(config, d.name, period)));
          const auto doc = read_json(fit_path(config, d.name, period, ".partition.json"));
          const auto part = partition_from_json(doc);
          PeriodFacts f;
          f.summary = summarize_blockmodel(part);
          f.density = net.size() >= 2 ? density(net) : 0.0;
          f.bridging_core = !doc.value("bridging_cores", json::array()).empty();
          return std::make_pair(f, part);
        };
        auto [f1, p1] = facts(d.periods[0]);
        auto [f2, p2] = facts(d.periods[1]);
        in.first = f1;
        in.second = f2;
        in.into_out = into_out_percentages(p1, p2);
      } catch (const Error& e) {
        result.warnings.push_back(d.name + ": " + e.what());
      }
    }
    if (auto it = reports.find(d.name); it != reports.end()) in.report = it->second;
    inputs.push_back(std::move(in));
  }

  const auto assembled = assemble_features(inputs);
  result.warnings.insert(result.warnings.end(), assembled.warnings.begin(), assembled.warnings.end());
  const auto& rows = assembled.rows;

  std::string csv =
      "discipline,field,N1,N2,growth_N,density1,density2,growth_density,cores1,cores2,avg_core_size1,"
      "avg_core_size2,pct_semi1,pct_semi2,pct_per1,pct_per2,pct_cores,bridge1,pct_into,pct_out";
  for (auto name : StabilityReport::kNames) csv += "," + std::string(name);
  csv += "\n";
  for (const auto& f : rows) {
    csv += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}", f.name, f.field, f.n1, f.n2,
                       f4(f.growth_n), f4(f.density1), f4(f.density2), f4(f.growth_density), f.n_cores1, f.n_cores2,
                       f4(f.avg_core_size1), f4(f.avg_core_size2), f4(f.pct_semi1), f4(f.pct_semi2),
                       f4(f.pct_per1), f4(f.pct_per2), f4(f.pct_cores), f.bridge_present1 ? 1 : 0, f4(f.pct_into),
                       f4(f.pct_out));
    for (const auto& v : f.indices) csv += "," + format_index(v);
    csv += "\n";
  }
  write_file_atomic(config.out_dir / "disciplines.csv", csv);

  // Clustering on the standardized adjusted indices.
  std::vector<const DisciplineFeatures*> complete;
  for (const auto& f : rows) {
    if (std::all_of(f.indices.begin(), f.indices.end(), [](const auto& v) { return v.has_value(); })) {
      complete.push_back(&f);
    } else {
      result.warnings.push_back(f.name + ": undefined stability index, left out of clustering");
    }
  }
  if (complete.size() < 2) {
    result.errors.push_back(fmt::format("analyze: clustering needs at least two disciplines with defined indices, got {}",
                                        complete.size()));
  } else {
    Eigen::MatrixXd x(static_cast<Eigen::Index>(complete.size()), 9);
    std::vector<std::string> labels;
    std::vector<double> key;
    std::vector<DisciplineFeatures> members;
    for (std::size_t i = 0; i < complete.size(); ++i) {
      for (std::size_t j = 0; j < 9; ++j) x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = *complete[i]->indices[j];
      labels.push_back(complete[i]->name);
      key.push_back(*complete[i]->indices[0]);
      members.push_back(*complete[i]);
    }
    const auto z = standardize(x);
    for (auto c : z.zero_variance) {
      result.warnings.push_back(fmt::format("index {} is constant across disciplines", StabilityReport::kNames[c]));
    }
    ClusterOptions opts;
    opts.k = config.discipline_k;
    opts.k_max = config.k_max;
    opts.references = config.gap_references;
    opts.seed = config.seed;
    if (opts.k && (*opts.k < 1 || *opts.k > complete.size())) {
      result.errors.push_back("analyze: configured cluster count out of range");
    } else {
      const auto clustering = cluster_disciplines(z.z, labels, key, opts);
      std::string ccsv = "discipline,cluster\n";
      for (std::size_t i = 0; i < labels.size(); ++i) ccsv += fmt::format("{},{}\n", labels[i], clustering.assignment[i]);
      write_file_atomic(config.out_dir / "clusters.csv", ccsv);
      std::string scsv = "cluster,members,pct_into,pct_out,core_size,researchers\n";
      for (const auto& row : cluster_summary(clustering.assignment, members)) {
        scsv += fmt::format("{},{},{},{},{},{}\n", row.cluster, row.members, f4(row.pct_into), f4(row.pct_out),
                            f4(row.core_size), f4(row.researchers));
      }
      if (clustering.gap) {
        scsv += "\nk,gap,sd\n";
        for (std::size_t k = 0; k < clustering.gap->gap.size(); ++k) {
          scsv += fmt::format("{},{},{}\n", k + 1, f4(clustering.gap->gap[k]), f4(clustering.gap->sd[k]));
        }
      }
      write_file_atomic(config.out_dir / "cluster_summary.csv", scsv);
      result.info.push_back(fmt::format("analyze: {} disciplines in {} clusters", labels.size(), clustering.k));
    }
  }

  std::string text;
  for (int model = 1; model <= 2; ++model) {
    const auto design = regression_design(rows, model);
    const std::string title = fmt::format("Model {} (response: MAWIS2)", model);
    for (const auto& note : design.notes) text += "# " + note + "\n";
    try {
      const auto fit = ols_fit(design.x, design.y, design.names);
      std::vector<VifValue> vifs;
      if (design.names.size() >= 3) {
        vifs = vif(design.x.rightCols(design.x.cols() - 1),
                   std::vector<std::string>(design.names.begin() + 1, design.names.end()));
      }
      text += format_regression(title, fit, vifs);
    } catch (const Error& e) {
      text += title + "\n  not estimated: " + e.what() + "\n";
      result.warnings.push_back(fmt::format("regression model {}: {}", model, e.what()));
    }
    text += "\n";
  }
  write_file_atomic(config.out_dir / "regression.txt", text);
  return result;
}

CommandResult cmd_all(const RunConfig& config) {
  CommandResult result = cmd_build(config);
  for (auto step : {cmd_fit, cmd_stability, cmd_transitions, cmd_analyze}) result.append(step(config));
  return result;
}

}  // namespace blockstab
