#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "blockstab/network.hpp"
#include "blockstab/stability.hpp"

namespace blockstab {

/// Number of cores to fit: a single value or an inclusive scan range.
struct KSpec {
  std::size_t min = 1;
  std::size_t max = 1;

  bool scan() const { return max > min; }
};

/// Parses "3" or "scan:2..6".
KSpec parse_k(const std::string& text);

/// Parses "1991..2000" (or a single year).
PeriodSpec parse_period(const std::string& label, const std::string& text);

struct RunConfig {
  std::filesystem::path input;
  std::filesystem::path out_dir = "blockstab-out";
  std::optional<std::filesystem::path> roster;
  std::vector<PeriodSpec> periods;
  KSpec default_k{3, 3};
  std::map<std::string, KSpec> k_by_discipline;
  std::size_t restarts = 0;  // 0: size-dependent default
  std::uint64_t seed = 20100101;
  std::size_t replicates = 5000;
  std::size_t workers = 1;
  bool freeze_cliques = false;
  bool refit_bridging = false;
  Scope scope = Scope::cores_only;
  double bridging_density = 0.8;
  double transition_share = 0.5;
  double split_min_share = 0.25;
  std::optional<std::size_t> discipline_k;
  std::size_t k_max = 8;
  std::size_t gap_references = 100;

  KSpec k_for(const std::string& discipline) const;
};

/// Reads an INI-style config (top-level keys plus [periods], [k],
/// [thresholds] and [analysis] sections). Relative paths are resolved
/// against the config file's directory.
RunConfig load_config(const std::filesystem::path& path);

/// Messages gathered by a command; `errors` make the command fail.
struct CommandResult {
  std::vector<std::string> info;
  std::vector<std::string> warnings;
  std::vector<std::string> errors;

  bool ok() const { return errors.empty(); }
  void append(const CommandResult& other);
};

CommandResult cmd_build(const RunConfig& config);
CommandResult cmd_fit(const RunConfig& config);
CommandResult cmd_stability(const RunConfig& config);
CommandResult cmd_transitions(const RunConfig& config);
CommandResult cmd_analyze(const RunConfig& config);
CommandResult cmd_all(const RunConfig& config);

/// Directory-safe form of a discipline name.
std::string slug(const std::string& name);

/// Writes through a temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace blockstab
