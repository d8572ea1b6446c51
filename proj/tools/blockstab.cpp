#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "blockstab/error.hpp"
#include "blockstab/pipeline.hpp"

using namespace blockstab;

namespace {

int report(const CommandResult& r) {
  for (const auto& line : r.info) std::cout << line << '\n';
  for (const auto& line : r.warnings) std::cerr << "warning: " << line << '\n';
  for (const auto& line : r.errors) std::cerr << "error: " << line << '\n';
  return r.ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Blockmodel stability of co-authorship networks"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, input, out, roster, k_text, scope;
  std::vector<std::string> period_args;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers, restarts, replicates;
  bool freeze = false, refit = false;

  app.add_option("--config", config_path, "INI config file")->check(CLI::ExistingFile);
  app.add_option("--input", input, "Publication table (CSV or TSV)");
  app.add_option("--out", out, "Output directory");
  app.add_option("--roster", roster, "File with one researcher ID per line");
  app.add_option("--period", period_args, "Period as LABEL=START..END (repeatable)");
  app.add_option("--k", k_text, "Number of cores, or scan:MIN..MAX");
  app.add_option("--seed", seed, "Random seed");
  app.add_option("--workers", workers, "Worker threads");
  app.add_option("--restarts", restarts, "Local-search restarts (0: size-dependent)");
  app.add_option("--replicates", replicates, "Permutation replicates for the adjusted indices");
  app.add_option("--scope", scope, "Stability scope: cores_only or full")
      ->check(CLI::IsMember({"cores_only", "full"}));
  app.add_flag("--freeze-cliques", freeze, "Freeze exact cliques as cores");
  app.add_flag("--refit-bridging", refit, "Refit with complete bridging blocks");

  struct Sub {
    const char* name;
    const char* help;
    CommandResult (*run)(const RunConfig&);
  };
  const Sub subs[] = {
      {"build", "Build period networks", cmd_build},
      {"fit", "Fit blockmodels", cmd_fit},
      {"stability", "Compute stability indices", cmd_stability},
      {"transitions", "Core flows, events and alluvial diagrams", cmd_transitions},
      {"analyze", "Discipline features, clustering and regression", cmd_analyze},
      {"all", "Run every step", cmd_all},
  };
  for (const auto& s : subs) app.add_subcommand(s.name, s.help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    RunConfig config = config_path.empty() ? RunConfig{} : load_config(config_path);
    if (!input.empty()) config.input = input;
    if (!out.empty()) config.out_dir = out;
    if (!roster.empty()) config.roster = roster;
    if (!period_args.empty()) {
      config.periods.clear();
      for (const auto& arg : period_args) {
        const auto eq = arg.find('=');
        if (eq == std::string::npos) throw Error(ErrorKind::invalid_argument, "period must be LABEL=START..END");
        config.periods.push_back(parse_period(arg.substr(0, eq), arg.substr(eq + 1)));
      }
    }
    if (!k_text.empty()) {
      config.default_k = parse_k(k_text);
      config.k_by_discipline.clear();
    }
    if (const char* env = std::getenv("BLOCKSTAB_WORKERS"); env && !workers) {
      try {
        config.workers = std::stoul(env);
      } catch (const std::exception&) {
        throw Error(ErrorKind::invalid_argument, "BLOCKSTAB_WORKERS must be a positive integer");
      }
    }
    if (workers) config.workers = *workers;
    if (config.workers == 0) throw Error(ErrorKind::invalid_argument, "workers must be positive");
    if (seed) config.seed = *seed;
    if (restarts) config.restarts = *restarts;
    if (replicates) config.replicates = *replicates;
    if (!scope.empty()) config.scope = scope == "full" ? Scope::full : Scope::cores_only;
    if (freeze) config.freeze_cliques = true;
    if (refit) config.refit_bridging = true;

    for (const auto& s : subs) {
      if (app.got_subcommand(s.name)) return report(s.run(config));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
