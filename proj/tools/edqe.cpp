// edqe: event-driven query expansion from the command line.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "edqe/errors.hpp"
#include "edqe/pipeline.hpp"

using namespace edqe;

int main(int argc, char** argv) {
  CLI::App app{"Event-driven query expansion"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> scorer;
  std::vector<std::string> overrides;
  std::string variant = "temporal";
  bool explain = false;

  app.add_option("-c,--config", config_path, "JSON configuration file")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "random seed for projection");
  app.add_option("--out", out, "output directory");
  app.add_option("--scorer", scorer, "event scorer")->check(CLI::IsMember({"frequency", "similarity"}));
  app.add_option("--set", overrides, "override a config value, e.g. expansion.lambda=0.7");

  auto* project = app.add_subcommand("project", "project events into the yearly models");
  auto* classify = app.add_subcommand("classify", "flag event-related queries");
  auto* detect = app.add_subcommand("detect", "detect events for each query");
  auto* expand = app.add_subcommand("expand", "expand each query");
  expand->add_flag("--explain", explain, "also write per-candidate features");
  expand->add_option("--variant", variant, "static or temporal")->check(CLI::IsMember({"static", "temporal"}));
  auto* search = app.add_subcommand("search", "rank the corpus for each topic");
  auto* eval = app.add_subcommand("eval", "rank and score against the qrels");
  for (auto* sub : {search, eval}) {
    sub->add_option("--variant", variant, "none, static or temporal")
        ->check(CLI::IsMember({"none", "static", "temporal"}));
  }

  CLI11_PARSE(app, argc, argv);

  PipelineConfig cfg;
  try {
    if (!config_path.empty()) cfg = load_config(config_path);
    for (const auto& o : overrides) apply_override(cfg, o);
    if (seed) cfg.random_seed = *seed;
    if (out) cfg.paths.out = *out;
    if (scorer) cfg.detection.scorer = *scorer == "similarity" ? Scorer::Similarity : Scorer::Frequency;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return 2;
  }

  std::ostream& log = std::cerr;
  if (*project) return cmd_project(cfg, log);
  if (*classify) return cmd_classify(cfg, log);
  if (*detect) return cmd_detect(cfg, log);
  if (*expand) {
    if (expand->count("--variant")) cfg.expansion.variant = variant == "static" ? Variant::Static : Variant::Temporal;
    return cmd_expand(cfg, explain, log);
  }
  const SearchMode mode = parse_search_mode(variant);
  if (*search) return cmd_search(cfg, mode, log);
  return cmd_eval(cfg, mode, log);
}
