#pragma once

// Configuration and batch commands behind the edqe command-line tool.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include <json.hpp>

#include "edqe/detection.hpp"
#include "edqe/eventstore.hpp"
#include "edqe/expansion.hpp"
#include "edqe/projection.hpp"
#include "edqe/retrieval.hpp"

namespace edqe {

struct PipelinePaths {
  std::filesystem::path static_model;
  std::filesystem::path temporal_dir;
  std::filesystem::path events;
  std::filesystem::path corpus;
  std::filesystem::path topics;
  std::filesystem::path qrels;
  std::filesystem::path out;
  std::filesystem::path stopwords;  // empty: bundled list

  friend bool operator==(const PipelinePaths&, const PipelinePaths&) = default;
};

// Retrieval mode for search/eval: unexpanded, or one of the two variants.
enum class SearchMode { None, Static, Temporal };

struct PipelineConfig {
  PipelinePaths paths;
  EventFilter event_filter;
  DetectionConfig detection;
  ExpansionConfig expansion;
  ProjectionConfig projection;
  RetrievalConfig retrieval;
  std::uint64_t random_seed = 42;
  bool expand_baseline = true;  // eval also scores the unexpanded run
  std::string run_tag = "edqe";
  int first_year = 1981;
  int last_year = 2018;
  int model_precision = 0;  // 0: shortest exact representation
};

bool operator==(const PipelineConfig& a, const PipelineConfig& b);

nlohmann::ordered_json config_to_json(const PipelineConfig& cfg);
// Missing keys keep their defaults; unknown keys are rejected.
PipelineConfig config_from_json(const nlohmann::json& j);

// Relative paths in the file are resolved against the file's directory.
PipelineConfig load_config(const std::filesystem::path& path);
void save_config(const std::filesystem::path& path, const PipelineConfig& cfg);

// Applies "section.key=value" (value parsed as JSON, else taken as a string).
void apply_override(PipelineConfig& cfg, const std::string& assignment);

SearchMode parse_search_mode(const std::string& s);
std::string to_string(SearchMode m);

// Every command writes its outputs under cfg.paths.out, prints a summary to
// `log`, and returns a process exit code.
int cmd_project(const PipelineConfig& cfg, std::ostream& log);
int cmd_classify(const PipelineConfig& cfg, std::ostream& log);
int cmd_detect(const PipelineConfig& cfg, std::ostream& log);
int cmd_expand(const PipelineConfig& cfg, bool explain, std::ostream& log);
int cmd_search(const PipelineConfig& cfg, SearchMode mode, std::ostream& log);
int cmd_eval(const PipelineConfig& cfg, SearchMode mode, std::ostream& log);

}  // namespace edqe
