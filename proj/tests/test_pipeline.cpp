#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "edqe/errors.hpp"
#include "edqe/pipeline.hpp"
#include "edqe/synth.hpp"

using namespace edqe;
namespace fs = std::filesystem;

namespace {

const fs::path kMini = fs::path(EDQE_DATA_DIR) / "mini";

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("edqe_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

PipelineConfig mini_config(const fs::path& out) {
  PipelineConfig cfg = load_config(kMini / "config.json");
  cfg.paths.out = out;
  return cfg;
}

}  // namespace

TEST(Config, RoundTrip) {
  PipelineConfig c;
  c.paths.events = "ev.jsonl";
  c.detection.scorer = Scorer::Similarity;
  c.detection.combine = ScoreCombine::Max;
  c.expansion.lambda = 0.65;
  c.expansion.variant = Variant::Static;
  c.projection.initialization = Initialization::RandomSeeded;
  c.retrieval.interp_alpha = 0.3;
  c.random_seed = 7;
  c.model_precision = 8;
  const auto j = config_to_json(c);
  EXPECT_EQ(config_from_json(nlohmann::json::parse(j.dump())), c);
  EXPECT_EQ(config_from_json(nlohmann::json::parse(config_to_json(PipelineConfig{}).dump())), PipelineConfig{});
}

TEST(Config, DefaultsAndUnknownKeys) {
  auto c = config_from_json(nlohmann::json::parse(R"({"detection": {"mu": 0.4}})"));
  EXPECT_EQ(c.detection.mu, 0.4);
  EXPECT_EQ(c.detection.min_score_frequency, 0.003);
  EXPECT_EQ(c.expansion.lambda, 0.8);
  EXPECT_EQ(c.projection.k_anchors, 30u);
  EXPECT_EQ(c.retrieval.interp_alpha, 0.6);
  EXPECT_THROW(config_from_json(nlohmann::json::parse(R"({"detection": {"muu": 0.4}})")), InvalidArgument);
  EXPECT_THROW(config_from_json(nlohmann::json::parse(R"({"extra": 1})")), InvalidArgument);
  EXPECT_THROW(config_from_json(nlohmann::json::parse(R"({"expansion": {"variant": "fancy"}})")), InvalidArgument);
  EXPECT_THROW(config_from_json(nlohmann::json::parse(R"({"expansion": {"lambda": 2}})")), InvalidArgument);
}

TEST(Config, Overrides) {
  PipelineConfig c;
  apply_override(c, "expansion.lambda=0.7");
  apply_override(c, "detection.scorer=similarity");
  apply_override(c, "seed=5");
  EXPECT_EQ(c.expansion.lambda, 0.7);
  EXPECT_EQ(c.detection.scorer, Scorer::Similarity);
  EXPECT_EQ(c.random_seed, 5u);
  EXPECT_THROW(apply_override(c, "expansion.nope=1"), InvalidArgument);
  EXPECT_THROW(apply_override(c, "lambda"), InvalidArgument);
}

TEST(Config, RelativePathsResolveAgainstFile) {
  auto c = load_config(kMini / "config.json");
  EXPECT_EQ(c.paths.static_model, kMini / "static.txt");
  EXPECT_TRUE(fs::exists(c.paths.temporal_dir));
}

TEST(MiniBenchmark, BundledFilesMatchGenerator) {
  auto dir = scratch("gen");
  synth::write_mini_benchmark(synth::make_mini_benchmark(), dir);
  std::size_t files = 0;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const auto rel = fs::relative(entry.path(), dir);
    EXPECT_EQ(slurp(entry.path()), slurp(kMini / rel)) << rel;
    ++files;
  }
  EXPECT_GT(files, 20u);
}

TEST(Commands, ProjectRerunIsIdempotent) {
  auto out1 = scratch("project1");
  auto out2 = scratch("project2");
  std::ostringstream log;
  auto cfg = mini_config(out1);
  ASSERT_EQ(cmd_project(cfg, log), 0) << log.str();
  cfg.paths.temporal_dir = out1 / "models";
  cfg.paths.out = out2;
  ASSERT_EQ(cmd_project(cfg, log), 0) << log.str();
  std::size_t n = 0;
  for (const auto& entry : fs::directory_iterator(out1 / "models")) {
    EXPECT_EQ(slurp(entry.path()), slurp(out2 / "models" / entry.path().filename())) << entry.path();
    ++n;
  }
  EXPECT_EQ(n, 19u);
  EXPECT_EQ(slurp(out1 / "projection_report.jsonl"), slurp(out2 / "projection_report.jsonl"));
}

TEST(Commands, ProjectSkipsEventsWithoutModel) {
  auto out = scratch("project_skip");
  std::ostringstream log;
  auto cfg = mini_config(out);
  cfg.last_year = 1990;
  ASSERT_EQ(cmd_project(cfg, log), 0) << log.str();
  EXPECT_NE(slurp(out / "projection_report.jsonl").find("no model for year"), std::string::npos);
}

TEST(Commands, UnloadableInputFails) {
  auto out = scratch("bad");
  std::ostringstream log;
  auto cfg = mini_config(out);
  cfg.paths.static_model = out / "missing.txt";
  EXPECT_NE(cmd_project(cfg, log), 0);
  EXPECT_NE(log.str().find("missing.txt"), std::string::npos);
}

TEST(Commands, SearchIsDeterministic) {
  auto out1 = scratch("search1");
  auto out2 = scratch("search2");
  std::ostringstream log;
  ASSERT_EQ(cmd_search(mini_config(out1), SearchMode::Temporal, log), 0) << log.str();
  ASSERT_EQ(cmd_search(mini_config(out2), SearchMode::Temporal, log), 0) << log.str();
  const auto a = slurp(out1 / "run.txt");
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, slurp(out2 / "run.txt"));
}

TEST(Commands, EvalEmitsBothRows) {
  auto out = scratch("eval");
  std::ostringstream log;
  ASSERT_EQ(cmd_eval(mini_config(out), SearchMode::Temporal, log), 0) << log.str();
  const auto tsv = slurp(out / "eval.tsv");
  EXPECT_NE(tsv.find("\nnone\t10\t"), std::string::npos) << tsv;
  EXPECT_NE(tsv.find("\ntemporal\t10\t"), std::string::npos) << tsv;
  EXPECT_TRUE(fs::exists(out / "eval.jsonl"));
  EXPECT_TRUE(fs::exists(out / "run_baseline.txt"));
}

TEST(Commands, ExplainDumpsFeatures) {
  auto out = scratch("explain");
  std::ostringstream log;
  ASSERT_EQ(cmd_expand(mini_config(out), true, log), 0) << log.str();
  const auto tsv = slurp(out / "explain.tsv");
  EXPECT_EQ(tsv.rfind("qid\tterm\tstem\tevent\tsource\ttfidf\tcos_ce\tcos_eq\ttemprel\tscore\n", 0), 0u);
  EXPECT_GT(std::count(tsv.begin(), tsv.end(), '\n'), 100);
  std::istringstream lines(slurp(out / "expand.jsonl"));
  std::string line;
  int n = 0;
  while (std::getline(lines, line)) {
    auto j = nlohmann::json::parse(line);
    EXPECT_TRUE(j.contains("terms"));
    EXPECT_TRUE(j.contains("events"));
    ++n;
  }
  EXPECT_EQ(n, 10);
}

TEST(Commands, ClassifyAndDetect) {
  auto out = scratch("classify");
  std::ostringstream log;
  auto cfg = mini_config(out);
  ASSERT_EQ(cmd_classify(cfg, log), 0) << log.str();
  ASSERT_EQ(cmd_detect(cfg, log), 0) << log.str();
  const auto cls = slurp(out / "classify.tsv");
  EXPECT_EQ(std::count(cls.begin(), cls.end(), '\n'), 11);
  std::istringstream lines(slurp(out / "detect.jsonl"));
  std::string line;
  while (std::getline(lines, line)) {
    auto j = nlohmann::json::parse(line);
    for (const char* key : {"query", "event", "year", "score", "scorer"}) EXPECT_TRUE(j.contains(key)) << key;
  }
}

TEST(Cli, RunsSubcommands) {
  auto out = scratch("cli");
  const std::string base = std::string(EDQE_CLI) + " --config " + (kMini / "config.json").string() + " --out " +
                           out.string() + " ";
  EXPECT_EQ(std::system((base + "search --variant static 2>/dev/null").c_str()), 0);
  EXPECT_TRUE(fs::exists(out / "run.txt"));
  EXPECT_EQ(std::system((base + "--set expansion.lambda=0.5 detect 2>/dev/null").c_str()), 0);
  EXPECT_NE(std::system((base + "--set expansion.bogus=1 detect 2>/dev/null").c_str()), 0);
}

TEST(Config, PublishedDefaults) {
  const PipelineConfig c;
  EXPECT_EQ(c.detection.min_score_frequency, 0.003);
  EXPECT_EQ(c.detection.mu, 0.5);
  EXPECT_EQ(c.detection.min_surface_occurrences, 2);
  EXPECT_EQ(c.detection.classify_min_frequency, 0.001);
  EXPECT_EQ(c.expansion.lambda, 0.8);
  EXPECT_EQ(c.expansion.alpha, 3.0);
  EXPECT_EQ(c.expansion.beta, 1.0);
  EXPECT_EQ(c.expansion.gamma, 1.0);
  EXPECT_EQ(c.expansion.delta, 1.0);
  EXPECT_EQ(c.expansion.temprel_k, 5u);
  EXPECT_EQ(c.expansion.n_expansion_terms, 100u);
  EXPECT_EQ(c.projection.k_anchors, 30u);
  EXPECT_EQ(c.retrieval.interp_alpha, 0.6);
  EXPECT_EQ(c.event_filter.min_views, 5000.0);
  EXPECT_EQ(c.event_filter.min_refs, 15);
  EXPECT_EQ(c.event_filter.first_year, 1981);
  EXPECT_EQ(c.event_filter.last_year, 2018);
}
