#include "edqe/pipeline.hpp"

#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "edqe/errors.hpp"

namespace edqe {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

template <typename Enum>
struct EnumName {
  Enum value;
  const char* name;
};

constexpr EnumName<Scorer> kScorers[] = {{Scorer::Frequency, "frequency"}, {Scorer::Similarity, "similarity"}};
constexpr EnumName<EmbeddingSource> kSources[] = {{EmbeddingSource::Static, "static"},
                                                  {EmbeddingSource::Temporal, "temporal"}};
constexpr EnumName<ScoreCombine> kCombines[] = {{ScoreCombine::Mean, "mean"}, {ScoreCombine::Max, "max"}};
constexpr EnumName<Variant> kVariants[] = {{Variant::Static, "static"}, {Variant::Temporal, "temporal"}};
constexpr EnumName<Initialization> kInits[] = {{Initialization::AnchorCentroid, "anchor-centroid"},
                                               {Initialization::RandomSeeded, "random-seeded"}};

template <typename Enum, std::size_t N>
const char* enum_name(const EnumName<Enum> (&table)[N], Enum v) {
  for (const auto& e : table) {
    if (e.value == v) return e.name;
  }
  return "?";
}

template <typename Enum, std::size_t N>
Enum enum_value(const EnumName<Enum> (&table)[N], const std::string& s, const char* what) {
  for (const auto& e : table) {
    if (s == e.name) return e.value;
  }
  throw InvalidArgument(fmt::format("unknown {} '{}'", what, s));
}

// Reads known keys from one config section, rejecting anything else.
class Section {
 public:
  Section(const json& root, const char* name) : name_(name) {
    if (root.contains(name)) {
      node_ = &root.at(name);
      if (!node_->is_object()) throw InvalidArgument(fmt::format("config section '{}' must be an object", name));
    }
  }
  ~Section() noexcept(false) {
    if (!node_ || std::uncaught_exceptions()) return;
    for (const auto& [key, value] : node_->items()) {
      if (!used_.count(key)) throw InvalidArgument(fmt::format("unknown config key '{}.{}'", name_, key));
    }
  }

  template <typename T>
  void read(const char* key, T& out) {
    used_.insert(key);
    if (!node_ || !node_->contains(key)) return;
    try {
      out = node_->at(key).get<T>();
    } catch (const json::exception& ex) {
      throw InvalidArgument(fmt::format("config key '{}.{}': {}", name_, key, ex.what()));
    }
  }

  void read_path(const char* key, fs::path& out) {
    std::string s = out.string();
    read(key, s);
    out = s;
  }

  template <typename Enum, std::size_t N>
  void read_enum(const char* key, const EnumName<Enum> (&table)[N], Enum& out) {
    std::string s = enum_name(table, out);
    read(key, s);
    out = enum_value(table, s, key);
  }

 private:
  const char* name_;
  const json* node_ = nullptr;
  std::set<std::string> used_;
};

fs::path resolve(const fs::path& base, const fs::path& p) {
  if (p.empty() || p.is_absolute()) return p;
  return base / p;
}

}  // namespace

bool operator==(const PipelineConfig& a, const PipelineConfig& b) {
  return a.paths == b.paths && a.event_filter == b.event_filter && a.detection == b.detection &&
         a.expansion == b.expansion && a.projection == b.projection && a.retrieval == b.retrieval &&
         a.random_seed == b.random_seed && a.expand_baseline == b.expand_baseline && a.run_tag == b.run_tag &&
         a.first_year == b.first_year && a.last_year == b.last_year && a.model_precision == b.model_precision;
}

ordered_json config_to_json(const PipelineConfig& c) {
  ordered_json j;
  j["paths"] = {{"static_model", c.paths.static_model.string()}, {"temporal_dir", c.paths.temporal_dir.string()},
                {"events", c.paths.events.string()},             {"corpus", c.paths.corpus.string()},
                {"topics", c.paths.topics.string()},             {"qrels", c.paths.qrels.string()},
                {"out", c.paths.out.string()},                   {"stopwords", c.paths.stopwords.string()}};
  j["models"] = {{"first_year", c.first_year}, {"last_year", c.last_year}, {"precision", c.model_precision}};
  j["events"] = {{"min_views", c.event_filter.min_views},
                 {"min_refs", c.event_filter.min_refs},
                 {"first_year", c.event_filter.first_year},
                 {"last_year", c.event_filter.last_year}};
  const auto& d = c.detection;
  j["detection"] = {{"scorer", enum_name(kScorers, d.scorer)},
                    {"min_score", d.min_score_frequency},
                    {"min_score_similarity", d.min_score_similarity},
                    {"mu", d.mu},
                    {"max_events_per_term", d.max_events_per_term},
                    {"embedding_source", enum_name(kSources, d.embedding_source)},
                    {"combine", enum_name(kCombines, d.combine)},
                    {"min_surface_occurrences", d.min_surface_occurrences},
                    {"classify_min_frequency", d.classify_min_frequency}};
  const auto& x = c.expansion;
  j["expansion"] = {{"variant", enum_name(kVariants, x.variant)},
                    {"lambda", x.lambda},
                    {"k_candidates", x.k_candidates},
                    {"alpha", x.alpha},
                    {"beta", x.beta},
                    {"gamma", x.gamma},
                    {"delta", x.delta},
                    {"n_expansion_terms", x.n_expansion_terms},
                    {"temprel_k", x.temprel_k},
                    {"temprel_epsilon", x.temprel_epsilon}};
  const auto& p = c.projection;
  j["projection"] = {{"k_anchors", p.k_anchors},
                     {"max_iterations", p.max_iterations},
                     {"gradient_tolerance", p.gradient_tolerance},
                     {"initialization", enum_name(kInits, p.initialization)},
                     {"random_restarts", p.random_restarts},
                     {"low_anchor_threshold", p.low_anchor_threshold}};
  j["retrieval"] = {{"interp_alpha", c.retrieval.interp_alpha}, {"depth", c.retrieval.depth}};
  j["eval"] = {{"baseline", c.expand_baseline}};
  j["seed"] = c.random_seed;
  j["run_tag"] = c.run_tag;
  return j;
}

PipelineConfig config_from_json(const json& j) {
  if (!j.is_object()) throw InvalidArgument("config must be a JSON object");
  static const std::set<std::string> known = {"paths",     "models",     "events",    "detection", "expansion",
                                              "projection", "retrieval", "eval",      "seed",      "run_tag"};
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw InvalidArgument(fmt::format("unknown config key '{}'", key));
  }
  PipelineConfig c;
  {
    Section s(j, "paths");
    s.read_path("static_model", c.paths.static_model);
    s.read_path("temporal_dir", c.paths.temporal_dir);
    s.read_path("events", c.paths.events);
    s.read_path("corpus", c.paths.corpus);
    s.read_path("topics", c.paths.topics);
    s.read_path("qrels", c.paths.qrels);
    s.read_path("out", c.paths.out);
    s.read_path("stopwords", c.paths.stopwords);
  }
  {
    Section s(j, "models");
    s.read("first_year", c.first_year);
    s.read("last_year", c.last_year);
    s.read("precision", c.model_precision);
  }
  {
    Section s(j, "events");
    s.read("min_views", c.event_filter.min_views);
    s.read("min_refs", c.event_filter.min_refs);
    s.read("first_year", c.event_filter.first_year);
    s.read("last_year", c.event_filter.last_year);
  }
  {
    auto& d = c.detection;
    Section s(j, "detection");
    s.read_enum("scorer", kScorers, d.scorer);
    s.read("min_score", d.min_score_frequency);
    s.read("min_score_similarity", d.min_score_similarity);
    s.read("mu", d.mu);
    s.read("max_events_per_term", d.max_events_per_term);
    s.read_enum("embedding_source", kSources, d.embedding_source);
    s.read_enum("combine", kCombines, d.combine);
    s.read("min_surface_occurrences", d.min_surface_occurrences);
    s.read("classify_min_frequency", d.classify_min_frequency);
  }
  {
    auto& x = c.expansion;
    Section s(j, "expansion");
    s.read_enum("variant", kVariants, x.variant);
    s.read("lambda", x.lambda);
    s.read("k_candidates", x.k_candidates);
    s.read("alpha", x.alpha);
    s.read("beta", x.beta);
    s.read("gamma", x.gamma);
    s.read("delta", x.delta);
    s.read("n_expansion_terms", x.n_expansion_terms);
    s.read("temprel_k", x.temprel_k);
    s.read("temprel_epsilon", x.temprel_epsilon);
  }
  {
    auto& p = c.projection;
    Section s(j, "projection");
    s.read("k_anchors", p.k_anchors);
    s.read("max_iterations", p.max_iterations);
    s.read("gradient_tolerance", p.gradient_tolerance);
    s.read_enum("initialization", kInits, p.initialization);
    s.read("random_restarts", p.random_restarts);
    s.read("low_anchor_threshold", p.low_anchor_threshold);
  }
  {
    Section s(j, "retrieval");
    s.read("interp_alpha", c.retrieval.interp_alpha);
    s.read("depth", c.retrieval.depth);
  }
  {
    Section s(j, "eval");
    s.read("baseline", c.expand_baseline);
  }
  if (j.contains("seed")) c.random_seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("run_tag")) c.run_tag = j.at("run_tag").get<std::string>();

  c.detection.validate();
  c.expansion.validate();
  c.projection.validate();
  c.retrieval.validate();
  return c;
}

PipelineConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(fmt::format("cannot open config {}", path.string()));
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& ex) {
    throw FormatError(fmt::format("{}: {}", path.string(), ex.what()));
  }
  PipelineConfig c = config_from_json(j);
  const fs::path base = path.parent_path();
  for (fs::path* p : {&c.paths.static_model, &c.paths.temporal_dir, &c.paths.events, &c.paths.corpus,
                      &c.paths.topics, &c.paths.qrels, &c.paths.out, &c.paths.stopwords}) {
    *p = resolve(base, *p);
  }
  return c;
}

void save_config(const fs::path& path, const PipelineConfig& cfg) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(fmt::format("cannot write {}", path.string()));
  out << config_to_json(cfg).dump(2) << '\n';
}

void apply_override(PipelineConfig& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw InvalidArgument(fmt::format("override '{}' is not key=value", assignment));
  const std::string key = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(raw);
  } catch (const json::exception&) {
    value = raw;
  }
  json j = config_to_json(cfg);
  json* node = &j;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (dot == std::string::npos) {
      if (!node->is_object() || !node->contains(part)) {
        throw InvalidArgument(fmt::format("unknown config key '{}'", key));
      }
      (*node)[part] = value;
      break;
    }
    if (!node->contains(part)) throw InvalidArgument(fmt::format("unknown config key '{}'", key));
    node = &(*node)[part];
    start = dot + 1;
  }
  cfg = config_from_json(j);
}

SearchMode parse_search_mode(const std::string& s) {
  if (s == "none") return SearchMode::None;
  if (s == "static") return SearchMode::Static;
  if (s == "temporal") return SearchMode::Temporal;
  throw InvalidArgument(fmt::format("unknown variant '{}'", s));
}

std::string to_string(SearchMode m) {
  switch (m) {
    case SearchMode::None: return "none";
    case SearchMode::Static: return "static";
    case SearchMode::Temporal: return "temporal";
  }
  return "?";
}

namespace {

void require(const fs::path& p, const char* what) {
  if (p.empty()) throw Error(fmt::format("no {} path configured", what));
  if (!fs::exists(p)) throw Error(fmt::format("{} not found: {}", what, p.string()));
}

// Lazily loaded inputs shared by the commands.
class Workspace {
 public:
  Workspace(const PipelineConfig& cfg, std::ostream& log) : cfg_(cfg), log_(log) {
    if (!cfg.paths.stopwords.empty()) {
      require(cfg.paths.stopwords, "stop-word list");
      custom_stops_ = StopList::load(cfg.paths.stopwords);
    }
  }

  const StopList& stops() const { return custom_stops_ ? *custom_stops_ : StopList::builtin(); }

  const std::vector<EventRecord>& events() {
    if (!events_) {
      require(cfg_.paths.events, "events file");
      auto loaded = load_events(cfg_.paths.events);
      for (const auto& issue : loaded.issues) {
        fmt::print(log_, "warning: {}:{}: {}\n", cfg_.paths.events.string(), issue.line, issue.message);
      }
      events_ = filter_events(loaded.events, cfg_.event_filter);
      fmt::print(log_, "events: {} loaded, {} after filtering\n", loaded.events.size(), events_->size());
      if (events_->empty()) throw Error("no events left after filtering");
    }
    return *events_;
  }

  const TfIdfModel& stats() {
    if (!stats_) stats_ = build_tfidf(events(), stops());
    return *stats_;
  }

  const EmbeddingModel& static_model() {
    if (!static_) {
      require(cfg_.paths.static_model, "static model");
      static_ = load_model(cfg_.paths.static_model, std::nullopt, "static");
    }
    return *static_;
  }

  TemporalModelSet& temporal() {
    if (!temporal_) {
      require(cfg_.paths.temporal_dir, "temporal model directory");
      temporal_ = load_temporal_models(cfg_.paths.temporal_dir, cfg_.first_year, cfg_.last_year);
      fmt::print(log_, "temporal models: {} years\n", temporal_->size());
    }
    return *temporal_;
  }

  ProjectionConfig projection_config() const {
    ProjectionConfig p = cfg_.projection;
    p.seed = cfg_.random_seed;
    return p;
  }

  // Projects, in memory, events missing from their year's model.
  void ensure_projected() {
    if (projected_) return;
    projected_ = true;
    auto& set = temporal();
    std::vector<EventRecord> missing;
    for (const auto& e : events()) {
      const auto* m = set.find(e.year);
      if (m && !m->contains(event_token(e))) missing.push_back(e);
    }
    if (missing.empty()) return;
    auto report = project_all(missing, static_model(), set, projection_config(), events());
    fmt::print(log_, "projected {} events in memory ({} skipped)\n", report.projected, report.skipped);
  }

  bool needs_temporal(bool expansion_temporal) const {
    return expansion_temporal || (cfg_.detection.scorer == Scorer::Similarity &&
                                  cfg_.detection.embedding_source == EmbeddingSource::Temporal);
  }

  ModelSet models(bool expansion_temporal) {
    ModelSet m;
    m.static_model = &static_model();
    if (needs_temporal(expansion_temporal)) {
      ensure_projected();
      m.temporal = &temporal();
    }
    return m;
  }

  std::vector<Query> queries() {
    require(cfg_.paths.topics, "topics file");
    auto parsed = load_trec_topics(cfg_.paths.topics);
    for (const auto& e : parsed.errors) fmt::print(log_, "warning: {}\n", e);
    std::vector<Query> out;
    for (auto& t : parsed.topics) out.push_back(make_query(t.title, t.id, stops()));
    return out;
  }

  const InvertedIndex& index() {
    if (!index_) {
      require(cfg_.paths.corpus, "corpus");
      auto docs = load_corpus(cfg_.paths.corpus);
      index_ = index_corpus(docs, Analyzer{true, &stops()});
      fmt::print(log_, "indexed {} documents\n", index_->num_docs());
    }
    return *index_;
  }

  const Qrels& qrels() {
    if (!qrels_) {
      require(cfg_.paths.qrels, "qrels file");
      auto parsed = load_qrels(cfg_.paths.qrels);
      for (const auto& w : parsed.warnings) fmt::print(log_, "warning: {}\n", w);
      qrels_ = std::move(parsed.qrels);
    }
    return *qrels_;
  }

  fs::path out_dir() const {
    fs::path out = cfg_.paths.out.empty() ? fs::path("out") : cfg_.paths.out;
    fs::create_directories(out);
    return out;
  }

 private:
  const PipelineConfig& cfg_;
  std::ostream& log_;
  std::optional<StopList> custom_stops_;
  std::optional<std::vector<EventRecord>> events_;
  std::optional<TfIdfModel> stats_;
  std::optional<EmbeddingModel> static_;
  std::optional<TemporalModelSet> temporal_;
  std::optional<InvertedIndex> index_;
  std::optional<Qrels> qrels_;
  bool projected_ = false;
};

std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error(fmt::format("cannot write {}", p.string()));
  return out;
}

template <typename Fn>
int guarded(std::ostream& log, Fn&& fn) {
  try {
    return fn();
  } catch (const std::exception& ex) {
    fmt::print(log, "error: {}\n", ex.what());
    return 1;
  }
}

ExpansionConfig with_variant(ExpansionConfig x, SearchMode mode) {
  if (mode == SearchMode::Static) x.variant = Variant::Static;
  if (mode == SearchMode::Temporal) x.variant = Variant::Temporal;
  return x;
}

Run make_run(Workspace& ws, const PipelineConfig& cfg, SearchMode mode, std::ostream& log) {
  const auto queries = ws.queries();
  const auto& index = ws.index();
  Run run;
  if (mode == SearchMode::None) {
    for (const auto& q : queries) run[q.id] = rank(index, max_likelihood(q), cfg.retrieval.depth);
    return run;
  }
  const ExpansionConfig xcfg = with_variant(cfg.expansion, mode);
  const ModelSet models = ws.models(xcfg.variant == Variant::Temporal);
  const auto& events = ws.events();
  const auto& stats = ws.stats();
  for (const auto& q : queries) {
    try {
      const ExpandedQuery eq = expand(q, xcfg, cfg.detection, events, models, stats);
      run[q.id] = rank(index, interpolate(eq, cfg.retrieval), cfg.retrieval.depth);
    } catch (const std::exception& ex) {
      fmt::print(log, "warning: query {}: {}; using the unexpanded query\n", q.id, ex.what());
      run[q.id] = rank(index, max_likelihood(q), cfg.retrieval.depth);
    }
  }
  return run;
}

std::string run_tag(const PipelineConfig& cfg, SearchMode mode) { return cfg.run_tag + "-" + to_string(mode); }

}  // namespace

int cmd_project(const PipelineConfig& cfg, std::ostream& log) {
  return guarded(log, [&] {
    Workspace ws(cfg, log);
    const auto& events = ws.events();
    const auto& stat = ws.static_model();
    auto& temporal = ws.temporal();
    auto report = project_all(events, stat, temporal, ws.projection_config());
    const fs::path out = ws.out_dir();
    save_temporal_models(out / "models", temporal, cfg.model_precision);
    auto rep = open_out(out / "projection_report.jsonl");
    write_projection_report(rep, report);
    std::size_t low = 0;
    for (const auto& r : report.records) low += r.low_anchor_count ? 1 : 0;
    fmt::print(log, "projected {} events, skipped {}, low-anchor {}; enriched models in {}\n", report.projected,
               report.skipped, low, (out / "models").string());
    return 0;
  });
}

int cmd_classify(const PipelineConfig& cfg, std::ostream& log) {
  return guarded(log, [&] {
    Workspace ws(cfg, log);
    const auto& events = ws.events();
    const auto& stats = ws.stats();
    auto out = open_out(ws.out_dir() / "classify.tsv");
    out << "qid\tevent_related\tquery\n";
    std::size_t positive = 0;
    for (const auto& q : ws.queries()) {
      const bool related = classify_event_related(q, events, stats, cfg.detection.classify_min_frequency);
      positive += related ? 1 : 0;
      out << fmt::format("{}\t{}\t{}\n", q.id, related ? "true" : "false", q.raw);
    }
    fmt::print(log, "{} event-related queries\n", positive);
    return 0;
  });
}

int cmd_detect(const PipelineConfig& cfg, std::ostream& log) {
  return guarded(log, [&] {
    Workspace ws(cfg, log);
    const auto& events = ws.events();
    const auto& stats = ws.stats();
    const ModelSet models = ws.models(false);
    auto out = open_out(ws.out_dir() / "detect.jsonl");
    const char* scorer = enum_name(kScorers, cfg.detection.scorer);
    std::size_t total = 0;
    for (const auto& q : ws.queries()) {
      for (const auto& d : detect_for_query(q, events, cfg.detection, models, stats)) {
        ordered_json j;
        j["qid"] = q.id;
        j["query"] = q.raw;
        j["event"] = d.event->name;
        j["event_id"] = d.event->id;
        j["year"] = d.year;
        j["score"] = d.score;
        j["scorer"] = scorer;
        out << j.dump() << '\n';
        ++total;
      }
    }
    fmt::print(log, "{} detections\n", total);
    return 0;
  });
}

int cmd_expand(const PipelineConfig& cfg, bool explain, std::ostream& log) {
  return guarded(log, [&] {
    Workspace ws(cfg, log);
    const auto& xcfg = cfg.expansion;
    const auto& events = ws.events();
    const auto& stats = ws.stats();
    const ModelSet models = ws.models(xcfg.variant == Variant::Temporal);
    const fs::path dir = ws.out_dir();
    auto out = open_out(dir / "expand.jsonl");
    std::ofstream features;
    if (explain) {
      features = open_out(dir / "explain.tsv");
      features << "qid\tterm\tstem\tevent\tsource\ttfidf\tcos_ce\tcos_eq\ttemprel\tscore\n";
    }
    for (const auto& q : ws.queries()) {
      try {
        ExpansionTrace trace;
        const ExpandedQuery eq = expand(q, xcfg, cfg.detection, events, models, stats, explain ? &trace : nullptr);
        std::vector<std::pair<std::string, double>> terms(eq.weights.begin(), eq.weights.end());
        std::stable_sort(terms.begin(), terms.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
        ordered_json j;
        j["qid"] = q.id;
        j["query"] = q.raw;
        j["variant"] = enum_name(kVariants, xcfg.variant);
        j["terms"] = ordered_json::array();
        for (const auto& [t, w] : terms) j["terms"].push_back({t, w});
        j["events"] = ordered_json::array();
        for (const auto& d : eq.events) j["events"].push_back({{"name", d.event->name}, {"year", d.year}, {"score", d.score}});
        out << j.dump() << '\n';
        for (const auto& c : trace.candidates) {
          features << fmt::format("{}\t{}\t{}\t{}\t{}\t{:.6g}\t{:.6g}\t{:.6g}\t{}\t{:.6g}\n", q.id, c.term, c.stem,
                                  c.source_event, c.source == CandidateSource::TfIdf ? "tfidf" : "query-sim",
                                  c.features.tfidf, c.features.cos_ce, c.features.cos_eq,
                                  c.features.temprel ? fmt::format("{:.6g}", *c.features.temprel) : "-", c.score);
        }
      } catch (const std::exception& ex) {
        fmt::print(log, "warning: query {}: {}\n", q.id, ex.what());
      }
    }
    return 0;
  });
}

int cmd_search(const PipelineConfig& cfg, SearchMode mode, std::ostream& log) {
  return guarded(log, [&] {
    Workspace ws(cfg, log);
    const Run run = make_run(ws, cfg, mode, log);
    auto out = open_out(ws.out_dir() / "run.txt");
    write_trec_run(out, run, run_tag(cfg, mode));
    fmt::print(log, "wrote {} rankings\n", run.size());
    return 0;
  });
}

int cmd_eval(const PipelineConfig& cfg, SearchMode mode, std::ostream& log) {
  return guarded(log, [&] {
    Workspace ws(cfg, log);
    const auto& qrels = ws.qrels();
    const fs::path dir = ws.out_dir();

    std::vector<std::pair<SearchMode, EvalReport>> rows;
    auto run_one = [&](SearchMode m, const fs::path& file) {
      const Run run = make_run(ws, cfg, m, log);
      auto out = open_out(file);
      write_trec_run(out, run, run_tag(cfg, m));
      EvalReport report = evaluate(run, qrels);
      for (const auto& qid : report.skipped) fmt::print(log, "warning: query {} has no relevant judgments\n", qid);
      rows.emplace_back(m, std::move(report));
    };
    if (cfg.expand_baseline && mode != SearchMode::None) run_one(SearchMode::None, dir / "run_baseline.txt");
    run_one(mode, dir / "run.txt");

    auto tsv = open_out(dir / "eval.tsv");
    auto records = open_out(dir / "eval.jsonl");
    tsv << "run\tqueries\tP@10\tNDCG@10\tMAP\n";
    fmt::print(log, "{:<10} {:>7} {:>8} {:>8} {:>8}\n", "run", "queries", "P@10", "NDCG@10", "MAP");
    for (const auto& [m, r] : rows) {
      const auto name = to_string(m);
      tsv << fmt::format("{}\t{}\t{:.4f}\t{:.4f}\t{:.4f}\n", name, r.per_query.size(), r.means.p10, r.means.ndcg10,
                         r.means.ap);
      fmt::print(log, "{:<10} {:>7} {:>8.4f} {:>8.4f} {:>8.4f}\n", name, r.per_query.size(), r.means.p10,
                 r.means.ndcg10, r.means.ap);
      for (const auto& [qid, q] : r.per_query) {
        ordered_json j;
        j["run"] = name;
        j["qid"] = qid;
        j["P@10"] = q.p10;
        j["NDCG@10"] = q.ndcg10;
        j["AP"] = q.ap;
        records << j.dump() << '\n';
      }
      ordered_json j;
      j["run"] = name;
      j["qid"] = "all";
      j["queries"] = r.per_query.size();
      j["P@10"] = r.means.p10;
      j["NDCG@10"] = r.means.ndcg10;
      j["MAP"] = r.means.ap;
      records << j.dump() << '\n';
    }
    return 0;
  });
}

}  // namespace edqe
