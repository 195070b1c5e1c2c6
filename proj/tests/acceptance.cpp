// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include <fmt/format.h>
#include <json.hpp>

#include "edqe/errors.hpp"
#include "edqe/expansion.hpp"
#include "edqe/pipeline.hpp"
#include "edqe/projection.hpp"
#include "edqe/random.hpp"
#include "edqe/retrieval.hpp"
#include "edqe/synth.hpp"
#include "fixtures.hpp"

using namespace edqe;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Angle in degrees between two 2-D directions, in [0, 180].
double angle_between(double a, double b) {
  double d = std::fmod(std::abs(a - b), 2 * M_PI);
  if (d > M_PI) d = 2 * M_PI - d;
  return d * 180.0 / M_PI;
}

// Independent evaluation of the anchor objective for a direction at angle t
// in the plane spanned by the first two axes.
struct PlaneOracle {
  std::vector<double> anchor_angle;
  std::vector<double> target;

  double at(double t) const {
    double s = 0;
    for (std::size_t i = 0; i < target.size(); ++i) {
      const double r = target[i] - (1.0 - std::cos(t - anchor_angle[i]));
      s += r * r;
    }
    return s / static_cast<double>(target.size());
  }
  std::pair<double, double> grid_min(int samples = 100000) const {
    double best = 1e300, arg = 0;
    for (int i = 0; i < samples; ++i) {
      const double t = 2 * M_PI * i / samples;
      const double v = at(t);
      if (v < best) {
        best = v;
        arg = t;
      }
    }
    return {arg, best};
  }
};

Outcome criterion1() {
  const auto t0 = Clock::now();
  Rng rng(1001);
  double worst_angle = 0, worst_obj = 0;
  int failures = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t m = 3 + rng.below(6);
    const double hidden = 2 * M_PI * rng.uniform();
    EmbeddingModel target("1990", 2);
    AnchorSet set;
    set.source_event = "E";
    set.k_requested = m;
    PlaneOracle oracle;
    for (std::size_t i = 0; i < m; ++i) {
      const double phi = 2 * M_PI * rng.uniform();
      const double scale = 0.5 + 2 * rng.uniform();
      const std::string tok = "a" + std::to_string(i);
      target.insert(tok, Vector{scale * std::cos(phi), scale * std::sin(phi)});
      const double d = std::clamp(1.0 - std::cos(hidden - phi) + 0.05 * rng.gaussian(), 0.0, 2.0);
      set.anchors.push_back({tok, d});
      oracle.anchor_angle.push_back(phi);
      oracle.target.push_back(d);
    }
    const auto [grid_arg, grid_val] = oracle.grid_min();
    const auto r = minimize(set, target, ProjectionConfig{});
    const double got = std::atan2(r.direction[1], r.direction[0]);
    const double da = angle_between(got, grid_arg);
    const double dobj = std::abs(r.objective - grid_val);
    worst_angle = std::max(worst_angle, da);
    worst_obj = std::max(worst_obj, dobj);
    if (da > 0.5 || dobj > 1e-3) ++failures;
  }
  const double secs = seconds_since(t0);
  Outcome o;
  o.pass = failures == 0 && secs < 30;
  o.detail = fmt::format("50 anchor sets, {} outside tolerance, max angle error {:.4f} deg, max objective gap {:.2e}, {:.2f} s",
                         failures, worst_angle, worst_obj, secs);
  return o;
}

Outcome criterion2() {
  Rng rng(2002);
  EmbeddingModel m("static", 10);
  for (int i = 0; i < 200; ++i) m.insert("t" + std::to_string(i), Vector(rng.unit_vector(10)));
  double worst_cos = 1, worst_obj = 0;
  std::size_t min_anchors = 1000;
  for (int i = 0; i < 20; ++i) {
    const std::string tok = "t" + std::to_string(i * 10);
    const Vector original = m.at(tok);
    auto anchors = select_anchors(tok, m, m, 30);
    min_anchors = std::min(min_anchors, anchors.anchors.size());
    const auto r = minimize(anchors, m, ProjectionConfig{});
    worst_cos = std::min(worst_cos, cosine(r.direction, original));
    worst_obj = std::max(worst_obj, r.objective);
  }
  Outcome o;
  o.pass = min_anchors >= 10 && worst_cos >= 0.99 && worst_obj <= 1e-8;
  o.detail = fmt::format("20 tokens, min anchors {}, min cosine {:.10f}, max objective {:.2e}", min_anchors,
                         worst_cos, worst_obj);
  return o;
}

Outcome criterion3() {
  // Source dim 100: event along e1; neighbours in the e1/e2 plane at 20, -35
  // and 60 degrees. Target dim 140: the same three words rotated by 50 degrees.
  const double deg = M_PI / 180;
  const std::vector<std::pair<std::string, double>> words = {{"alpha", 20 * deg}, {"beta", -35 * deg},
                                                             {"gamma", 60 * deg}};
  Rng rng(3003);
  EmbeddingModel source("static", 100), target("1990", 140);
  auto planar = [](std::size_t dim, double angle) {
    std::vector<double> v(dim, 0.0);
    v[0] = std::cos(angle);
    v[1] = std::sin(angle);
    return Vector(v);
  };
  source.insert("Event", planar(100, 0.0));
  for (const auto& [w, a] : words) {
    source.insert(w, planar(100, a));
    target.insert(w, planar(140, a + 50 * deg));
  }
  for (int i = 0; i < 50; ++i) {
    auto v = rng.unit_vector(100);
    v[0] = v[1] = 0;
    source.insert("noise" + std::to_string(i), Vector(v));
    auto u = rng.unit_vector(140);
    target.insert("noise" + std::to_string(i), Vector(u));
  }
  ProjectionConfig cfg;
  cfg.k_anchors = 3;
  Outcome o;
  try {
    auto anchors = select_anchors("Event", source, target, cfg.k_anchors);
    PlaneOracle oracle;
    for (const auto& a : anchors.anchors) {
      const Vector& t = target.at(a.token);
      oracle.anchor_angle.push_back(std::atan2(t[1], t[0]));
      oracle.target.push_back(a.target_distance);
    }
    const auto [grid_arg, grid_val] = oracle.grid_min();
    const auto out = project_event("Event", source, target, cfg);
    const Vector& v = target.at("Event");
    double off_plane = 0;
    for (std::size_t i = 2; i < v.dim(); ++i) off_plane += v[i] * v[i];
    off_plane = std::sqrt(off_plane);
    const double da = angle_between(std::atan2(v[1], v[0]), grid_arg);
    const double dobj = std::abs(out.result.objective - grid_val);
    o.pass = v.dim() == 140 && anchors.anchors.size() == 3 && da <= 0.5 && dobj <= 1e-3 && off_plane <= 1e-6;
    o.detail = fmt::format("dim {} -> {}, angle {:.4f} deg (grid {:.4f}, expected 50), objective gap {:.2e}, off-plane {:.1e}",
                           source.dim(), v.dim(), std::atan2(v[1], v[0]) / deg, grid_arg / deg, dobj, off_plane);
  } catch (const std::exception& ex) {
    o.pass = false;
    o.detail = ex.what();
  }
  return o;
}

Outcome criterion4() {
  Rng rng(4004);
  double worst = 0;
  for (int p = 0; p < 100; ++p) {
    const std::size_t dim = 2 + rng.below(30);
    const std::size_t m = 1 + rng.below(30);
    EmbeddingModel target("1990", dim);
    AnchorSet set;
    for (std::size_t i = 0; i < m; ++i) {
      std::vector<double> v(dim);
      for (double& x : v) x = rng.gaussian();
      target.insert("a" + std::to_string(i), Vector(v));
      set.anchors.push_back({"a" + std::to_string(i), 2 * rng.uniform()});
    }
    ProjectionObjective f(set, target);
    std::vector<double> x(dim);
    const double scale = 0.1 + 5 * rng.uniform();
    for (double& xi : x) xi = scale * rng.gaussian();
    std::vector<double> g(dim);
    f.value_and_gradient(x, g);
    double num2 = 0, den2 = 0;
    for (std::size_t i = 0; i < dim; ++i) {
      const double h = 1e-6 * std::max(1.0, std::abs(x[i]));
      auto xp = x, xm = x;
      xp[i] += h;
      xm[i] -= h;
      const double fd = (f.value(xp) - f.value(xm)) / (2 * h);
      num2 += (g[i] - fd) * (g[i] - fd);
      den2 += std::max(g[i] * g[i], fd * fd);
    }
    const double rel = std::sqrt(num2) / std::max(std::sqrt(den2), 1e-12);
    worst = std::max(worst, rel);
  }
  Outcome o;
  o.pass = worst <= 1e-4;
  o.detail = fmt::format("100 random points, max relative error {:.2e}", worst);
  return o;
}

// Brute-force metrics written from the definitions.
struct OracleMetrics {
  double p10, ap, ndcg;
};

OracleMetrics oracle_metrics(const std::vector<std::string>& ranking, const std::map<std::string, int>& qrels) {
  std::size_t total_rel = 0;
  std::vector<int> ideal;
  for (const auto& [d, r] : qrels) {
    if (r > 0) ++total_rel;
    ideal.push_back(r);
  }
  std::sort(ideal.rbegin(), ideal.rend());
  auto rel_of = [&](const std::string& d) {
    auto it = qrels.find(d);
    return it == qrels.end() ? 0 : it->second;
  };
  OracleMetrics m{0, 0, 0};
  double hits = 0, dcg = 0, idcg = 0;
  for (std::size_t i = 0; i < ranking.size(); ++i) {
    const int r = rel_of(ranking[i]);
    if (r > 0) {
      hits += 1;
      m.ap += hits / static_cast<double>(i + 1);
      if (i < 10) m.p10 += 0.1;
    }
    if (i < 10) dcg += r / std::log2(static_cast<double>(i) + 2);
  }
  for (std::size_t i = 0; i < ideal.size() && i < 10; ++i) idcg += ideal[i] / std::log2(static_cast<double>(i) + 2);
  m.ap = total_rel ? m.ap / static_cast<double>(total_rel) : 0;
  m.ndcg = idcg > 0 ? dcg / idcg : 0;
  return m;
}

Outcome criterion5() {
  Outcome o;
  const std::vector<std::string> ranking = {"r1", "n1", "r2"};
  const std::map<std::string, int> qrels = {{"r1", 1}, {"r2", 1}, {"n1", 0}};
  const double p = precision_at(ranking, qrels, 10);
  const double ap = average_precision(ranking, qrels);
  const double nd = ndcg_at(ranking, qrels, 10);
  const bool fixture = std::abs(p - 0.2) <= 1e-4 && std::abs(ap - 0.8333) <= 1e-4 && std::abs(nd - 0.9197) <= 1e-3;

  Rng rng(5005);
  int mismatches = 0;
  double worst = 0;
  for (int trial = 0; trial < 50; ++trial) {
    std::map<std::string, int> q;
    for (int i = 0; i < 25; ++i) {
      if (rng.uniform() < 0.6) q["d" + std::to_string(i)] = static_cast<int>(rng.below(3));
    }
    if (std::none_of(q.begin(), q.end(), [](const auto& kv) { return kv.second > 0; })) q["d0"] = 1;
    std::vector<std::string> pool;
    for (int i = 0; i < 25; ++i) pool.push_back("d" + std::to_string(i));
    for (std::size_t i = pool.size(); i > 1; --i) std::swap(pool[i - 1], pool[rng.below(i)]);
    pool.resize(1 + rng.below(20));
    const auto want = oracle_metrics(pool, q);
    const double e = std::max({std::abs(precision_at(pool, q, 10) - want.p10),
                               std::abs(average_precision(pool, q) - want.ap), std::abs(ndcg_at(pool, q, 10) - want.ndcg)});
    worst = std::max(worst, e);
    if (e > 1e-9) ++mismatches;
  }
  o.pass = fixture && mismatches == 0;
  o.detail = fmt::format("fixture P@10 {:.4f} AP {:.4f} NDCG@10 {:.4f}; 50 random runs, {} mismatches, max diff {:.1e}",
                         p, ap, nd, mismatches, worst);
  return o;
}

Outcome criterion6() {
  const auto events = fixtures::detection_events();
  const auto stats = build_tfidf(events);
  DetectionConfig cfg;
  cfg.scorer = Scorer::Frequency;
  cfg.min_score_frequency = 0.003;
  cfg.min_surface_occurrences = 2;
  cfg.mu = 0.5;
  Outcome o;
  int ok = 0;
  std::string bad;
  const auto cases = fixtures::detection_cases();
  for (const auto& c : cases) {
    std::vector<std::string> got;
    for (const auto& d : detect_for_query(make_query(c.query), events, cfg, {}, stats)) got.push_back(d.event->id);
    if (got == c.expected) {
      ++ok;
    } else {
      bad += fmt::format(" [{}: got {}]", c.query, fmt::join(got, ","));
    }
  }
  o.pass = ok == static_cast<int>(cases.size());
  o.detail = fmt::format("{}/{} queries match the hand-enumerated sets{}", ok, cases.size(), bad);
  return o;
}

Vector unit4(double a, double b, double c) { return Vector{a, b, c, std::sqrt(1 - a * a - b * b - c * c)}; }

Outcome criterion7() {
  // Year-t neighbours of the event, in order: n1, n2, n3 (cosines .80, .53, .27).
  EmbeddingModel now("1990", 4), before("1989", 4);
  for (auto* m : {&now, &before}) {
    m->insert("n1", Vector{1, 0, 0, 0});
    m->insert("n3", Vector{0, 0, 1, 0});
  }
  now.insert("n2", Vector{0, 1, 0, 0});
  now.insert("Quake", Vector{3, 2, 1, 0});
  now.insert("c", unit4(0.2, 0.1, 0.1));
  now.insert("eps", unit4(0.2, 0.1, 0.1));
  before.insert("c", unit4(0.1, 0.2, 0.4));
  before.insert("eps", unit4(0.1, 0.2, 0.005));
  TemporalModelSet set;
  set.add(1990, now);
  set.add(1989, before);
  EmbeddingModel before_full = before;
  before_full.insert("n2", Vector{0, 1, 0, 0});
  TemporalModelSet full;
  full.add(1990, now);
  full.add(1989, before_full);

  const auto e = fixtures::event("x", "Quake", 1990, "quake");
  const DetectedEvent d{&e, 1.0, 1990};
  const Query q_n1 = make_query("n1");

  struct Fixture {
    const char* name;
    double got;
    double want;
  };
  const std::vector<Fixture> fx = {
      {"k=1", temprel("c", d, full, 1), 0.2 / 0.1},
      {"k=2", temprel("c", d, full, 2), (0.2 / 0.1 + 0.1 / 0.2) / 2},
      {"k=3", temprel("c", d, full, 3), (0.2 / 0.1 + 0.1 / 0.2 + 0.1 / 0.4) / 3},
      {"prior cosine below epsilon", temprel("eps", d, full, 3), (0.2 / 0.1 + 0.1 / 0.2) / 2},
      {"query neighbour excluded, n2 missing in t-1", temprel("c", d, set, 2, &q_n1), 0.1 / 0.4},
  };
  double worst = 0;
  for (const auto& f : fx) worst = std::max(worst, std::abs(f.got - f.want));

  TemporalModelSet unchanged;
  unchanged.add(1990, now);
  unchanged.add(1989, now);
  const double same = temprel("c", d, unchanged, 3);

  EmbeddingModel orthogonal("1989", 4);
  for (const char* n : {"n1", "n2", "n3"}) orthogonal.insert(n, now.at(n));
  orthogonal.insert("c", Vector{0, 0, 0, 1});
  TemporalModelSet unusable;
  unusable.add(1990, now);
  unusable.add(1989, orthogonal);
  const double none = temprel("c", d, unusable, 3);

  Outcome o;
  o.pass = worst <= 1e-9 && same == 1.0 && none == 1.0;
  o.detail = fmt::format("5 fixtures, max error {:.1e}; unchanged geometry {}, no usable neighbour {}", worst, same, none);
  return o;
}

Outcome criterion8() {
  const auto bench = synth::make_mini_benchmark();
  const auto events = filter_events(bench.events);
  const auto stats = build_tfidf(events);
  TemporalModelSet aliased;
  for (const auto& e : events) {
    for (int y : {e.year - 1, e.year}) {
      if (!aliased.contains(y)) aliased.add(y, bench.static_model);
    }
  }
  ModelSet models{&bench.static_model, &aliased};
  ExpansionConfig sed, ted;
  sed.variant = Variant::Static;
  ted.variant = Variant::Temporal;
  sed.delta = ted.delta = 0.0;

  std::vector<Query> queries;
  for (const auto& t : bench.topics) queries.push_back(make_query(t.title, t.id));
  for (const char* extra : {"volcano", "oil spill", "embassy", "hurricane damage florida"}) queries.push_back(make_query(extra));

  int identical = 0, nonempty = 0;
  double worst = 0;
  for (const auto& q : queries) {
    const auto a = expand(q, sed, DetectionConfig{}, events, models, stats);
    const auto b = expand(q, ted, DetectionConfig{}, events, models, stats);
    bool same = a.weights.size() == b.weights.size();
    for (const auto& [term, w] : a.weights) {
      auto it = b.weights.find(term);
      if (it == b.weights.end()) {
        same = false;
        continue;
      }
      worst = std::max(worst, std::abs(w - it->second));
      same = same && std::abs(w - it->second) <= 1e-12;
    }
    identical += same;
    nonempty += !a.weights.empty();
  }
  Outcome o;
  o.pass = identical == static_cast<int>(queries.size()) && nonempty >= 10;
  o.detail = fmt::format("{}/{} queries identical ({} non-empty), max weight difference {:.1e}", identical,
                         queries.size(), nonempty, worst);
  return o;
}

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("edqe_acceptance_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

const fs::path kMini = fs::path(EDQE_DATA_DIR) / "mini";

Outcome criterion9() {
  const auto t0 = Clock::now();
  Outcome o;
  auto cfg = load_config(kMini / "config.json");
  cfg.paths.out = scratch("eval");
  std::ostringstream log;
  if (cmd_eval(cfg, SearchMode::Temporal, log) != 0) {
    o.pass = false;
    o.detail = "eval failed: " + log.str();
    return o;
  }
  std::map<std::string, double> map_of;
  std::istringstream lines(slurp(cfg.paths.out / "eval.jsonl"));
  std::string line;
  while (std::getline(lines, line)) {
    auto j = nlohmann::json::parse(line);
    if (j["qid"] == "all") map_of[j["run"].get<std::string>()] = j["MAP"].get<double>();
  }
  const double secs = seconds_since(t0);
  o.pass = map_of.count("none") && map_of.count("temporal") && map_of["temporal"] >= map_of["none"] && secs < 120;
  o.detail = fmt::format("MAP unexpanded {:.4f}, TED {:.4f}, {:.2f} s", map_of["none"], map_of["temporal"], secs);
  return o;
}

Outcome criterion10() {
  Outcome o;
  const auto out1 = scratch("search1"), out2 = scratch("search2");
  const std::string base = std::string(EDQE_CLI) + " --config " + (kMini / "config.json").string() + " --seed 7 --out ";
  const int rc1 = std::system((base + out1.string() + " search --variant temporal 2>/dev/null").c_str());
  const int rc2 = std::system((base + out2.string() + " search --variant temporal 2>/dev/null").c_str());
  const std::string a = slurp(out1 / "run.txt"), b = slurp(out2 / "run.txt");
  const bool same_bytes = rc1 == 0 && rc2 == 0 && !a.empty() && a == b;

  // Permuted ingestion order.
  auto cfg = load_config(kMini / "config.json");
  auto docs = load_corpus(cfg.paths.corpus);
  auto shuffled = docs;
  Rng rng(1010);
  for (std::size_t i = shuffled.size(); i > 1; --i) std::swap(shuffled[i - 1], shuffled[rng.below(i)]);
  std::reverse(docs.begin(), docs.end());
  const auto idx_a = index_corpus(docs);
  const auto idx_b = index_corpus(shuffled);
  auto events = filter_events(load_events(cfg.paths.events).events);
  const auto stats = build_tfidf(events);
  auto stat = load_model(cfg.paths.static_model);
  auto temporal = load_temporal_models(cfg.paths.temporal_dir);
  project_all(events, stat, temporal, cfg.projection);
  const ModelSet models{&stat, &temporal};
  int equal = 0, total = 0;
  for (const auto& t : load_trec_topics(cfg.paths.topics).topics) {
    const auto x = expand(make_query(t.title, t.id), cfg.expansion, cfg.detection, events, models, stats);
    const auto qm = interpolate(x, cfg.retrieval);
    equal += rank(idx_a, qm, 1000) == rank(idx_b, qm, 1000);
    ++total;
  }
  o.pass = same_bytes && equal == total && total > 0;
  o.detail = fmt::format("run files {} ({} bytes); permuted corpus: {}/{} rankings identical",
                         same_bytes ? "byte-identical" : "DIFFER", a.size(), equal, total);
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"projection oracle equivalence (2-D grid)", criterion1},
      {"self-projection recovery", criterion2},
      {"cross-dimensional projection (100 -> 140)", criterion3},
      {"analytic gradient vs central differences", criterion4},
      {"metric correctness", criterion5},
      {"detection fixtures", criterion6},
      {"TempRel arithmetic", criterion7},
      {"variant reduction (delta = 0, aliased models)", criterion8},
      {"mini benchmark: TED MAP >= unexpanded MAP", criterion9},
      {"determinism", criterion10},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& ex) {
      o.pass = false;
      o.detail = std::string("exception: ") + ex.what();
    }
    failed += !o.pass;
    std::cout << fmt::format("{} C{:<2} {}: {}\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail);
  }
  std::cout << fmt::format("{} of {} criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
