#include "edqe/synth.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>

#include <fmt/format.h>
#include <json.hpp>

#include "edqe/pipeline.hpp"
#include "edqe/random.hpp"

namespace edqe::synth {

namespace {

struct TopicSpec {
  const char* query;
  const char* event_name;
  int year;
  std::vector<const char*> vocab;
};

const std::vector<TopicSpec>& topic_specs() {
  static const std::vector<TopicSpec> specs = {
      {"volcano eruption casualties", "1991 Mount Pinatubo eruption", 1991,
       {"pinatubo", "luzon", "lahar", "ashfall", "magma", "caldera", "evacuees", "zambales"}},
      {"oil tanker spill", "2002 Prestige oil spill", 2002,
       {"prestige", "galicia", "slick", "coastline", "seabirds", "cleanup", "hull", "fuel"}},
      {"stadium crowd tragedy", "1989 Hillsborough disaster", 1989,
       {"hillsborough", "sheffield", "liverpool", "terraces", "crush", "fans", "turnstiles", "inquest"}},
      {"nuclear reactor accident", "1986 Chernobyl disaster", 1986,
       {"chernobyl", "pripyat", "ukraine", "radiation", "fallout", "graphite", "contamination", "sarcophagus"}},
      {"african civilian deaths", "1994 Rwandan genocide", 1994,
       {"rwanda", "tutsi", "hutu", "kigali", "militia", "refugees", "massacre", "uganda"}},
      {"embassy bombing attack", "1998 United States embassy bombings", 1998,
       {"nairobi", "tanzania", "kenya", "truck", "qaeda", "blast", "salaam", "diplomats"}},
      {"earthquake rescue efforts", "1995 Great Hanshin earthquake", 1995,
       {"kobe", "hanshin", "japan", "aftershock", "rubble", "highway", "collapsed", "quake"}},
      {"hurricane storm damage", "1992 Hurricane Andrew", 1992,
       {"andrew", "florida", "homestead", "miami", "landfall", "trailers", "insurance", "gusts"}},
      {"shuttle launch explosion", "1986 Space Shuttle Challenger disaster", 1986,
       {"challenger", "booster", "seals", "nasa", "astronauts", "canaveral", "teacher", "orbiter"}},
      {"ferry sinking passengers", "1994 MS Estonia sinking", 1994,
       {"estonia", "baltic", "stockholm", "tallinn", "bow", "visor", "survivors", "capsized"}},
  };
  return specs;
}

struct ExtraEvent {
  const char* name;
  int year;
  double views;
  long refs;
  const char* query_word;  // appears three times, or nullptr
};

// Distractors that pass the default filter, then records that fail it.
const std::vector<ExtraEvent>& extra_events() {
  static const std::vector<ExtraEvent> extras = {
      {"1990 Commonwealth Games", 1990, 21000, 40, "stadium"},
      {"1993 Budget Summit", 1993, 9000, 22, "efforts"},
      {"1997 Asian financial crisis", 1997, 30000, 80, nullptr},
      {"2000 Summer Olympics", 2000, 52000, 120, "crowd"},
      {"1996 General Election", 1996, 8000, 30, "attack"},
      {"1975 Suez Canal reopening", 1975, 12000, 25, nullptr},
      {"1999 County Fair", 1999, 3000, 18, nullptr},
      {"2001 Regional Flood", 2001, 5000, 20, nullptr},
      {"1988 Harbour Festival", 1988, 7000, 15, nullptr},
  };
  return extras;
}

const std::vector<const char*>& generic_words() {
  static const std::vector<const char*> words = {
      "officials", "government", "report", "week", "national", "minister", "president", "city",
      "country", "police", "people", "local", "spokesman", "statement", "agency", "news",
      "month", "public", "political", "economy", "market", "company", "business", "season",
      "team", "school", "family", "health", "program", "university", "court", "budget",
      "election", "trade", "bank", "price", "industry", "workers", "union", "farmers",
      "music", "film", "museum", "weather", "traffic", "technology", "science", "computer",
      "tourism", "festival", "church", "hospital", "league", "council", "committee", "region",
      "village", "island", "river", "official"};
  return words;
}

constexpr std::size_t kStaticDim = 32;
constexpr std::size_t kTemporalDim = 40;
constexpr int kFirstYear = 1985;
constexpr int kLastYear = 2003;

double round6(double x) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 6);
  double out = 0.0;
  std::from_chars(buf, res.ptr, out);
  return out;
}

Vector perturbed(const std::vector<double>& center, double spread, Rng& rng) {
  const auto noise = rng.unit_vector(center.size());
  std::vector<double> v(center.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = round6(center[i] + spread * noise[i]);
  return Vector(std::move(v));
}

std::vector<std::string> name_words(const std::string& name) {
  std::vector<std::string> out;
  for (auto& w : tokenize(normalize_name(name), false)) out.push_back(w);
  return out;
}

std::string join_sentences(std::vector<std::string> words, Rng& rng) {
  for (std::size_t i = words.size(); i > 1; --i) std::swap(words[i - 1], words[rng.below(i)]);
  std::string text;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i) text += (i % 12 == 0) ? ". " : " ";
    text += words[i];
  }
  if (!text.empty()) text += '.';
  return text;
}

void add_words(std::vector<std::string>& out, const std::string& w, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out.push_back(w);
}

std::vector<std::string> filler(Rng& rng, std::size_t n) {
  const auto& g = generic_words();
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.emplace_back(g[rng.below(g.size())]);
  return out;
}

std::vector<std::string> split_query(const char* q) { return tokenize(q, false); }

}  // namespace

MiniBenchmark make_mini_benchmark(std::uint64_t seed) {
  MiniBenchmark b;
  Rng rng(seed);
  const auto& specs = topic_specs();

  // Events and their entries.
  for (std::size_t t = 0; t < specs.size(); ++t) {
    const auto& s = specs[t];
    std::vector<std::string> words = filler(rng, 70);
    for (const char* v : s.vocab) add_words(words, v, 3 + rng.below(4));
    for (const auto& q : split_query(s.query)) add_words(words, q, 3);
    for (const auto& n : name_words(s.event_name)) add_words(words, n, 2);
    EventRecord e;
    e.id = fmt::format("E{:02}", t + 1);
    e.name = s.event_name;
    e.normalized_name = normalize_name(e.name);
    e.year = s.year;
    e.entry_text = join_sentences(std::move(words), rng);
    e.monthly_views = 20000 + 1000.0 * static_cast<double>(t);
    e.external_refs = 30 + static_cast<long>(t);
    b.events.push_back(std::move(e));
  }
  for (std::size_t i = 0; i < extra_events().size(); ++i) {
    const auto& x = extra_events()[i];
    std::vector<std::string> words = filler(rng, 110);
    if (x.query_word) add_words(words, x.query_word, 3);
    for (const auto& n : name_words(x.name)) add_words(words, n, 2);
    EventRecord e;
    e.id = fmt::format("E{:02}", specs.size() + i + 1);
    e.name = x.name;
    e.normalized_name = normalize_name(e.name);
    e.year = x.year;
    e.entry_text = join_sentences(std::move(words), rng);
    e.monthly_views = x.views;
    e.external_refs = x.refs;
    b.events.push_back(std::move(e));
  }

  // Word clusters: each topic's vocabulary, event-name words and query words.
  std::vector<std::vector<std::string>> cluster_words(specs.size());
  std::vector<std::vector<std::string>> cluster_query(specs.size());
  std::set<std::string> seen;
  for (std::size_t t = 0; t < specs.size(); ++t) {
    for (const auto& q : split_query(specs[t].query)) {
      if (seen.insert(q).second) cluster_query[t].push_back(q);
    }
    for (const char* v : specs[t].vocab) {
      if (seen.insert(v).second) cluster_words[t].emplace_back(v);
    }
    for (const auto& n : name_words(specs[t].event_name)) {
      if (seen.insert(n).second) cluster_words[t].push_back(n);
    }
  }
  std::vector<std::string> loose_words;
  for (const char* g : generic_words()) {
    if (seen.insert(g).second) loose_words.emplace_back(g);
  }
  for (const auto& x : extra_events()) {
    for (const auto& n : name_words(x.name)) {
      if (seen.insert(n).second) loose_words.push_back(n);
    }
  }

  // Static model: words and events share one space.
  b.static_model = EmbeddingModel("static", kStaticDim);
  {
    Rng srng(seed ^ 0x5157A71CULL);
    for (std::size_t t = 0; t < specs.size(); ++t) {
      const auto center = srng.unit_vector(kStaticDim);
      for (const auto& w : cluster_words[t]) b.static_model.insert(w, perturbed(center, 0.6, srng));
      for (const auto& w : cluster_query[t]) b.static_model.insert(w, perturbed(center, 0.9, srng));
      b.static_model.insert(event_token(b.events[t]), perturbed(center, 0.25, srng));
    }
    for (const auto& w : loose_words) b.static_model.insert(w, perturbed(srng.unit_vector(kStaticDim), 0.0, srng));
    for (std::size_t i = specs.size(); i < b.events.size(); ++i) {
      b.static_model.insert(event_token(b.events[i]), perturbed(srng.unit_vector(kStaticDim), 0.0, srng));
    }
  }

  // Yearly models: fixed cluster centers and word offsets with a small jitter
  // per year, so vectors drift slowly; a topic's cluster is tight in its
  // event's year and loose otherwise.
  std::vector<std::vector<double>> year_centers;
  std::map<std::string, std::vector<double>> offsets;
  {
    Rng brng(seed ^ 0x7E3F0000ULL);
    for (std::size_t t = 0; t < specs.size(); ++t) {
      year_centers.push_back(brng.unit_vector(kTemporalDim));
      for (const auto& w : cluster_words[t]) offsets[w] = brng.unit_vector(kTemporalDim);
      for (const auto& w : cluster_query[t]) offsets[w] = brng.unit_vector(kTemporalDim);
    }
    for (const auto& w : loose_words) offsets[w] = brng.unit_vector(kTemporalDim);
  }
  auto drifted = [&](const std::vector<double>& center, double spread, const std::string& w, Rng& rng) {
    std::vector<double> base(kTemporalDim);
    const auto& off = offsets.at(w);
    for (std::size_t i = 0; i < base.size(); ++i) base[i] = center[i] + spread * off[i];
    return perturbed(base, 0.15, rng);
  };
  const std::vector<double> origin(kTemporalDim, 0.0);
  for (int year = kFirstYear; year <= kLastYear; ++year) {
    Rng yrng(seed ^ (0x7E3F0000ULL + static_cast<std::uint64_t>(year)));
    EmbeddingModel m(std::to_string(year), kTemporalDim);
    for (std::size_t t = 0; t < specs.size(); ++t) {
      const double spread = specs[t].year == year ? 0.5 : 1.1;
      for (const auto& w : cluster_words[t]) m.insert(w, drifted(year_centers[t], spread, w, yrng));
      for (const auto& w : cluster_query[t]) m.insert(w, drifted(year_centers[t], 0.9, w, yrng));
    }
    for (const auto& w : loose_words) m.insert(w, drifted(origin, 1.0, w, yrng));
    b.temporal.add(year, std::move(m));
  }

  // Corpus.
  struct Draft {
    std::string text;
    int topic = -1;
    bool relevant = false;
  };
  std::vector<Draft> drafts;
  for (std::size_t t = 0; t < specs.size(); ++t) {
    const auto q = split_query(specs[t].query);
    const auto& vocab = specs[t].vocab;
    auto pick_vocab = [&](std::vector<std::string>& words, std::size_t n) {
      std::vector<std::size_t> idx(vocab.size());
      for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
      for (std::size_t i = idx.size(); i > 1; --i) std::swap(idx[i - 1], idx[rng.below(i)]);
      for (std::size_t i = 0; i < n; ++i) add_words(words, vocab[idx[i]], 1 + rng.below(2));
    };
    for (int d = 0; d < 6; ++d) {  // relevant, mentions the query
      auto words = filler(rng, 30);
      const std::size_t skip = rng.below(q.size());
      for (std::size_t i = 0; i < q.size(); ++i) {
        if (i != skip) add_words(words, q[i], 1 + rng.below(2));
      }
      pick_vocab(words, 4);
      drafts.push_back({join_sentences(std::move(words), rng), static_cast<int>(t), true});
    }
    for (int d = 0; d < 6; ++d) {  // relevant, event vocabulary only
      auto words = filler(rng, 30);
      pick_vocab(words, 5);
      drafts.push_back({join_sentences(std::move(words), rng), static_cast<int>(t), true});
    }
    for (int d = 0; d < 4; ++d) {  // off-topic use of the query words
      auto words = filler(rng, 30);
      for (const auto& w : q) add_words(words, w, 1 + rng.below(2));
      drafts.push_back({join_sentences(std::move(words), rng), static_cast<int>(t), false});
    }
  }
  for (int d = 0; d < 40; ++d) drafts.push_back({join_sentences(filler(rng, 40), rng), -1, false});

  std::vector<std::size_t> order(drafts.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
  std::vector<std::string> ids(drafts.size());
  for (std::size_t pos = 0; pos < order.size(); ++pos) ids[order[pos]] = fmt::format("MINI-{:04}", pos + 1);
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    const std::size_t i = order[pos];
    b.docs.push_back({ids[i], drafts[i].text});
  }

  for (std::size_t t = 0; t < specs.size(); ++t) {
    const std::string qid = std::to_string(401 + t);
    b.topics.push_back({qid, specs[t].query});
    auto& judged = b.qrels[qid];
    for (std::size_t i = 0; i < drafts.size(); ++i) {
      if (drafts[i].topic == static_cast<int>(t)) judged[ids[i]] = drafts[i].relevant ? 1 : 0;
    }
  }
  return b;
}

void write_mini_benchmark(const MiniBenchmark& b, const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  save_model(dir / "static.txt", b.static_model);
  save_temporal_models(dir / "temporal", b.temporal);

  {
    std::ofstream out(dir / "events.jsonl", std::ios::binary);
    for (const auto& e : b.events) {
      nlohmann::ordered_json j;
      j["id"] = e.id;
      j["name"] = e.name;
      j["year"] = e.year;
      j["entry_text"] = e.entry_text;
      j["monthly_views"] = e.monthly_views;
      j["external_refs"] = e.external_refs;
      out << j.dump() << '\n';
    }
  }
  {
    std::ofstream out(dir / "corpus.jsonl", std::ios::binary);
    for (const auto& d : b.docs) {
      nlohmann::ordered_json j;
      j["doc_id"] = d.doc_id;
      j["text"] = d.text;
      out << j.dump() << '\n';
    }
  }
  {
    std::ofstream out(dir / "topics.txt", std::ios::binary);
    for (const auto& t : b.topics) {
      out << "<top>\n<num> Number: " << t.id << "\n<title> " << t.title << "\n</top>\n\n";
    }
  }
  {
    std::ofstream out(dir / "qrels.txt", std::ios::binary);
    for (const auto& [qid, judged] : b.qrels) {
      for (const auto& [doc, rel] : judged) out << qid << " 0 " << doc << ' ' << rel << '\n';
    }
  }

  PipelineConfig cfg;
  cfg.paths.static_model = "static.txt";
  cfg.paths.temporal_dir = "temporal";
  cfg.paths.events = "events.jsonl";
  cfg.paths.corpus = "corpus.jsonl";
  cfg.paths.topics = "topics.txt";
  cfg.paths.qrels = "qrels.txt";
  cfg.paths.out = "out";
  save_config(dir / "config.json", cfg);
}

}  // namespace edqe::synth
