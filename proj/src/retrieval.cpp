#include "edqe/retrieval.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "edqe/errors.hpp"

namespace edqe {

const std::vector<Posting>* InvertedIndex::postings(std::string_view token) const {
  auto it = postings_.find(std::string(token));
  return it == postings_.end() ? nullptr : &it->second;
}

long InvertedIndex::document_frequency(std::string_view token) const {
  const auto* p = postings(token);
  return p ? static_cast<long>(p->size()) : 0;
}

long InvertedIndex::doc_length(std::string_view doc_id) const {
  auto it = doc_lengths_.find(std::string(doc_id));
  return it == doc_lengths_.end() ? 0 : it->second;
}

InvertedIndex index_corpus(const std::vector<Document>& docs, const Analyzer& analyzer) {
  InvertedIndex idx;
  idx.analyzer_ = analyzer;
  for (const auto& d : docs) {
    if (idx.doc_lengths_.count(d.doc_id)) {
      throw InvalidArgument(fmt::format("duplicate document id '{}'", d.doc_id));
    }
    std::map<std::string, long> counts;
    long length = 0;
    for (auto& tok : analyzer(d.text)) {
      ++counts[std::move(tok)];
      ++length;
    }
    idx.doc_lengths_.emplace(d.doc_id, length);
    for (auto& [tok, n] : counts) idx.postings_[tok].push_back({d.doc_id, n});
  }
  for (auto& [tok, list] : idx.postings_) {
    std::sort(list.begin(), list.end(), [](const Posting& a, const Posting& b) { return a.doc_id < b.doc_id; });
  }
  return idx;
}

std::vector<Document> load_corpus(const std::filesystem::path& path) {
  std::vector<Document> docs;
  if (std::filesystem::is_directory(path)) {
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(path)) {
      if (entry.is_regular_file()) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      std::ifstream in(f);
      std::stringstream ss;
      ss << in.rdbuf();
      docs.push_back({f.filename().string(), ss.str()});
    }
    return docs;
  }
  std::ifstream in(path);
  if (!in) throw Error(fmt::format("cannot open corpus {}", path.string()));
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      auto j = nlohmann::json::parse(line);
      docs.push_back({j.at("doc_id").get<std::string>(), j.at("text").get<std::string>()});
    } catch (const std::exception& ex) {
      throw FormatError(fmt::format("{}:{}: {}", path.string(), lineno, ex.what()));
    }
  }
  return docs;
}

void RetrievalConfig::validate() const {
  if (interp_alpha < 0.0 || interp_alpha > 1.0) throw InvalidArgument("interp_alpha must lie in [0, 1]");
  if (depth == 0) throw InvalidArgument("depth must be positive");
}

QueryModel max_likelihood(const Query& q) {
  QueryModel m;
  if (q.terms.empty()) return m;
  for (const auto& t : q.terms) m[t] += 1.0;
  for (auto& [t, w] : m) w /= static_cast<double>(q.terms.size());
  return m;
}

QueryModel interpolate(const ExpandedQuery& expanded, const RetrievalConfig& config) {
  config.validate();
  QueryModel ml = max_likelihood(expanded.original);
  if (expanded.weights.empty()) return ml;
  const double a = config.interp_alpha;
  QueryModel out;
  for (const auto& [t, w] : ml) out[t] += (1.0 - a) * w;
  for (const auto& [t, w] : expanded.weights) out[t] += a * w;
  return out;
}

std::vector<ScoredDoc> rank(const InvertedIndex& index, const QueryModel& query_model, std::size_t depth) {
  std::map<std::string, double> weights;
  for (const auto& [key, w] : query_model) {
    auto toks = index.analyzer()(key);
    for (auto& t : toks) weights[t] += w / static_cast<double>(toks.size());
  }
  const double n = static_cast<double>(index.num_docs());
  std::map<std::string, double> acc;
  for (const auto& [tok, w] : weights) {
    const auto* list = index.postings(tok);
    if (!list) continue;
    const double idf = std::log(n / static_cast<double>(list->size()));
    for (const auto& p : *list) {
      const double len = static_cast<double>(index.doc_length(p.doc_id));
      acc[p.doc_id] += w * (static_cast<double>(p.count) / len) * idf;
    }
  }
  std::vector<ScoredDoc> out;
  out.reserve(acc.size());
  for (auto& [doc, s] : acc) out.push_back({doc, s});
  auto order = [](const ScoredDoc& a, const ScoredDoc& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.doc_id < b.doc_id;
  };
  const std::size_t take = std::min(depth, out.size());
  std::partial_sort(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(take), out.end(), order);
  out.resize(take);
  return out;
}

namespace {

std::string collapse_ws(std::string_view s) {
  std::string out;
  bool space = false;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      space = !out.empty();
    } else {
      if (space) out += ' ';
      space = false;
      out += c;
    }
  }
  return out;
}

// Text following `tag` up to the next '<', or nullopt if the tag is absent.
std::optional<std::string> field(std::string_view block, std::string_view tag) {
  auto pos = block.find(tag);
  if (pos == std::string_view::npos) return std::nullopt;
  pos += tag.size();
  auto end = block.find('<', pos);
  return collapse_ws(block.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos));
}

std::string strip_prefix(std::string s, std::string_view prefix) {
  if (s.size() >= prefix.size()) {
    bool match = true;
    for (std::size_t i = 0; i < prefix.size(); ++i) {
      if (std::tolower(static_cast<unsigned char>(s[i])) != std::tolower(static_cast<unsigned char>(prefix[i]))) {
        match = false;
        break;
      }
    }
    if (match) s = collapse_ws(std::string_view(s).substr(prefix.size()));
  }
  return s;
}

}  // namespace

TopicParseResult parse_trec_topics(std::string_view text) {
  TopicParseResult out;
  std::size_t pos = 0;
  std::size_t index = 0;
  while ((pos = text.find("<top>", pos)) != std::string_view::npos) {
    ++index;
    auto end = text.find("</top>", pos);
    std::string_view block = text.substr(pos + 5, end == std::string_view::npos ? std::string_view::npos : end - pos - 5);
    pos = end == std::string_view::npos ? text.size() : end + 6;
    auto num = field(block, "<num>");
    auto title = field(block, "<title>");
    if (num) *num = strip_prefix(*num, "Number:");
    if (title) *title = strip_prefix(*title, "Topic:");
    if (!num || num->empty()) {
      out.errors.push_back(fmt::format("topic #{}: missing <num>", index));
      continue;
    }
    if (!title || title->empty()) {
      out.errors.push_back(fmt::format("topic {}: missing <title>", *num));
      continue;
    }
    out.topics.push_back({*num, *title});
  }
  return out;
}

TopicParseResult load_trec_topics(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(fmt::format("cannot open topics {}", path.string()));
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_trec_topics(ss.str());
}

QrelsParseResult parse_qrels(std::istream& in) {
  QrelsParseResult out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::vector<std::string> cols;
    for (std::string c; ls >> c;) cols.push_back(c);
    if (cols.empty()) continue;
    if (cols.size() != 4) {
      throw FormatError(fmt::format("qrels line {}: expected 4 columns, got {}", lineno, cols.size()));
    }
    int rel = 0;
    auto [ptr, ec] = std::from_chars(cols[3].data(), cols[3].data() + cols[3].size(), rel);
    if (ec != std::errc() || ptr != cols[3].data() + cols[3].size()) {
      throw FormatError(fmt::format("qrels line {}: relevance '{}' is not an integer", lineno, cols[3]));
    }
    auto& judged = out.qrels[cols[0]];
    auto [it, inserted] = judged.insert_or_assign(cols[2], rel);
    if (!inserted) {
      out.warnings.push_back(fmt::format("qrels line {}: duplicate judgment for ({}, {}); keeping the later one",
                                         lineno, cols[0], cols[2]));
    }
  }
  return out;
}

QrelsParseResult load_qrels(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(fmt::format("cannot open qrels {}", path.string()));
  return parse_qrels(in);
}

void write_trec_run(std::ostream& out, const Run& run, const std::string& tag) {
  for (const auto& [qid, docs] : run) {
    for (std::size_t i = 0; i < docs.size(); ++i) {
      out << fmt::format("{} Q0 {} {} {:.10g} {}\n", qid, docs[i].doc_id, i + 1, docs[i].score, tag);
    }
  }
}

Run parse_trec_run(std::istream& in) {
  Run run;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string qid, q0, doc, tag;
    long rank_no = 0;
    double score = 0.0;
    if (!(ls >> qid)) continue;
    if (!(ls >> q0 >> doc >> rank_no >> score >> tag)) {
      throw FormatError(fmt::format("run line {}: expected 6 columns", lineno));
    }
    run[qid].push_back({doc, score});
  }
  return run;
}

namespace {

int relevance(const std::map<std::string, int>& judgments, const std::string& doc) {
  auto it = judgments.find(doc);
  return it == judgments.end() ? 0 : it->second;
}

// First occurrence of each document only.
std::vector<std::string> dedup(const std::vector<std::string>& ranking) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& d : ranking) {
    if (seen.insert(d).second) out.push_back(d);
  }
  return out;
}

}  // namespace

double precision_at(const std::vector<std::string>& ranking, const std::map<std::string, int>& judgments,
                    std::size_t k) {
  const auto r = dedup(ranking);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < std::min(k, r.size()); ++i) {
    if (relevance(judgments, r[i]) > 0) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(k);
}

double average_precision(const std::vector<std::string>& ranking, const std::map<std::string, int>& judgments,
                         std::size_t depth) {
  std::size_t total_relevant = 0;
  for (const auto& [doc, rel] : judgments) {
    if (rel > 0) ++total_relevant;
  }
  if (total_relevant == 0) return 0.0;
  const auto r = dedup(ranking);
  double sum = 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < std::min(depth, r.size()); ++i) {
    if (relevance(judgments, r[i]) > 0) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(i + 1);
    }
  }
  return sum / static_cast<double>(total_relevant);
}

double ndcg_at(const std::vector<std::string>& ranking, const std::map<std::string, int>& judgments,
               std::size_t k) {
  const auto r = dedup(ranking);
  double dcg = 0.0;
  for (std::size_t i = 0; i < std::min(k, r.size()); ++i) {
    const int rel = relevance(judgments, r[i]);
    if (rel > 0) dcg += rel / std::log2(static_cast<double>(i) + 2.0);
  }
  std::vector<int> gains;
  for (const auto& [doc, rel] : judgments) {
    if (rel > 0) gains.push_back(rel);
  }
  std::sort(gains.begin(), gains.end(), std::greater<>());
  double ideal = 0.0;
  for (std::size_t i = 0; i < std::min(k, gains.size()); ++i) ideal += gains[i] / std::log2(static_cast<double>(i) + 2.0);
  return ideal > 0.0 ? dcg / ideal : 0.0;
}

EvalReport evaluate(const Run& run, const Qrels& qrels) {
  EvalReport report;
  for (const auto& [qid, docs] : run) {
    auto it = qrels.find(qid);
    const bool has_relevant =
        it != qrels.end() && std::any_of(it->second.begin(), it->second.end(), [](const auto& p) { return p.second > 0; });
    if (!has_relevant) {
      report.skipped.push_back(qid);
      continue;
    }
    std::vector<std::string> ranking;
    ranking.reserve(docs.size());
    for (const auto& d : docs) ranking.push_back(d.doc_id);
    QueryMetrics m;
    m.p10 = precision_at(ranking, it->second, 10);
    m.ndcg10 = ndcg_at(ranking, it->second, 10);
    m.ap = average_precision(ranking, it->second, 1000);
    report.per_query.emplace(qid, m);
  }
  if (!report.per_query.empty()) {
    const double n = static_cast<double>(report.per_query.size());
    for (const auto& [qid, m] : report.per_query) {
      report.means.p10 += m.p10;
      report.means.ndcg10 += m.ndcg10;
      report.means.ap += m.ap;
    }
    report.means.p10 /= n;
    report.means.ndcg10 /= n;
    report.means.ap /= n;
  }
  return report;
}

}  // namespace edqe
