#pragma once

// Inverted index, TF-IDF ranking of interpolated query models, TREC topic /
// qrels / run files and P@10, NDCG@10, AP.

#include <filesystem>
#include <map>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "edqe/analysis.hpp"
#include "edqe/expansion.hpp"

namespace edqe {

struct Document {
  std::string doc_id;
  std::string text;
};

struct Posting {
  std::string doc_id;
  long count = 0;
  friend bool operator==(const Posting&, const Posting&) = default;
};

class InvertedIndex {
 public:
  std::size_t num_docs() const { return doc_lengths_.size(); }
  const std::vector<Posting>* postings(std::string_view token) const;
  long document_frequency(std::string_view token) const;
  long doc_length(std::string_view doc_id) const;
  const std::map<std::string, std::vector<Posting>>& all_postings() const { return postings_; }
  const std::map<std::string, long>& doc_lengths() const { return doc_lengths_; }
  const Analyzer& analyzer() const { return analyzer_; }

 private:
  friend InvertedIndex index_corpus(const std::vector<Document>& docs, const Analyzer& analyzer);

  std::map<std::string, std::vector<Posting>> postings_;  // sorted by doc_id
  std::map<std::string, long> doc_lengths_;
  Analyzer analyzer_;
};

// Throws InvalidArgument on duplicate doc ids.
InvertedIndex index_corpus(const std::vector<Document>& docs, const Analyzer& analyzer = {});

// A directory of plain-text files (doc id = file name) or a file of JSON
// lines {doc_id, text}.
std::vector<Document> load_corpus(const std::filesystem::path& path);

struct RetrievalConfig {
  double interp_alpha = 0.6;
  std::size_t depth = 1000;
  friend bool operator==(const RetrievalConfig&, const RetrievalConfig&) = default;
  void validate() const;
};

using QueryModel = std::map<std::string, double>;

// P(w|q) = a P_ED(w|q) + (1 - a) P_ML(w|q); P_ML alone when there are no
// expansion weights.
QueryModel interpolate(const ExpandedQuery& expanded, const RetrievalConfig& config);

// Maximum-likelihood model of the query terms.
QueryModel max_likelihood(const Query& q);

struct ScoredDoc {
  std::string doc_id;
  double score = 0.0;
  friend bool operator==(const ScoredDoc&, const ScoredDoc&) = default;
};

// score(d) = sum_w P(w|q) tf_d(w) / len(d) ln(N / df(w)). Query model keys are
// analyzed with the index's analyzer; keys that share an index token add up.
// Only documents containing at least one query token are returned; descending
// score, ties by doc id, at most `depth` results.
std::vector<ScoredDoc> rank(const InvertedIndex& index, const QueryModel& query_model, std::size_t depth);

struct Topic {
  std::string id;
  std::string title;
};

// TREC <top> blocks; one entry per topic from <num> and <title>. Topics
// missing either field are reported in `errors` and skipped.
struct TopicParseResult {
  std::vector<Topic> topics;
  std::vector<std::string> errors;
};
TopicParseResult parse_trec_topics(std::string_view text);
TopicParseResult load_trec_topics(const std::filesystem::path& path);

using Qrels = std::map<std::string, std::map<std::string, int>>;  // qid -> doc -> rel

struct QrelsParseResult {
  Qrels qrels;
  std::vector<std::string> warnings;
};
// "qid iter docid rel" lines. Throws FormatError on a malformed line; later
// duplicates overwrite earlier ones with a warning.
QrelsParseResult parse_qrels(std::istream& in);
QrelsParseResult load_qrels(const std::filesystem::path& path);

using Run = std::map<std::string, std::vector<ScoredDoc>>;  // qid -> ranking

// "qid Q0 docid rank score tag" lines.
void write_trec_run(std::ostream& out, const Run& run, const std::string& tag);
Run parse_trec_run(std::istream& in);

struct QueryMetrics {
  double p10 = 0.0;
  double ndcg10 = 0.0;
  double ap = 0.0;
};

double precision_at(const std::vector<std::string>& ranking, const std::map<std::string, int>& judgments,
                    std::size_t k);
double average_precision(const std::vector<std::string>& ranking, const std::map<std::string, int>& judgments,
                         std::size_t depth = 1000);
double ndcg_at(const std::vector<std::string>& ranking, const std::map<std::string, int>& judgments,
               std::size_t k);

struct EvalReport {
  std::map<std::string, QueryMetrics> per_query;
  QueryMetrics means;
  std::vector<std::string> skipped;  // run queries without relevant judgments
};

EvalReport evaluate(const Run& run, const Qrels& qrels);

}  // namespace edqe
