#pragma once

// Event-driven candidate generation, scoring (static and temporal variants)
// and merging into a weighted expansion distribution.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "edqe/detection.hpp"

namespace edqe {

enum class Variant { Static, Temporal };

struct ExpansionConfig {
  double lambda = 0.8;
  std::size_t k_candidates = 50;
  double alpha = 3.0;  // tfidf weight
  double beta = 1.0;   // candidate-event similarity
  double gamma = 1.0;  // event-query similarity
  double delta = 1.0;  // TempRel
  Variant variant = Variant::Temporal;
  std::size_t n_expansion_terms = 100;
  std::size_t temprel_k = 5;
  double temprel_epsilon = 0.01;

  friend bool operator==(const ExpansionConfig&, const ExpansionConfig&) = default;
  void validate() const;
};

enum class CandidateSource { TfIdf, QuerySimilarity };

struct CandidateFeatures {
  double tfidf = 0.0;
  double cos_ce = 0.0;
  double cos_eq = 0.0;
  std::optional<double> temprel;
};

struct Candidate {
  std::string term;  // surface form
  std::string stem;
  std::string source_event;  // event id
  CandidateSource source = CandidateSource::TfIdf;
  CandidateFeatures features;
  double score = 0.0;
};

struct ExpandedQuery {
  Query original;
  std::map<std::string, double> weights;  // P_ED over expansion terms
  std::vector<DetectedEvent> events;
};

// Mean of the in-vocabulary term vectors, unit-normalized. Throws OovError when
// no term is in the model.
Vector query_vector(const Query& q, const EmbeddingModel& model);

// The model a variant uses for event e: the static model, or e's year model.
const EmbeddingModel* variant_model(const EventRecord& e, Variant variant, const ModelSet& models);

// C_e: ceil(lambda k) top-tfidf terms of e's entry plus floor((1 - lambda) k)
// nearest terms to the query vector, excluding query terms and stop-words;
// a term proposed by both sources appears once. Features are not filled in.
std::vector<Candidate> candidates_for_event(const DetectedEvent& e, const Query& q, const ExpansionConfig& config,
                                            const ModelSet& models, const TfIdfModel& stats);

// Mean ratio cos_t(c, n) / cos_{t-1}(c, n) over e's k nearest neighbours n in
// year t. Neighbours missing from either year, or with cos_{t-1} <= epsilon,
// are skipped; 1.0 when nothing is usable or the year t-1 model is missing.
double temprel(const std::string& c, const DetectedEvent& e, const TemporalModelSet& temporal, std::size_t k,
               const Query* q = nullptr, double epsilon = 0.01);

// Fills c.features for the configured variant and returns the weighted score.
double score_candidate(Candidate& c, const DetectedEvent& e, const Query& q, const ExpansionConfig& config,
                       const ModelSet& models, const TfIdfModel& stats);

// Weighted sum of already-computed features.
double combine_features(const CandidateFeatures& f, const ExpansionConfig& config);

struct ExpansionTrace {
  std::vector<Candidate> candidates;  // every scored candidate, all events
};

// Full pipeline: detect, generate and score candidates per event, keep each
// term's best score across events, take the top n_expansion_terms positive
// scores and normalize them to sum to one.
ExpandedQuery expand(const Query& q, const ExpansionConfig& config, const DetectionConfig& detection,
                     std::span<const EventRecord> events, const ModelSet& models, const TfIdfModel& stats,
                     ExpansionTrace* trace = nullptr);

// Merge/select/normalize step of expand, over already-scored candidates.
std::map<std::string, double> merge_candidates(const std::vector<Candidate>& scored, std::size_t n_terms);

}  // namespace edqe
