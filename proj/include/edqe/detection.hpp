#pragma once

// Query-event detection and event-related query classification.

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "edqe/eventstore.hpp"
#include "edqe/vecspace.hpp"

namespace edqe {

struct Query {
  std::string id;
  std::string raw;
  // Lower-cased, stop-words removed, unstemmed, in query order.
  std::vector<std::string> terms;
};

Query make_query(std::string raw, std::string id = {},
                 const StopList& stops = StopList::builtin());

enum class Scorer { Similarity, Frequency };
enum class EmbeddingSource { Static, Temporal };
enum class ScoreCombine { Mean, Max };

struct DetectionConfig {
  Scorer scorer = Scorer::Frequency;
  double min_score_frequency = 0.003;
  double min_score_similarity = 0.003;
  double mu = 0.5;
  std::size_t max_events_per_term = 10;
  EmbeddingSource embedding_source = EmbeddingSource::Static;
  ScoreCombine combine = ScoreCombine::Mean;
  // Surface occurrences w must have in the entry for the frequency scorer.
  long min_surface_occurrences = 2;
  // Per-term frequency that makes a term "qualifying" for classification.
  double classify_min_frequency = 0.001;

  friend bool operator==(const DetectionConfig&, const DetectionConfig&) = default;
  double min_score() const {
    return scorer == Scorer::Frequency ? min_score_frequency : min_score_similarity;
  }
  void validate() const;
};

// Models available to detection and expansion. `temporal` may be null when
// only the static variant is used.
struct ModelSet {
  const EmbeddingModel* static_model = nullptr;
  const TemporalModelSet* temporal = nullptr;

  const EmbeddingModel* year_model(int year) const {
    return temporal ? temporal->find(year) : nullptr;
  }
};

struct DetectedEvent {
  const EventRecord* event = nullptr;
  double score = 0.0;
  int year = 0;
};

// Score of event e for a single query term under the configured scorer.
// Similarity scores for OOV terms or unprojected events are 0.
double score_event_for_term(const std::string& w, const EventRecord& e, const DetectionConfig& config,
                            const ModelSet& models, const TfIdfModel& stats);

// E_w: events scoring strictly above min_score, highest first (ties by id),
// truncated to max_events_per_term.
std::vector<DetectedEvent> detect_for_term(const std::string& w, std::span<const EventRecord> events,
                                           const DetectionConfig& config, const ModelSet& models,
                                           const TfIdfModel& stats);

// E_q: majority rule over the query's distinct terms, then the per-year mu
// filter. Sorted by score descending, ties by event id.
std::vector<DetectedEvent> detect_for_query(const Query& q, std::span<const EventRecord> events,
                                            const DetectionConfig& config, const ModelSet& models,
                                            const TfIdfModel& stats);

// True iff strictly more than half of the query's distinct terms have
// term frequency above `min_frequency` in at least one event entry.
bool classify_event_related(const Query& q, std::span<const EventRecord> events, const TfIdfModel& stats,
                            double min_frequency = 0.001);

}  // namespace edqe
