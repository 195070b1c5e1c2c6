#include "edqe/detection.hpp"

#include <algorithm>
#include <set>

#include "edqe/errors.hpp"

namespace edqe {

namespace {

bool by_score(const DetectedEvent& a, const DetectedEvent& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.event->id < b.event->id;
}

std::vector<std::string> distinct_terms(const Query& q) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& t : q.terms) {
    if (seen.insert(t).second) out.push_back(t);
  }
  return out;
}

}  // namespace

Query make_query(std::string raw, std::string id, const StopList& stops) {
  Query q;
  q.id = std::move(id);
  q.terms = tokenize(raw, false, stops);
  q.raw = std::move(raw);
  return q;
}

void DetectionConfig::validate() const {
  if (!(min_score_frequency > 0.0) || !(min_score_similarity > 0.0)) {
    throw InvalidArgument("min_score must be positive");
  }
  if (mu < 0.0 || mu > 1.0) throw InvalidArgument("mu must lie in [0, 1]");
  if (max_events_per_term == 0) throw InvalidArgument("max_events_per_term must be positive");
}

double score_event_for_term(const std::string& w, const EventRecord& e, const DetectionConfig& config,
                            const ModelSet& models, const TfIdfModel& stats) {
  if (config.scorer == Scorer::Frequency) {
    const TermCounts& counts = stats.counts(e.id);
    if (counts.total_tokens == 0) return 0.0;
    if (surface_count(w, counts) < config.min_surface_occurrences) return 0.0;
    return term_frequency(w, counts);
  }
  const EmbeddingModel* model = config.embedding_source == EmbeddingSource::Static
                                    ? models.static_model
                                    : models.year_model(e.year);
  if (!model) return 0.0;
  const Vector* wv = model->find(w);
  const Vector* ev = model->find(event_token(e));
  if (!wv || !ev) return 0.0;
  return cosine(*wv, *ev);
}

std::vector<DetectedEvent> detect_for_term(const std::string& w, std::span<const EventRecord> events,
                                           const DetectionConfig& config, const ModelSet& models,
                                           const TfIdfModel& stats) {
  config.validate();
  const double threshold = config.min_score();
  std::vector<DetectedEvent> out;
  for (const auto& e : events) {
    const double s = score_event_for_term(w, e, config, models, stats);
    if (s > threshold) out.push_back({&e, s, e.year});
  }
  std::sort(out.begin(), out.end(), by_score);
  if (out.size() > config.max_events_per_term) out.resize(config.max_events_per_term);
  return out;
}

std::vector<DetectedEvent> detect_for_query(const Query& q, std::span<const EventRecord> events,
                                            const DetectionConfig& config, const ModelSet& models,
                                            const TfIdfModel& stats) {
  const auto terms = distinct_terms(q);
  if (terms.empty()) return {};

  struct Votes {
    const EventRecord* event = nullptr;
    std::size_t count = 0;
    double sum = 0.0;
    double max = 0.0;
  };
  std::map<std::string, Votes> votes;  // by event id
  for (const auto& w : terms) {
    for (const auto& d : detect_for_term(w, events, config, models, stats)) {
      auto& v = votes[d.event->id];
      v.event = d.event;
      ++v.count;
      v.sum += d.score;
      v.max = v.count == 1 ? d.score : std::max(v.max, d.score);
    }
  }

  std::map<int, std::vector<DetectedEvent>> by_year;
  for (const auto& [id, v] : votes) {
    if (2 * v.count <= terms.size()) continue;
    const double score = config.combine == ScoreCombine::Mean ? v.sum / static_cast<double>(v.count) : v.max;
    by_year[v.event->year].push_back({v.event, score, v.event->year});
  }

  std::vector<DetectedEvent> out;
  for (auto& [year, group] : by_year) {
    double top = group.front().score;
    for (const auto& d : group) top = std::max(top, d.score);
    for (const auto& d : group) {
      if (d.score > config.mu * top || d.score == top) out.push_back(d);
    }
  }
  std::sort(out.begin(), out.end(), by_score);
  return out;
}

bool classify_event_related(const Query& q, std::span<const EventRecord> events, const TfIdfModel& stats,
                            double min_frequency) {
  const auto terms = distinct_terms(q);
  if (terms.empty()) return false;
  std::size_t qualifying = 0;
  for (const auto& w : terms) {
    for (const auto& e : events) {
      const TermCounts& c = stats.counts(e.id);
      if (c.total_tokens > 0 && term_frequency(w, c) > min_frequency) {
        ++qualifying;
        break;
      }
    }
  }
  return 2 * qualifying > terms.size();
}

}  // namespace edqe
