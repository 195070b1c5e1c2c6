#include "edqe/expansion.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "edqe/errors.hpp"

namespace edqe {

namespace {

std::unordered_set<std::string> query_stems(const Query& q) {
  std::unordered_set<std::string> out;
  for (const auto& t : q.terms) out.insert(porter_stem(to_lower(t)));
  return out;
}

std::unordered_set<std::string> query_surfaces(const Query& q) {
  std::unordered_set<std::string> out;
  for (const auto& t : q.terms) out.insert(to_lower(t));
  return out;
}

std::optional<Vector> try_query_vector(const Query& q, const EmbeddingModel& model) {
  try {
    return query_vector(q, model);
  } catch (const OovError&) {
    return std::nullopt;
  } catch (const InvalidArgument&) {
    return std::nullopt;
  }
}

}  // namespace

void ExpansionConfig::validate() const {
  if (lambda < 0.0 || lambda > 1.0) throw InvalidArgument("lambda must lie in [0, 1]");
  if (k_candidates == 0) throw InvalidArgument("k_candidates must be positive");
  if (n_expansion_terms == 0) throw InvalidArgument("n_expansion_terms must be positive");
  if (temprel_k == 0) throw InvalidArgument("temprel_k must be positive");
}

Vector query_vector(const Query& q, const EmbeddingModel& model) {
  std::vector<double> sum(model.dim(), 0.0);
  std::size_t found = 0;
  for (const auto& t : q.terms) {
    const Vector* v = model.find(t);
    if (!v) continue;
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += (*v)[i];
    ++found;
  }
  if (found == 0) throw OovError(q.raw.empty() ? std::string("<empty query>") : q.raw);
  for (double& x : sum) x /= static_cast<double>(found);
  return Vector(std::move(sum)).normalized();
}

const EmbeddingModel* variant_model(const EventRecord& e, Variant variant, const ModelSet& models) {
  return variant == Variant::Static ? models.static_model : models.year_model(e.year);
}

std::vector<Candidate> candidates_for_event(const DetectedEvent& de, const Query& q, const ExpansionConfig& config,
                                            const ModelSet& models, const TfIdfModel& stats) {
  config.validate();
  const EventRecord& e = *de.event;
  const auto qstems = query_stems(q);
  const StopList& stops = stats.stops();
  const std::size_t k = config.k_candidates;
  const auto n_tfidf = std::min(k, static_cast<std::size_t>(std::ceil(config.lambda * static_cast<double>(k) - 1e-9)));
  const std::size_t n_sim = k - n_tfidf;

  std::vector<Candidate> out;
  std::unordered_set<std::string> taken;

  if (n_tfidf > 0) {
    const auto& counts = stats.counts(e.id);
    for (const auto& st : top_tfidf_terms(e, counts.stems.size(), stats)) {
      if (out.size() >= n_tfidf) break;
      if (qstems.count(st.term)) continue;
      std::string surface = stats.surface_form(e.id, st.term);
      if (surface.empty() || stops.contains(surface)) continue;
      taken.insert(st.term);
      out.push_back({std::move(surface), st.term, e.id, CandidateSource::TfIdf, {}, 0.0});
    }
  }

  const EmbeddingModel* model = variant_model(e, config.variant, models);
  if (n_sim > 0 && model) {
    if (auto qv = try_query_vector(q, *model)) {
      Analyzer analyzer{true, &stops};
      auto near = knn(*model, *qv, n_sim, [&](std::string_view tok) {
        const std::string stem = analyzer.term(tok);
        if (stem.empty() || qstems.count(stem)) return false;
        return stats.document_frequency(stem) > 0;
      });
      for (auto& n : near) {
        std::string surface = to_lower(n.token);
        std::string stem = analyzer.term(surface);
        if (!taken.insert(stem).second) continue;
        out.push_back({std::move(surface), std::move(stem), e.id, CandidateSource::QuerySimilarity, {}, 0.0});
      }
    }
  }
  return out;
}

double temprel(const std::string& c, const DetectedEvent& de, const TemporalModelSet& temporal, std::size_t k,
               const Query* q, double epsilon) {
  const EventRecord& e = *de.event;
  const EmbeddingModel* now = temporal.find(e.year);
  const EmbeddingModel* before = temporal.find(e.year - 1);
  if (!now || !before) return 1.0;
  const std::string etok = event_token(e);
  if (!now->contains(etok)) return 1.0;
  const auto excluded = q ? query_surfaces(*q) : std::unordered_set<std::string>{};
  auto neighbors = knn(*now, etok, k, [&](std::string_view tok) {
    return excluded.count(to_lower(tok)) == 0;
  });

  const Vector* c_now = now->find(c);
  const Vector* c_before = before->find(c);
  if (!c_now || !c_before) return 1.0;

  double sum = 0.0;
  std::size_t used = 0;
  for (const auto& n : neighbors) {
    const Vector* n_now = now->find(n.token);
    const Vector* n_before = before->find(n.token);
    if (!n_now || !n_before) continue;
    const double prior = cosine(*c_before, *n_before);
    if (!(prior > epsilon)) continue;
    sum += cosine(*c_now, *n_now) / prior;
    ++used;
  }
  return used == 0 ? 1.0 : sum / static_cast<double>(used);
}

double combine_features(const CandidateFeatures& f, const ExpansionConfig& config) {
  double s = config.alpha * f.tfidf + config.beta * f.cos_ce + config.gamma * f.cos_eq;
  if (f.temprel) s += config.delta * *f.temprel;
  return s;
}

double score_candidate(Candidate& c, const DetectedEvent& de, const Query& q, const ExpansionConfig& config,
                       const ModelSet& models, const TfIdfModel& stats) {
  const EventRecord& e = *de.event;
  CandidateFeatures f;
  f.tfidf = tfidf_stem(c.stem.empty() ? porter_stem(to_lower(c.term)) : c.stem, e.id, stats);
  if (const EmbeddingModel* model = variant_model(e, config.variant, models)) {
    const Vector* ev = model->find(event_token(e));
    if (ev) {
      if (const Vector* cv = model->find(c.term)) f.cos_ce = cosine(*cv, *ev);
      if (auto qv = try_query_vector(q, *model)) f.cos_eq = cosine(*ev, *qv);
    }
  }
  if (config.variant == Variant::Temporal) {
    f.temprel = models.temporal ? temprel(c.term, de, *models.temporal, config.temprel_k, &q, config.temprel_epsilon)
                                : 1.0;
  }
  c.features = f;
  c.score = combine_features(f, config);
  return c.score;
}

std::map<std::string, double> merge_candidates(const std::vector<Candidate>& scored, std::size_t n_terms) {
  // Best candidate per stem; equal scores keep the lexicographically smaller term.
  std::unordered_map<std::string, const Candidate*> best;
  for (const auto& c : scored) {
    const std::string& key = c.stem.empty() ? c.term : c.stem;
    auto [it, inserted] = best.emplace(key, &c);
    if (!inserted && (c.score > it->second->score || (c.score == it->second->score && c.term < it->second->term))) {
      it->second = &c;
    }
  }
  std::vector<const Candidate*> ranked;
  for (const auto& [stem, c] : best) {
    if (c->score > 0.0) ranked.push_back(c);
  }
  std::sort(ranked.begin(), ranked.end(), [](const Candidate* a, const Candidate* b) {
    if (a->score != b->score) return a->score > b->score;
    return a->term < b->term;
  });
  if (ranked.size() > n_terms) ranked.resize(n_terms);

  double total = 0.0;
  for (const auto* c : ranked) total += c->score;
  std::map<std::string, double> weights;
  for (const auto* c : ranked) weights[c->term] = c->score / total;
  return weights;
}

ExpandedQuery expand(const Query& q, const ExpansionConfig& config, const DetectionConfig& detection,
                     std::span<const EventRecord> events, const ModelSet& models, const TfIdfModel& stats,
                     ExpansionTrace* trace) {
  config.validate();
  ExpandedQuery out;
  out.original = q;
  if (q.terms.empty()) return out;
  out.events = detect_for_query(q, events, detection, models, stats);

  std::vector<const DetectedEvent*> ordered;
  for (const auto& d : out.events) ordered.push_back(&d);
  std::sort(ordered.begin(), ordered.end(),
            [](const DetectedEvent* a, const DetectedEvent* b) { return a->event->id < b->event->id; });

  std::vector<Candidate> scored;
  for (const DetectedEvent* d : ordered) {
    for (auto& c : candidates_for_event(*d, q, config, models, stats)) {
      score_candidate(c, *d, q, config, models, stats);
      scored.push_back(std::move(c));
    }
  }
  out.weights = merge_candidates(scored, config.n_expansion_terms);
  if (trace) trace->candidates = std::move(scored);
  return out;
}

}  // namespace edqe
