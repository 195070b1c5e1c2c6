#pragma once

// Event projection: place an event from the static model into a temporal
// model by matching its cosine distances to shared anchor words.

#include <cstdint>
#include <string>
#include <span>
#include <vector>

#include "edqe/errors.hpp"
#include "edqe/eventstore.hpp"
#include "edqe/vecspace.hpp"

namespace edqe {

struct Anchor {
  std::string token;
  double target_distance = 0.0;
};

struct AnchorSet {
  std::vector<Anchor> anchors;
  std::string source_event;
  std::size_t k_requested = 0;
};

// Thrown by select_anchors when the event shares no neighbours with the
// target model.
class NoAnchorsError : public Error {
 public:
  using Error::Error;
};

enum class Initialization { AnchorCentroid, RandomSeeded };

struct ProjectionConfig {
  std::size_t k_anchors = 30;
  int max_iterations = 500;
  double gradient_tolerance = 1e-6;
  Initialization initialization = Initialization::AnchorCentroid;
  // Extra seeded random starting points tried after the primary start; the
  // lowest objective wins.
  int random_restarts = 4;
  std::uint64_t seed = 0;
  // Projections with fewer anchors than this are flagged.
  std::size_t low_anchor_threshold = 3;

  friend bool operator==(const ProjectionConfig&, const ProjectionConfig&) = default;
  void validate() const;
};

// The k nearest static-model neighbours of `event` that also exist in the
// target model and pass `allow`, paired with their static cosine distance.
AnchorSet select_anchors(const std::string& event, const EmbeddingModel& static_model,
                         const EmbeddingModel& target_model, std::size_t k,
                         const TokenFilter& allow = {});

// Anchor geometry resolved against a target model: unit anchor vectors and
// their target distances.
class ProjectionObjective {
 public:
  ProjectionObjective(const AnchorSet& anchors, const EmbeddingModel& target_model);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return targets_.size(); }

  // Mean of (target_distance - cosine_distance(v, anchor))^2.
  double value(std::span<const double> v) const;
  double value_and_gradient(std::span<const double> v, std::span<double> grad) const;

  // Normalized mean of the anchor vectors (may be ~zero).
  std::vector<double> centroid() const;
  // True when every anchor points in the same direction.
  bool degenerate() const;

 private:
  std::size_t dim_;
  std::vector<double> units_;  // size() rows of dim_
  std::vector<double> targets_;
};

double objective(const Vector& v, const AnchorSet& anchors, const EmbeddingModel& target_model);

struct MinimizeResult {
  Vector direction;  // unit norm
  double objective = 0.0;
  double gradient_norm = 0.0;  // at the unit-norm point
  int iterations = 0;
  bool converged = false;
  bool ill_conditioned = false;
};

MinimizeResult minimize(const AnchorSet& anchors, const EmbeddingModel& target_model,
                        const ProjectionConfig& config);

struct ProjectionOutcome {
  MinimizeResult result;
  std::size_t anchor_count = 0;
  bool low_anchor_count = false;
  bool overwritten = false;
};

// select_anchors + minimize, then stores the unit vector in target_model
// under the event token (overwriting any previous value).
ProjectionOutcome project_event(const std::string& event, const EmbeddingModel& static_model,
                                EmbeddingModel& target_model, const ProjectionConfig& config,
                                const TokenFilter& allow_anchor = {});

enum class ProjectionStatus { Projected, Skipped };

struct ProjectionRecord {
  std::string event_id;
  std::string name;
  std::string token;
  int year = 0;
  ProjectionStatus status = ProjectionStatus::Skipped;
  std::string reason;
  std::size_t anchor_count = 0;
  double objective = 0.0;
  bool converged = false;
  bool low_anchor_count = false;
  bool ill_conditioned = false;
  bool overwritten = false;
};

struct ProjectionReport {
  std::vector<ProjectionRecord> records;
  std::size_t projected = 0;
  std::size_t skipped = 0;
};

// Projects each event into the model of its year. Tokens of all events in the
// batch are excluded from anchor candidacy, so a rerun over already-enriched
// models reproduces the same vectors.
// `also_exclude` adds further event tokens to the exclusion set, for projecting
// a subset of a dataset.
ProjectionReport project_all(const std::vector<EventRecord>& events, const EmbeddingModel& static_model,
                             TemporalModelSet& temporal_set, const ProjectionConfig& config,
                             std::span<const EventRecord> also_exclude = {});

// One JSON object per line.
void write_projection_report(std::ostream& out, const ProjectionReport& report);

}  // namespace edqe
