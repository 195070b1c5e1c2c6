#include "edqe/projection.hpp"

#include <cmath>
#include <limits>
#include <unordered_set>

#include <fmt/format.h>
#include <json.hpp>

#include "edqe/errors.hpp"
#include "edqe/lbfgs.hpp"
#include "edqe/random.hpp"

namespace edqe {


void ProjectionConfig::validate() const {
  if (k_anchors < 2) throw InvalidArgument("k_anchors must be at least 2");
  if (max_iterations <= 0) throw InvalidArgument("max_iterations must be positive");
  if (!(gradient_tolerance > 0.0)) throw InvalidArgument("gradient_tolerance must be positive");
  if (random_restarts < 0) throw InvalidArgument("random_restarts must be nonnegative");
}

AnchorSet select_anchors(const std::string& event, const EmbeddingModel& static_model,
                         const EmbeddingModel& target_model, std::size_t k, const TokenFilter& allow) {
  if (!static_model.contains(event)) throw OovError(event);
  if (target_model.empty()) throw InvalidArgument("select_anchors: empty target model");
  const Vector& ev = static_model.at(event);
  auto neighbors = knn(static_model, event, k, [&](std::string_view tok) {
    return target_model.contains(tok) && (!allow || allow(tok));
  });
  if (neighbors.empty()) {
    throw NoAnchorsError(fmt::format("event '{}' shares no neighbours with model '{}'", event, target_model.label()));
  }
  AnchorSet set;
  set.source_event = event;
  set.k_requested = k;
  for (auto& n : neighbors) {
    const double d = cosine_distance(ev, static_model.at(n.token));
    set.anchors.push_back({std::move(n.token), d});
  }
  return set;
}

ProjectionObjective::ProjectionObjective(const AnchorSet& anchors, const EmbeddingModel& target_model)
    : dim_(target_model.dim()) {
  if (anchors.anchors.empty()) throw InvalidArgument("projection objective: no anchors");
  units_.reserve(anchors.anchors.size() * dim_);
  for (const auto& a : anchors.anchors) {
    const Vector u = target_model.at(a.token).normalized();
    units_.insert(units_.end(), u.components().begin(), u.components().end());
    targets_.push_back(a.target_distance);
  }
}

double ProjectionObjective::value(std::span<const double> v) const {
  if (v.size() != dim_) throw InvalidArgument("projection objective: dimension mismatch");
  const double norm = std::sqrt(dot(v, v));
  if (norm == 0.0) throw InvalidArgument("projection objective: zero-norm vector");
  double sum = 0.0;
  for (std::size_t i = 0; i < targets_.size(); ++i) {
    const double cos = dot(v, std::span(units_).subspan(i * dim_, dim_)) / norm;
    const double r = targets_[i] - (1.0 - cos);
    sum += r * r;
  }
  return sum / static_cast<double>(targets_.size());
}

double ProjectionObjective::value_and_gradient(std::span<const double> v, std::span<double> grad) const {
  const double norm2 = dot(v, v);
  if (norm2 == 0.0) throw InvalidArgument("projection objective: zero-norm vector");
  const double norm = std::sqrt(norm2);
  const double m = static_cast<double>(targets_.size());
  std::fill(grad.begin(), grad.end(), 0.0);
  double sum = 0.0;
  double radial = 0.0;
  for (std::size_t i = 0; i < targets_.size(); ++i) {
    auto u = std::span(units_).subspan(i * dim_, dim_);
    const double cos = dot(v, u) / norm;
    const double r = targets_[i] - 1.0 + cos;
    sum += r * r;
    // d cos / dv = u / |v| - cos v / |v|^2
    const double w = 2.0 * r / m;
    for (std::size_t j = 0; j < dim_; ++j) grad[j] += w * u[j] / norm;
    radial += w * cos / norm2;
  }
  for (std::size_t j = 0; j < dim_; ++j) grad[j] -= radial * v[j];
  return sum / m;
}

std::vector<double> ProjectionObjective::centroid() const {
  std::vector<double> c(dim_, 0.0);
  for (std::size_t i = 0; i < targets_.size(); ++i) {
    for (std::size_t j = 0; j < dim_; ++j) c[j] += units_[i * dim_ + j];
  }
  for (double& x : c) x /= static_cast<double>(targets_.size());
  return c;
}

bool ProjectionObjective::degenerate() const {
  if (targets_.size() < 2) return false;
  auto first = std::span(units_).subspan(0, dim_);
  for (std::size_t i = 1; i < targets_.size(); ++i) {
    if (dot(first, std::span(units_).subspan(i * dim_, dim_)) < 1.0 - 1e-12) return false;
  }
  return true;
}

double objective(const Vector& v, const AnchorSet& anchors, const EmbeddingModel& target_model) {
  return ProjectionObjective(anchors, target_model).value(v.components());
}

MinimizeResult minimize(const AnchorSet& anchors, const EmbeddingModel& target_model,
                        const ProjectionConfig& config) {
  config.validate();
  const ProjectionObjective obj(anchors, target_model);
  Rng rng(config.seed ^ fnv1a(anchors.source_event));

  std::vector<std::vector<double>> starts;
  if (config.initialization == Initialization::AnchorCentroid) {
    auto c = obj.centroid();
    if (std::sqrt(dot(c, c)) > 1e-8) {
      starts.push_back(std::move(c));
    } else {
      starts.push_back(rng.unit_vector(obj.dim()));
    }
  } else {
    starts.push_back(rng.unit_vector(obj.dim()));
  }
  for (int r = 0; r < config.random_restarts; ++r) starts.push_back(rng.unit_vector(obj.dim()));

  LbfgsOptions opt;
  opt.max_iterations = config.max_iterations;
  opt.gradient_tolerance = config.gradient_tolerance;
  auto fn = [&](std::span<const double> x, std::span<double> g) { return obj.value_and_gradient(x, g); };
  // The objective is invariant to scale, so stationarity is judged at the
  // unit-norm point: grad(v / |v|) = |v| grad(v).
  auto stationarity = [](std::span<const double> x, std::span<const double> g) {
    return std::sqrt(dot(g, g) * dot(x, x));
  };

  MinimizeResult best;
  best.objective = std::numeric_limits<double>::infinity();
  for (auto& start : starts) {
    LbfgsResult r = lbfgs_minimize(fn, std::move(start), opt, stationarity);
    if (r.value < best.objective) {
      best.direction = Vector(std::move(r.x)).normalized();
      best.objective = r.value;
      best.gradient_norm = r.stationarity;
      best.iterations = r.iterations;
      best.converged = r.converged;
    }
  }
  best.objective = obj.value(best.direction.components());
  best.ill_conditioned = obj.degenerate();
  return best;
}

ProjectionOutcome project_event(const std::string& event, const EmbeddingModel& static_model,
                                EmbeddingModel& target_model, const ProjectionConfig& config,
                                const TokenFilter& allow_anchor) {
  config.validate();
  AnchorSet anchors = select_anchors(event, static_model, target_model, config.k_anchors,
                                     [&](std::string_view tok) {
                                       return tok != event && (!allow_anchor || allow_anchor(tok));
                                     });
  ProjectionOutcome out;
  out.result = minimize(anchors, target_model, config);
  out.anchor_count = anchors.anchors.size();
  out.low_anchor_count = out.anchor_count < std::min(config.low_anchor_threshold, config.k_anchors);
  out.overwritten = !target_model.insert(event, out.result.direction);
  return out;
}

ProjectionReport project_all(const std::vector<EventRecord>& events, const EmbeddingModel& static_model,
                             TemporalModelSet& temporal_set, const ProjectionConfig& config,
                             std::span<const EventRecord> also_exclude) {
  config.validate();
  std::unordered_set<std::string> event_tokens;
  auto exclude = [&](const EventRecord& e) {
    const auto tok = event_token(e);
    event_tokens.insert(tok);
    event_tokens.insert(to_lower(tok));
  };
  for (const auto& e : events) exclude(e);
  for (const auto& e : also_exclude) exclude(e);
  auto allow = [&](std::string_view tok) {
    return event_tokens.count(std::string(tok)) == 0 && event_tokens.count(to_lower(tok)) == 0;
  };

  ProjectionReport report;
  for (const auto& e : events) {
    ProjectionRecord rec;
    rec.event_id = e.id;
    rec.name = e.name;
    rec.token = event_token(e);
    rec.year = e.year;
    EmbeddingModel* target = temporal_set.find(e.year);
    if (!target) {
      rec.reason = "no model for year";
    } else if (!static_model.contains(rec.token)) {
      rec.reason = "event not in static model";
    } else {
      try {
        auto outcome = project_event(rec.token, static_model, *target, config, allow);
        rec.status = ProjectionStatus::Projected;
        rec.anchor_count = outcome.anchor_count;
        rec.objective = outcome.result.objective;
        rec.converged = outcome.result.converged;
        rec.low_anchor_count = outcome.low_anchor_count;
        rec.ill_conditioned = outcome.result.ill_conditioned;
        rec.overwritten = outcome.overwritten;
      } catch (const NoAnchorsError&) {
        rec.reason = "no shared anchors";
      } catch (const Error& ex) {
        rec.reason = ex.what();
      }
    }
    if (rec.status == ProjectionStatus::Projected) {
      ++report.projected;
    } else {
      ++report.skipped;
    }
    report.records.push_back(std::move(rec));
  }
  return report;
}

void write_projection_report(std::ostream& out, const ProjectionReport& report) {
  for (const auto& r : report.records) {
    nlohmann::ordered_json j;
    j["id"] = r.event_id;
    j["name"] = r.name;
    j["token"] = r.token;
    j["year"] = r.year;
    j["status"] = r.status == ProjectionStatus::Projected ? "projected" : "skipped";
    if (r.status == ProjectionStatus::Projected) {
      j["anchors"] = r.anchor_count;
      j["objective"] = r.objective;
      j["converged"] = r.converged;
      j["low_anchor_count"] = r.low_anchor_count;
      j["ill_conditioned"] = r.ill_conditioned;
    } else {
      j["reason"] = r.reason;
    }
    out << j.dump() << '\n';
  }
}

}  // namespace edqe
