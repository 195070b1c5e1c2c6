#include "edqe/eventstore.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "edqe/errors.hpp"
#include "edqe/vecspace.hpp"

namespace edqe {

using nlohmann::json;

std::string event_token(const EventRecord& e) {
  std::string tok;
  tok.reserve(e.name.size());
  bool pending_sep = false;
  for (char c : e.name) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_sep = !tok.empty();
      continue;
    }
    if (pending_sep) tok += '_';
    pending_sep = false;
    tok += c;
  }
  return tok;
}

namespace {

EventRecord record_from_json(const json& j) {
  static const char* required[] = {"id", "name", "year", "entry_text", "monthly_views", "external_refs"};
  for (const char* key : required) {
    if (!j.contains(key)) throw FormatError(fmt::format("missing field \"{}\"", key));
  }
  EventRecord e;
  const auto& id = j.at("id");
  e.id = id.is_string() ? id.get<std::string>() : id.dump();
  e.name = j.at("name").get<std::string>();
  e.year = j.at("year").get<int>();
  e.entry_text = j.at("entry_text").get<std::string>();
  e.monthly_views = j.at("monthly_views").get<double>();
  e.external_refs = j.at("external_refs").get<long>();
  if (e.id.empty()) throw FormatError("empty id");
  if (e.entry_text.empty()) throw FormatError("empty entry_text");
  if (e.monthly_views < 0 || e.external_refs < 0) throw FormatError("negative popularity statistic");
  e.normalized_name = normalize_name(e.name);
  return e;
}

}  // namespace

EventLoadResult parse_events(std::istream& in) {
  EventLoadResult out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); })) continue;
    try {
      out.events.push_back(record_from_json(json::parse(line)));
    } catch (const std::exception& ex) {
      out.issues.push_back({lineno, ex.what()});
    }
  }
  return out;
}

EventLoadResult load_events(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(fmt::format("cannot open events file {}", path.string()));
  return parse_events(in);
}

std::vector<EventRecord> filter_events(const std::vector<EventRecord>& events, const EventFilter& filter) {
  std::vector<EventRecord> out;
  std::copy_if(events.begin(), events.end(), std::back_inserter(out), [&](const EventRecord& e) {
    return e.monthly_views > filter.min_views && e.external_refs > filter.min_refs &&
           e.year >= filter.first_year && e.year <= filter.last_year;
  });
  return out;
}

std::string normalize_name(std::string_view name) {
  std::vector<std::string_view> kept;
  std::size_t i = 0;
  while (i < name.size()) {
    while (i < name.size() && std::isspace(static_cast<unsigned char>(name[i]))) ++i;
    std::size_t j = i;
    while (j < name.size() && !std::isspace(static_cast<unsigned char>(name[j]))) ++j;
    if (j > i) {
      std::string_view tok = name.substr(i, j - i);
      const bool is_year = tok.size() == 4 && std::all_of(tok.begin(), tok.end(), [](char c) {
                             return c >= '0' && c <= '9';
                           }) && (tok[0] == '1' || tok[0] == '2');
      if (!is_year) kept.push_back(tok);
    }
    i = j;
  }
  if (kept.empty()) throw InvalidArgument(fmt::format("event name '{}' is only a temporal expression", name));
  std::string out;
  for (std::size_t k = 0; k < kept.size(); ++k) {
    if (k) out += ' ';
    out += kept[k];
  }
  return out;
}

TermCounts count_terms(std::string_view text, const StopList& stops) {
  TermCounts c;
  for (auto& tok : tokenize(text, false, stops)) {
    ++c.stems[porter_stem(tok)];
    ++c.surface[std::move(tok)];
    ++c.total_tokens;
  }
  return c;
}

double term_frequency(std::string_view w, const TermCounts& counts) {
  if (counts.total_tokens == 0) throw InvalidArgument("term frequency over an empty entry");
  auto it = counts.stems.find(porter_stem(to_lower(w)));
  if (it == counts.stems.end()) return 0.0;
  return static_cast<double>(it->second) / static_cast<double>(counts.total_tokens);
}

double term_frequency(std::string_view w, const EventRecord& e, const StopList& stops) {
  return term_frequency(w, count_terms(e.entry_text, stops));
}

long surface_count(std::string_view w, const TermCounts& counts) {
  auto it = counts.surface.find(to_lower(w));
  return it == counts.surface.end() ? 0 : it->second;
}

long TfIdfModel::document_frequency(std::string_view stem) const {
  auto it = df_.find(std::string(stem));
  return it == df_.end() ? 0 : it->second;
}

bool TfIdfModel::contains_event(std::string_view event_id) const {
  return per_event_.count(std::string(event_id)) != 0;
}

const TermCounts& TfIdfModel::counts(std::string_view event_id) const {
  auto it = per_event_.find(std::string(event_id));
  if (it == per_event_.end()) throw InvalidArgument(fmt::format("event '{}' not in TF-IDF model", event_id));
  return it->second;
}

double TfIdfModel::idf(std::string_view stem) const {
  const long df = document_frequency(stem);
  if (df == 0) return 0.0;
  return std::log(static_cast<double>(num_documents_) / static_cast<double>(df));
}

std::string TfIdfModel::surface_form(std::string_view event_id, std::string_view stem) const {
  auto ev = forms_.find(std::string(event_id));
  if (ev == forms_.end()) return {};
  auto st = ev->second.find(std::string(stem));
  if (st == ev->second.end()) return {};
  std::string best;
  long best_count = -1;
  for (const auto& [form, count] : st->second) {
    if (count > best_count) {
      best = form;
      best_count = count;
    }
  }
  return best;
}

TfIdfModel build_tfidf(const std::vector<EventRecord>& events, const StopList& stops) {
  if (events.empty()) throw InvalidArgument("build_tfidf: no events");
  TfIdfModel m;
  m.stops_ = &stops;
  m.num_documents_ = events.size();
  for (const auto& e : events) {
    TermCounts c = count_terms(e.entry_text, stops);
    auto& forms = m.forms_[e.id];
    for (const auto& [surface, n] : c.surface) forms[porter_stem(surface)][surface] += n;
    for (const auto& [stem, n] : c.stems) ++m.df_[stem];
    if (!m.per_event_.emplace(e.id, std::move(c)).second) {
      throw InvalidArgument(fmt::format("build_tfidf: duplicate event id '{}'", e.id));
    }
  }
  return m;
}

double tfidf_stem(std::string_view stem, std::string_view event_id, const TfIdfModel& model) {
  const TermCounts& c = model.counts(event_id);
  auto it = c.stems.find(std::string(stem));
  if (it == c.stems.end() || c.total_tokens == 0) return 0.0;
  const double tf = static_cast<double>(it->second) / static_cast<double>(c.total_tokens);
  return tf * model.idf(stem);
}

double tfidf(std::string_view w, const EventRecord& e, const TfIdfModel& model) {
  return tfidf_stem(porter_stem(to_lower(w)), e.id, model);
}

std::vector<ScoredTerm> top_tfidf_terms(const EventRecord& e, std::size_t n, const TfIdfModel& model) {
  const TermCounts& c = model.counts(e.id);
  std::vector<ScoredTerm> all;
  all.reserve(c.stems.size());
  for (const auto& [stem, count] : c.stems) all.push_back({stem, tfidf_stem(stem, e.id, model)});
  auto order = [](const ScoredTerm& a, const ScoredTerm& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.term < b.term;
  };
  const std::size_t take = std::min(n, all.size());
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(take), all.end(), order);
  all.resize(take);
  return all;
}

}  // namespace edqe
