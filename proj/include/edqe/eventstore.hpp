#pragma once

// Event dataset ingestion, filtering, name normalization and term statistics
// over event entries.

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "edqe/analysis.hpp"

namespace edqe {

struct EventRecord {
  std::string id;
  std::string name;
  std::string normalized_name;
  int year = 0;
  std::string entry_text;
  double monthly_views = 0.0;
  long external_refs = 0;
};

// The event's key in embedding models: its name with spaces replaced by
// underscores ("1989 Tiananmen Square protests" -> "1989_Tiananmen_Square_protests").
std::string event_token(const EventRecord& e);

struct LoadIssue {
  std::size_t line = 0;
  std::string message;
};

struct EventLoadResult {
  std::vector<EventRecord> events;
  std::vector<LoadIssue> issues;
};

// One JSON object per line: {id, name, year, entry_text, monthly_views,
// external_refs}. Malformed lines are reported and skipped. Throws if the
// file cannot be read.
EventLoadResult load_events(const std::filesystem::path& path);
EventLoadResult parse_events(std::istream& in);

struct EventFilter {
  double min_views = 5000.0;
  long min_refs = 15;
  int first_year = 1981;
  int last_year = 2018;
  friend bool operator==(const EventFilter&, const EventFilter&) = default;
};

// Keeps events with views > min_views, refs > min_refs and year inside the
// inclusive range. Order-preserving.
std::vector<EventRecord> filter_events(const std::vector<EventRecord>& events,
                                       const EventFilter& filter = {});

// Removes standalone 4-digit year tokens (1000-2999) and collapses
// whitespace. Throws InvalidArgument when nothing remains.
std::string normalize_name(std::string_view name);

// Stemmed and surface term counts of one analyzed entry.
struct TermCounts {
  std::unordered_map<std::string, long> stems;
  std::unordered_map<std::string, long> surface;
  long total_tokens = 0;
};

TermCounts count_terms(std::string_view text, const StopList& stops = StopList::builtin());

// Stemmed-occurrence frequency of w in an entry: count(stem(w)) / total.
// Throws InvalidArgument on an empty entry.
double term_frequency(std::string_view w, const TermCounts& counts);
double term_frequency(std::string_view w, const EventRecord& e,
                      const StopList& stops = StopList::builtin());

// Number of times the lower-cased, unstemmed w occurs in the entry.
long surface_count(std::string_view w, const TermCounts& counts);

class TfIdfModel {
 public:
  TfIdfModel() = default;

  std::size_t num_documents() const { return num_documents_; }
  long document_frequency(std::string_view stem) const;
  bool contains_event(std::string_view event_id) const;
  // Throws InvalidArgument for an unknown event.
  const TermCounts& counts(std::string_view event_id) const;
  const std::unordered_map<std::string, long>& document_frequencies() const { return df_; }

  // idf = ln(N / df); 0 for unseen stems.
  double idf(std::string_view stem) const;

  // The most frequent surface form of `stem` in an event's entry
  // (lexicographically smallest on ties); empty if absent.
  std::string surface_form(std::string_view event_id, std::string_view stem) const;

  const StopList& stops() const { return *stops_; }

 private:
  friend TfIdfModel build_tfidf(const std::vector<EventRecord>& events, const StopList& stops);

  std::size_t num_documents_ = 0;
  std::unordered_map<std::string, long> df_;
  std::unordered_map<std::string, TermCounts> per_event_;
  // event id -> stem -> (surface -> count)
  std::unordered_map<std::string, std::unordered_map<std::string, std::map<std::string, long>>> forms_;
  const StopList* stops_ = &StopList::builtin();
};

// Throws InvalidArgument on an empty event list or duplicate ids.
TfIdfModel build_tfidf(const std::vector<EventRecord>& events,
                       const StopList& stops = StopList::builtin());

// tf(w, e) * idf(w) with tf = raw stem count / total tokens. `w` is analyzed
// (lower-cased and stemmed) before lookup.
double tfidf(std::string_view w, const EventRecord& e, const TfIdfModel& model);
double tfidf_stem(std::string_view stem, std::string_view event_id, const TfIdfModel& model);

struct ScoredTerm {
  std::string term;
  double score = 0.0;
  friend bool operator==(const ScoredTerm&, const ScoredTerm&) = default;
};

// The n highest-tfidf stems of e's entry, descending, ties lexicographic.
std::vector<ScoredTerm> top_tfidf_terms(const EventRecord& e, std::size_t n,
                                        const TfIdfModel& model);

}  // namespace edqe
