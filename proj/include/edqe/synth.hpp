#pragma once

// Deterministic synthetic benchmark: events, a static model, yearly models,
// a ~200-document corpus, 10 TREC topics and qrels in which the vocabulary
// of each topic's event entry marks the relevant documents.

#include <cstdint>
#include <filesystem>
#include <vector>

#include "edqe/eventstore.hpp"
#include "edqe/retrieval.hpp"
#include "edqe/vecspace.hpp"

namespace edqe::synth {

struct MiniBenchmark {
  std::vector<EventRecord> events;  // includes records that fail the default filter
  EmbeddingModel static_model;
  TemporalModelSet temporal;
  std::vector<Document> docs;
  std::vector<Topic> topics;
  Qrels qrels;
};

MiniBenchmark make_mini_benchmark(std::uint64_t seed = 20210711);

// Writes static.txt, temporal/<year>.txt, events.jsonl, corpus.jsonl,
// topics.txt, qrels.txt and config.json (paths relative to `dir`).
void write_mini_benchmark(const MiniBenchmark& bench, const std::filesystem::path& dir);

}  // namespace edqe::synth
