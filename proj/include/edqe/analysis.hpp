#pragma once

// Text analysis shared by event entries, documents and queries: lower-case,
// split on punctuation, drop stop-words, optionally Porter-stem.

#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace edqe {

// Porter's 1980 suffix-stripping algorithm, following the reference C
// implementation. Input is expected lower-case; tokens that are not purely
// ASCII letters are returned unchanged.
std::string porter_stem(std::string_view word);

class StopList {
 public:
  StopList() = default;
  explicit StopList(std::unordered_set<std::string> words) : words_(std::move(words)) {}

  // The bundled list (data/stopwords.txt, compiled in).
  static const StopList& builtin();
  static StopList load(const std::filesystem::path& path);
  static StopList parse(std::string_view text);

  bool contains(std::string_view w) const { return words_.count(std::string(w)) != 0; }
  std::size_t size() const { return words_.size(); }

 private:
  std::unordered_set<std::string> words_;
};

// Lower-cased, punctuation-split tokens with stop-words removed; stemmed when
// `stem` is set. Empty text yields an empty list.
std::vector<std::string> tokenize(std::string_view text, bool stem,
                                  const StopList& stops = StopList::builtin());

// Analysis pipeline with fixed options, as used by an index.
struct Analyzer {
  bool stem = true;
  const StopList* stops = &StopList::builtin();

  std::vector<std::string> operator()(std::string_view text) const {
    return tokenize(text, stem, *stops);
  }
  // The single index token for a term, or empty if the term is a stop-word or
  // does not analyze to exactly one token.
  std::string term(std::string_view word) const;
};

}  // namespace edqe
