#include <cctype>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "edqe/analysis.hpp"
#include "edqe/errors.hpp"

namespace edqe {

// Generated from data/stopwords.txt at configure time.
extern const char* const kBuiltinStopWords;

StopList StopList::parse(std::string_view text) {
  std::unordered_set<std::string> words;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.remove_suffix(1);
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.front()))) line.remove_prefix(1);
    if (line.empty() || line.front() == '#') continue;
    std::string w(line);
    for (char& c : w) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    words.insert(std::move(w));
  }
  return StopList(std::move(words));
}

const StopList& StopList::builtin() {
  static const StopList list = parse(kBuiltinStopWords);
  return list;
}

StopList StopList::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(fmt::format("cannot open stop list {}", path.string()));
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

namespace {

bool is_word_byte(unsigned char c) { return std::isalnum(c) || c >= 0x80; }

}  // namespace

std::vector<std::string> tokenize(std::string_view text, bool stem, const StopList& stops) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && !is_word_byte(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t j = i;
    while (j < text.size() && is_word_byte(static_cast<unsigned char>(text[j]))) ++j;
    if (j > i) {
      std::string tok(text.substr(i, j - i));
      for (char& c : tok) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      if (!stops.contains(tok)) out.push_back(stem ? porter_stem(tok) : std::move(tok));
    }
    i = j;
  }
  return out;
}

std::string Analyzer::term(std::string_view word) const {
  auto toks = (*this)(word);
  return toks.size() == 1 ? toks.front() : std::string{};
}

}  // namespace edqe
