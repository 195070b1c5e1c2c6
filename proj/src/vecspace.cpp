#include "edqe/vecspace.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <queue>
#include <sstream>

#include <fmt/format.h>

#include "edqe/errors.hpp"

namespace edqe {

namespace {

void check_finite(std::span<const double> c) {
  for (double x : c) {
    if (!std::isfinite(x)) throw InvalidArgument("vector has a non-finite component");
  }
}

double parse_double(std::string_view s) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw FormatError(fmt::format("not a number: '{}'", s));
  }
  return value;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

void append_double(std::string& out, double x, int precision) {
  char buf[64];
  auto res = precision > 0
                 ? std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, precision)
                 : std::to_chars(buf, buf + sizeof buf, x);
  out.append(buf, res.ptr);
}

}  // namespace

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

Vector::Vector(std::vector<double> components) : data_(std::move(components)) {
  check_finite(data_);
}

Vector::Vector(std::initializer_list<double> init) : data_(init) { check_finite(data_); }

double Vector::norm() const { return std::sqrt(dot(data_, data_)); }

Vector Vector::normalized() const {
  const double n = norm();
  if (n == 0.0) throw InvalidArgument("cannot normalize a zero vector");
  Vector out(*this);
  for (double& x : out.data_) x /= n;
  return out;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double cosine(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw InvalidArgument(fmt::format("dimension mismatch: {} vs {}", a.size(), b.size()));
  }
  const double na = std::sqrt(dot(a, a));
  const double nb = std::sqrt(dot(b, b));
  if (na == 0.0 || nb == 0.0) throw InvalidArgument("cosine of a zero-norm vector");
  return std::clamp(dot(a, b) / (na * nb), -1.0, 1.0);
}

double cosine(const Vector& a, const Vector& b) { return cosine(a.components(), b.components()); }

double cosine_distance(const Vector& a, const Vector& b) { return 1.0 - cosine(a, b); }

EmbeddingModel::EmbeddingModel(std::string label, std::size_t dim)
    : label_(std::move(label)), dim_(dim) {
  if (dim == 0) throw InvalidArgument("embedding dimension must be positive");
}

std::optional<std::size_t> EmbeddingModel::index_of(std::string_view token) const {
  if (auto it = index_.find(std::string(token)); it != index_.end()) return it->second;
  if (auto it = index_.find(to_lower(token)); it != index_.end()) return it->second;
  return std::nullopt;
}

bool EmbeddingModel::contains(std::string_view token) const { return index_of(token).has_value(); }

const Vector* EmbeddingModel::find(std::string_view token) const {
  auto i = index_of(token);
  return i ? &vectors_[*i] : nullptr;
}

const Vector& EmbeddingModel::at(std::string_view token) const {
  if (const Vector* v = find(token)) return *v;
  throw OovError(std::string(token));
}

bool EmbeddingModel::insert(std::string token, Vector v) {
  if (token.empty()) throw InvalidArgument("empty token");
  if (v.dim() != dim_) {
    throw InvalidArgument(
        fmt::format("token '{}' has dimension {}, model has {}", token, v.dim(), dim_));
  }
  if (auto it = index_.find(token); it != index_.end()) {
    vectors_[it->second] = std::move(v);
    return false;
  }
  index_.emplace(token, tokens_.size());
  tokens_.push_back(std::move(token));
  vectors_.push_back(std::move(v));
  return true;
}

void TemporalModelSet::add(int year, EmbeddingModel model) {
  model.set_label(std::to_string(year));
  models_.insert_or_assign(year, std::move(model));
}

const EmbeddingModel* TemporalModelSet::find(int year) const {
  auto it = models_.find(year);
  return it == models_.end() ? nullptr : &it->second;
}

EmbeddingModel* TemporalModelSet::find(int year) {
  auto it = models_.find(year);
  return it == models_.end() ? nullptr : &it->second;
}

EmbeddingModel parse_model(std::istream& in, std::optional<std::size_t> expected_dim,
                           std::string label) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("empty embedding file");
  auto header = split_ws(line);
  std::size_t count = 0;
  std::size_t dim = 0;
  if (header.size() != 2 || std::from_chars(header[0].data(), header[0].data() + header[0].size(), count).ec != std::errc() ||
      std::from_chars(header[1].data(), header[1].data() + header[1].size(), dim).ec != std::errc() ||
      dim == 0) {
    throw FormatError(fmt::format("malformed header: '{}'", line));
  }
  if (expected_dim && *expected_dim != dim) {
    throw FormatError(fmt::format("header dimension {} does not match expected {}", dim, *expected_dim));
  }

  EmbeddingModel model(std::move(label), dim);
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    auto fields = split_ws(line);
    if (fields.empty()) continue;
    if (fields.size() != dim + 1) {
      throw FormatError(fmt::format("line {}: expected {} values, got {}", lineno, dim, fields.size() - 1));
    }
    std::vector<double> comps(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      comps[i] = parse_double(fields[i + 1]);
      if (!std::isfinite(comps[i])) throw FormatError(fmt::format("line {}: non-finite value", lineno));
    }
    std::string token(fields[0]);
    if (!model.insert(token, Vector(std::move(comps)))) {
      throw FormatError(fmt::format("line {}: duplicate token '{}'", lineno, token));
    }
  }
  if (model.size() != count) {
    throw FormatError(fmt::format("header declares {} entries, file has {}", count, model.size()));
  }
  return model;
}

EmbeddingModel load_model(const std::filesystem::path& path, std::optional<std::size_t> expected_dim,
                          std::string label) {
  std::ifstream in(path);
  if (!in) throw Error(fmt::format("cannot open embedding file {}", path.string()));
  try {
    return parse_model(in, expected_dim, std::move(label));
  } catch (const FormatError& e) {
    throw FormatError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

void write_model(std::ostream& out, const EmbeddingModel& model, int precision) {
  std::string buf = fmt::format("{} {}\n", model.size(), model.dim());
  for (std::size_t i = 0; i < model.size(); ++i) {
    buf += model.tokens()[i];
    for (double x : model.vector_at(i).components()) {
      buf += ' ';
      append_double(buf, x, precision);
    }
    buf += '\n';
    if (buf.size() > (1u << 20)) {
      out << buf;
      buf.clear();
    }
  }
  out << buf;
}

void save_model(const std::filesystem::path& path, const EmbeddingModel& model, int precision) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(fmt::format("cannot write {}", path.string()));
  write_model(out, model, precision);
}

TemporalModelSet load_temporal_models(const std::filesystem::path& dir, int min_year, int max_year) {
  if (!std::filesystem::is_directory(dir)) {
    throw Error(fmt::format("temporal model directory not found: {}", dir.string()));
  }
  TemporalModelSet set;
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  for (const auto& p : files) {
    const auto ext = p.extension().string();
    if (ext != ".txt" && ext != ".vec") continue;
    const auto stem = p.stem().string();
    int year = 0;
    auto [ptr, ec] = std::from_chars(stem.data(), stem.data() + stem.size(), year);
    if (ec != std::errc() || ptr != stem.data() + stem.size()) continue;
    if (year < min_year || year > max_year) continue;
    set.add(year, load_model(p, std::nullopt, stem));
  }
  return set;
}

void save_temporal_models(const std::filesystem::path& dir, const TemporalModelSet& set, int precision) {
  std::filesystem::create_directories(dir);
  for (const auto& [year, model] : set.models()) {
    save_model(dir / fmt::format("{}.txt", year), model, precision);
  }
}

double similarity(const EmbeddingModel& model, std::string_view t1, std::string_view t2) {
  return cosine(model.at(t1), model.at(t2));
}

std::vector<Neighbor> knn(const EmbeddingModel& model, const KnnQuery& query, std::size_t k,
                          const TokenFilter& filter) {
  if (k == 0) throw InvalidArgument("knn: k must be positive");
  const Vector* qvec = nullptr;
  const std::string* self = nullptr;
  if (const auto* tok = std::get_if<std::string>(&query)) {
    qvec = &model.at(*tok);
    self = tok;
  } else {
    qvec = &std::get<Vector>(query);
  }
  const double qnorm = qvec->norm();
  if (qnorm == 0.0) throw InvalidArgument("knn: zero-norm query");
  if (qvec->dim() != model.dim()) {
    throw InvalidArgument(fmt::format("knn: query dimension {} vs model {}", qvec->dim(), model.dim()));
  }

  // Worse-first heap of the current best k.
  auto better = [](const Neighbor& a, const Neighbor& b) {
    if (a.similarity != b.similarity) return a.similarity > b.similarity;
    return a.token < b.token;
  };
  std::priority_queue<Neighbor, std::vector<Neighbor>, decltype(better)> heap(better);
  for (std::size_t i = 0; i < model.size(); ++i) {
    const std::string& tok = model.tokens()[i];
    const Vector& v = model.vector_at(i);
    if (qvec == &v) continue;
    if (self && (tok == *self)) continue;
    if (filter && !filter(tok)) continue;
    const double n = v.norm();
    if (n == 0.0) continue;
    const double sim = std::clamp(dot(qvec->components(), v.components()) / (qnorm * n), -1.0, 1.0);
    Neighbor cand{tok, sim};
    if (heap.size() < k) {
      heap.push(std::move(cand));
    } else if (better(cand, heap.top())) {
      heap.pop();
      heap.push(std::move(cand));
    }
  }
  std::vector<Neighbor> out;
  out.reserve(heap.size());
  while (!heap.empty()) {
    out.push_back(heap.top());
    heap.pop();
  }
  std::reverse(out.begin(), out.end());
  return out;
}

}  // namespace edqe
