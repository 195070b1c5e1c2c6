#pragma once

// Dense embedding models: one static model plus one model per year.

#include <cstddef>
#include <filesystem>
#include <functional>
#include <initializer_list>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

namespace edqe {

class Vector {
 public:
  Vector() = default;
  explicit Vector(std::size_t dim) : data_(dim, 0.0) {}
  explicit Vector(std::vector<double> components);
  Vector(std::initializer_list<double> init);

  std::size_t dim() const { return data_.size(); }
  double operator[](std::size_t i) const { return data_[i]; }
  double& operator[](std::size_t i) { return data_[i]; }

  std::span<const double> components() const { return data_; }
  std::span<double> components() { return data_; }

  double norm() const;
  // Unit-length copy. Throws InvalidArgument on a zero vector.
  Vector normalized() const;

  friend bool operator==(const Vector&, const Vector&) = default;

 private:
  std::vector<double> data_;
};

double dot(std::span<const double> a, std::span<const double> b);

// Cosine similarity clamped to [-1, 1]. Throws InvalidArgument on dimension
// mismatch or a zero-norm input.
double cosine(const Vector& a, const Vector& b);
double cosine(std::span<const double> a, std::span<const double> b);

// 1 - cosine, in [0, 2].
double cosine_distance(const Vector& a, const Vector& b);

struct Neighbor {
  std::string token;
  double similarity = 0.0;
  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

using TokenFilter = std::function<bool(std::string_view)>;

// A vocabulary of tokens mapped to vectors of one dimensionality. Entry order
// is insertion order and is preserved on save.
class EmbeddingModel {
 public:
  EmbeddingModel() = default;
  EmbeddingModel(std::string label, std::size_t dim);

  const std::string& label() const { return label_; }
  void set_label(std::string label) { label_ = std::move(label); }
  std::size_t dim() const { return dim_; }
  std::size_t size() const { return tokens_.size(); }
  bool empty() const { return tokens_.empty(); }

  // Exact match first, then the lower-cased form.
  bool contains(std::string_view token) const;
  // Throws OovError.
  const Vector& at(std::string_view token) const;
  const Vector* find(std::string_view token) const;

  // Inserts or overwrites. Returns true if the token was newly added.
  bool insert(std::string token, Vector v);

  std::span<const std::string> tokens() const { return tokens_; }
  const Vector& vector_at(std::size_t i) const { return vectors_[i]; }

 private:
  std::optional<std::size_t> index_of(std::string_view token) const;

  std::string label_;
  std::size_t dim_ = 0;
  std::vector<std::string> tokens_;
  std::vector<Vector> vectors_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Per-year temporal models keyed by year.
class TemporalModelSet {
 public:
  void add(int year, EmbeddingModel model);
  const EmbeddingModel* find(int year) const;
  EmbeddingModel* find(int year);
  bool contains(int year) const { return models_.count(year) != 0; }
  std::size_t size() const { return models_.size(); }
  const std::map<int, EmbeddingModel>& models() const { return models_; }
  std::map<int, EmbeddingModel>& models() { return models_; }

 private:
  std::map<int, EmbeddingModel> models_;
};

// Text format: "<count> <dim>" header, then "<token> <c1> ... <c_dim>" rows.
EmbeddingModel load_model(const std::filesystem::path& path,
                          std::optional<std::size_t> expected_dim = {},
                          std::string label = {});
EmbeddingModel parse_model(std::istream& in,
                           std::optional<std::size_t> expected_dim = {},
                           std::string label = {});

// precision == 0 writes the shortest representation that parses back to the
// identical double; otherwise that many significant digits.
void write_model(std::ostream& out, const EmbeddingModel& model,
                 int precision = 0);
void save_model(const std::filesystem::path& path, const EmbeddingModel& model,
                int precision = 0);

// Loads every "<year>.txt" / "<year>.vec" file in a directory, keeping years
// inside [min_year, max_year].
TemporalModelSet load_temporal_models(const std::filesystem::path& dir,
                                      int min_year = 1981,
                                      int max_year = 2018);
void save_temporal_models(const std::filesystem::path& dir,
                          const TemporalModelSet& set, int precision = 0);

// Cosine similarity between two in-vocabulary tokens. Throws OovError naming
// the missing token.
double similarity(const EmbeddingModel& model, std::string_view t1,
                  std::string_view t2);

using KnnQuery = std::variant<std::string, Vector>;

// Exact k-nearest neighbours by cosine, descending, ties broken by token. A
// token query excludes itself from the result.
std::vector<Neighbor> knn(const EmbeddingModel& model, const KnnQuery& query,
                          std::size_t k, const TokenFilter& filter = {});

std::string to_lower(std::string_view s);

}  // namespace edqe
