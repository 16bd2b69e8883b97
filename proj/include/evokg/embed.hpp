#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "evokg/schema.hpp"

namespace evokg {

/// Word vectors of one fixed dimension. All components are finite.
class EmbeddingStore {
 public:
  explicit EmbeddingStore(std::size_t dim);

  /// Throws DataError on a length mismatch or a non-finite component.
  void add(std::string word, std::vector<double> vec);

  const std::vector<double>* find(std::string_view word) const;
  std::size_t dim() const { return dim_; }
  std::size_t size() const { return table_.size(); }

  /// word2vec text format: "<vocab_size> <dim>" header, then "<word> v1 ... vdim".
  static EmbeddingStore load(const std::string& path);

 private:
  std::size_t dim_;
  std::unordered_map<std::string, std::vector<double>> table_;
};

/// dot(a, b) / (|a| |b|). Throws Error("undefined similarity") for a zero vector
/// and std::invalid_argument for a length mismatch.
double cosine(std::span<const double> a, std::span<const double> b);

/// Mean of the vectors of the node's name tokens; tokens missing from the store
/// are skipped and reported through `warnings`. Throws DataError when none is found.
std::vector<double> node_vector(const SchemaNode& node, const EmbeddingStore& store,
                                std::vector<std::string>* warnings = nullptr);

/// Windowed co-occurrence counts.
///
/// Every token position opens one window covering that token and the next
/// `window` tokens of the same sentence. unigram(w) counts windows containing w,
/// pair(w, v) counts windows containing both (for w == v: at least twice) and
/// total counts windows, so all three are frequencies over the same events.
class CoocTable {
 public:
  explicit CoocTable(std::size_t window = 5) : window_(window) {}

  static CoocTable build(const std::vector<std::vector<std::string>>& corpus, std::size_t window);

  std::size_t window() const { return window_; }
  std::uint64_t total() const { return total_; }
  std::uint64_t unigram(std::string_view w) const;
  std::uint64_t pair(std::string_view a, std::string_view b) const;

  /// Words with a nonzero unigram count, sorted.
  std::vector<std::string> vocabulary() const;

  // Direct construction, for callers that already hold counts.
  void set_total(std::uint64_t total) { total_ = total; }
  void set_unigram(const std::string& w, std::uint64_t count) { unigram_[w] = count; }
  void set_pair(const std::string& a, const std::string& b, std::uint64_t count);

 private:
  static std::string pair_key(std::string_view a, std::string_view b);

  std::size_t window_;
  std::uint64_t total_ = 0;
  std::unordered_map<std::string, std::uint64_t> unigram_;
  std::unordered_map<std::string, std::uint64_t> pair_;
};

struct NpmiParams {
  double eps = 1e-12;
  double gamma = 1.0;
};

/// Smoothed, normalized PMI raised to gamma:
///   ( ln((p(a,b) + eps) / (p(a) p(b))) / -ln(p(a,b) + eps) ) ^ gamma
/// with probabilities = counts / total. Throws DataError when either unigram is 0.
double npmi(std::string_view a, std::string_view b, const CoocTable& table, NpmiParams params = {});

/// For each lexicon word w_j: sum over w_i in `candidates` of npmi(w_i, w_j).
/// gamma is applied once, inside npmi.
std::vector<double> analogy_scores(std::span<const std::string> candidates,
                                   std::span<const std::string> lexicon, const CoocTable& table,
                                   NpmiParams params = {});

}  // namespace evokg
