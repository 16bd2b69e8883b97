#include "evokg/embed.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "evokg/error.hpp"
#include "evokg/text.hpp"

namespace evokg {

EmbeddingStore::EmbeddingStore(std::size_t dim) : dim_(dim) {
  if (dim == 0) throw DataError("embedding dimension must be positive");
}

void EmbeddingStore::add(std::string word, std::vector<double> vec) {
  if (vec.size() != dim_) {
    throw DataError("embedding for '" + word + "' has " + std::to_string(vec.size()) +
                    " components, expected " + std::to_string(dim_));
  }
  for (double v : vec) {
    if (!std::isfinite(v)) throw DataError("embedding for '" + word + "' has a non-finite component");
  }
  table_[std::move(word)] = std::move(vec);
}

const std::vector<double>* EmbeddingStore::find(std::string_view word) const {
  auto it = table_.find(std::string(word));
  return it == table_.end() ? nullptr : &it->second;
}

EmbeddingStore EmbeddingStore::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open embeddings: " + path);
  std::string line;
  if (!std::getline(in, line)) throw DataError(path + ": empty embedding file");
  const auto header = split_ws(line);
  if (header.size() != 2) throw DataError(path + ":1: expected '<vocab_size> <dim>'");
  std::size_t vocab = 0;
  std::size_t dim = 0;
  try {
    vocab = std::stoul(header[0]);
    dim = std::stoul(header[1]);
  } catch (const std::exception&) {
    throw DataError(path + ":1: bad header");
  }
  EmbeddingStore store(dim);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    auto parts = split_ws(line);
    if (parts.empty()) continue;
    if (parts.size() != dim + 1) {
      throw DataError(path + ":" + std::to_string(line_no) + ": expected word and " +
                      std::to_string(dim) + " values");
    }
    std::vector<double> vec(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      try {
        vec[i] = std::stod(parts[i + 1]);
      } catch (const std::exception&) {
        throw DataError(path + ":" + std::to_string(line_no) + ": bad number '" + parts[i + 1] + "'");
      }
    }
    try {
      store.add(parts[0], std::move(vec));
    } catch (const DataError& e) {
      throw DataError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (store.size() != vocab) {
    throw DataError(path + ": header announces " + std::to_string(vocab) + " words, found " +
                    std::to_string(store.size()));
  }
  return store;
}

double cosine(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("cosine: length mismatch");
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) throw Error("undefined similarity");
  const double c = dot / (std::sqrt(na) * std::sqrt(nb));
  return std::clamp(c, -1.0, 1.0);
}

std::vector<double> node_vector(const SchemaNode& node, const EmbeddingStore& store,
                                std::vector<std::string>* warnings) {
  std::vector<double> sum(store.dim(), 0.0);
  std::size_t found = 0;
  for (const auto& tok : node.name) {
    const auto* v = store.find(tok);
    if (!v) {
      if (warnings) warnings->push_back("no embedding for '" + tok + "' in node " + node.id);
      continue;
    }
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += (*v)[i];
    ++found;
  }
  if (found == 0) throw DataError("no embedded token in node " + node.id + " (" + node.name_key() + ")");
  for (double& x : sum) x /= static_cast<double>(found);
  return sum;
}

std::string CoocTable::pair_key(std::string_view a, std::string_view b) {
  if (b < a) std::swap(a, b);
  std::string key(a);
  key += '\x1f';
  key += b;
  return key;
}

void CoocTable::set_pair(const std::string& a, const std::string& b, std::uint64_t count) {
  pair_[pair_key(a, b)] = count;
}

std::uint64_t CoocTable::unigram(std::string_view w) const {
  auto it = unigram_.find(std::string(w));
  return it == unigram_.end() ? 0 : it->second;
}

std::uint64_t CoocTable::pair(std::string_view a, std::string_view b) const {
  auto it = pair_.find(pair_key(a, b));
  return it == pair_.end() ? 0 : it->second;
}

std::vector<std::string> CoocTable::vocabulary() const {
  std::vector<std::string> out;
  for (const auto& [w, c] : unigram_) {
    if (c > 0) out.push_back(w);
  }
  std::sort(out.begin(), out.end());
  return out;
}

CoocTable CoocTable::build(const std::vector<std::vector<std::string>>& corpus, std::size_t window) {
  if (window == 0) throw DataError("co-occurrence window must be at least 1");
  CoocTable table(window);
  std::map<std::string, int> counts;
  for (const auto& sentence : corpus) {
    for (std::size_t i = 0; i < sentence.size(); ++i) {
      counts.clear();
      const std::size_t last = std::min(sentence.size() - 1, i + window);
      for (std::size_t j = i; j <= last; ++j) ++counts[sentence[j]];
      ++table.total_;
      for (auto it = counts.begin(); it != counts.end(); ++it) {
        ++table.unigram_[it->first];
        if (it->second >= 2) ++table.pair_[pair_key(it->first, it->first)];
        for (auto jt = std::next(it); jt != counts.end(); ++jt) {
          ++table.pair_[pair_key(it->first, jt->first)];
        }
      }
    }
  }
  return table;
}

double npmi(std::string_view a, std::string_view b, const CoocTable& table, NpmiParams params) {
  const auto ua = table.unigram(a);
  const auto ub = table.unigram(b);
  if (ua == 0 || ub == 0 || table.total() == 0) {
    throw DataError("npmi undefined: zero unigram count for '" + std::string(ua == 0 ? a : b) + "'");
  }
  const double total = static_cast<double>(table.total());
  const double pa = static_cast<double>(ua) / total;
  const double pb = static_cast<double>(ub) / total;
  const double pab = static_cast<double>(table.pair(a, b)) / total + params.eps;

  double value;
  if (pab <= 0.0) {
    value = -1.0;  // never co-occur: the limit of the normalized form
  } else {
    const double denom = -std::log(pab);
    const double numer = std::log(pab / (pa * pb));
    value = denom == 0.0 ? 1.0 : numer / denom;
  }
  if (params.gamma == 1.0) return value;
  // Sign-preserving power keeps negative associations real for fractional gamma.
  return std::copysign(std::pow(std::fabs(value), params.gamma), value);
}

std::vector<double> analogy_scores(std::span<const std::string> candidates,
                                   std::span<const std::string> lexicon, const CoocTable& table,
                                   NpmiParams params) {
  std::vector<double> scores(lexicon.size(), 0.0);
  for (std::size_t j = 0; j < lexicon.size(); ++j) {
    for (const auto& wi : candidates) scores[j] += npmi(wi, lexicon[j], table, params);
  }
  return scores;
}

}  // namespace evokg
