#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "evokg/evolve.hpp"
#include "evokg/llmclient.hpp"

namespace evokg {

struct DecodeSettings {
  std::string scorer = "oracle";  // oracle | uniform | random | adversarial
  std::size_t max_len = 256;
  std::uint64_t seed = 0;
  int threads = 1;
  std::vector<std::string> favored;  // adversarial scorer only
};

/// One run, as read from a JSON config. Relative paths are resolved against the
/// directory holding the config file.
struct RunConfig {
  std::string raw_schema;
  std::string train;
  std::string dev;
  std::string test;
  std::string embeddings;  // horizontal and hybrid
  std::string corpus;      // analogous: one sentence per line
  std::string lexicon;     // analogous, optional: one word per line
  std::string output_dir;
  EvolutionConfig evolution;
  DecodeSettings decode;
  std::vector<std::string> metrics;
  std::optional<EndpointConfig> endpoint;
};

RunConfig run_config_from_json(const nlohmann::json& j, const std::string& base_dir);
RunConfig load_run_config(const std::string& path);

/// Throws DataError naming the first input that a build with this config needs
/// and cannot find.
void validate_build_inputs(const RunConfig& cfg);

/// Lowercased whitespace tokens, one sentence per non-empty line.
std::vector<std::vector<std::string>> load_corpus(const std::string& path);
std::vector<std::string> load_lexicon(const std::string& path);

}  // namespace evokg
