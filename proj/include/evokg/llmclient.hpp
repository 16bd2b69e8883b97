#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "evokg/corpus.hpp"
#include "evokg/schema.hpp"

namespace evokg {

inline constexpr const char* kIclDescription =
    "There are some relation extraction samples, relation must be taken from schema, head entity "
    "and tail entity must be taken from context. Relation, head entity and tail entity may have "
    "multiple.";
inline constexpr const char* kIclAnswerLead = "The relation involved in the above sentence are:";
inline constexpr const char* kIclConfirmation =
    "Do you understand how to do relation extraction based on schema? Now it's your turn to do "
    "relation extraction.";

struct Demonstration {
  std::string context;
  std::vector<Relation> relations;
};

struct PromptSpec {
  std::string description = kIclDescription;
  std::vector<std::string> schema;  // relation names, rendered in this order
  std::vector<Demonstration> demos;
  std::string query;
};

/// Relation labels of `schema` in graph order.
std::vector<std::string> relation_names(const SchemaGraph& schema);

/// `schema: ["a", "b"]`
std::string render_schema_list(const std::vector<std::string>& names);

/// "1.The head entity is H, relation is R, tail entity is T;2.The ..."
std::string render_relations(const std::vector<Relation>& relations);

/// Layout, blocks separated by a blank line:
///   <description> schema: [...]
///   Context: <demo>                 \ per demonstration
///   <answer lead> <clauses>         /
///   <confirmation>
///   schema: [...]
///   Context: <query>
///   <answer lead>
/// Throws DataError when a demonstration uses a relation outside the schema.
std::string build_icl_prompt(const PromptSpec& spec);

struct ParsedResponse {
  std::vector<Relation> relations;
  std::vector<std::string> diagnostics;
};

/// Extracts every "The head entity is H, relation is R, tail entity is T" clause.
/// Relations outside `schema` are dropped with a diagnostic; entity types come
/// from the schema's constraints for the relation. Mentions are located in
/// `query` (offsets -1 when absent). Never throws.
ParsedResponse parse_llm_response(const std::string& text, const SchemaGraph& schema,
                                  const std::string& query);

struct EndpointConfig {
  std::string base_url = "https://api.openai.com";
  std::string path = "/v1/chat/completions";
  std::string model = "gpt-3.5-turbo";
  std::string token_env = "OPENAI_API_KEY";  // name of the variable, never its value
  double timeout_seconds = 60.0;
  int max_retries = 3;
  double backoff_seconds = 1.0;  // doubled after every retry
  int max_concurrency = 4;
};

EndpointConfig endpoint_from_json(const nlohmann::json& j, EndpointConfig base = {});

struct HttpRequest {
  std::string base_url;
  std::string path;
  std::vector<std::pair<std::string, std::string>> headers;
  std::string body;
  double timeout_seconds = 60.0;
};

struct HttpResponse {
  int status = 0;  // 0: the request never completed
  std::string body;
  std::string error;
};

class HttpTransport {
 public:
  virtual ~HttpTransport() = default;
  virtual HttpResponse post(const HttpRequest& request) = 0;
};

/// Real network transport.
std::shared_ptr<HttpTransport> make_http_transport();

std::string chat_request_body(const std::string& model, const std::string& prompt);
/// choices[0].message.content; throws DataError on anything else.
std::string chat_response_content(const std::string& body);

class ChatClient {
 public:
  using Sleeper = std::function<void(double seconds)>;
  using EnvLookup = std::function<std::optional<std::string>(const std::string& name)>;

  ChatClient(EndpointConfig config, std::shared_ptr<HttpTransport> transport, Sleeper sleeper = {},
             EnvLookup env = {});

  /// One completion. Retries 429, 5xx and transport failures with exponential
  /// backoff up to max_retries; throws Error when they are exhausted or on any
  /// other status.
  std::string complete(const std::string& prompt) const;

  /// Runs at most max_concurrency requests at a time; results keep input order.
  /// Failed prompts yield nullopt and a message in `errors` (same index).
  std::vector<std::optional<std::string>> complete_all(const std::vector<std::string>& prompts,
                                                       std::vector<std::string>* errors = nullptr) const;

  const EndpointConfig& config() const { return config_; }

 private:
  EndpointConfig config_;
  std::shared_ptr<HttpTransport> transport_;
  Sleeper sleeper_;
  EnvLookup env_;
};

}  // namespace evokg
