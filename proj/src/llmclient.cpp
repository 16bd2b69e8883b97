#include "evokg/llmclient.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cstdlib>
#include <set>
#include <thread>

#include "evokg/error.hpp"
#include "evokg/lineal.hpp"
#include "evokg/text.hpp"

namespace evokg {

std::vector<std::string> relation_names(const SchemaGraph& schema) {
  std::vector<std::string> out;
  for (const SchemaNode* n : schema.labels(Role::Relation)) out.push_back(n->name_key());
  return out;
}

std::string render_schema_list(const std::vector<std::string>& names) {
  std::string out = "schema: [";
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i) out += ", ";
    out += nlohmann::json(names[i]).dump();
  }
  return out + "]";
}

std::string render_relations(const std::vector<Relation>& relations) {
  std::string out;
  for (std::size_t i = 0; i < relations.size(); ++i) {
    const auto& r = relations[i];
    out += std::to_string(i + 1) + ".The head entity is " + r.head.text + ", relation is " +
           canonical_name(r.relation) + ", tail entity is " + r.tail.text + ";";
  }
  return out;
}

std::string build_icl_prompt(const PromptSpec& spec) {
  std::set<std::string> allowed;
  for (const auto& n : spec.schema) allowed.insert(canonical_name(n));
  const std::string schema_line = render_schema_list(spec.schema);

  std::string out = spec.description + " " + schema_line + "\n\n";
  for (std::size_t d = 0; d < spec.demos.size(); ++d) {
    const auto& demo = spec.demos[d];
    for (const auto& r : demo.relations) {
      if (!allowed.count(canonical_name(r.relation))) {
        throw DataError("demonstration " + std::to_string(d + 1) + " uses relation '" + r.relation +
                        "' outside the schema");
      }
    }
    out += "Context: " + demo.context + "\n\n";
    out += kIclAnswerLead;
    if (!demo.relations.empty()) out += " " + render_relations(demo.relations);
    out += "\n\n";
  }
  out += std::string(kIclConfirmation) + "\n\n";
  out += schema_line + "\n\n";
  out += "Context: " + spec.query + "\n\n";
  out += kIclAnswerLead;
  return out;
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::string strip_parentheticals(std::string_view s) {
  std::string out;
  int depth = 0;
  for (char c : s) {
    if (c == '(') {
      ++depth;
    } else if (c == ')' && depth > 0) {
      --depth;
    } else if (depth == 0) {
      out += c;
    }
  }
  return trim(out);
}

// Drops a trailing terminator and the number of the following clause
// ("Iceland; 2. " -> "Iceland").
std::string clean_tail(std::string s) {
  if (auto cut = s.find_first_of(";\n"); cut != std::string::npos) s.resize(cut);
  s = trim(s);
  std::size_t end = s.size();
  while (end > 0 && s[end - 1] == '.') --end;
  std::size_t digits = end;
  while (digits > 0 && std::isdigit(static_cast<unsigned char>(s[digits - 1]))) --digits;
  if (digits < end && (digits == 0 || s[digits - 1] == ' ')) {
    s.resize(digits);
    s = trim(s);
    end = s.size();
  }
  while (end > 0 && s[end - 1] == '.') --end;
  s.resize(end);
  return strip_parentheticals(s);
}

Mention find_in_query(const std::string& query, const std::string& surface) {
  if (auto m = locate_mention(query, split_ws(surface))) {
    if (m->text == surface) return *m;
  }
  if (auto pos = query.find(surface); pos != std::string::npos && !surface.empty()) {
    const auto start = static_cast<std::int64_t>(utf8_cp_offset(query, pos));
    return {surface, start, start + static_cast<std::int64_t>(utf8_length(surface))};
  }
  return {surface, -1, -1};
}

}  // namespace

ParsedResponse parse_llm_response(const std::string& text, const SchemaGraph& schema,
                                  const std::string& query) {
  static const std::string kHead = "The head entity is ";
  static const std::string kRel = ", relation is ";
  static const std::string kTail = ", tail entity is ";
  ParsedResponse out;

  std::vector<std::size_t> starts;
  for (auto pos = text.find(kHead); pos != std::string::npos; pos = text.find(kHead, pos + 1)) {
    starts.push_back(pos);
  }
  if (starts.empty()) {
    std::string rest = trim(text);
    if (rest.rfind(kIclAnswerLead, 0) == 0) rest = trim(rest.substr(std::string(kIclAnswerLead).size()));
    if (!rest.empty()) out.diagnostics.push_back("no relation clause found: " + rest.substr(0, 80));
    return out;
  }

  for (std::size_t k = 0; k < starts.size(); ++k) {
    const std::size_t from = starts[k] + kHead.size();
    const std::size_t to = k + 1 < starts.size() ? starts[k + 1] : text.size();
    const std::string chunk = text.substr(from, to - from);
    const auto rel_pos = chunk.find(kRel);
    const auto tail_pos = rel_pos == std::string::npos ? std::string::npos : chunk.find(kTail, rel_pos);
    if (tail_pos == std::string::npos) {
      out.diagnostics.push_back("unparseable clause: " + trim(chunk).substr(0, 80));
      continue;
    }
    const std::string head = strip_parentheticals(chunk.substr(0, rel_pos));
    const std::string rel =
        canonical_name(strip_parentheticals(chunk.substr(rel_pos + kRel.size(), tail_pos - rel_pos - kRel.size())));
    const std::string tail = clean_tail(chunk.substr(tail_pos + kTail.size()));
    if (head.empty() || rel.empty() || tail.empty()) {
      out.diagnostics.push_back("unparseable clause: " + trim(chunk).substr(0, 80));
      continue;
    }
    const SchemaNode* node = schema.label_by_name(rel);
    if (!node || node->role != Role::Relation) {
      out.diagnostics.push_back("relation not in schema: " + rel);
      continue;
    }
    std::set<std::pair<std::string, std::string>> typings;
    for (const auto& c : schema.re_constraints()) {
      if (c.relation == node->id) typings.emplace(schema.name_of(c.head), schema.name_of(c.tail));
    }
    std::pair<std::string, std::string> types{"entity", "entity"};
    if (typings.empty()) {
      out.diagnostics.push_back("relation without constraints, entity types unknown: " + rel);
    } else {
      types = *typings.begin();
      if (typings.size() > 1) {
        out.diagnostics.push_back("relation has several typings, using " + types.first + "/" +
                                  types.second + ": " + rel);
      }
    }
    Relation r{find_in_query(query, head), types.first, rel, find_in_query(query, tail), types.second};
    if (!r.head.has_offsets()) out.diagnostics.push_back("mention not found in query: " + head);
    if (!r.tail.has_offsets()) out.diagnostics.push_back("mention not found in query: " + tail);
    out.relations.push_back(std::move(r));
  }
  return out;
}

EndpointConfig endpoint_from_json(const nlohmann::json& j, EndpointConfig c) {
  try {
    if (j.contains("base_url")) c.base_url = j.at("base_url").get<std::string>();
    if (j.contains("path")) c.path = j.at("path").get<std::string>();
    if (j.contains("model")) c.model = j.at("model").get<std::string>();
    if (j.contains("token_env")) c.token_env = j.at("token_env").get<std::string>();
    if (j.contains("timeout_seconds")) c.timeout_seconds = j.at("timeout_seconds").get<double>();
    if (j.contains("max_retries")) c.max_retries = j.at("max_retries").get<int>();
    if (j.contains("backoff_seconds")) c.backoff_seconds = j.at("backoff_seconds").get<double>();
    if (j.contains("max_concurrency")) c.max_concurrency = j.at("max_concurrency").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("bad endpoint config: ") + e.what());
  }
  if (c.max_retries < 0) throw DataError("max_retries must be non-negative");
  if (c.max_concurrency < 1) throw DataError("max_concurrency must be positive");
  return c;
}

std::string chat_request_body(const std::string& model, const std::string& prompt) {
  nlohmann::ordered_json j;
  j["model"] = model;
  j["messages"] = nlohmann::ordered_json::array({{{"role", "user"}, {"content", prompt}}});
  j["temperature"] = 0;
  return j.dump();
}

std::string chat_response_content(const std::string& body) {
  try {
    const auto j = nlohmann::json::parse(body);
    return j.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("unexpected chat completion response: ") + e.what());
  }
}

ChatClient::ChatClient(EndpointConfig config, std::shared_ptr<HttpTransport> transport,
                       Sleeper sleeper, EnvLookup env)
    : config_(std::move(config)), transport_(std::move(transport)), sleeper_(std::move(sleeper)),
      env_(std::move(env)) {
  if (!transport_) throw UsageError("chat client needs a transport");
  if (!sleeper_) {
    sleeper_ = [](double s) { std::this_thread::sleep_for(std::chrono::duration<double>(s)); };
  }
  if (!env_) {
    env_ = [](const std::string& name) -> std::optional<std::string> {
      const char* v = std::getenv(name.c_str());
      if (!v) return std::nullopt;
      return std::string(v);
    };
  }
}

std::string ChatClient::complete(const std::string& prompt) const {
  const auto token = env_(config_.token_env);
  if (!token || token->empty()) {
    throw UsageError("environment variable " + config_.token_env + " is not set");
  }
  HttpRequest req;
  req.base_url = config_.base_url;
  req.path = config_.path;
  req.headers = {{"Authorization", "Bearer " + *token}, {"Content-Type", "application/json"}};
  req.body = chat_request_body(config_.model, prompt);
  req.timeout_seconds = config_.timeout_seconds;

  double delay = config_.backoff_seconds;
  std::string last;
  for (int attempt = 0;; ++attempt) {
    const HttpResponse resp = transport_->post(req);
    if (resp.status >= 200 && resp.status < 300) return chat_response_content(resp.body);
    const bool retryable = resp.status == 0 || resp.status == 429 || resp.status >= 500;
    last = resp.status == 0 ? "transport error: " + resp.error : "HTTP " + std::to_string(resp.status);
    if (!retryable) throw Error("chat completion failed: " + last);
    if (attempt >= config_.max_retries) break;
    sleeper_(delay);
    delay *= 2.0;
  }
  throw Error("chat completion failed after " + std::to_string(config_.max_retries + 1) +
              " attempts: " + last);
}

std::vector<std::optional<std::string>> ChatClient::complete_all(
    const std::vector<std::string>& prompts, std::vector<std::string>* errors) const {
  std::vector<std::optional<std::string>> results(prompts.size());
  std::vector<std::string> errs(prompts.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < prompts.size(); i = next++) {
      try {
        results[i] = complete(prompts[i]);
      } catch (const std::exception& e) {
        errs[i] = e.what();
      }
    }
  };
  const std::size_t n_threads =
      std::min<std::size_t>(prompts.size(), static_cast<std::size_t>(std::max(1, config_.max_concurrency)));
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (errors) *errors = std::move(errs);
  return results;
}

}  // namespace evokg
