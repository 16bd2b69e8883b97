#include "httplib.h"

#include "evokg/llmclient.hpp"

namespace evokg {

namespace {

class HttplibTransport : public HttpTransport {
 public:
  HttpResponse post(const HttpRequest& request) override {
    HttpResponse out;
    httplib::Client client(request.base_url);
    if (!client.is_valid()) {
      out.error = "invalid base URL";
      return out;
    }
    const auto secs = static_cast<time_t>(request.timeout_seconds);
    const auto usecs = static_cast<time_t>((request.timeout_seconds - static_cast<double>(secs)) * 1e6);
    client.set_connection_timeout(secs, usecs);
    client.set_read_timeout(secs, usecs);
    client.set_write_timeout(secs, usecs);

    httplib::Headers headers;
    std::string content_type = "application/json";
    for (const auto& [k, v] : request.headers) {
      if (k == "Content-Type") {
        content_type = v;
      } else {
        headers.emplace(k, v);
      }
    }
    auto res = client.Post(request.path, headers, request.body, content_type);
    if (!res) {
      out.error = httplib::to_string(res.error());
      return out;
    }
    out.status = res->status;
    out.body = res->body;
    return out;
  }
};

}  // namespace

std::shared_ptr<HttpTransport> make_http_transport() { return std::make_shared<HttplibTransport>(); }

}  // namespace evokg
