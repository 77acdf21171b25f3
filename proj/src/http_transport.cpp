#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"

#include <regex>

#include "bdparse/llm_client.hpp"

namespace bdparse::llm {

namespace {

class HttplibTransport final : public Transport {
public:
    HttpResponse post(const HttpRequest& request) override {
        static const std::regex url_re(R"(^(https?://[^/]+)(/.*)?$)");
        std::smatch m;
        if (!std::regex_match(request.url, m, url_re)) {
            throw LlmError(ErrorKind::transport, "malformed endpoint URL '" + request.url + "'", false);
        }
        httplib::Client client(m[1].str());
        const auto secs = static_cast<time_t>(request.timeout.count());
        client.set_connection_timeout(secs, 0);
        client.set_read_timeout(secs, 0);
        client.set_write_timeout(secs, 0);

        httplib::Headers headers;
        std::string content_type = "application/json";
        for (const auto& [k, v] : request.headers) {
            if (k == "Content-Type") {
                content_type = v;
            } else {
                headers.emplace(k, v);
            }
        }
        const std::string path = m[2].matched ? m[2].str() : "/";
        auto res = client.Post(path, headers, request.body, content_type);
        if (!res) {
            const auto err = res.error();
            const bool timed_out = err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read;
            throw LlmError(timed_out ? ErrorKind::timeout : ErrorKind::transport, httplib::to_string(err), true);
        }
        return HttpResponse{res->status, res->body};
    }
};

}  // namespace

std::unique_ptr<Transport> make_http_transport() { return std::make_unique<HttplibTransport>(); }

}  // namespace bdparse::llm
