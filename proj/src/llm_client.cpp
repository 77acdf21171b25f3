#include "bdparse/llm_client.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace bdparse::llm {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::timeout: return "timeout";
        case ErrorKind::transport: return "transport";
        case ErrorKind::auth_failure: return "auth_failure";
        case ErrorKind::rate_limited: return "rate_limited";
        case ErrorKind::exhausted: return "exhausted";
    }
    return "unknown";
}

std::uint64_t estimate_tokens(std::string_view text) { return (text.size() + 3) / 4; }

std::string prompt_digest(std::string_view prompt) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    if (EVP_Digest(prompt.data(), prompt.size(), md.data(), &len, EVP_sha256(), nullptr) != 1) {
        throw Error("SHA-256 digest failed");
    }
    std::ostringstream hex;
    for (unsigned int i = 0; i < len; ++i) {
        hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
    }
    return hex.str();
}

Completion Client::complete(const std::string& prompt) {
    ++usage_.invocations;
    Completion c = do_complete(prompt);
    usage_.prompt_tokens += c.prompt_tokens;
    usage_.completion_tokens += c.completion_tokens;
    return c;
}

// ---------------------------------------------------------------------------
// Mock backend

namespace {

constexpr std::string_view kLogMarker = "New log message: ";
constexpr std::string_view kTemplateMarker = "Existing template: ";

const std::vector<std::pair<std::string_view, std::string_view>>& opposites() {
    static const std::vector<std::pair<std::string_view, std::string_view>> pairs{
        {"boot", "shutdown"},      {"start", "stop"},         {"started", "stopped"},
        {"starting", "stopping"},  {"open", "close"},         {"opened", "closed"},
        {"enable", "disable"},     {"enabled", "disabled"},   {"up", "down"},
        {"success", "failure"},    {"succeeded", "failed"},   {"connect", "disconnect"},
        {"connected", "disconnected"}, {"login", "logout"},   {"true", "false"},
        {"on", "off"},             {"allow", "deny"},         {"allowed", "denied"},
        {"accept", "reject"},      {"accepted", "rejected"},  {"read", "write"},
        {"input", "output"},       {"lock", "unlock"},        {"locked", "unlocked"},
        {"add", "remove"},         {"added", "removed"},      {"create", "delete"},
        {"created", "deleted"},    {"active", "inactive"},    {"online", "offline"},
        {"min", "max"},            {"begin", "end"},          {"request", "response"},
        {"send", "receive"},       {"sent", "received"},      {"upload", "download"},
    };
    return pairs;
}

const std::vector<std::string_view>& key_words() {
    static const std::vector<std::string_view> keys{
        "user",    "username", "uid",     "gid",     "host",     "hostname", "node",    "server",
        "client",  "file",     "path",    "id",      "name",     "account",  "session", "port",
        "address", "addr",     "ip",      "job",     "task",     "container", "pod",    "service",
        "process", "pid",      "group",   "domain",  "device",   "interface", "table",  "database",
        "key",     "value",    "block",   "blk",     "thread",   "worker",   "queue",   "topic",
        "partition", "volume", "disk",    "region",  "zone",     "instance", "tenant",  "token",
        "version", "size",     "count",   "code",    "status",   "state",    "level",   "mode",
        "owner",   "peer",     "src",     "dst",     "source",   "destination", "target", "url",
    };
    return keys;
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::vector<std::string> split_ws(std::string_view s) {
    std::vector<std::string> out;
    std::istringstream in{std::string(s)};
    for (std::string tok; in >> tok;) out.push_back(tok);
    return out;
}

bool opposing(const std::string& a, const std::string& b) {
    for (const auto& [x, y] : opposites()) {
        if ((a == x && b == y) || (a == y && b == x)) return true;
    }
    return false;
}

bool plural_variant(const std::string& a, const std::string& b) {
    return a + "s" == b || b + "s" == a || a + "es" == b || b + "es" == a;
}

bool data_like(std::string_view t) {
    return std::any_of(t.begin(), t.end(), [](unsigned char c) {
        return std::isdigit(c) || c == '.' || c == '_' || c == '/' || c == '@' || c == '\\' || c == ':';
    });
}

bool is_key(std::string_view prev) {
    if (prev == "=" || prev == ":") return true;
    const auto l = lower(prev);
    return std::find(key_words().begin(), key_words().end(), l) != key_words().end();
}

std::optional<std::string> read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

std::optional<std::pair<std::string, std::string>> extract_comparison(std::string_view prompt) {
    std::optional<std::string> log;
    std::optional<std::string> tpl;
    std::istringstream in{std::string(prompt)};
    for (std::string line; std::getline(in, line);) {
        if (line.starts_with(kLogMarker)) log = line.substr(kLogMarker.size());
        if (line.starts_with(kTemplateMarker)) tpl = line.substr(kTemplateMarker.size());
    }
    if (!log || !tpl) return std::nullopt;
    return std::make_pair(*log, *tpl);
}

std::string heuristic_reply(std::string_view log, std::string_view tpl) {
    const auto a = split_ws(log);
    const auto b = split_ws(tpl);
    std::ostringstream out;
    out << "Step 1. Log tokens: " << a.size() << ".\n";
    out << "Step 2. Template tokens: " << b.size() << ".\n";
    if (a.size() != b.size() || a.empty()) {
        out << "Step 3. Token counts differ, so the structures differ.\nNO_MATCH\n";
        return out.str();
    }

    std::vector<std::string> merged;
    bool constant_conflict = false;
    out << "Step 3. Compare positions.\n";
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == b[i]) {
            merged.push_back(a[i]);
            continue;
        }
        merged.emplace_back("<*>");
        if (a[i] == "<*>" || b[i] == "<*>") continue;

        const auto la = lower(a[i]);
        const auto lb = lower(b[i]);
        std::string_view reason;
        bool variable = false;
        if (opposing(la, lb)) {
            reason = "opposing semantics, constant";
        } else if (plural_variant(la, lb)) {
            reason = "singular/plural variants, constant";
        } else if (data_like(a[i]) || data_like(b[i])) {
            reason = "data-like token, variable";
            variable = true;
        } else if (i > 0 && a[i - 1] == b[i - 1] && is_key(a[i - 1])) {
            reason = "value of a key, variable";
            variable = true;
        } else {
            reason = "fixed label word, constant";
        }
        out << "  position " << i + 1 << ": '" << a[i] << "' vs '" << b[i] << "' -> " << reason << ".\n";
        constant_conflict = constant_conflict || !variable;
    }

    if (constant_conflict) {
        out << "Step 4. A constant token differs.\nNO_MATCH\n";
    } else {
        out << "Step 4. Only variables differ.\nMATCH:";
        for (const auto& t : merged) out << ' ' << t;
        out << '\n';
    }
    return out.str();
}

MockClient::MockClient(std::optional<std::filesystem::path> fixtures_dir) : fixtures_dir_(std::move(fixtures_dir)) {}

Completion MockClient::do_complete(const std::string& prompt) {
    Completion c;
    c.prompt_tokens = estimate_tokens(prompt);
    std::optional<std::string> fixture;
    if (fixtures_dir_) fixture = read_file(*fixtures_dir_ / (prompt_digest(prompt) + ".txt"));
    if (fixture) {
        ++fixture_hits_;
        c.text = std::move(*fixture);
    } else {
        ++heuristic_replies_;
        auto parts = extract_comparison(prompt);
        c.text = parts ? heuristic_reply(parts->first, parts->second) : std::string("NO_MATCH\n");
    }
    c.completion_tokens = estimate_tokens(c.text);
    return c;
}

// ---------------------------------------------------------------------------
// HTTP backend

HttpClient::HttpClient(LlmConfig cfg, std::string api_key, std::unique_ptr<Transport> transport, Sleeper sleeper)
    : cfg_(std::move(cfg)), api_key_(std::move(api_key)), transport_(std::move(transport)), sleeper_(std::move(sleeper)) {
    if (cfg_.max_retries < 0) throw ConfigError("llm.max_retries must be >= 0");
    if (!transport_) throw ConfigError("HttpClient needs a transport");
    if (!sleeper_) sleeper_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

std::chrono::milliseconds HttpClient::backoff(int attempt) {
    const int capped = std::min(attempt, 4);
    return std::chrono::milliseconds(500) * (1 << capped);
}

std::string HttpClient::request_body(const std::string& prompt) const {
    nlohmann::json body{
        {"model", cfg_.model},
        {"temperature", cfg_.temperature},
        {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})},
    };
    return body.dump();
}

Completion HttpClient::attempt(const std::string& prompt) {
    HttpRequest req;
    req.url = cfg_.endpoint;
    req.headers = {{"Authorization", "Bearer " + api_key_}, {"Content-Type", "application/json"}};
    req.body = request_body(prompt);
    req.timeout = std::chrono::seconds(cfg_.timeout_seconds);

    const HttpResponse resp = transport_->post(req);
    if (resp.status == 401 || resp.status == 403) {
        throw LlmError(ErrorKind::auth_failure, "HTTP " + std::to_string(resp.status), false);
    }
    if (resp.status == 429) throw LlmError(ErrorKind::rate_limited, "HTTP 429", true);
    if (resp.status == 408) throw LlmError(ErrorKind::timeout, "HTTP 408", true);
    if (resp.status >= 500) throw LlmError(ErrorKind::transport, "HTTP " + std::to_string(resp.status), true);
    if (resp.status != 200) {
        throw LlmError(ErrorKind::transport, "HTTP " + std::to_string(resp.status), false);
    }

    Completion c;
    try {
        const auto j = nlohmann::json::parse(resp.body);
        c.text = j.at("choices").at(0).at("message").at("content").get<std::string>();
        if (j.contains("usage")) {
            c.prompt_tokens = j["usage"].value("prompt_tokens", std::uint64_t{0});
            c.completion_tokens = j["usage"].value("completion_tokens", std::uint64_t{0});
        } else {
            c.prompt_tokens = estimate_tokens(prompt);
            c.completion_tokens = estimate_tokens(c.text);
        }
    } catch (const nlohmann::json::exception& e) {
        throw LlmError(ErrorKind::transport, std::string("unexpected response body: ") + e.what(), false);
    }
    return c;
}

Completion HttpClient::do_complete(const std::string& prompt) {
    std::string last_error;
    for (int attempt_no = 0; attempt_no <= cfg_.max_retries; ++attempt_no) {
        if (attempt_no > 0) sleeper_(backoff(attempt_no - 1));
        try {
            return attempt(prompt);
        } catch (const LlmError& e) {
            if (!e.retryable()) throw;
            last_error = e.what();
        }
    }
    throw LlmError(ErrorKind::exhausted,
                   "gave up after " + std::to_string(cfg_.max_retries + 1) + " attempts (" + last_error + ")", false);
}

std::optional<std::string> resolve_api_key(const LlmConfig& cfg) {
    const char* v = std::getenv(cfg.api_key_env.c_str());
    if (!v || !*v) return std::nullopt;
    return std::string(v);
}

}  // namespace bdparse::llm
