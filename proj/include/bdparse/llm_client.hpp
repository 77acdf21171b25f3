#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bdparse/errors.hpp"

namespace bdparse::llm {

struct LlmConfig {
    std::string endpoint = "https://api.openai.com/v1/chat/completions";
    std::string model = "gpt-4o-mini";
    /// Fixed at zero for reproducible replies.
    double temperature = 0.0;
    int timeout_seconds = 30;
    int max_retries = 3;
    std::string api_key_env = "SCOPE_LLM_API_KEY";
};

struct UsageCounters {
    std::uint64_t invocations = 0;
    std::uint64_t prompt_tokens = 0;
    std::uint64_t completion_tokens = 0;
};

struct Completion {
    std::string text;
    std::uint64_t prompt_tokens = 0;
    std::uint64_t completion_tokens = 0;
};

enum class ErrorKind { timeout, transport, auth_failure, rate_limited, exhausted };

std::string_view to_string(ErrorKind kind);

class LlmError : public Error {
public:
    LlmError(ErrorKind kind, const std::string& what, bool retryable)
        : Error(std::string(to_string(kind)) + ": " + what), kind_(kind), retryable_(retryable) {}
    ErrorKind kind() const { return kind_; }
    bool retryable() const { return retryable_; }

private:
    ErrorKind kind_;
    bool retryable_;
};

/// Rough token count (four characters per token) for backends that report none.
std::uint64_t estimate_tokens(std::string_view text);

/// Hex SHA-256 of the prompt; names fixture files.
std::string prompt_digest(std::string_view prompt);

/// Single-turn completion endpoint. Every call to complete() counts as an
/// invocation, whether or not it succeeds.
class Client {
public:
    virtual ~Client() = default;

    Completion complete(const std::string& prompt);
    const UsageCounters& usage() const { return usage_; }

protected:
    virtual Completion do_complete(const std::string& prompt) = 0;

private:
    UsageCounters usage_;
};

/// Offline backend. Replays `<digest>.txt` from the fixtures directory when
/// present, otherwise answers with a deterministic rule-based judgement.
class MockClient final : public Client {
public:
    explicit MockClient(std::optional<std::filesystem::path> fixtures_dir = std::nullopt);

    std::uint64_t fixture_hits() const { return fixture_hits_; }
    std::uint64_t heuristic_replies() const { return heuristic_replies_; }

protected:
    Completion do_complete(const std::string& prompt) override;

private:
    std::optional<std::filesystem::path> fixtures_dir_;
    std::uint64_t fixture_hits_ = 0;
    std::uint64_t heuristic_replies_ = 0;
};

/// Pulls the log and template lines back out of a prompt built by nlpe::build_prompt.
std::optional<std::pair<std::string, std::string>> extract_comparison(std::string_view prompt);

/// Rule-based stand-in for the model: compares two space-separated token
/// sequences and answers "MATCH: <template>" or "NO_MATCH" on the last line.
std::string heuristic_reply(std::string_view log, std::string_view tpl);

struct HttpRequest {
    std::string url;
    std::vector<std::pair<std::string, std::string>> headers;
    std::string body;
    std::chrono::seconds timeout{30};
};

struct HttpResponse {
    int status = 0;
    std::string body;
};

/// Throws LlmError(timeout|transport) when no HTTP response was received.
class Transport {
public:
    virtual ~Transport() = default;
    virtual HttpResponse post(const HttpRequest& request) = 0;
};

std::unique_ptr<Transport> make_http_transport();

using Sleeper = std::function<void(std::chrono::milliseconds)>;

/// Chat-completion client with exponential backoff on retryable failures.
class HttpClient final : public Client {
public:
    HttpClient(LlmConfig cfg, std::string api_key, std::unique_ptr<Transport> transport = make_http_transport(),
               Sleeper sleeper = {});

    const LlmConfig& config() const { return cfg_; }
    static std::chrono::milliseconds backoff(int attempt);

    /// Request body in the common chat-completion shape.
    std::string request_body(const std::string& prompt) const;

protected:
    Completion do_complete(const std::string& prompt) override;

private:
    Completion attempt(const std::string& prompt);

    LlmConfig cfg_;
    std::string api_key_;
    std::unique_ptr<Transport> transport_;
    Sleeper sleeper_;
};

/// Reads the API key from the configured environment variable.
std::optional<std::string> resolve_api_key(const LlmConfig& cfg);

}  // namespace bdparse::llm
