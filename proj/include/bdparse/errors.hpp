#pragma once

#include <stdexcept>
#include <string>

namespace bdparse {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A caller violated an operation's precondition (e.g. length mismatch).
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// Invalid configuration detected at load time (bad regex, bad lexicon line).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// The raw line was empty or whitespace-only.
class EmptyLineError : public Error {
public:
    EmptyLineError() : Error("empty log line") {}
};

/// Internal bookkeeping went out of sync (unknown template id, unreachable branch).
class ConsistencyError : public Error {
public:
    using Error::Error;
};

/// Stage II could not reach the LLM after all retries.
class Stage2Unavailable : public Error {
public:
    using Error::Error;
};

}  // namespace bdparse
