#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace svaport {

struct SourceLocation {
    std::uint32_t line = 0;
    std::uint32_t column = 0;
    std::uint32_t offset = 0;
};

/// Root of every error the toolkit throws.  `what()` carries the full
/// human-readable diagnostic.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Lexical or grammatical error.  The message embeds line/column and a
/// source excerpt with a caret under the offending token.
class SyntaxError : public Error {
public:
    SyntaxError(std::string message, SourceLocation where, std::string expected,
                std::string rendered)
        : Error(std::move(rendered)),
          message_(std::move(message)),
          where_(where),
          expected_(std::move(expected)) {}

    const std::string& message() const { return message_; }
    SourceLocation where() const { return where_; }
    const std::string& expected() const { return expected_; }

private:
    std::string message_;
    SourceLocation where_;
    std::string expected_;
};

class ElaborationError : public Error {
public:
    using Error::Error;
};

class CombinationalLoopError : public Error {
public:
    CombinationalLoopError(std::vector<std::string> cycle, const std::string& msg)
        : Error(msg), cycle_(std::move(cycle)) {}
    const std::vector<std::string>& cycle() const { return cycle_; }

private:
    std::vector<std::string> cycle_;
};

class UnsupportedConstructError : public SyntaxError {
public:
    using SyntaxError::SyntaxError;
};

class UnknownSignalError : public Error {
public:
    explicit UnknownSignalError(std::string name)
        : Error("unknown signal '" + name + "'"), name_(std::move(name)) {}
    const std::string& name() const { return name_; }

private:
    std::string name_;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class InsufficientSignalsError : public Error {
public:
    using Error::Error;
};

class PayloadConflictError : public Error {
public:
    using Error::Error;
};

struct SearchStatistics {
    std::uint64_t candidates_tried = 0;
    std::uint32_t free_bits = 0;
    bool exhaustive = false;
};

class ActivationNotFoundError : public Error {
public:
    ActivationNotFoundError(const std::string& msg, SearchStatistics stats)
        : Error(msg), stats_(stats) {}
    const SearchStatistics& statistics() const { return stats_; }

private:
    SearchStatistics stats_;
};

class ConeTooLargeError : public Error {
public:
    ConeTooLargeError(const std::string& msg, std::uint32_t bits) : Error(msg), bits_(bits) {}
    std::uint32_t bits() const { return bits_; }

private:
    std::uint32_t bits_;
};

class DomainError : public Error {
public:
    using Error::Error;
};

}  // namespace svaport
