#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace ikgate {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input file. `line` is 1-based, 0 when not line-oriented.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

class DuplicateIdError : public Error {
public:
    explicit DuplicateIdError(std::vector<std::string> ids);
    const std::vector<std::string>& ids() const { return ids_; }

private:
    std::vector<std::string> ids_;
};

class EmptyDatasetError : public Error {
public:
    using Error::Error;
};

/// An argument outside its documented domain (sizes, thresholds, probabilities).
class RangeError : public Error {
public:
    using Error::Error;
};

/// Transport or model failure for a specific query after retries.
class BackendError : public Error {
public:
    BackendError(std::string query_id, const std::string& what)
        : Error(query_id.empty() ? what : "[" + query_id + "] " + what),
          query_id_(std::move(query_id)) {}
    const std::string& query_id() const { return query_id_; }

private:
    std::string query_id_;
};

class PromptTooLongError : public BackendError {
public:
    using BackendError::BackendError;
};

/// The endpoint cannot provide what the call needs (e.g. top-k logprobs).
class CapabilityError : public Error {
public:
    using Error::Error;
};

/// A network request was attempted while running offline.
class OfflineViolation : public Error {
public:
    using Error::Error;
};

class MissingClassError : public Error {
public:
    MissingClassError(std::string missing, const std::string& what)
        : Error(what), missing_(std::move(missing)) {}
    const std::string& missing_class() const { return missing_; }

private:
    std::string missing_;
};

class JudgeParseError : public Error {
public:
    JudgeParseError(std::string query_id, std::string reply)
        : Error("[" + query_id + "] unparseable judge reply: '" + reply + "'"),
          query_id_(std::move(query_id)), reply_(std::move(reply)) {}
    const std::string& query_id() const { return query_id_; }
    const std::string& reply() const { return reply_; }

private:
    std::string query_id_;
    std::string reply_;
};

/// AUC needs at least one positive and one negative.
class UndefinedAucError : public Error {
public:
    using Error::Error;
};

class InfeasibleTargetError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

inline DuplicateIdError::DuplicateIdError(std::vector<std::string> ids)
    : Error([&] {
          std::string msg = "duplicate ids:";
          for (const auto& id : ids) msg += " " + id;
          return msg;
      }()),
      ids_(std::move(ids)) {}

}  // namespace ikgate
