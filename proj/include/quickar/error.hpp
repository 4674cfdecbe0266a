#pragma once

#include <stdexcept>
#include <string>

namespace quickar {

/// Base class for every failure raised by the toolkit. Callers that need to
/// map failures onto exit codes catch this type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A file could not be opened, read or written.
class IoError : public Error {
 public:
  IoError(const std::string& path, const std::string& what)
      : Error(what + ": " + path), path_(path) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

/// A persisted artifact failed its integrity check.
class CorruptionError : public Error {
 public:
  CorruptionError(const std::string& path, const std::string& what)
      : Error("corrupt file " + path + ": " + what), path_(path) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

/// Raised when a query has no usable terms left after preprocessing.
class QueryEmptyError : public Error {
 public:
  explicit QueryEmptyError(const std::string& query_id)
      : Error("QUERY_EMPTY: no keywords survive preprocessing for query '" + query_id + "'"),
        query_id_(query_id) {}

  const std::string& query_id() const noexcept { return query_id_; }

 private:
  std::string query_id_;
};

/// Precondition violations on caller-supplied data.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

}  // namespace quickar
