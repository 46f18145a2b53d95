// Copyright 2026 the segrpo authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace segrpo {

// Base class for all library errors. The CLI maps subtrees to exit codes:
// ConfigError -> 1, DataError -> 2, JudgeError -> 3.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class UnknownStage : public ConfigError {
 public:
  explicit UnknownStage(const std::string& stage)
      : ConfigError("unknown stage '" + stage + "'"), stage_(stage) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

class DataError : public Error {
 public:
  using Error::Error;
};

class SchemaError : public DataError {
 public:
  SchemaError(int line, std::string field, const std::string& msg)
      : DataError("schema error at line " + std::to_string(line) + ", field '" +
                  field + "': " + msg),
        line_(line),
        field_(std::move(field)) {}
  int line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  int line_;
  std::string field_;
};

class DuplicateId : public DataError {
 public:
  explicit DuplicateId(const std::string& id)
      : DataError("duplicate id '" + id + "'"), id_(id) {}
  const std::string& id() const { return id_; }

 private:
  std::string id_;
};

class MissingPrediction : public DataError {
 public:
  explicit MissingPrediction(const std::string& id)
      : DataError("missing prediction for id '" + id + "'"), id_(id) {}
  const std::string& id() const { return id_; }

 private:
  std::string id_;
};

class UnknownId : public DataError {
 public:
  explicit UnknownId(const std::string& id)
      : DataError("prediction id '" + id + "' not present in gold dataset"),
        id_(id) {}
  const std::string& id() const { return id_; }

 private:
  std::string id_;
};

class OffsetMismatch : public DataError {
 public:
  using DataError::DataError;
};

class ShapeMismatch : public DataError {
 public:
  using DataError::DataError;
};

class MissingStream : public DataError {
 public:
  using DataError::DataError;
};

class GroupTooSmall : public DataError {
 public:
  using DataError::DataError;
};

class UnknownToken : public DataError {
 public:
  using DataError::DataError;
};

class EmptyReference : public DataError {
 public:
  using DataError::DataError;
};

class JudgeError : public Error {
 public:
  using Error::Error;
};

class JudgeUnavailable : public JudgeError {
 public:
  using JudgeError::JudgeError;
};

class MalformedJudgeReply : public JudgeError {
 public:
  using JudgeError::JudgeError;
};

}  // namespace segrpo
