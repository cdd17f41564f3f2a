#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace wfforge {

// Machine-readable failure categories raised by library operations.
enum class Errc {
  MalformedJson,
  MissingField,
  BadValue,
  InvalidInstance,
  CyclicGraph,
  UnknownTask,
  EmptySample,
  NoInstances,
  SchemaViolation,
  TargetTooSmall,
  EmptyCatalog,
  TaskTooWide,
  ZeroReference,
  EmptyWorkflow,
  IoError,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::MalformedJson: return "MalformedJson";
    case Errc::MissingField: return "MissingField";
    case Errc::BadValue: return "BadValue";
    case Errc::InvalidInstance: return "InvalidInstance";
    case Errc::CyclicGraph: return "CyclicGraph";
    case Errc::UnknownTask: return "UnknownTask";
    case Errc::EmptySample: return "EmptySample";
    case Errc::NoInstances: return "NoInstances";
    case Errc::SchemaViolation: return "SchemaViolation";
    case Errc::TargetTooSmall: return "TargetTooSmall";
    case Errc::EmptyCatalog: return "EmptyCatalog";
    case Errc::TaskTooWide: return "TaskTooWide";
    case Errc::ZeroReference: return "ZeroReference";
    case Errc::EmptyWorkflow: return "EmptyWorkflow";
    case Errc::IoError: return "IoError";
  }
  return "Unknown";
}

/// Library exception. `path()` locates the offending element for parse and
/// schema errors (dotted JSON path, e.g. "workflow.tasks[3].id").
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message, std::string path = {})
      : std::runtime_error(std::string(errc_name(code)) + ": " + message),
        code_(code),
        path_(std::move(path)) {}

  Errc code() const { return code_; }
  const std::string& path() const { return path_; }

 private:
  Errc code_;
  std::string path_;
};

}  // namespace wfforge
