#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace treebench {

// Base for every error raised by the library. kind() is a stable machine
// name ("MultipleHeads", "RevisionConflict", ...) used by the service layer
// and the CLI; what() is the human-readable message.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

}  // namespace treebench
