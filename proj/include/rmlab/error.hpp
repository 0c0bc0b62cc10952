#pragma once

#include <stdexcept>
#include <string>

namespace rmlab {

/// Runtime error carrying a stable machine-readable code ("bad-k",
/// "spec-mismatch", ...) next to the human-readable detail.
class Error : public std::runtime_error {
  public:
    Error(std::string code, const std::string& detail)
        : std::runtime_error(code + ": " + detail), code_(std::move(code)) {}

    const std::string& code() const { return code_; }

  private:
    std::string code_;
};

}  // namespace rmlab
