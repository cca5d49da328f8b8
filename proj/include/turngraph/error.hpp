#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace turngraph {

// Error taxonomy mirrors the CLI exit codes: data=1, config=2, numeric=3.
enum class ErrorKind { data = 1, config = 2, numeric = 3 };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string code, const std::string& message)
      : std::runtime_error(code + ": " + message),
        kind_(kind),
        code_(std::move(code)) {}

  ErrorKind kind() const { return kind_; }
  const std::string& code() const { return code_; }
  int exit_code() const { return static_cast<int>(kind_); }

 private:
  ErrorKind kind_;
  std::string code_;
};

inline Error data_error(std::string code, const std::string& message) {
  return Error(ErrorKind::data, std::move(code), message);
}
inline Error config_error(std::string code, const std::string& message) {
  return Error(ErrorKind::config, std::move(code), message);
}
inline Error numeric_error(std::string code, const std::string& message) {
  return Error(ErrorKind::numeric, std::move(code), message);
}

// One rule violation found by a validator. Violations are data, not failures:
// validators return them instead of throwing.
struct Violation {
  std::string code;
  std::string message;
};

using ValidationReport = std::vector<Violation>;

inline bool has_code(const ValidationReport& report, const std::string& code) {
  for (const auto& v : report)
    if (v.code == code) return true;
  return false;
}

}  // namespace turngraph
