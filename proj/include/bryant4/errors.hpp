#pragma once

#include <stdexcept>
#include <string>

namespace bryant4 {

// Failure class drives the CLI exit code: invalid input data vs a numeric
// breakdown during construction.
enum class ErrorClass { Validation, Numeric };

class Error : public std::runtime_error {
 public:
  Error(std::string code, ErrorClass cls, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)), class_(cls) {}

  const std::string& code() const { return code_; }
  ErrorClass error_class() const { return class_; }

 private:
  std::string code_;
  ErrorClass class_;
};

inline Error validation_error(const std::string& code, const std::string& msg) {
  return Error(code, ErrorClass::Validation, msg);
}

inline Error numeric_error(const std::string& code, const std::string& msg) {
  return Error(code, ErrorClass::Numeric, msg);
}

}  // namespace bryant4
