#pragma once

#include <stdexcept>
#include <string>

namespace ite {

enum class ErrorCode {
    InvalidInput,
    Capacity,
    Numeric,
    CheckFailed,
};

class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const { return code_; }

  private:
    ErrorCode code_;
};

[[noreturn]] inline void throw_invalid(const std::string& msg) { throw Error(ErrorCode::InvalidInput, msg); }
[[noreturn]] inline void throw_capacity(const std::string& msg) { throw Error(ErrorCode::Capacity, msg); }
[[noreturn]] inline void throw_numeric(const std::string& msg) { throw Error(ErrorCode::Numeric, msg); }

}  // namespace ite
