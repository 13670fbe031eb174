#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace momsos {

enum class ErrorKind {
  invalid_argument,
  dimension,
  degree,
  parse,
  capacity,
  infeasible,
  unbounded,
  verification,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid-argument";
    case ErrorKind::dimension: return "dimension";
    case ErrorKind::degree: return "degree";
    case ErrorKind::parse: return "parse";
    case ErrorKind::capacity: return "capacity";
    case ErrorKind::infeasible: return "infeasible";
    case ErrorKind::unbounded: return "unbounded";
    case ErrorKind::verification: return "verification";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Upper limit on basis sizes C(n+d, d) built anywhere in the library.
inline constexpr std::size_t kDefaultCapacity = 200000;

}  // namespace momsos
