#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace trboost {

enum class ErrorKind {
  Domain,
  HessianNotPositive,
  InfeasibleRadius,
  UndefinedMetric,
  Io,
  Schema,
};

std::string_view to_string(ErrorKind kind);

// Cell position inside a CSV file, 1-based.
struct Coordinates {
  std::size_t row = 0;
  std::size_t column = 0;
};

// Every failure raised by the library carries exactly one ErrorKind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message,
        std::optional<Coordinates> where = std::nullopt);

  ErrorKind kind() const noexcept { return kind_; }
  const std::optional<Coordinates>& where() const noexcept { return where_; }

 private:
  ErrorKind kind_;
  std::optional<Coordinates> where_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

}  // namespace trboost
