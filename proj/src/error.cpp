#include "trboost/error.hpp"

namespace trboost {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Domain: return "Domain";
    case ErrorKind::HessianNotPositive: return "HessianNotPositive";
    case ErrorKind::InfeasibleRadius: return "InfeasibleRadius";
    case ErrorKind::UndefinedMetric: return "UndefinedMetric";
    case ErrorKind::Io: return "Io";
    case ErrorKind::Schema: return "Schema";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message,
             std::optional<Coordinates> where)
    : std::runtime_error(message), kind_(kind), where_(where) {}

void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace trboost
