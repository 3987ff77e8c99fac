#pragma once

#include <stdexcept>
#include <string>

namespace ngi {

/// Exit-code taxonomy: 0 ok, 1 config, 2 statistics, 3 missing input,
/// 4 flag misuse, 5 geometry.
enum class ErrorCode : int {
  kOk = 0,
  kConfig = 1,
  kStatistics = 2,
  kMissingInput = 3,
  kFlagMisuse = 4,
  kGeometry = 5,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }
  int exit_code() const { return static_cast<int>(code_); }

 private:
  ErrorCode code_;
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& w) : Error(ErrorCode::kConfig, w) {}
};
struct StatsError : Error {
  explicit StatsError(const std::string& w) : Error(ErrorCode::kStatistics, w) {}
};
struct MissingInputError : Error {
  explicit MissingInputError(const std::string& w) : Error(ErrorCode::kMissingInput, w) {}
};
struct FlagError : Error {
  explicit FlagError(const std::string& w) : Error(ErrorCode::kFlagMisuse, w) {}
};
struct GeometryError : Error {
  explicit GeometryError(const std::string& w) : Error(ErrorCode::kGeometry, w) {}
};

}  // namespace ngi
