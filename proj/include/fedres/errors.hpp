#pragma once

#include <stdexcept>
#include <string>

namespace fedres {

/// Bad configuration: unknown keys, constraint violations, invalid hyper values.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Dataset problems: unreadable files, format violations, label range errors.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Protocol faults: invariants broken at run time (non-finite state, wrong
/// upload count). Should be unreachable on honest code paths.
class ProtocolError : public std::runtime_error {
 public:
  explicit ProtocolError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace fedres
