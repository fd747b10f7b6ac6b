#pragma once

#include <stdexcept>

namespace uep {

// Bad configuration input (file syntax, unknown keys, invalid values).
// The CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Filesystem trouble (missing files, write failures, malformed data files).
// The CLI maps this to exit code 4. Everything else maps to 3.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace uep
