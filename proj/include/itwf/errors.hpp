#pragma once

#include <stdexcept>

namespace itwf {

/// Invalid experiment configuration (CLI exit code 1).
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// File could not be read, parsed or written (CLI exit code 2).
class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace itwf
