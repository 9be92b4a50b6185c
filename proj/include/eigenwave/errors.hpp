#pragma once

#include <stdexcept>
#include <string>

namespace eigenwave {

/// Two objects that must share a grid do not.
class GridMismatch : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed or truncated file contents.
class FormatError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A factorization, solve or iteration failed to meet its accuracy contract.
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace eigenwave
