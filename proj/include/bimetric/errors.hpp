#pragma once

#include <stdexcept>
#include <string>

namespace bimetric {

// Bad input: malformed scene, unknown name, bad flag. Maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Numerics left their domain: singular jet, non-SPD metric, log of a
// non-positive value. Maps to exit code 3.
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bimetric
