#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace acfb {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown by validate() with one entry per violated hypothesis.
struct ValidationFailure : Error {
  std::vector<std::string> violations;
  explicit ValidationFailure(std::vector<std::string> v)
      : Error(join(v)), violations(std::move(v)) {}

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string s = "potential validation failed:";
    for (const auto& x : v) s += " [" + x + "]";
    return s;
  }
};

struct FormatError : Error {
  std::size_t offset;
  FormatError(const std::string& msg, std::size_t off)
      : Error(msg + " (byte offset " + std::to_string(off) + ")"), offset(off) {}
};

struct BadInit : Error { using Error::Error; };
struct SymmetryMismatch : Error { using Error::Error; };
struct NonFiniteEnergy : Error { using Error::Error; };
struct DomainTooSmall : Error { using Error::Error; };
struct RadiusOutOfGrid : Error { using Error::Error; };
struct DegenerateFit : Error { using Error::Error; };
struct GridTooSmall : Error { using Error::Error; };
struct NotOnFreeBoundary : Error { using Error::Error; };
struct BallOutOfGrid : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };

}  // namespace acfb
