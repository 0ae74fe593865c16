#pragma once

#include <stdexcept>
#include <string>

namespace outstab {

struct StateBlowup : std::runtime_error {
  explicit StateBlowup(const std::string& msg) : std::runtime_error(msg) {}
};

struct StepUnderflow : std::runtime_error {
  explicit StepUnderflow(const std::string& msg) : std::runtime_error(msg) {}
};

struct OutOfDomain : std::runtime_error {
  explicit OutOfDomain(const std::string& msg) : std::runtime_error(msg) {}
};

struct NonFiniteValue : std::runtime_error {
  explicit NonFiniteValue(const std::string& msg) : std::runtime_error(msg) {}
};

struct MissingBundleField : std::runtime_error {
  explicit MissingBundleField(const std::string& msg) : std::runtime_error(msg) {}
};

struct TailVanishes : std::runtime_error {
  explicit TailVanishes(const std::string& msg) : std::runtime_error(msg) {}
};

struct DegenerateInterval : std::runtime_error {
  explicit DegenerateInterval(const std::string& msg) : std::runtime_error(msg) {}
};

struct InverseUnavailable : std::runtime_error {
  explicit InverseUnavailable(const std::string& msg) : std::runtime_error(msg) {}
};

struct InsufficientEnsemble : std::runtime_error {
  explicit InsufficientEnsemble(const std::string& msg) : std::runtime_error(msg) {}
};

struct HorizonTooShort : std::runtime_error {
  explicit HorizonTooShort(const std::string& msg) : std::runtime_error(msg) {}
};

struct ConfigInvalid : std::runtime_error {
  explicit ConfigInvalid(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace outstab
