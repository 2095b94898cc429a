#pragma once

#include <stdexcept>
#include <string>

namespace lf {

/// Base of every numerical or contract failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidDimension : public Error { using Error::Error; };
class ContractViolation : public Error { using Error::Error; };
/// Adaptive integrator could not keep the step size above its floor.
class StiffnessError : public Error { using Error::Error; };
class DegenerateSteadyState : public Error { using Error::Error; };
class NoMinimum : public Error { using Error::Error; };
class TruncationError : public Error { using Error::Error; };
class LabelingError : public Error { using Error::Error; };
class OutOfRegime : public Error { using Error::Error; };
class NoSolution : public Error { using Error::Error; };
class DegenerateDrive : public Error { using Error::Error; };
class ParityUndefined : public Error { using Error::Error; };

/// Output file could not be written; the message names the path.
class IoError : public Error { using Error::Error; };

/// Bad user input (config file, overrides, grids). Maps to CLI exit code 2.
class ConfigError : public Error { using Error::Error; };

}  // namespace lf
