#pragma once

#include <stdexcept>
#include <string>

namespace formbound {

/// A parameter outside its documented domain (mu <= 0, p < 1, eps < 0, ...).
struct InvalidParameter : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A violated admissibility constraint of the operator calculus
/// (delta >= 1, p outside [2, 2/sqrt(delta)), nonpositive contraction
/// denominator, m_d*delta >= 1).
struct AdmissibilityError : std::domain_error {
    using std::domain_error::domain_error;
};

/// No mu in the calibration grid satisfied the contraction conditions.
struct CalibrationFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// An adaptive scheme stopped before reaching its tolerance; carries the
/// error estimate it did achieve.
struct ConvergenceFailure : std::runtime_error {
    ConvergenceFailure(const std::string& what, double achieved)
        : std::runtime_error(what), achieved_error(achieved) {}
    double achieved_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Config parse or validation problem; line == 0 when not tied to a line.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what, int line_no = 0)
        : std::runtime_error(line_no > 0 ? "line " + std::to_string(line_no) + ": " + what
                                         : what),
          line(line_no) {}
    int line;
};

}  // namespace formbound
