#pragma once

#include <stdexcept>
#include <string>

namespace fk {

/// Base for every error raised by the engine.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (bad resolution, bad factor, ...).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Kernel weights could not be brought within the normalization band, even
/// after escalating the working grid to the upsample cap.
class NormalizationFailure : public Error {
public:
    NormalizationFailure(const std::string& what, double defect, int factor)
        : Error(what), defect_(defect), factor_(factor) {}
    double defect() const noexcept { return defect_; }
    int factor() const noexcept { return factor_; }

private:
    double defect_;
    int factor_;
};

/// A bounded problem backtraced a point outside [0, extent].
class DriftOutOfDomain : public Error {
public:
    using Error::Error;
};

/// A time integrator produced non-finite or runaway values.
class Blowup : public Error {
public:
    Blowup(const std::string& what, int step, double time)
        : Error(what), step_(step), time_(time) {}
    int step() const noexcept { return step_; }
    double time() const noexcept { return time_; }

private:
    int step_;
    double time_;
};

/// Malformed file, frame or configuration text.
class FormatError : public Error {
public:
    using Error::Error;
};

}  // namespace fk
