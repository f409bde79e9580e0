#pragma once

#include <stdexcept>
#include <string>

namespace aoi {

// Domain errors carry a stable name so scripts can branch on it.
class Error : public std::runtime_error {
public:
    Error(std::string name, const std::string& what)
        : std::runtime_error(name + ": " + what), name_(std::move(name)) {}

    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

/// Raised on invalid distribution parameters or malformed specs.
class InvalidDistribution : public Error {
public:
    explicit InvalidDistribution(const std::string& what) : Error("InvalidDistribution", what) {}
};

class InvalidArgument : public Error {
public:
    explicit InvalidArgument(const std::string& what) : Error("InvalidArgument", what) {}
};

/// File could not be read or written; the message names the path.
class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error("IoError", what) {}
};

/// Mean residual life requested where the tail has no mass.
class TailEmpty : public Error {
public:
    explicit TailEmpty(const std::string& what) : Error("TailEmpty", what) {}
};

/// The simulation exhausted its event budget before reaching the cycle target.
class DivergentAge : public Error {
public:
    explicit DivergentAge(const std::string& what) : Error("DivergentAge", what) {}
};

class ZeroSuccessProbability : public Error {
public:
    explicit ZeroSuccessProbability(const std::string& what)
        : Error("ZeroSuccessProbability", what) {}
};

/// The partial-sum walk did not meet its tail criterion within the term cap.
class TruncationNotReached : public Error {
public:
    explicit TruncationNotReached(const std::string& what)
        : Error("TruncationNotReached", what) {}
};

}  // namespace aoi
