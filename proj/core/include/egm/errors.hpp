#pragma once

#include <stdexcept>
#include <string>

namespace egm {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class GridTooSmall : public Error {
public:
    using Error::Error;
};

class GridMismatch : public Error {
public:
    using Error::Error;
};

class BadUnitVector : public Error {
public:
    using Error::Error;
};

/// Preimage of a transform target leaves the source grid.
class CoverageError : public Error {
public:
    CoverageError(const std::string& what, double uncovered)
        : Error(what), uncovered_fraction(uncovered) {}
    double uncovered_fraction = 0.0;
};

class QuadratureBudgetExceeded : public Error {
public:
    using Error::Error;
};

class StepTooSmall : public Error {
public:
    using Error::Error;
};

class Divergence : public Error {
public:
    using Error::Error;
};

class CFLViolation : public Error {
public:
    using Error::Error;
};

class RegionOutsideGrid : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t pos) : Error(what), position(pos) {}
    std::size_t position = 0;
};

class NonFiniteValue : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace egm
