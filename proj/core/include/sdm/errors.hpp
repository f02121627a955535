#pragma once

#include <stdexcept>
#include <string>

namespace sdm {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ShapeError : Error {
    using Error::Error;
};

struct IndexError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct NumericError : Error {
    using Error::Error;
};

struct CacheError : Error {
    using Error::Error;
};

struct ParseError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

struct ClockError : Error {
    using Error::Error;
};

} // namespace sdm
