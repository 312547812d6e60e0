#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cline {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed text input. `position` is a byte offset into the parsed string.
class ParseError : public Error {
public:
    ParseError(const std::string& msg, std::size_t position)
        : Error(msg + " (at offset " + std::to_string(position) + ")"), position_(position) {}
    std::size_t position() const { return position_; }

private:
    std::size_t position_;
};

// Well-formed input that violates a structural requirement.
class ValidationError : public Error {
public:
    using Error::Error;
};

// A region operation whose result has no finite description in the region grammar.
class RegionError : public Error {
public:
    using Error::Error;
};

class ModulusUnknown : public Error {
public:
    using Error::Error;
};

// An internal identity that must hold exactly was found to be false.
class InvariantError : public Error {
public:
    using Error::Error;
};

}  // namespace cline
