#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace kdvsym {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ChartMismatch : public Error {
public:
    ChartMismatch() : Error("operands live on different coordinate charts") {}
};

class UnknownCoordinate : public Error {
public:
    explicit UnknownCoordinate(const std::string& name)
        : Error("unknown coordinate '" + name + "'"), name_(name) {}
    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t position)
        : Error(what + " at position " + std::to_string(position)), position_(position) {}
    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

class NonlinearParameters : public Error {
public:
    NonlinearParameters() : Error("product of two parameter-dependent polynomials") {}
};

}  // namespace kdvsym
