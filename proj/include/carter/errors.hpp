#pragma once

#include <stdexcept>
#include <string>

namespace carter {

/// Syntax error while parsing an expression string. `offset` is the byte
/// position of the first offending character.
class ParseError : public std::runtime_error {
public:
    ParseError(std::string msg, std::size_t offset)
        : std::runtime_error(std::move(msg)), offset_(offset) {}
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

/// Evaluation failure: unbound symbol or a numeric domain error (sqrt of a
/// negative, log of a non-positive, division by zero). The message names the
/// offending subexpression.
class EvalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// System-definition file problems: schema violations, bad expressions,
/// failed structural invariants.
class ModelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The admissible-domain rejection sampler gave up.
class SamplerStarvation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Singular Jacobian or non-converging chart inversion.
class GeometryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace carter
