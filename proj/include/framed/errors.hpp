#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace framed {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Orthonormality or tangency of a frame failed beyond tolerance.
struct FrameError : Error {
  using Error::Error;
};

// Expression text could not be parsed. offset is 1-based.
struct SyntaxError : Error {
  SyntaxError(std::size_t offset, std::string expected)
      : Error("syntax error at offset " + std::to_string(offset) + ": expected " + expected),
        offset(offset),
        expected(std::move(expected)) {}
  std::size_t offset;
  std::string expected;
};

// Domain violation while evaluating an expression (pole, sqrt of negative, ...).
struct EvalError : Error {
  EvalError(const std::string& what, std::string node, std::size_t offset)
      : Error(what + " in '" + node + "' at offset " + std::to_string(offset)),
        node(std::move(node)),
        offset(offset) {}
  std::string node;
  std::size_t offset;
};

struct SpecError : Error {
  using Error::Error;
};

struct NoThetaError : Error {
  using Error::Error;
};

struct BranchError : Error {
  using Error::Error;
};

struct GateError : Error {
  using Error::Error;
};

struct IntegrabilityError : Error {
  using Error::Error;
};

struct StepError : Error {
  using Error::Error;
};

struct SchemaError : Error {
  SchemaError(std::string path, const std::string& msg)
      : Error(path + ": " + msg), path(std::move(path)) {}
  std::string path;
};

}  // namespace framed
