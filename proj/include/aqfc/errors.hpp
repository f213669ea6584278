// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace aqfc {

/// Mesh violates a structural invariant (index range, repeated corner, isolated vertex).
class StructuralError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Face has (numerically) zero area.
class DegenerateFaceError : public std::runtime_error {
 public:
  DegenerateFaceError(std::size_t face, const std::string& what)
      : std::runtime_error(what), face_(face) {}
  std::size_t face() const noexcept { return face_; }

 private:
  std::size_t face_;
};

/// Averaged vertex normal cancels out.
class DegenerateNormalError : public std::runtime_error {
 public:
  DegenerateNormalError(std::size_t vertex, const std::string& what)
      : std::runtime_error(what), vertex_(vertex) {}
  std::size_t vertex() const noexcept { return vertex_; }

 private:
  std::size_t vertex_;
};

/// Connected component too small to supply the requested neighbourhood.
class NeighborhoodError : public std::runtime_error {
 public:
  NeighborhoodError(std::size_t achievable, const std::string& what)
      : std::runtime_error(what), achievable_(achievable) {}
  std::size_t achievable() const noexcept { return achievable_; }

 private:
  std::size_t achievable_;
};

/// Normal equations could not be solved even after regularization.
class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Gradient vanished during foot-point projection.
class ProjectionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Curvature formula evaluated at a singular point of the implicit function.
class SingularPointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or unsupported file content.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnsupportedFormatError : public ParseError {
 public:
  using ParseError::ParseError;
};

}  // namespace aqfc
