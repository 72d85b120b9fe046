#pragma once

#include <stdexcept>
#include <string>

namespace geoflow {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A chart point fell outside the surface's chart domain.
class OutOfChart : public Error {
 public:
  using Error::Error;
};

// A flow evaluation was requested outside the flow's maximal domain.
class OutOfDomain : public Error {
 public:
  using Error::Error;
};

class DegeneratePlane : public Error {
 public:
  using Error::Error;
};

class DomainTooSmall : public Error {
 public:
  using Error::Error;
};

class QuadratureFailure : public Error {
 public:
  using Error::Error;
};

class UnknownSurface : public Error {
 public:
  using Error::Error;
};

class Disconnected : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace geoflow
