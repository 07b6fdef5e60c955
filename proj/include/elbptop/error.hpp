#pragma once

#include <stdexcept>
#include <string>

namespace elbptop {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid parameters or configuration documents.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A sampling neighborhood does not fit inside the data it reads.
class BorderError : public Error {
 public:
  using Error::Error;
};

class PreprocessError : public Error {
 public:
  using Error::Error;
};

class IngestError : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class DegenerateDataError : public Error {
 public:
  using Error::Error;
};

// Evaluation protocol violations (single-class training, empty inputs, ...).
class ProtocolError : public Error {
 public:
  using Error::Error;
};

}  // namespace elbptop
