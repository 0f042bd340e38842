#pragma once

#include <stdexcept>
#include <string>

namespace dgt {

// Raised when input data (files, scans, fields) cannot be processed.
// Precondition violations on API arguments use std::invalid_argument.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class FormatError : public DataError {
 public:
  using DataError::DataError;
};

class IoError : public DataError {
 public:
  using DataError::DataError;
};

}  // namespace dgt
