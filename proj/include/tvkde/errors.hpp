#pragma once

#include <stdexcept>
#include <string>

namespace tvkde {

//! Base class of every error raised by the library.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

//! Argument outside the mathematical domain of an operation (non-finite
//! input, forbidden lag, ...).
class DomainError : public Error
{
public:
  using Error::Error;
};

//! Invalid estimator parameters (bandwidth, discount factor, bounds).
class ParameterError : public Error
{
public:
  using Error::Error;
};

//! Malformed or non-finite observations.
class DataError : public Error
{
public:
  using Error::Error;
};

//! Not enough observations for the requested operation.
class InsufficientDataError : public DataError
{
public:
  using DataError::DataError;
};

//! Unreadable or malformed input file.
class FormatError : public DataError
{
public:
  using DataError::DataError;
};

//! Evaluation grid that is empty, non-monotone or mismatched.
class GridError : public Error
{
public:
  using Error::Error;
};

//! The parameter search found no admissible point.
class SelectionError : public Error
{
public:
  using Error::Error;
};

//! An internal invariant was violated.
class InvariantError : public Error
{
public:
  using Error::Error;
};

} // namespace tvkde
