#pragma once

#include <stdexcept>
#include <string>

namespace classimap {

/// Root of the library's exception hierarchy.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A caller supplied an argument or configuration outside its contract.
/// The CLI reports these as usage errors (exit code 1).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Input data is malformed or internally inconsistent (exit code 2).
class DataError : public Error {
public:
    using Error::Error;
};

class InvalidLambda : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

class InvalidSchedule : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

class InvalidK : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

class IndexOutOfRange : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

class DimensionMismatch : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

class DegenerateInput : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

class ParseError : public DataError {
public:
    using DataError::DataError;
};

class AsymmetricMatrix : public DataError {
public:
    using DataError::DataError;
};

class NegativeDistance : public DataError {
public:
    using DataError::DataError;
};

class SizeMismatch : public DataError {
public:
    using DataError::DataError;
};

class IoError : public DataError {
public:
    using DataError::DataError;
};

} // namespace classimap
