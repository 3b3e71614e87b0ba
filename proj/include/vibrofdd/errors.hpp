#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace vibrofdd {

// Root of the toolkit's error hierarchy.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Unusable input: malformed files, bad shapes, impossible requests.
// The CLI maps these to exit code 2.
struct DataError : Error {
    using Error::Error;
};

// A solver or numeric routine failed. The CLI maps these to exit code 3.
struct NumericError : Error {
    using Error::Error;
};

struct MissingColumn : DataError {
    explicit MissingColumn(const std::string& col)
        : DataError("missing required column: " + col), column(col) {}
    std::string column;
};

struct MalformedRow : DataError {
    MalformedRow(std::size_t row_index, const std::string& col, const std::string& detail = "")
        : DataError("malformed row " + std::to_string(row_index) + ", column " + col +
                    (detail.empty() ? "" : ": " + detail)),
          row(row_index),
          column(col) {}
    std::size_t row;
    std::string column;
};

struct EmptyFile : DataError {
    using DataError::DataError;
};

struct TooShort : DataError {
    using DataError::DataError;
};

struct BadWindowLen : DataError {
    using DataError::DataError;
};

struct InsufficientSamples : DataError {
    using DataError::DataError;
};

struct BadLength : DataError {
    using DataError::DataError;
};

struct TooFewBins : DataError {
    using DataError::DataError;
};

struct ShapeMismatch : DataError {
    using DataError::DataError;
};

struct DimMismatch : DataError {
    using DataError::DataError;
};

struct BadSegment : DataError {
    using DataError::DataError;
};

struct RankTooLow : DataError {
    using DataError::DataError;
};

struct SingleClass : DataError {
    using DataError::DataError;
};

struct ClassTooSmall : DataError {
    using DataError::DataError;
};

struct BadSpec : DataError {
    using DataError::DataError;
};

struct LengthMismatch : DataError {
    using DataError::DataError;
};

struct EmptyInput : DataError {
    using DataError::DataError;
};

struct DatasetError : DataError {
    using DataError::DataError;
};

struct VersionMismatch : DataError {
    VersionMismatch(int file_version_, int reader_version_)
        : DataError("bundle format version " + std::to_string(file_version_) +
                    " not supported by reader version " + std::to_string(reader_version_)),
          file_version(file_version_),
          reader_version(reader_version_) {}
    int file_version;
    int reader_version;
};

struct IoError : DataError {
    using DataError::DataError;
};

}  // namespace vibrofdd
