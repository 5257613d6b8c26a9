#pragma once

#include <stdexcept>
#include <string>

namespace impact {

/*
 * Error taxonomy for the whole library.
 *
 *  ParseError      malformed input text (CSV fields, prices, configs)
 *  StreamError     order-flow integrity violations (unknown id, over-execution,
 *                  crossed submissions, time regressions)
 *  DimensionError  matrix shape mismatches
 *  ValidationError bad configuration or violated preconditions
 *  NumericError    quadrature / optimizer / eigensolver failures
 *
 * The CLI maps ParseError/StreamError/ValidationError/DimensionError to exit
 * code 2 and NumericError to exit code 3.
 */

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParseError : Error {
    using Error::Error;
};

struct StreamError : Error {
    using Error::Error;
};

struct DimensionError : Error {
    using Error::Error;
};

struct ValidationError : Error {
    using Error::Error;
};

struct NumericError : Error {
    using Error::Error;
};

} // namespace impact
