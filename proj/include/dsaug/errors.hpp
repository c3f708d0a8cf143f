// Copyright 2026  dsaug authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#ifndef DSAUG_ERRORS_HPP
#define DSAUG_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace dsaug {

// Invalid input data or failed validation; the CLI maps this to exit code 2.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Everything else (I/O corruption, internal inconsistency); exit code 3.
class InternalError : public std::runtime_error {
 public:
  explicit InternalError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace dsaug

#endif  // DSAUG_ERRORS_HPP
