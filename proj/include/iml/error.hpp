/* SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include <stdexcept>
#include <string>

#include "iml/ast.hpp"

namespace iml {

/// Base class for every error the toolchain reports to users.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(Span span, const std::string& msg)
      : Error(std::to_string(span.line) + ":" + std::to_string(span.col) + ": " + msg),
        span_(span),
        message_(msg) {}
  const Span& span() const { return span_; }
  const std::string& message() const { return message_; }
  /// True when the input ended before the construct was complete.
  bool at_eof() const { return message_.find("end of input") != std::string::npos; }

 private:
  Span span_;
  std::string message_;
};

class TypeError : public Error {
 public:
  TypeError(Span span, const std::string& msg)
      : Error((span.line ? std::to_string(span.line) + ":" + std::to_string(span.col) + ": "
                         : std::string()) +
              msg),
        span_(span) {}
  const Span& span() const { return span_; }

 private:
  Span span_;
};

}  // namespace iml
