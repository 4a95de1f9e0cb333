#pragma once

// Reader and writer for the `.efa` text format.

#include <stdexcept>
#include <string>
#include <string_view>

#include "symsynth/model.hpp"

namespace symsynth {

class ParseError : public std::runtime_error {
 public:
  ParseError(SourceSpan span, const std::string& message);

  const SourceSpan& span() const { return span_; }
  const std::string& message() const { return message_; }

 private:
  SourceSpan span_;
  std::string message_;
};

Specification parse(std::string_view text, std::string_view file = "<input>");
Specification parse_file(const std::string& path);

std::string unparse(const Specification& spec);
std::string unparse_expr(const Expr& expr);

}  // namespace symsynth
