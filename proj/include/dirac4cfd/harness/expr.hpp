#pragma once

#include <cctype>
#include <cmath>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "dirac4cfd/error.hpp"

namespace dirac4cfd::harness {

namespace detail {

// Recursive-descent evaluator for constant arithmetic such as "pi/16",
// "2^-4" or "0.05/2^3". Supports + - * / ^, parentheses and the name pi.
class ExprParser {
public:
  explicit ExprParser(std::string_view s) : s_(s) {}

  double parse() {
    const double v = sum();
    skip_ws();
    if (pos_ != s_.size()) fail("unexpected trailing input");
    return v;
  }

private:
  double sum() {
    double v = product();
    for (;;) {
      skip_ws();
      if (accept('+')) v += product();
      else if (accept('-')) v -= product();
      else return v;
    }
  }

  double product() {
    double v = unary();
    for (;;) {
      skip_ws();
      if (accept('*')) v *= unary();
      else if (accept('/')) v /= unary();
      else return v;
    }
  }

  double unary() {
    skip_ws();
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return power();
  }

  double power() {
    const double base = primary();
    skip_ws();
    if (accept('^')) return std::pow(base, unary());
    return base;
  }

  double primary() {
    skip_ws();
    if (accept('(')) {
      const double v = sum();
      skip_ws();
      if (!accept(')')) fail("missing ')'");
      return v;
    }
    if (s_.substr(pos_, 2) == "pi") {
      pos_ += 2;
      return std::numbers::pi;
    }
    const std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) ++pos_;
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      ++pos_;
      if (pos_ < s_.size() && (s_[pos_] == '-' || s_[pos_] == '+')) ++pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    if (start == pos_) fail("expected a number");
    return std::stod(std::string(s_.substr(start, pos_ - start)));
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw InvalidArgument("cannot parse '" + std::string(s_) + "': " + msg);
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Evaluates a constant expression such as "pi/16" or "2^(-2/3)".
inline double parse_number(std::string_view s) { return detail::ExprParser(s).parse(); }

/// Comma-separated list of expressions.
inline std::vector<double> parse_list(std::string_view s) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const std::size_t comma = s.find(',', start);
    const std::string_view item = s.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    if (item.find_first_not_of(" \t") != std::string_view::npos) out.push_back(parse_number(item));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace dirac4cfd::harness
