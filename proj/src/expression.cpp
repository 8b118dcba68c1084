#include "hho/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <map>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include "hho/errors.hpp"

namespace hho {

namespace {

using Node = std::function<double(double, double)>;

class Parser {
public:
  explicit Parser(std::string text) : text_(std::move(text)) {}

  Node parse()
  {
    Node n = sum();
    skip();
    if (pos_ != text_.size())
      fail("unexpected character");
    return n;
  }

private:
  [[noreturn]] void fail(const std::string& what) const
  {
    throw ParameterError("expression '" + text_ + "': " + what + " at position " +
                         std::to_string(pos_));
  }

  void skip()
  {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }

  bool accept(char c)
  {
    skip();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Node sum()
  {
    Node lhs = product();
    for (;;) {
      if (accept('+')) {
        Node rhs = product();
        lhs = [lhs, rhs](double x, double y) { return lhs(x, y) + rhs(x, y); };
      } else if (accept('-')) {
        Node rhs = product();
        lhs = [lhs, rhs](double x, double y) { return lhs(x, y) - rhs(x, y); };
      } else {
        return lhs;
      }
    }
  }

  Node product()
  {
    Node lhs = unary();
    for (;;) {
      if (accept('*')) {
        Node rhs = unary();
        lhs = [lhs, rhs](double x, double y) { return lhs(x, y) * rhs(x, y); };
      } else if (accept('/')) {
        Node rhs = unary();
        lhs = [lhs, rhs](double x, double y) { return lhs(x, y) / rhs(x, y); };
      } else {
        return lhs;
      }
    }
  }

  Node unary()
  {
    if (accept('-')) {
      Node n = unary();
      return [n](double x, double y) { return -n(x, y); };
    }
    if (accept('+'))
      return unary();
    return power();
  }

  // -2^2 = -4 and 2^-1 = 0.5
  Node power()
  {
    Node base = primary();
    if (accept('^')) {
      Node exponent = unary();
      return [base, exponent](double x, double y) { return std::pow(base(x, y), exponent(x, y)); };
    }
    return base;
  }

  Node primary()
  {
    skip();
    if (pos_ >= text_.size())
      fail("unexpected end");
    const char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = text_.c_str() + pos_;
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      if (end == begin)
        fail("bad number");
      pos_ += static_cast<std::size_t>(end - begin);
      return [v](double, double) { return v; };
    }
    if (accept('(')) {
      Node n = sum();
      if (!accept(')'))
        fail("expected ')'");
      return n;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
        ++pos_;
      const std::string name = text_.substr(start, pos_ - start);
      skip();
      if (pos_ < text_.size() && text_[pos_] == '(')
        return call(name);
      return variable(name, start);
    }
    fail("unexpected character");
  }

  Node variable(const std::string& name, std::size_t start)
  {
    if (name == "x")
      return [](double x, double) { return x; };
    if (name == "y")
      return [](double, double y) { return y; };
    if (name == "r")
      return [](double x, double y) { return std::hypot(x, y); };
    if (name == "pi")
      return [](double, double) { return std::numbers::pi; };
    if (name == "e")
      return [](double, double) { return std::numbers::e; };
    pos_ = start;
    fail("unknown identifier '" + name + "'");
  }

  Node call(const std::string& name)
  {
    static const std::map<std::string, double (*)(double)> unary_functions = {
        {"sin", [](double v) { return std::sin(v); }},   {"cos", [](double v) { return std::cos(v); }},
        {"tan", [](double v) { return std::tan(v); }},   {"asin", [](double v) { return std::asin(v); }},
        {"acos", [](double v) { return std::acos(v); }}, {"atan", [](double v) { return std::atan(v); }},
        {"sinh", [](double v) { return std::sinh(v); }}, {"cosh", [](double v) { return std::cosh(v); }},
        {"tanh", [](double v) { return std::tanh(v); }}, {"exp", [](double v) { return std::exp(v); }},
        {"log", [](double v) { return std::log(v); }},   {"sqrt", [](double v) { return std::sqrt(v); }},
        {"abs", [](double v) { return std::abs(v); }},
    };
    static const std::map<std::string, double (*)(double, double)> binary_functions = {
        {"atan2", [](double a, double b) { return std::atan2(a, b); }},
        {"pow", [](double a, double b) { return std::pow(a, b); }},
        {"min", [](double a, double b) { return std::min(a, b); }},
        {"max", [](double a, double b) { return std::max(a, b); }},
    };

    accept('(');
    std::vector<Node> args;
    if (!accept(')')) {
      do
        args.push_back(sum());
      while (accept(','));
      if (!accept(')'))
        fail("expected ')'");
    }
    if (const auto it = unary_functions.find(name); it != unary_functions.end()) {
      if (args.size() != 1)
        fail(name + " takes one argument");
      const auto fn = it->second;
      const Node a = args[0];
      return [fn, a](double x, double y) { return fn(a(x, y)); };
    }
    if (const auto it = binary_functions.find(name); it != binary_functions.end()) {
      if (args.size() != 2)
        fail(name + " takes two arguments");
      const auto fn = it->second;
      const Node a = args[0];
      const Node b = args[1];
      return [fn, a, b](double x, double y) { return fn(a(x, y), b(x, y)); };
    }
    fail("unknown function '" + name + "'");
  }

  std::string text_;
  std::size_t pos_ = 0;
};

} // namespace

ScalarField parse_expression(const std::string& text)
{
  const Node n = Parser(text).parse();
  return [n](const Point& p) { return n(p.x(), p.y()); };
}

} // namespace hho
