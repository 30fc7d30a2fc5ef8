// expr.hpp — tiny arithmetic expression parser for initial conditions and
// config scalars ("2*pi", "0.1*(sin(3*x)*sin(2*y))", ...).
//
// Grammar: expr := term (('+'|'-') term)* ; term := unary (('*'|'/') unary)* ;
// unary := ('+'|'-')* power ; power := atom ('^' unary)? ; atom := number |
// name | name '(' expr [',' expr] ')' | '(' expr ')'. Function names are
// resolved at parse time; variable names at evaluation time.
#pragma once

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <memory>
#include <string>
#include <unordered_map>

#include "gradflow/errors.hpp"

namespace gradflow {

class Expression {
 public:
  static Expression parse(const std::string& src) {
    Parser p{src, 0};
    Expression e;
    e.root_ = p.parse_expr();
    p.skip_ws();
    if (p.pos != src.size())
      throw ValidationError("expression: trailing input at position " +
                            std::to_string(p.pos) + " in '" + src + "'");
    return e;
  }

  double eval(const std::unordered_map<std::string, double>& vars) const {
    require(root_ != nullptr, "expression: evaluating an empty expression");
    return eval_node(*root_, vars);
  }

 private:
  struct Node;
  using NodePtr = std::shared_ptr<const Node>;
  struct Node {
    enum class Kind { Number, Variable, Binary, Call1, Call2 } kind;
    double value = 0.0;          // Number
    std::string name;            // Variable (and diagnostics)
    char op = 0;                 // Binary
    double (*fn1)(double) = nullptr;
    double (*fn2)(double, double) = nullptr;
    NodePtr a, b;
  };

  NodePtr root_;

  static double eval_node(const Node& n, const std::unordered_map<std::string, double>& vars) {
    switch (n.kind) {
      case Node::Kind::Number: return n.value;
      case Node::Kind::Variable: {
        auto it = vars.find(n.name);
        if (it == vars.end())
          throw ValidationError("expression: unknown variable '" + n.name + "'");
        return it->second;
      }
      case Node::Kind::Call1: return n.fn1(eval_node(*n.a, vars));
      case Node::Kind::Call2: return n.fn2(eval_node(*n.a, vars), eval_node(*n.b, vars));
      case Node::Kind::Binary: {
        const double x = eval_node(*n.a, vars);
        const double y = eval_node(*n.b, vars);
        switch (n.op) {
          case '+': return x + y;
          case '-': return x - y;
          case '*': return x * y;
          case '/': return x / y;
          case '^': return std::pow(x, y);
        }
        throw ValidationError("expression: corrupt operator node");
      }
    }
    throw ValidationError("expression: corrupt node");
  }

  struct Parser {
    const std::string& src;
    size_t pos;

    void skip_ws() {
      while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos]))) ++pos;
    }
    bool peek(char c) {
      skip_ws();
      return pos < src.size() && src[pos] == c;
    }
    bool accept(char c) {
      if (!peek(c)) return false;
      ++pos;
      return true;
    }
    void expect(char c) {
      if (!accept(c))
        throw ValidationError(std::string("expression: expected '") + c + "' at position " +
                              std::to_string(pos) + " in '" + src + "'");
    }

    NodePtr parse_expr() {
      NodePtr lhs = parse_term();
      for (;;) {
        if (accept('+'))
          lhs = binary('+', lhs, parse_term());
        else if (accept('-'))
          lhs = binary('-', lhs, parse_term());
        else
          return lhs;
      }
    }
    NodePtr parse_term() {
      NodePtr lhs = parse_unary();
      for (;;) {
        if (accept('*'))
          lhs = binary('*', lhs, parse_unary());
        else if (accept('/'))
          lhs = binary('/', lhs, parse_unary());
        else
          return lhs;
      }
    }
    NodePtr parse_unary() {
      bool negate = false;
      for (;;) {
        if (accept('+')) continue;
        if (accept('-')) {
          negate = !negate;
          continue;
        }
        break;
      }
      NodePtr inner = parse_power();
      if (!negate) return inner;
      auto zero = std::make_shared<Node>();
      zero->kind = Node::Kind::Number;
      zero->value = 0.0;
      return binary('-', zero, inner);
    }
    NodePtr parse_power() {
      NodePtr base = parse_atom();
      if (accept('^')) return binary('^', base, parse_unary());  // right-associative
      return base;
    }

    NodePtr parse_atom() {
      skip_ws();
      if (pos >= src.size())
        throw ValidationError("expression: unexpected end of input in '" + src + "'");
      const char c = src[pos];
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_name();
      if (accept('(')) {
        NodePtr inner = parse_expr();
        expect(')');
        return inner;
      }
      throw ValidationError(std::string("expression: unexpected character '") + c +
                            "' at position " + std::to_string(pos) + " in '" + src + "'");
    }

    NodePtr parse_number() {
      const char* begin = src.c_str() + pos;
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      if (end == begin)
        throw ValidationError("expression: malformed number at position " +
                              std::to_string(pos) + " in '" + src + "'");
      pos += static_cast<size_t>(end - begin);
      auto n = std::make_shared<Node>();
      n->kind = Node::Kind::Number;
      n->value = v;
      return n;
    }

    NodePtr parse_name() {
      const size_t start = pos;
      while (pos < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[pos])) || src[pos] == '_'))
        ++pos;
      const std::string name = src.substr(start, pos - start);
      if (!peek('(')) {
        auto n = std::make_shared<Node>();
        n->kind = Node::Kind::Variable;
        n->name = name;
        return n;
      }
      expect('(');
      NodePtr a = parse_expr();
      NodePtr b;
      if (accept(',')) b = parse_expr();
      expect(')');

      static const std::unordered_map<std::string, double (*)(double)> unary_fns = {
          {"sin", std::sin},   {"cos", std::cos},   {"tan", std::tan},
          {"sinh", std::sinh}, {"cosh", std::cosh}, {"tanh", std::tanh},
          {"exp", std::exp},   {"log", std::log},   {"sqrt", std::sqrt},
          {"abs", std::fabs},  {"floor", std::floor},
      };
      static const std::unordered_map<std::string, double (*)(double, double)> binary_fns = {
          {"pow", std::pow},
          {"atan2", std::atan2},
          {"min", [](double x, double y) { return x < y ? x : y; }},
          {"max", [](double x, double y) { return x > y ? x : y; }},
      };
      auto n = std::make_shared<Node>();
      n->name = name;
      n->a = a;
      n->b = b;
      if (b == nullptr) {
        auto it = unary_fns.find(name);
        if (it == unary_fns.end())
          throw ValidationError("expression: unknown function '" + name + "' (or wrong arity)");
        n->kind = Node::Kind::Call1;
        n->fn1 = it->second;
      } else {
        auto it = binary_fns.find(name);
        if (it == binary_fns.end())
          throw ValidationError("expression: unknown function '" + name + "' (or wrong arity)");
        n->kind = Node::Kind::Call2;
        n->fn2 = it->second;
      }
      return n;
    }

    static NodePtr binary(char op, NodePtr a, NodePtr b) {
      auto n = std::make_shared<Node>();
      n->kind = Node::Kind::Binary;
      n->op = op;
      n->a = std::move(a);
      n->b = std::move(b);
      return n;
    }
  };
};

// Constant expression with only `pi` bound — used for config scalars like "2*pi".
inline double eval_constant_expression(const std::string& src) {
  return Expression::parse(src).eval({{"pi", M_PI}});
}

}  // namespace gradflow
