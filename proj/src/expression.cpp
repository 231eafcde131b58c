#include "ssf/expression.hpp"

#include <cctype>
#include <numbers>

namespace ssf {

std::shared_ptr<const Expr> Expr::constant(double c) {
  auto e = std::make_shared<Expr>();
  e->op_ = Op::constant;
  e->value_ = c;
  return e;
}

std::shared_ptr<const Expr> Expr::variable(int i) {
  auto e = std::make_shared<Expr>();
  e->op_ = Op::variable;
  e->index_ = i;
  return e;
}

std::shared_ptr<const Expr> Expr::radius() {
  auto e = std::make_shared<Expr>();
  e->op_ = Op::radius;
  return e;
}

std::shared_ptr<const Expr> Expr::binary(Op op, std::shared_ptr<const Expr> a,
                                         std::shared_ptr<const Expr> b) {
  if (op == Op::pow && b->op_ != Op::constant)
    fail(ErrorKind::usage, "exponents must be constant");
  auto e = std::make_shared<Expr>();
  e->op_ = op;
  e->a_ = std::move(a);
  e->b_ = std::move(b);
  return e;
}

std::shared_ptr<const Expr> Expr::negate(std::shared_ptr<const Expr> a) {
  auto e = std::make_shared<Expr>();
  e->op_ = Op::neg;
  e->a_ = std::move(a);
  return e;
}

std::shared_ptr<const Expr> Expr::function(Fn fn, std::shared_ptr<const Expr> a) {
  auto e = std::make_shared<Expr>();
  e->op_ = Op::func;
  e->fn_ = fn;
  e->a_ = std::move(a);
  return e;
}

bool Expr::has_kinks(int dim) const {
  switch (op_) {
    case Op::constant:
    case Op::variable: return false;
    case Op::radius: return dim == 1;
    case Op::func:
      if (fn_ == Fn::abs || fn_ == Fn::step) return true;
      return a_->has_kinks(dim);
    case Op::neg: return a_->has_kinks(dim);
    default: return a_->has_kinks(dim) || b_->has_kinks(dim);
  }
}

namespace {

// Recursive-descent parser:
//   expr   := term (('+'|'-') term)*
//   term   := unary (('*'|'/') unary)*
//   unary  := '-' unary | power
//   power  := atom ('^' unary)?
//   atom   := number | ident | ident '(' expr ')' | '(' expr ')'
class Parser {
 public:
  Parser(const std::string& s, const std::map<std::string, double>& params)
      : s_(s), params_(params) {}

  std::shared_ptr<const Expr> parse() {
    auto e = expr();
    skip();
    if (pos_ != s_.size()) error("unexpected trailing input");
    return e;
  }

 private:
  [[noreturn]] void error(const std::string& msg) const {
    fail(ErrorKind::usage, "expression '" + s_ + "': " + msg + " at position " + std::to_string(pos_));
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  std::shared_ptr<const Expr> expr() {
    auto e = term();
    for (;;) {
      if (accept('+')) e = Expr::binary(Expr::Op::add, e, term());
      else if (accept('-')) e = Expr::binary(Expr::Op::sub, e, term());
      else return e;
    }
  }

  std::shared_ptr<const Expr> term() {
    auto e = unary();
    for (;;) {
      if (accept('*')) e = Expr::binary(Expr::Op::mul, e, unary());
      else if (accept('/')) e = Expr::binary(Expr::Op::div, e, unary());
      else return e;
    }
  }

  std::shared_ptr<const Expr> unary() {
    if (accept('-')) return Expr::negate(unary());
    if (accept('+')) return unary();
    return power();
  }

  std::shared_ptr<const Expr> power() {
    auto base = atom();
    if (accept('^')) {
      auto ex = unary();
      double v = constant_value(*ex);
      return Expr::binary(Expr::Op::pow, base, Expr::constant(v));
    }
    return base;
  }

  double constant_value(const Expr& e) const {
    // Exponents must fold to a number: evaluate at an arbitrary point and
    // reject anything coordinate dependent.
    const double a[3] = {0.37, -1.3, 2.1};
    const double b[3] = {1.7, 0.4, -0.9};
    double va = e.eval(std::span<const double>(a, 3));
    double vb = e.eval(std::span<const double>(b, 3));
    if (va != vb) error("exponent must be constant");
    return va;
  }

  std::shared_ptr<const Expr> atom() {
    skip();
    if (pos_ >= s_.size()) error("unexpected end of input");
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      auto e = expr();
      if (!accept(')')) error("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t used = 0;
      double v = std::stod(s_.substr(pos_), &used);
      pos_ += used;
      return Expr::constant(v);
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
        ++pos_;
      std::string id = s_.substr(start, pos_ - start);
      static const std::map<std::string, Expr::Fn> fns = {
          {"exp", Expr::Fn::exp},   {"log", Expr::Fn::log},   {"sin", Expr::Fn::sin},
          {"cos", Expr::Fn::cos},   {"sinh", Expr::Fn::sinh}, {"cosh", Expr::Fn::cosh},
          {"tanh", Expr::Fn::tanh}, {"sech", Expr::Fn::sech}, {"sqrt", Expr::Fn::sqrt},
          {"abs", Expr::Fn::abs},   {"step", Expr::Fn::step}};
      if (auto f = fns.find(id); f != fns.end()) {
        if (!accept('(')) error("expected '(' after " + id);
        auto arg = expr();
        if (!accept(')')) error("expected ')'");
        return Expr::function(f->second, arg);
      }
      if (id == "x" || id == "x1") return Expr::variable(0);
      if (id == "y" || id == "x2") return Expr::variable(1);
      if (id == "z" || id == "x3") return Expr::variable(2);
      if (id == "r") return Expr::radius();
      if (id == "pi") return Expr::constant(std::numbers::pi);
      if (auto p = params_.find(id); p != params_.end()) return Expr::constant(p->second);
      error("unknown identifier '" + id + "'");
    }
    error(std::string("unexpected character '") + c + "'");
  }

  const std::string& s_;
  const std::map<std::string, double>& params_;
  std::size_t pos_ = 0;
};

}  // namespace

std::shared_ptr<const Expr> Expr::parse(const std::string& text,
                                        const std::map<std::string, double>& params) {
  return Parser(text, params).parse();
}

}  // namespace ssf
