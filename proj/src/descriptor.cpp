#include "diffeoflow/descriptor.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <sstream>

namespace diffeoflow {

enum class Op { Const, Var, Add, Sub, Mul, Div, Neg, Pow, Exp, Sin, Cos, Tanh, Sqrt, Gauss, Bump };

struct Descriptor::Node {
  Op op = Op::Const;
  double value = 0.0;  // constant, or exponent for Pow
  int var = 0;
  std::shared_ptr<const Node> a, b;

  static double constant_value(const Node& n);
};

namespace {

using NodePtr = std::shared_ptr<const Descriptor::Node>;

NodePtr make(Op op, NodePtr a = nullptr, NodePtr b = nullptr, double value = 0.0, int var = 0) {
  auto n = std::make_shared<Descriptor::Node>();
  n->op = op;
  n->a = std::move(a);
  n->b = std::move(b);
  n->value = value;
  n->var = var;
  return n;
}

bool has_variables(const Descriptor::Node& n) {
  if (n.op == Op::Var) return true;
  return (n.a && has_variables(*n.a)) || (n.b && has_variables(*n.b));
}

class Parser {
 public:
  Parser(const std::string& text, int dim, bool allow_time)
      : text_(text), dim_(dim), allow_time_(allow_time) {}

  NodePtr parse() {
    auto e = expr();
    skip();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    std::ostringstream msg;
    msg << "descriptor '" << text_ << "': " << what << " at position " << pos_;
    throw ParseError(msg.str());
  }

  void skip() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  NodePtr expr() {
    auto lhs = term();
    for (;;) {
      if (accept('+')) lhs = make(Op::Add, lhs, term());
      else if (accept('-')) lhs = make(Op::Sub, lhs, term());
      else return lhs;
    }
  }

  NodePtr term() {
    auto lhs = unary();
    for (;;) {
      if (accept('*')) lhs = make(Op::Mul, lhs, unary());
      else if (accept('/')) lhs = make(Op::Div, lhs, unary());
      else return lhs;
    }
  }

  NodePtr unary() {
    if (accept('-')) return make(Op::Neg, unary());
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    auto base = primary();
    if (accept('^')) {
      auto exponent = unary();
      if (has_variables(*exponent)) fail("exponent must be a constant");
      const double c = Descriptor::Node::constant_value(*exponent);
      return make(Op::Pow, base, nullptr, c);
    }
    return base;
  }

  NodePtr primary() {
    skip();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = text_.c_str() + pos_;
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      if (end == begin) fail("malformed number");
      pos_ += static_cast<std::size_t>(end - begin);
      return make(Op::Const, nullptr, nullptr, v);
    }
    if (accept('(')) {
      auto e = expr();
      expect(')');
      return e;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t end = pos_;
      while (end < text_.size() && std::isalnum(static_cast<unsigned char>(text_[end]))) ++end;
      const std::string name = text_.substr(pos_, end - pos_);
      pos_ = end;
      if (name == "x" || name == "y" || name == "z") {
        const int var = name[0] - 'x';
        if (var >= dim_) fail("variable '" + name + "' exceeds the grid dimension");
        return make(Op::Var, nullptr, nullptr, 0.0, var);
      }
      if (name == "t") {
        if (!allow_time_) fail("time variable not allowed here");
        return make(Op::Var, nullptr, nullptr, 0.0, 3);
      }
      if (name == "pi") return make(Op::Const, nullptr, nullptr, std::numbers::pi);
      static const std::pair<const char*, Op> functions[] = {
          {"exp", Op::Exp},   {"sin", Op::Sin},     {"cos", Op::Cos}, {"tanh", Op::Tanh},
          {"sqrt", Op::Sqrt}, {"gauss", Op::Gauss}, {"bump", Op::Bump}};
      for (const auto& [fname, op] : functions) {
        if (name == fname) {
          expect('(');
          auto arg = expr();
          expect(')');
          return make(op, arg);
        }
      }
      fail("unknown identifier '" + name + "'");
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  const std::string& text_;
  int dim_;
  bool allow_time_;
  std::size_t pos_ = 0;
};

// Scalar-generic elementary functions. ADL picks the Dual / TaylorSeries overloads.
double pow_of(double a, double c) { return std::pow(a, c); }
Dual pow_of(const Dual& a, double c) { return pow(a, c); }
TaylorSeries<double> pow_of(const TaylorSeries<double>& a, double c) { return pow(a, c); }

double bump_of(double u) {
  if (std::abs(u) >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - u * u));
}

Dual bump_of(const Dual& u) {
  if (std::abs(u.value) >= 1.0) return Dual(0.0);
  const double q = 1.0 - u.value * u.value;
  const double b = std::exp(-1.0 / q);
  return chain(u, b, b * (-2.0 * u.value / (q * q)));
}

TaylorSeries<double> bump_of(const TaylorSeries<double>& u) {
  if (std::abs(u.value()) >= 1.0) return TaylorSeries<double>(u.vars(), u.order());
  const auto one = TaylorSeries<double>::constant(u.vars(), u.order(), 1.0);
  return exp(-(one / (one - u * u)));
}

template <typename T>
T constant_like(const T& like, double c) {
  if constexpr (std::is_same_v<T, TaylorSeries<double>>) {
    return TaylorSeries<double>::constant(like.vars(), like.order(), c);
  } else {
    return T(c);
  }
}

template <typename T>
T eval_node(const Descriptor::Node& n, const std::array<T, 4>& vars) {
  using std::cos;
  using std::exp;
  using std::sin;
  using std::sqrt;
  using std::tanh;
  switch (n.op) {
    case Op::Const: return constant_like(vars[0], n.value);
    case Op::Var: return vars[static_cast<std::size_t>(n.var)];
    case Op::Add: return eval_node(*n.a, vars) + eval_node(*n.b, vars);
    case Op::Sub: return eval_node(*n.a, vars) - eval_node(*n.b, vars);
    case Op::Mul: return eval_node(*n.a, vars) * eval_node(*n.b, vars);
    case Op::Div: return eval_node(*n.a, vars) / eval_node(*n.b, vars);
    case Op::Neg: return -eval_node(*n.a, vars);
    case Op::Pow: return pow_of(eval_node(*n.a, vars), n.value);
    case Op::Exp: return exp(eval_node(*n.a, vars));
    case Op::Sin: return sin(eval_node(*n.a, vars));
    case Op::Cos: return cos(eval_node(*n.a, vars));
    case Op::Tanh: return tanh(eval_node(*n.a, vars));
    case Op::Sqrt: return sqrt(eval_node(*n.a, vars));
    case Op::Gauss: {
      const T u = eval_node(*n.a, vars);
      return exp(-(u * u));
    }
    case Op::Bump: return bump_of(eval_node(*n.a, vars));
  }
  return constant_like(vars[0], 0.0);
}

}  // namespace

// Constant folding helper used by the parser for exponents.
double Descriptor::Node::constant_value(const Node& n) {
  const std::array<double, 4> none{0.0, 0.0, 0.0, 0.0};
  return eval_node(n, none);
}

Descriptor Descriptor::parse(const std::string& text, int dim, bool allow_time) {
  Parser p(text, dim, allow_time);
  return Descriptor(text, p.parse());
}

bool Descriptor::is_constant_zero() const {
  return root_->op == Op::Const && root_->value == 0.0;
}

template <typename T>
T Descriptor::evaluate(const std::array<T, 4>& vars) const {
  return eval_node(*root_, vars);
}

template double Descriptor::evaluate<double>(const std::array<double, 4>&) const;
template Dual Descriptor::evaluate<Dual>(const std::array<Dual, 4>&) const;
template TaylorSeries<double> Descriptor::evaluate<TaylorSeries<double>>(
    const std::array<TaylorSeries<double>, 4>&) const;

double Descriptor::operator()(const Point& x, double t) const {
  std::array<double, 4> vars{0.0, 0.0, 0.0, t};
  for (Eigen::Index k = 0; k < x.size(); ++k) vars[static_cast<std::size_t>(k)] = x[k];
  return evaluate(vars);
}

Dual::Gradient Descriptor::gradient(const Point& x, double t) const {
  std::array<Dual, 4> vars{Dual::variable(0.0, 0), Dual::variable(0.0, 1), Dual::variable(0.0, 2),
                           Dual::variable(t, 3)};
  for (Eigen::Index k = 0; k < x.size(); ++k)
    vars[static_cast<std::size_t>(k)].value = x[k];
  return evaluate(vars).grad;
}

TaylorSeries<double> Descriptor::taylor(const Point& x, int order, double t) const {
  const int n = static_cast<int>(x.size());
  std::array<TaylorSeries<double>, 4> vars;
  for (int k = 0; k < 3; ++k) {
    vars[static_cast<std::size_t>(k)] =
        k < n ? TaylorSeries<double>::variable(n, order, k, x[k])
              : TaylorSeries<double>::constant(n, order, 0.0);
  }
  vars[3] = TaylorSeries<double>::constant(n, order, t);
  return evaluate(vars);
}

VectorDescriptor VectorDescriptor::parse(const std::string& text, int dim, bool allow_time) {
  VectorDescriptor out;
  std::string part;
  std::istringstream in(text);
  while (std::getline(in, part, ';')) out.components_.push_back(Descriptor::parse(part, dim, allow_time));
  if (out.dim() != dim) {
    throw ParseError("vector descriptor '" + text + "' has " + std::to_string(out.dim()) +
                     " components, expected " + std::to_string(dim));
  }
  return out;
}

std::string VectorDescriptor::text() const {
  std::string s;
  for (std::size_t k = 0; k < components_.size(); ++k) {
    if (k) s += "; ";
    s += components_[k].text();
  }
  return s;
}

Point VectorDescriptor::operator()(const Point& x, double t) const {
  Point v(dim());
  for (int k = 0; k < dim(); ++k) v[k] = components_[static_cast<std::size_t>(k)](x, t);
  return v;
}

SmallMatrix VectorDescriptor::jacobian(const Point& x, double t) const {
  const int n = dim();
  SmallMatrix J(n, n);
  for (int k = 0; k < n; ++k) {
    const auto g = components_[static_cast<std::size_t>(k)].gradient(x, t);
    for (int j = 0; j < n; ++j) J(k, j) = g[j];
  }
  return J;
}

ScalarField sample(const Descriptor& descriptor, const Grid& grid, double t) {
  return ScalarField::from_function(grid, [&](const Point& x) { return descriptor(x, t); });
}

DisplacementField sample(const VectorDescriptor& descriptor, const Grid& grid, double t) {
  if (descriptor.dim() != grid.dim()) throw DimensionMismatch("descriptor and grid dimensions differ");
  std::vector<ScalarField> comps;
  for (int k = 0; k < grid.dim(); ++k) comps.push_back(sample(descriptor.component(k), grid, t));
  return DisplacementField(std::move(comps));
}

}  // namespace diffeoflow
