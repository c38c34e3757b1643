#include "phicurv/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <optional>

namespace phicurv {

namespace {

struct Token {
  enum class Kind { Number, Ident, Op, LParen, RParen, Comma, End };
  Kind kind;
  std::ptrdiff_t offset;
  double number = 0.0;
  std::string text;
  char op = 0;
};

class Lexer {
 public:
  explicit Lexer(const std::string& text) : text_(text) { advance(); }

  const Token& peek() const { return tok_; }

  Token next() {
    Token t = tok_;
    advance();
    return t;
  }

 private:
  void advance() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
    tok_.offset = static_cast<std::ptrdiff_t>(pos_);
    if (pos_ >= text_.size()) {
      tok_.kind = Token::Kind::End;
      return;
    }
    const char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = text_.c_str() + pos_;
      char* end = nullptr;
      tok_.number = std::strtod(begin, &end);
      if (end == begin)
        fail(ErrorKind::SyntaxError, "malformed number",
             static_cast<std::ptrdiff_t>(pos_));
      pos_ += static_cast<std::size_t>(end - begin);
      tok_.kind = Token::Kind::Number;
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
        ++pos_;
      tok_.kind = Token::Kind::Ident;
      tok_.text = text_.substr(start, pos_ - start);
      return;
    }
    switch (c) {
      case '+': case '-': case '*': case '/': case '^':
        tok_.kind = Token::Kind::Op;
        tok_.op = c;
        ++pos_;
        return;
      case '(':
        tok_.kind = Token::Kind::LParen;
        ++pos_;
        return;
      case ')':
        tok_.kind = Token::Kind::RParen;
        ++pos_;
        return;
      case ',':
        tok_.kind = Token::Kind::Comma;
        ++pos_;
        return;
      default:
        fail(ErrorKind::SyntaxError,
             std::string("unexpected character '") + c + "'",
             static_cast<std::ptrdiff_t>(pos_));
    }
  }

  const std::string& text_;
  std::size_t pos_ = 0;
  Token tok_;
};

bool is_function_name(const std::string& name) {
  return name == "sin" || name == "cos" || name == "exp" || name == "log" ||
         name == "sqrt" || name == "atan";
}

// Coordinate pattern: x<digits> or y<digits>, 1-based.
std::optional<std::pair<VarFamily, int>> coordinate_slot(const std::string& name) {
  if (name.size() < 2 || (name[0] != 'x' && name[0] != 'y')) return std::nullopt;
  for (std::size_t i = 1; i < name.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(name[i]))) return std::nullopt;
  int k = std::atoi(name.c_str() + 1);
  if (k < 1) return std::nullopt;
  return std::make_pair(name[0] == 'x' ? VarFamily::Chart : VarFamily::Target, k - 1);
}

class Parser {
 public:
  Parser(const std::string& text, const FieldEnv& env, VarFamily family)
      : lexer_(text), env_(env), family_(family) {}

  ExprPtr parse_all() {
    ExprPtr e = parse_sum();
    const Token& t = lexer_.peek();
    if (t.kind != Token::Kind::End)
      fail(ErrorKind::SyntaxError, "unexpected trailing input", t.offset);
    return e;
  }

 private:
  ExprPtr parse_sum() {
    ExprPtr lhs = parse_product();
    while (lexer_.peek().kind == Token::Kind::Op &&
           (lexer_.peek().op == '+' || lexer_.peek().op == '-')) {
      Token t = lexer_.next();
      lhs = make_binary(t.op, t.offset, lhs, parse_product());
    }
    return lhs;
  }

  ExprPtr parse_product() {
    ExprPtr lhs = parse_unary();
    while (lexer_.peek().kind == Token::Kind::Op &&
           (lexer_.peek().op == '*' || lexer_.peek().op == '/')) {
      Token t = lexer_.next();
      lhs = make_binary(t.op, t.offset, lhs, parse_unary());
    }
    return lhs;
  }

  ExprPtr parse_unary() {
    if (lexer_.peek().kind == Token::Kind::Op && lexer_.peek().op == '-') {
      Token t = lexer_.next();
      auto node = std::make_shared<ExprAst>();
      node->kind = ExprAst::Kind::Neg;
      node->offset = t.offset;
      node->args.push_back(parse_unary());
      return node;
    }
    if (lexer_.peek().kind == Token::Kind::Op && lexer_.peek().op == '+') {
      lexer_.next();
      return parse_unary();
    }
    return parse_power();
  }

  ExprPtr parse_power() {
    ExprPtr lhs = parse_atom();
    while (lexer_.peek().kind == Token::Kind::Op && lexer_.peek().op == '^') {
      Token t = lexer_.next();
      // The exponent may carry a sign; deeper precedence stays with atoms.
      ExprPtr rhs = parse_exponent();
      lhs = make_binary('^', t.offset, lhs, rhs);
    }
    return lhs;
  }

  ExprPtr parse_exponent() {
    if (lexer_.peek().kind == Token::Kind::Op && lexer_.peek().op == '-') {
      Token t = lexer_.next();
      auto node = std::make_shared<ExprAst>();
      node->kind = ExprAst::Kind::Neg;
      node->offset = t.offset;
      node->args.push_back(parse_exponent());
      return node;
    }
    return parse_atom();
  }

  ExprPtr parse_atom() {
    Token t = lexer_.next();
    switch (t.kind) {
      case Token::Kind::Number: {
        auto node = std::make_shared<ExprAst>();
        node->kind = ExprAst::Kind::Number;
        node->offset = t.offset;
        node->number = t.number;
        return node;
      }
      case Token::Kind::LParen: {
        ExprPtr inner = parse_sum();
        Token close = lexer_.next();
        if (close.kind != Token::Kind::RParen)
          fail(ErrorKind::SyntaxError, "expected ')'", close.offset);
        return inner;
      }
      case Token::Kind::Ident: {
        if (lexer_.peek().kind == Token::Kind::LParen) {
          if (!is_function_name(t.text))
            fail(ErrorKind::UnknownIdentifier, "unknown function '" + t.text + "'",
                 t.offset);
          lexer_.next();  // consume '('
          ExprPtr arg = parse_sum();
          Token close = lexer_.next();
          if (close.kind == Token::Kind::Comma)
            fail(ErrorKind::ArityError, "'" + t.text + "' takes exactly one argument",
                 close.offset);
          if (close.kind != Token::Kind::RParen)
            fail(ErrorKind::SyntaxError, "expected ')'", close.offset);
          auto node = std::make_shared<ExprAst>();
          node->kind = ExprAst::Kind::Call;
          node->offset = t.offset;
          node->name = t.text;
          node->args.push_back(arg);
          return node;
        }
        return resolve_identifier(t);
      }
      default:
        fail(ErrorKind::SyntaxError, "expected an operand", t.offset);
    }
  }

  ExprPtr resolve_identifier(const Token& t) {
    auto node = std::make_shared<ExprAst>();
    node->offset = t.offset;
    node->name = t.text;
    if (auto coord = coordinate_slot(t.text)) {
      auto [fam, slot] = *coord;
      const int dim = fam == VarFamily::Chart ? env_.chart_dim : env_.target_dim;
      if (fam != family_)
        fail(ErrorKind::UnknownIdentifier,
             "coordinate '" + t.text + "' is not available in this context", t.offset);
      if (slot >= dim)
        fail(ErrorKind::UnknownIdentifier,
             "coordinate '" + t.text + "' exceeds the declared dimension", t.offset);
      node->kind = ExprAst::Kind::Coordinate;
      node->family = fam;
      node->slot = slot;
      return node;
    }
    if (env_.constants.count(t.text) || env_.parameters.count(t.text)) {
      node->kind = ExprAst::Kind::Constant;
      return node;
    }
    fail(ErrorKind::UnknownIdentifier, "unknown identifier '" + t.text + "'",
         t.offset);
  }

  ExprPtr make_binary(char op, std::ptrdiff_t offset, ExprPtr lhs, ExprPtr rhs) {
    auto node = std::make_shared<ExprAst>();
    node->kind = ExprAst::Kind::Binary;
    node->op = op;
    node->offset = offset;
    node->args = {std::move(lhs), std::move(rhs)};
    if (op == '^') {
      double e = fold_constant(*node->args[1]);
      node->exponent_real = e;
      node->exponent_is_integer = (std::nearbyint(e) == e && std::abs(e) < 1e9);
      node->exponent_int = node->exponent_is_integer ? static_cast<long>(e) : 0;
    }
    return node;
  }

  // Exponents must evaluate to a constant at link time.
  double fold_constant(const ExprAst& e) {
    switch (e.kind) {
      case ExprAst::Kind::Number:
        return e.number;
      case ExprAst::Kind::Constant: {
        auto it = env_.constants.find(e.name);
        if (it != env_.constants.end()) return it->second;
        fail(ErrorKind::SyntaxError,
             "exponent may not reference the free parameter '" + e.name + "'",
             e.offset);
      }
      case ExprAst::Kind::Neg:
        return -fold_constant(*e.args[0]);
      case ExprAst::Kind::Binary: {
        double a = fold_constant(*e.args[0]);
        double b = fold_constant(*e.args[1]);
        switch (e.op) {
          case '+': return a + b;
          case '-': return a - b;
          case '*': return a * b;
          case '/': return a / b;
          case '^': return std::pow(a, b);
        }
        break;
      }
      default:
        break;
    }
    fail(ErrorKind::SyntaxError, "exponent must be a constant expression", e.offset);
  }

  Lexer lexer_;
  const FieldEnv& env_;
  VarFamily family_;
};

int precedence(const ExprAst& e) {
  switch (e.kind) {
    case ExprAst::Kind::Binary:
      switch (e.op) {
        case '+': case '-': return 1;
        case '*': case '/': return 2;
        case '^': return 4;
      }
      return 0;
    case ExprAst::Kind::Neg:
      return 3;
    default:
      return 5;
  }
}

void print_rec(const ExprAst& e, std::string& out) {
  auto wrap = [&](const ExprAst& child, bool parens) {
    if (parens) out += '(';
    print_rec(child, out);
    if (parens) out += ')';
  };
  switch (e.kind) {
    case ExprAst::Kind::Number: {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", e.number);
      out += buf;
      return;
    }
    case ExprAst::Kind::Coordinate:
    case ExprAst::Kind::Constant:
      out += e.name;
      return;
    case ExprAst::Kind::Neg:
      out += '-';
      wrap(*e.args[0], precedence(*e.args[0]) < precedence(e));
      return;
    case ExprAst::Kind::Call:
      out += e.name;
      out += '(';
      print_rec(*e.args[0], out);
      out += ')';
      return;
    case ExprAst::Kind::Binary: {
      const int p = precedence(e);
      // Left-associative binaries: parenthesize a right child of equal
      // precedence, and any child of lower precedence.
      wrap(*e.args[0], precedence(*e.args[0]) < p);
      out += e.op;
      wrap(*e.args[1], precedence(*e.args[1]) <= p);
      return;
    }
  }
}

}  // namespace

ExprPtr parse(const std::string& text, const FieldEnv& env, VarFamily family) {
  if (text.empty()) fail(ErrorKind::SyntaxError, "empty expression", 0);
  Parser parser(text, env, family);
  return parser.parse_all();
}

std::string print(const ExprAst& ast) {
  std::string out;
  print_rec(ast, out);
  return out;
}

bool structurally_equal(const ExprAst& a, const ExprAst& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case ExprAst::Kind::Number:
      if (a.number != b.number) return false;
      break;
    case ExprAst::Kind::Coordinate:
      if (a.slot != b.slot || a.family != b.family) return false;
      break;
    case ExprAst::Kind::Constant:
    case ExprAst::Kind::Call:
      if (a.name != b.name) return false;
      break;
    case ExprAst::Kind::Binary:
      if (a.op != b.op) return false;
      break;
    case ExprAst::Kind::Neg:
      break;
  }
  if (a.args.size() != b.args.size()) return false;
  for (std::size_t i = 0; i < a.args.size(); ++i)
    if (!structurally_equal(*a.args[i], *b.args[i])) return false;
  return true;
}

bool is_coordinate_free(const ExprAst& ast) {
  if (ast.kind == ExprAst::Kind::Coordinate) return false;
  for (const auto& arg : ast.args)
    if (!is_coordinate_free(*arg)) return false;
  return true;
}

namespace {

Jet eval_jet_rec(const ExprAst& e, const JetBinding& b) {
  switch (e.kind) {
    case ExprAst::Kind::Number:
      return jet_constant(b.space, b.base, e.number);
    case ExprAst::Kind::Coordinate:
      return lift_variable(b.coord_offset + e.slot, b.space, b.base);
    case ExprAst::Kind::Constant: {
      if (b.parameter_slots) {
        auto it = b.parameter_slots->find(e.name);
        if (it != b.parameter_slots->end())
          return lift_variable(it->second, b.space, b.base);
      }
      auto it = b.env->constants.find(e.name);
      if (it == b.env->constants.end())
        fail(ErrorKind::UnknownIdentifier,
             "constant '" + e.name + "' has no bound value", e.offset);
      return jet_constant(b.space, b.base, it->second);
    }
    case ExprAst::Kind::Neg:
      return -eval_jet_rec(*e.args[0], b);
    case ExprAst::Kind::Call: {
      Jet arg = eval_jet_rec(*e.args[0], b);
      try {
        if (e.name == "sin") return sin(arg);
        if (e.name == "cos") return cos(arg);
        if (e.name == "exp") return exp(arg);
        if (e.name == "log") return log(arg);
        if (e.name == "sqrt") return sqrt(arg);
        if (e.name == "atan") return atan(arg);
      } catch (const Error& err) {
        throw Error(err.kind(), std::string(err.what()) + " (in '" + e.name + "')",
                    e.offset);
      }
      fail(ErrorKind::UnknownIdentifier, "unknown function '" + e.name + "'",
           e.offset);
    }
    case ExprAst::Kind::Binary: {
      Jet lhs = eval_jet_rec(*e.args[0], b);
      try {
        switch (e.op) {
          case '+': return lhs + eval_jet_rec(*e.args[1], b);
          case '-': return lhs - eval_jet_rec(*e.args[1], b);
          case '*': return lhs * eval_jet_rec(*e.args[1], b);
          case '/': return lhs / eval_jet_rec(*e.args[1], b);
          case '^':
            return e.exponent_is_integer ? pow(lhs, e.exponent_int)
                                         : pow(lhs, e.exponent_real);
        }
      } catch (const Error& err) {
        if (err.offset() >= 0) throw;
        throw Error(err.kind(), err.what(), e.offset);
      }
      break;
    }
  }
  fail(ErrorKind::SyntaxError, "malformed expression tree", e.offset);
}

}  // namespace

Jet eval_jet(const ExprAst& ast, const JetBinding& binding) {
  return eval_jet_rec(ast, binding);
}

Jet eval_jet(const ExprAst& ast, const FieldEnv& env,
             const std::vector<double>& point, int order) {
  JetBinding b;
  b.space = jet_space(static_cast<int>(point.size()), order);
  b.base = point;
  b.env = &env;
  return eval_jet_rec(ast, b);
}

double eval_value(const ExprAst& ast, const FieldEnv& env,
                  const std::vector<double>& point) {
  switch (ast.kind) {
    case ExprAst::Kind::Number:
      return ast.number;
    case ExprAst::Kind::Coordinate:
      if (ast.slot >= static_cast<int>(point.size()))
        fail(ErrorKind::IndexOutOfRange, "point dimension mismatch", ast.offset);
      return point[ast.slot];
    case ExprAst::Kind::Constant: {
      auto it = env.constants.find(ast.name);
      if (it == env.constants.end())
        fail(ErrorKind::UnknownIdentifier,
             "constant '" + ast.name + "' has no bound value", ast.offset);
      return it->second;
    }
    case ExprAst::Kind::Neg:
      return -eval_value(*ast.args[0], env, point);
    case ExprAst::Kind::Call: {
      double a = eval_value(*ast.args[0], env, point);
      if (ast.name == "sin") return std::sin(a);
      if (ast.name == "cos") return std::cos(a);
      if (ast.name == "exp") return std::exp(a);
      if (ast.name == "log") {
        if (!(a > 0.0))
          fail(ErrorKind::DomainError, "log of non-positive value", ast.offset);
        return std::log(a);
      }
      if (ast.name == "sqrt") {
        if (!(a >= 0.0))
          fail(ErrorKind::DomainError, "sqrt of negative value", ast.offset);
        return std::sqrt(a);
      }
      if (ast.name == "atan") return std::atan(a);
      fail(ErrorKind::UnknownIdentifier, "unknown function", ast.offset);
    }
    case ExprAst::Kind::Binary: {
      double a = eval_value(*ast.args[0], env, point);
      double b = eval_value(*ast.args[1], env, point);
      switch (ast.op) {
        case '+': return a + b;
        case '-': return a - b;
        case '*': return a * b;
        case '/': return a / b;
        case '^': {
          if (ast.exponent_is_integer) return std::pow(a, ast.exponent_int);
          if (!(a > 0.0))
            fail(ErrorKind::DomainError,
                 "non-integer power of a non-positive base", ast.offset);
          return std::pow(a, b);
        }
      }
      break;
    }
  }
  fail(ErrorKind::SyntaxError, "malformed expression tree", ast.offset);
}

}  // namespace phicurv
