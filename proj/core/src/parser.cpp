#include "lmkit/parser.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <optional>
#include <string_view>
#include <vector>

namespace lmkit {

namespace {

enum class Tok {
  End,
  Name,     // bare identifier or quoted string
  Number,   // integer or decimal literal
  Tilde,
  Plus,
  Minus,
  Star,
  StarStar,
  Slash,
  Caret,
  LParen,
  RParen,
  Comma,
  Equals,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;      // unquoted content for Name
  double number = 0.0;
  bool is_integer = false;
  bool quoted = false;
  std::size_t pos = 0;
};

class Lexer {
 public:
  explicit Lexer(const std::string& src) : src_(src) { advance(); }

  const Token& peek() const { return cur_; }
  Token take() {
    Token t = cur_;
    advance();
    return t;
  }

 private:
  void advance() {
    while (i_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[i_]))) ++i_;
    cur_ = Token{};
    cur_.pos = i_;
    if (i_ >= src_.size()) {
      cur_.kind = Tok::End;
      return;
    }
    char c = src_[i_];
    switch (c) {
      case '~': cur_.kind = Tok::Tilde; ++i_; return;
      case '+': cur_.kind = Tok::Plus; ++i_; return;
      case '-': cur_.kind = Tok::Minus; ++i_; return;
      case '/': cur_.kind = Tok::Slash; ++i_; return;
      case '^': cur_.kind = Tok::Caret; ++i_; return;
      case '(': cur_.kind = Tok::LParen; ++i_; return;
      case ')': cur_.kind = Tok::RParen; ++i_; return;
      case ',': cur_.kind = Tok::Comma; ++i_; return;
      case '=': cur_.kind = Tok::Equals; ++i_; return;
      case '*':
        ++i_;
        if (i_ < src_.size() && src_[i_] == '*') {
          ++i_;
          cur_.kind = Tok::StarStar;
        } else {
          cur_.kind = Tok::Star;
        }
        return;
      case '"': {
        ++i_;
        std::string out;
        while (i_ < src_.size()) {
          if (src_[i_] == '"') {
            if (i_ + 1 < src_.size() && src_[i_ + 1] == '"') {
              out += '"';
              i_ += 2;
              continue;
            }
            ++i_;
            cur_.kind = Tok::Name;
            cur_.text = std::move(out);
            cur_.quoted = true;
            return;
          }
          out += src_[i_++];
        }
        throw ParseError("unterminated quoted name", cur_.pos);
      }
      default: break;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && i_ + 1 < src_.size() &&
         std::isdigit(static_cast<unsigned char>(src_[i_ + 1])))) {
      std::size_t start = i_;
      bool integer = true;
      while (i_ < src_.size() &&
             (std::isdigit(static_cast<unsigned char>(src_[i_])) || src_[i_] == '.')) {
        if (src_[i_] == '.') integer = false;
        ++i_;
      }
      // exponent part of a float literal
      if (i_ < src_.size() && (src_[i_] == 'e' || src_[i_] == 'E')) {
        std::size_t j = i_ + 1;
        if (j < src_.size() && (src_[j] == '+' || src_[j] == '-')) ++j;
        if (j < src_.size() && std::isdigit(static_cast<unsigned char>(src_[j]))) {
          integer = false;
          i_ = j;
          while (i_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i_]))) ++i_;
        }
      }
      std::string_view sv(src_.data() + start, i_ - start);
      double v = 0.0;
      auto [p, ec] = std::from_chars(sv.data(), sv.data() + sv.size(), v);
      if (ec != std::errc() || p != sv.data() + sv.size()) {
        throw ParseError("malformed number '" + std::string(sv) + "'", start);
      }
      cur_.kind = Tok::Number;
      cur_.number = v;
      cur_.is_integer = integer;
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = i_;
      while (i_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[i_])) || src_[i_] == '_')) {
        ++i_;
      }
      cur_.kind = Tok::Name;
      cur_.text = src_.substr(start, i_ - start);
      return;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", i_);
  }

  const std::string& src_;
  std::size_t i_ = 0;
  Token cur_;
};

// Intermediate parse value: an expression, a foldable numeric constant, or
// the E(x) mean marker that only makes sense inside the centering pattern.
struct Value {
  enum Kind { Expr, Number, MeanOf } kind = Expr;
  Expression expr;
  double number = 0.0;
  std::size_t pos = 0;
};

class Parser {
 public:
  explicit Parser(const std::string& src) : lex_(src) {}

  ModelSpec parse_model() {
    Value lhs = parse_sum();
    expect(Tok::Tilde, "expected '~'");
    Value rhs = parse_sum();
    if (lex_.peek().kind != Tok::End) {
      throw ParseError("unexpected trailing input", lex_.peek().pos);
    }
    if (lhs.kind != Value::Expr) {
      throw ParseError("response must name a variable", lhs.pos);
    }
    Expression response = lhs.expr;
    if (rhs.kind == Value::Number) {
      if (rhs.number != 1.0) {
        throw ParseError("only the constant 1 may appear as a term", rhs.pos);
      }
      return ModelSpec(Expression::constant_one(), response, true);
    }
    if (rhs.kind != Value::Expr) {
      throw ParseError("E(...) may only appear in the pattern (x - E(x))", rhs.pos);
    }
    return ModelSpec(rhs.expr, response, rhs.expr.has_constant_term());
  }

 private:
  void expect(Tok kind, const char* msg) {
    if (lex_.peek().kind != kind) throw ParseError(msg, lex_.peek().pos);
    lex_.take();
  }

  Value parse_sum() {
    bool leading_minus = false;
    if (lex_.peek().kind == Tok::Minus) {
      lex_.take();
      leading_minus = true;
    }
    Value acc = parse_prod();
    if (leading_minus) acc = combine_sub(Value{Value::Expr, Expression{}, 0.0, acc.pos}, acc);
    while (lex_.peek().kind == Tok::Plus || lex_.peek().kind == Tok::Minus) {
      Token op = lex_.take();
      Value rhs = parse_prod();
      acc = (op.kind == Tok::Plus) ? combine_add(acc, rhs) : combine_sub(acc, rhs);
    }
    return acc;
  }

  Value combine_add(Value a, Value b) {
    if (a.kind == Value::MeanOf || b.kind == Value::MeanOf) {
      throw ParseError("E(...) may only appear in the pattern (x - E(x))",
                       a.kind == Value::MeanOf ? a.pos : b.pos);
    }
    if (a.kind == Value::Number && b.kind == Value::Number) {
      a.number += b.number;
      return a;
    }
    if (a.kind == Value::Number || b.kind == Value::Number) {
      Value& num = (a.kind == Value::Number) ? a : b;
      Value& ex = (a.kind == Value::Number) ? b : a;
      if (num.number != 1.0) {
        throw ParseError("only the constant 1 may appear as a term", num.pos);
      }
      ex.expr = add(ex.expr, Expression::constant_one());
      return ex;
    }
    a.expr = add(a.expr, b.expr);
    return a;
  }

  Value combine_sub(Value a, Value b) {
    if (a.kind == Value::MeanOf) {
      throw ParseError("E(...) may only appear in the pattern (x - E(x))", a.pos);
    }
    if (b.kind == Value::MeanOf) {
      // the centering pattern: everything accumulated so far must equal
      // the argument of E()
      if (a.kind != Value::Expr || !(a.expr == b.expr)) {
        throw ParseError(
            "the subtrahend of E(...) must match the centered expression", b.pos);
      }
      // add() merges type tags between the two spellings of the inner
      Expression inner = add(a.expr, b.expr);
      Value out;
      out.kind = Value::Expr;
      out.expr = Expression::from_factor(
          Factor::transformed(TransformKind::Center, std::move(inner)));
      out.pos = a.pos;
      return out;
    }
    if (a.kind == Value::Number && b.kind == Value::Number) {
      a.number -= b.number;
      return a;
    }
    if (b.kind == Value::Number) {
      if (b.number != 1.0) {
        throw ParseError("only the constant 1 may be subtracted", b.pos);
      }
      a.expr = subtract(a.expr, Expression::constant_one());
      return a;
    }
    // number - expr
    if (a.kind == Value::Number) {
      if (a.number != 1.0) {
        throw ParseError("only the constant 1 may appear as a term", a.pos);
      }
      a.kind = Value::Expr;
      a.expr = subtract(Expression::constant_one(), b.expr);
      return a;
    }
    a.expr = subtract(a.expr, b.expr);
    return a;
  }

  Value parse_prod() {
    Value acc = parse_pow();
    for (;;) {
      Tok k = lex_.peek().kind;
      if (k == Tok::Star) {
        lex_.take();
        acc = combine_mul(acc, parse_pow());
      } else if (k == Tok::LParen) {
        // juxtaposition: (A)(B)
        acc = combine_mul(acc, parse_pow());
      } else if (k == Tok::Slash) {
        Token op = lex_.take();
        Value rhs = parse_pow();
        acc = combine_div(acc, rhs, op.pos);
      } else {
        break;
      }
    }
    return acc;
  }

  Value combine_mul(Value a, Value b) {
    if (a.kind == Value::MeanOf || b.kind == Value::MeanOf) {
      throw ParseError("E(...) may only appear in the pattern (x - E(x))",
                       a.kind == Value::MeanOf ? a.pos : b.pos);
    }
    if (a.kind == Value::Number && b.kind == Value::Number) {
      a.number *= b.number;
      return a;
    }
    if (a.kind == Value::Number || b.kind == Value::Number) {
      // constant scale factors are absorbed: the fit is scale-equivariant
      Value& num = (a.kind == Value::Number) ? a : b;
      Value& ex = (a.kind == Value::Number) ? b : a;
      if (num.number == 0.0) {
        throw ParseError("multiplication by zero is not allowed", num.pos);
      }
      return ex;
    }
    a.expr = multiply(a.expr, b.expr);
    return a;
  }

  Value combine_div(Value a, Value b, std::size_t pos) {
    if (a.kind == Value::MeanOf || b.kind == Value::MeanOf) {
      throw ParseError("E(...) may only appear in the pattern (x - E(x))", pos);
    }
    if (a.kind == Value::Number && b.kind == Value::Number) {
      if (b.number == 0.0) throw ParseError("division by zero", pos);
      a.number /= b.number;
      return a;
    }
    if (b.kind == Value::Number) {
      if (b.number == 0.0) throw ParseError("division by zero", pos);
      return a;  // constant scale absorbed
    }
    throw ParseError("division by a variable is not supported", pos);
  }

  Value parse_pow() {
    Value v = parse_atom();
    Tok k = lex_.peek().kind;
    if (k == Tok::Caret || k == Tok::StarStar) {
      Token op = lex_.take();
      Token e = lex_.take();
      if (e.kind != Tok::Number || !e.is_integer) {
        throw ParseError("power must be a positive integer", e.pos);
      }
      int kpow = static_cast<int>(e.number);
      if (kpow < 1) throw ParseError("power must be a positive integer", e.pos);
      if (v.kind == Value::Number) {
        v.number = std::pow(v.number, kpow);
        return v;
      }
      if (v.kind == Value::MeanOf) {
        throw ParseError("E(...) may only appear in the pattern (x - E(x))", op.pos);
      }
      v.expr = power(v.expr, kpow);
    }
    return v;
  }

  std::string parse_name_arg() {
    Token t = lex_.take();
    if (t.kind != Tok::Name && t.kind != Tok::Number) {
      throw ParseError("expected a name", t.pos);
    }
    if (t.kind == Tok::Number) {
      // numeric level labels, e.g. baseline=2
      return t.is_integer ? std::to_string(static_cast<long long>(t.number))
                          : std::to_string(t.number);
    }
    return t.text;
  }

  Value parse_atom() {
    Token t = lex_.take();
    Value v;
    v.pos = t.pos;
    if (t.kind == Tok::Number) {
      v.kind = Value::Number;
      v.number = t.number;
      return v;
    }
    if (t.kind == Tok::LParen) {
      Value inner = parse_sum();
      expect(Tok::RParen, "expected ')'");
      inner.pos = t.pos;
      return inner;
    }
    if (t.kind != Tok::Name) {
      throw ParseError("unexpected token", t.pos);
    }
    // A name not followed by '(' is a variable reference.
    if (t.quoted || lex_.peek().kind != Tok::LParen) {
      v.kind = Value::Expr;
      v.expr = Expression::from_factor(Factor::untyped(t.text));
      return v;
    }
    lex_.take();  // consume '('
    if (t.text == "Q" || t.text == "C") {
      std::string name = parse_name_arg();
      std::optional<std::string> baseline;
      if (lex_.peek().kind == Tok::Comma) {
        lex_.take();
        Token kw = lex_.take();
        if (kw.kind != Tok::Name || kw.text != "baseline" || t.text != "C") {
          throw ParseError("expected baseline=... in C(...)", kw.pos);
        }
        expect(Tok::Equals, "expected '=' after baseline");
        baseline = parse_name_arg();
      }
      expect(Tok::RParen, "expected ')'");
      Factor f = (t.text == "Q") ? Factor::quantitative(name)
                                 : Factor::categorical(name, baseline);
      v.kind = Value::Expr;
      v.expr = Expression::from_factor(std::move(f));
      return v;
    }
    if (t.text == "E") {
      Value inner = parse_sum();
      expect(Tok::RParen, "expected ')'");
      if (inner.kind != Value::Expr) {
        throw ParseError("E(...) requires a variable expression", t.pos);
      }
      v.kind = Value::MeanOf;
      v.expr = inner.expr;
      return v;
    }
    if (t.text == "Poly") {
      Value inner = parse_sum();
      expect(Tok::Comma, "expected ',' in Poly(x, k)");
      Token deg = lex_.take();
      if (deg.kind != Tok::Number || !deg.is_integer ||
          static_cast<int>(deg.number) < 1) {
        throw ParseError("Poly degree must be a positive integer", deg.pos);
      }
      expect(Tok::RParen, "expected ')'");
      if (inner.kind != Value::Expr || inner.expr.terms().size() != 1 ||
          inner.expr.terms().front().size() != 1) {
        throw ParseError("Poly requires a single variable or transformation", t.pos);
      }
      const Factor& f = inner.expr.terms().front().factors().front();
      if (f.known_categorical()) {
        throw ParseError("Poly of a categorical variable is not defined", t.pos);
      }
      v.kind = Value::Expr;
      v.expr = poly(f, static_cast<int>(deg.number));
      return v;
    }
    if (auto kind = transform_from_name(t.text)) {
      Value inner = parse_sum();
      expect(Tok::RParen, "expected ')'");
      if (inner.kind != Value::Expr) {
        throw ParseError("transformation of a constant is not allowed", t.pos);
      }
      v.kind = Value::Expr;
      try {
        v.expr = Expression::from_factor(Factor::transformed(*kind, inner.expr));
      } catch (const Error& e) {
        throw ParseError(e.what(), t.pos);
      }
      return v;
    }
    throw ParseError("unknown transformation '" + t.text + "'", t.pos);
  }

  Lexer lex_;
};

}  // namespace

ModelSpec parse_formula(const std::string& text) {
  Parser p(text);
  return p.parse_model();
}

}  // namespace lmkit
