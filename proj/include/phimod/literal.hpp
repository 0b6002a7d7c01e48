#pragma once

// Text form of Laurent series.
//
//   expr   := ['+'|'-'] term (('+'|'-') term)*
//   term   := factor ('*' factor)*
//   factor := integer | 't' ['^' n] | 'u' ['^' [-]n] | 'O(u' ['^' [-]n] ')' | '(' expr ')'
//
// Integers are read mod p; t is the generator of F_q over F_p (r > 1);
// O(u^k) is the zero series known to precision k, so "1 + u + O(u^3)" is a
// truncated series. Examples: "u^-1 + 1 + u^2", "(t+1)*u^3 - t".

#include <cctype>
#include <string>
#include <string_view>

#include "phimod/errors.hpp"
#include "phimod/series.hpp"

namespace phimod {

namespace detail {

class LiteralParser {
 public:
  LiteralParser(const FieldSpec& f, std::string_view text) : f_(f), s_(text) {}

  LaurentSeries parse() {
    LaurentSeries out = expr();
    skip_ws();
    if (pos_ != s_.size()) fail("unexpected character '" + std::string(1, s_[pos_]) + "'");
    return out;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("series literal: " + what + " at offset " + std::to_string(pos_) + " in \"" + std::string(s_) + "\"");
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  long long integer(bool allow_sign) {
    skip_ws();
    bool negative = false;
    if (allow_sign && pos_ < s_.size() && (s_[pos_] == '-' || s_[pos_] == '+')) {
      negative = s_[pos_] == '-';
      ++pos_;
      skip_ws();
    }
    if (pos_ >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[pos_]))) fail("expected integer");
    long long v = 0;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
      v = v * 10 + (s_[pos_] - '0');
      if (v > (1LL << 40)) fail("integer too large");
      ++pos_;
    }
    return negative ? -v : v;
  }

  LaurentSeries expr() {
    LaurentSeries acc(f_);
    bool negate = false;
    skip_ws();
    if (accept('-')) {
      negate = true;
    } else {
      accept('+');
    }
    acc = term();
    if (negate) acc = -acc;
    while (true) {
      if (accept('+')) {
        acc = acc + term();
      } else if (accept('-')) {
        acc = acc - term();
      } else {
        break;
      }
    }
    return acc;
  }

  LaurentSeries term() {
    LaurentSeries acc = factor();
    while (accept('*')) acc = acc * factor();
    return acc;
  }

  LaurentSeries factor() {
    skip_ws();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c))) return LaurentSeries::constant(f_, f_.from_int(integer(false)));
    if (c == '(') {
      ++pos_;
      LaurentSeries inner = expr();
      expect(')');
      return inner;
    }
    if (c == 'u') {
      ++pos_;
      Exp k = 1;
      if (accept('^')) k = integer(true);
      return LaurentSeries::monomial(f_, 1, k);
    }
    if (c == 't') {
      ++pos_;
      Elem gen = 0;
      try {
        gen = f_.generator();
      } catch (const ValidationError&) {
        fail("'t' requires r > 1");
      }
      long long k = 1;
      if (accept('^')) k = integer(false);
      return LaurentSeries::constant(f_, f_.pow(gen, static_cast<std::uint64_t>(k)));
    }
    if (c == 'O') {
      ++pos_;
      expect('(');
      skip_ws();
      if (pos_ >= s_.size() || s_[pos_] != 'u') fail("expected 'u' inside O(...)");
      ++pos_;
      Exp k = 1;
      if (accept('^')) k = integer(true);
      expect(')');
      return LaurentSeries::zero(f_, k);
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  const FieldSpec& f_;
  std::string_view s_;
  std::size_t pos_ = 0;
};

inline std::string format_coefficient(const FieldSpec& f, Elem c, bool* compound) {
  *compound = false;
  if (f.r() == 1) return std::to_string(c);
  const auto ds = f.digits(c);
  std::string out;
  int terms = 0;
  for (int i = static_cast<int>(ds.size()) - 1; i >= 0; --i) {
    if (ds[i] == 0) continue;
    if (terms++) out += " + ";
    if (i == 0) {
      out += std::to_string(ds[i]);
      continue;
    }
    if (ds[i] != 1) out += std::to_string(ds[i]) + "*";
    out += "t";
    if (i > 1) out += "^" + std::to_string(i);
  }
  *compound = terms > 1 || (terms == 1 && out.find('*') != std::string::npos);
  return out;
}

}  // namespace detail

inline LaurentSeries parse_series(const FieldSpec& f, std::string_view text) {
  return detail::LiteralParser(f, text).parse();
}

inline std::string format_series(const LaurentSeries& s) {
  const FieldSpec& f = s.field();
  std::string out;
  const auto& cs = s.coeffs();
  for (std::size_t i = 0; i < cs.size(); ++i) {
    if (cs[i] == 0) continue;
    const Exp k = s.start() + static_cast<Exp>(i);
    bool compound = false;
    const std::string coeff = detail::format_coefficient(f, cs[i], &compound);
    std::string term;
    if (k == 0) {
      term = coeff;
    } else {
      const std::string mono = k == 1 ? "u" : "u^" + std::to_string(k);
      if (cs[i] == 1) {
        term = mono;
      } else {
        term = (compound ? "(" + coeff + ")" : coeff) + "*" + mono;
      }
    }
    if (!out.empty()) out += " + ";
    out += term;
  }
  if (!s.is_exact()) {
    if (!out.empty()) out += " + ";
    out += s.prec() == 1 ? "O(u)" : "O(u^" + std::to_string(s.prec()) + ")";
  }
  return out.empty() ? "0" : out;
}

}  // namespace phimod
