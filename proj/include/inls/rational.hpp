#pragma once

// Exact rational scalars for the exponent arithmetic.  Everything in the
// params module runs on these; floating point is not allowed there because
// the certified statements are algebraic identities and strict inequalities.

#include <boost/multiprecision/cpp_int.hpp>
#include <optional>
#include <stdexcept>
#include <string>

namespace inls {

using Rational = boost::multiprecision::cpp_rational;

/// Rational extended with +infinity.  Infinite values show up as legitimate
/// time exponents (the endpoint pair (inf, 2)) and as the N=2 upper bound on
/// alpha.  Arithmetic is total only for the operations the certifier needs:
/// reciprocal (1/inf = 0) and comparisons.
class Exponent {
public:
  Exponent() : inf_(false), v_(0) {}
  Exponent(Rational v) : inf_(false), v_(std::move(v)) {}
  Exponent(long v) : inf_(false), v_(v) {}
  static Exponent infinity() {
    Exponent e;
    e.inf_ = true;
    return e;
  }

  bool is_infinite() const { return inf_; }
  const Rational& value() const {
    if (inf_) throw std::logic_error("Exponent: value() on infinity");
    return v_;
  }

  /// 1/e with the conventions 1/inf = 0 and 1/0 = inf.
  Exponent reciprocal() const {
    if (inf_) return Exponent(Rational(0));
    if (v_ == 0) return infinity();
    return Exponent(Rational(1) / v_);
  }

  /// Holder dual e' with 1/e + 1/e' = 1.  dual(inf) = 1, dual(1) = inf.
  Exponent holder_dual() const {
    if (inf_) return Exponent(Rational(1));
    if (v_ == 1) return infinity();
    return Exponent(v_ / (v_ - 1));
  }

  friend bool operator==(const Exponent& a, const Exponent& b) {
    if (a.inf_ || b.inf_) return a.inf_ && b.inf_;
    return a.v_ == b.v_;
  }
  friend bool operator<(const Exponent& a, const Exponent& b) {
    if (a.inf_) return false;
    if (b.inf_) return true;
    return a.v_ < b.v_;
  }
  friend bool operator>(const Exponent& a, const Exponent& b) { return b < a; }
  friend bool operator<=(const Exponent& a, const Exponent& b) { return !(b < a); }
  friend bool operator>=(const Exponent& a, const Exponent& b) { return !(a < b); }

private:
  bool inf_;
  Rational v_;
};

/// Parse "3", "-1/2", "0.75" or "inf" exactly.  Decimal strings become
/// digits/10^k with no rounding.  Returns nullopt on malformed input or a
/// zero denominator.
inline std::optional<Rational> parse_rational(const std::string& s) {
  if (s.empty()) return std::nullopt;
  auto digits_ok = [](const std::string& t) {
    if (t.empty()) return false;
    for (char c : t)
      if (c < '0' || c > '9') return false;
    return true;
  };
  std::string body = s;
  bool neg = false;
  if (body[0] == '+' || body[0] == '-') {
    neg = body[0] == '-';
    body = body.substr(1);
  }
  auto slash = body.find('/');
  auto dot = body.find('.');
  Rational r;
  if (slash != std::string::npos) {
    std::string num = body.substr(0, slash), den = body.substr(slash + 1);
    if (!digits_ok(num) || !digits_ok(den)) return std::nullopt;
    boost::multiprecision::cpp_int d(den);
    if (d == 0) return std::nullopt;
    r = Rational(boost::multiprecision::cpp_int(num), d);
  } else if (dot != std::string::npos) {
    std::string ip = body.substr(0, dot), fp = body.substr(dot + 1);
    if (ip.empty()) ip = "0";
    if (!digits_ok(ip) || (!fp.empty() && !digits_ok(fp))) return std::nullopt;
    boost::multiprecision::cpp_int scale = 1;
    for (size_t i = 0; i < fp.size(); ++i) scale *= 10;
    boost::multiprecision::cpp_int n = boost::multiprecision::cpp_int(ip) * scale;
    if (!fp.empty()) n += boost::multiprecision::cpp_int(fp);
    r = Rational(n, scale);
  } else {
    if (!digits_ok(body)) return std::nullopt;
    r = Rational(boost::multiprecision::cpp_int(body));
  }
  if (neg) r = -r;
  return r;
}

inline std::optional<Exponent> parse_exponent(const std::string& s) {
  if (s == "inf" || s == "infinity" || s == "oo") return Exponent::infinity();
  auto r = parse_rational(s);
  if (!r) return std::nullopt;
  return Exponent(*r);
}

inline std::string to_string(const Rational& r) { return r.str(); }

inline std::string to_string(const Exponent& e) {
  return e.is_infinite() ? "inf" : e.value().str();
}

inline double to_double(const Rational& r) { return static_cast<double>(r); }

}  // namespace inls
