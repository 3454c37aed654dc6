#include "simpcoll/rational.hpp"

#include <algorithm>

namespace simpcoll {

namespace {

using Int = Rational::Int;

Int gcd(Int a, Int b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    const Int t = a % b;
    a = b;
    b = t;
  }
  return a;
}

// Floor division for b > 0.
Int floor_div(Int a, Int b) {
  Int q = a / b;
  if ((a % b != 0) && (a < 0)) --q;
  return q;
}

[[noreturn]] void overflow(const char* op) {
  throw NumericalError(std::string("rational ") + op + " exceeds 128-bit range", 0.0);
}

}  // namespace

std::string to_decimal(Int v) {
  if (v == 0) return "0";
  const bool neg = v < 0;
  std::string digits;
  // work with negative values so the most negative Int is handled
  if (!neg) v = -v;
  while (v != 0) {
    const Int q = v / 10;
    digits.push_back(static_cast<char>('0' + static_cast<int>(q * 10 - v)));
    v = q;
  }
  if (neg) digits.push_back('-');
  std::reverse(digits.begin(), digits.end());
  return digits;
}

Int Rational::checked_neg(Int a) {
  Int r;
  if (__builtin_sub_overflow(Int(0), a, &r)) overflow("negation");
  return r;
}

Int Rational::checked_mul(Int a, Int b) {
  Int r;
  if (__builtin_mul_overflow(a, b, &r)) overflow("product");
  return r;
}

Int Rational::checked_add(Int a, Int b) {
  Int r;
  if (__builtin_add_overflow(a, b, &r)) overflow("sum");
  return r;
}

void Rational::normalize() {
  if (den_ < 0) {
    num_ = checked_neg(num_);
    den_ = checked_neg(den_);
  }
  const Int g = gcd(num_, den_);
  if (g > 1) {
    num_ /= g;
    den_ /= g;
  }
  if (num_ == 0) den_ = 1;
}

Rational::Rational(double x) {
  if (!std::isfinite(x)) throw InputError("cannot represent a non-finite value exactly");
  int exp = 0;
  const double mant = std::frexp(x, &exp);  // x = mant · 2^exp, |mant| ∈ [0.5, 1)
  // 53 mantissa bits as an integer, then scale by 2^(exp - 53).
  const auto m = static_cast<Int>(std::ldexp(mant, 53));
  int shift = exp - 53;
  if (m == 0) return;
  if (shift >= 0) {
    if (shift > 126 - 53) overflow("conversion");
    num_ = m << shift;
    den_ = 1;
  } else {
    Int mm = m;
    while (shift < 0 && (mm & 1) == 0) {
      mm >>= 1;
      ++shift;
    }
    if (-shift > 126) overflow("conversion");
    num_ = mm;
    den_ = Int(1) << (-shift);
  }
  normalize();
}

Rational::operator double() const {
  // long double keeps 64 bits of each operand; exact whenever both fit
  return static_cast<double>(static_cast<long double>(num_) / static_cast<long double>(den_));
}

std::string Rational::str() const { return den_ == 1 ? to_decimal(num_) : to_decimal(num_) + "/" + to_decimal(den_); }

Rational Rational::add(const Rational& a, const Rational& b, bool subtract) {
  const Int bn = subtract ? checked_neg(b.num_) : b.num_;
  const Int g = gcd(a.den_, b.den_);
  const Int da = a.den_ / g, db = b.den_ / g;
  Rational r;
  r.num_ = checked_add(checked_mul(a.num_, db), checked_mul(bn, da));
  r.den_ = checked_mul(a.den_, db);
  r.normalize();
  return r;
}

Rational operator*(const Rational& a, const Rational& b) {
  if (a.num_ == 0 || b.num_ == 0) return Rational();
  const Int g1 = gcd(a.num_, b.den_), g2 = gcd(b.num_, a.den_);
  Rational r;
  r.num_ = Rational::checked_mul(a.num_ / g1, b.num_ / g2);
  r.den_ = Rational::checked_mul(a.den_ / g2, b.den_ / g1);
  r.normalize();
  return r;
}

Rational operator/(const Rational& a, const Rational& b) {
  if (b.num_ == 0) throw NumericalError("rational division by zero", 0.0);
  Rational inv;
  inv.num_ = b.den_;
  inv.den_ = b.num_;
  inv.normalize();
  return a * inv;
}

int compare(const Rational& a, const Rational& b) {
  // Continued-fraction walk: compare integer parts, then the reciprocals of
  // the fractional parts in reverse order. Every step shrinks the operands.
  Int an = a.num_, ad = a.den_, bn = b.num_, bd = b.den_;
  int sign = 1;
  for (;;) {
    const Int qa = floor_div(an, ad), qb = floor_div(bn, bd);
    if (qa != qb) return qa < qb ? -sign : sign;
    const Int ra = an - qa * ad, rb = bn - qb * bd;  // in [0, ad) and [0, bd)
    if (ra == 0 || rb == 0) {
      if (ra == rb) return 0;
      return ra == 0 ? -sign : sign;
    }
    // a' = ad/ra, b' = bd/rb; larger fractional part means smaller reciprocal
    an = ad;
    ad = ra;
    bn = bd;
    bd = rb;
    sign = -sign;
  }
}

}  // namespace simpcoll
