#include "mcc/number.hpp"

#include <mpfr.h>

#include <algorithm>
#include <cctype>
#include <cstdlib>

namespace mcc {

namespace {

constexpr long kMaxExponent = 100000;

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c) != 0; });
}

BigInt pow10(unsigned long e) {
  BigInt r;
  mpz_ui_pow_ui(r.get_mpz_t(), 10, e);
  return r;
}

class MpfrValue {
 public:
  explicit MpfrValue(mpfr_prec_t prec) { mpfr_init2(value_, prec); }
  ~MpfrValue() { mpfr_clear(value_); }
  MpfrValue(const MpfrValue&) = delete;
  MpfrValue& operator=(const MpfrValue&) = delete;
  mpfr_ptr get() { return value_; }

 private:
  mpfr_t value_;
};

mpfr_prec_t precision_for(unsigned digits) {
  // ~3.33 bits per decimal digit plus guard bits for the integer part.
  return static_cast<mpfr_prec_t>(digits * 4 + 128);
}

}  // namespace

std::optional<BigInt> parse_integer(std::string_view text) {
  if (!all_digits(text)) return std::nullopt;
  return BigInt(std::string(text), 10);
}

std::optional<Rational> parse_decimal(std::string_view text) {
  if (text.empty()) return std::nullopt;
  bool negative = false;
  if (text.front() == '+' || text.front() == '-') {
    negative = text.front() == '-';
    text.remove_prefix(1);
  }
  long exponent = 0;
  if (auto epos = text.find_first_of("eE"); epos != std::string_view::npos) {
    std::string_view exp_text = text.substr(epos + 1);
    text = text.substr(0, epos);
    bool exp_negative = false;
    if (!exp_text.empty() && (exp_text.front() == '+' || exp_text.front() == '-')) {
      exp_negative = exp_text.front() == '-';
      exp_text.remove_prefix(1);
    }
    if (!all_digits(exp_text) || exp_text.size() > 7) return std::nullopt;
    exponent = std::strtol(std::string(exp_text).c_str(), nullptr, 10);
    if (exponent > kMaxExponent) return std::nullopt;
    if (exp_negative) exponent = -exponent;
  }
  std::string_view int_part = text;
  std::string_view frac_part;
  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    int_part = text.substr(0, dot);
    frac_part = text.substr(dot + 1);
  }
  if (int_part.empty() && frac_part.empty()) return std::nullopt;
  if (!int_part.empty() && !all_digits(int_part)) return std::nullopt;
  if (!frac_part.empty() && !all_digits(frac_part)) return std::nullopt;

  std::string digits;
  digits.reserve(int_part.size() + frac_part.size());
  digits.append(int_part);
  digits.append(frac_part);
  BigInt mantissa(digits, 10);
  long scale = static_cast<long>(frac_part.size()) - exponent;

  Rational result;
  if (scale >= 0) {
    result = Rational(mantissa, pow10(static_cast<unsigned long>(scale)));
  } else {
    result = Rational(mantissa * pow10(static_cast<unsigned long>(-scale)));
  }
  result.canonicalize();
  if (negative) result = -result;
  return result;
}

std::string format_fixed(const Rational& value, unsigned digits) {
  BigInt num = abs(value.get_num()) * pow10(digits);
  const BigInt& den = value.get_den();
  BigInt quotient;
  BigInt remainder;
  mpz_fdiv_qr(quotient.get_mpz_t(), remainder.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
  int cmp_half = cmp(BigInt(remainder * 2), den);
  if (cmp_half > 0 || (cmp_half == 0 && mpz_odd_p(quotient.get_mpz_t()) != 0)) ++quotient;

  std::string text = quotient.get_str(10);
  if (digits > 0) {
    if (text.size() <= digits) text.insert(0, digits + 1 - text.size(), '0');
    text.insert(text.size() - digits, ".");
  }
  if (sgn(value) < 0 && sgn(quotient) != 0) text.insert(0, "-");
  return text;
}

std::string format_trimmed(const Rational& value, unsigned digits) {
  std::string text = format_fixed(value, std::max(1u, digits));
  auto dot = text.find('.');
  while (text.size() > dot + 2 && text.back() == '0') text.pop_back();
  return text;
}

std::optional<std::string> format_exact(const Rational& value) {
  BigInt den = value.get_den();
  unsigned twos = 0;
  unsigned fives = 0;
  while (mpz_divisible_ui_p(den.get_mpz_t(), 2) != 0) {
    den /= 2;
    ++twos;
  }
  while (mpz_divisible_ui_p(den.get_mpz_t(), 5) != 0) {
    den /= 5;
    ++fives;
  }
  if (den != 1) return std::nullopt;
  return format_fixed(value, std::max({1u, twos, fives}));
}

Rational log10_approx(const Rational& value, unsigned digits) {
  MpfrValue x(precision_for(digits));
  mpfr_set_q(x.get(), value.get_mpq_t(), MPFR_RNDN);
  mpfr_log10(x.get(), x.get(), MPFR_RNDN);
  Rational out;
  mpfr_get_q(out.get_mpq_t(), x.get());
  return out;
}

Rational exp10_approx(const Rational& exponent, unsigned digits) {
  MpfrValue x(precision_for(digits));
  mpfr_set_q(x.get(), exponent.get_mpq_t(), MPFR_RNDN);
  mpfr_exp10(x.get(), x.get(), MPFR_RNDN);
  Rational out;
  mpfr_get_q(out.get_mpq_t(), x.get());
  return out;
}

}  // namespace mcc
