#include "fraclab/rat.hpp"

namespace fraclab {

Rat parse_rat(const std::string& s) {
  if (s.empty()) throw DomainError("empty rational literal");
  auto e_pos = s.find_first_of("eE");
  if (e_pos != std::string::npos && s.find('/') == std::string::npos) {
    // scientific notation, exact: mantissa * 10^exponent
    std::string mant = s.substr(0, e_pos);
    std::string exp_str = s.substr(e_pos + 1);
    if (mant.empty() || exp_str.empty())
      throw DomainError("malformed scientific literal: " + s);
    long exp;
    try {
      std::size_t used = 0;
      exp = std::stol(exp_str, &used);
      if (used != exp_str.size())
        throw DomainError("malformed exponent: " + s);
    } catch (const std::invalid_argument&) {
      throw DomainError("malformed exponent: " + s);
    }
    Rat base = parse_rat(mant);
    Rat scale = pow_rat(Rat(10), exp);
    return base * scale;
  }
  auto dot = s.find('.');
  if (dot != std::string::npos) {
    // Exact decimal: sign, integer part, fractional part.
    std::string digits = s.substr(0, dot) + s.substr(dot + 1);
    std::size_t frac_len = s.size() - dot - 1;
    if (frac_len == 0) throw DomainError("malformed decimal: " + s);
    for (std::size_t i = 0; i < digits.size(); ++i) {
      char c = digits[i];
      if (!(std::isdigit(static_cast<unsigned char>(c)) ||
            (i == 0 && (c == '-' || c == '+'))))
        throw DomainError("malformed decimal: " + s);
    }
    Int num(digits, 10);
    Int den = pow_int(10, frac_len);
    Rat r(num, den);
    r.canonicalize();
    return r;
  }
  try {
    Rat r(s);
    r.canonicalize();
    if (r.get_den() == 0) throw DomainError("zero denominator: " + s);
    return r;
  } catch (const std::invalid_argument&) {
    throw DomainError("malformed rational: " + s);
  }
}

std::string rat_str(const Rat& x) {
  if (x.get_den() == 1) return x.get_num().get_str();
  return x.get_num().get_str() + "/" + x.get_den().get_str();
}

Rat pow_rat(const Rat& base, long e) {
  if (e == 0) return Rat(1);
  if (base == 0) {
    if (e < 0) throw DomainError("0 raised to a negative power");
    return Rat(0);
  }
  Rat b = e > 0 ? base : Rat(1) / base;
  unsigned long n = e > 0 ? static_cast<unsigned long>(e)
                          : static_cast<unsigned long>(-e);
  Rat acc(1);
  while (n) {
    if (n & 1) acc *= b;
    b *= b;
    n >>= 1;
  }
  return acc;
}

Int pow_int(unsigned long base, unsigned long e) {
  Int r;
  mpz_ui_pow_ui(r.get_mpz_t(), base, e);
  return r;
}

Rat sqrt_upper(const Rat& x) {
  if (x < 0) throw DomainError("sqrt of negative rational");
  if (x == 0) return Rat(0);
  // sqrt(a/b) <= (isqrt(a*b)+1)/b, exact when a*b is a perfect square.
  Int prod = x.get_num() * x.get_den();
  Int root;
  mpz_sqrt(root.get_mpz_t(), prod.get_mpz_t());
  if (root * root != prod) root += 1;
  Rat r(root, x.get_den());
  r.canonicalize();
  return r;
}

std::size_t Rng::next_weighted(const std::vector<Rat>& cum) {
  if (cum.empty()) throw DomainError("empty weight vector");
  // Draw a uniform rational in [0, total) with 64 dyadic bits, then locate
  // the interval. 64 bits vastly exceeds any weight resolution we use.
  Rat total = cum.back();
  Rat u = make_rat(Int(next_u64()), pow_int(2, 64)) * total;
  std::size_t lo = 0, hi = cum.size() - 1;
  while (lo < hi) {
    std::size_t mid = (lo + hi) / 2;
    if (u < cum[mid]) hi = mid; else lo = mid + 1;
  }
  return lo;
}

}  // namespace fraclab
