#include "stieltjes/real.hpp"

#include <algorithm>
#include <memory>

namespace stieltjes {

namespace {

unsigned wider(const Real& a, const Real& b) { return std::max(a.bits(), b.bits()); }

template <class Op>
Real binary(const Real& a, const Real& b, Op op) {
  Real out(wider(a, b));
  op(out.raw(), a.raw(), b.raw(), MPFR_RNDN);
  return out;
}

template <class Op>
Real unary(const Real& a, Op op) {
  Real out(a.bits());
  op(out.raw(), a.raw(), MPFR_RNDN);
  return out;
}

}  // namespace

Real::Real(unsigned bits) {
  mpfr_init2(v_, std::max<mpfr_prec_t>(bits, MPFR_PREC_MIN));
  mpfr_set_zero(v_, 1);
}

Real::Real(double v, unsigned bits) {
  mpfr_init2(v_, std::max<mpfr_prec_t>(bits, MPFR_PREC_MIN));
  mpfr_set_d(v_, v, MPFR_RNDN);
}

Real::Real(const Real& other) {
  mpfr_init2(v_, mpfr_get_prec(other.v_));
  mpfr_set(v_, other.v_, MPFR_RNDN);
}

Real::Real(Real&& other) noexcept {
  mpfr_init2(v_, mpfr_get_prec(other.v_));
  mpfr_swap(v_, other.v_);
}

Real& Real::operator=(const Real& other) {
  if (this != &other) {
    mpfr_set_prec(v_, mpfr_get_prec(other.v_));
    mpfr_set(v_, other.v_, MPFR_RNDN);
  }
  return *this;
}

Real& Real::operator=(Real&& other) noexcept {
  mpfr_swap(v_, other.v_);
  return *this;
}

Real::~Real() { mpfr_clear(v_); }

std::string Real::to_string(int digits) const {
  char* buf = nullptr;
  mpfr_asprintf(&buf, "%.*Rg", digits, v_);
  std::unique_ptr<char, void (*)(char*)> guard(buf, mpfr_free_str);
  return std::string(buf);
}

Real& Real::operator+=(const Real& o) { return *this = *this + o; }
Real& Real::operator-=(const Real& o) { return *this = *this - o; }
Real& Real::operator*=(const Real& o) { return *this = *this * o; }
Real& Real::operator/=(const Real& o) { return *this = *this / o; }
Real& Real::operator+=(double o) {
  mpfr_add_d(v_, v_, o, MPFR_RNDN);
  return *this;
}
Real& Real::operator-=(double o) {
  mpfr_sub_d(v_, v_, o, MPFR_RNDN);
  return *this;
}
Real& Real::operator*=(double o) {
  mpfr_mul_d(v_, v_, o, MPFR_RNDN);
  return *this;
}
Real& Real::operator/=(double o) {
  mpfr_div_d(v_, v_, o, MPFR_RNDN);
  return *this;
}

Real operator+(const Real& a, const Real& b) { return binary(a, b, mpfr_add); }
Real operator-(const Real& a, const Real& b) { return binary(a, b, mpfr_sub); }
Real operator*(const Real& a, const Real& b) { return binary(a, b, mpfr_mul); }
Real operator/(const Real& a, const Real& b) { return binary(a, b, mpfr_div); }
Real operator+(const Real& a, double b) { return Real(a) += b; }
Real operator-(const Real& a, double b) { return Real(a) -= b; }
Real operator*(const Real& a, double b) { return Real(a) *= b; }
Real operator/(const Real& a, double b) { return Real(a) /= b; }
Real operator+(double a, const Real& b) { return Real(b) += a; }
Real operator-(double a, const Real& b) {
  Real out(b.bits());
  mpfr_d_sub(out.raw(), a, b.raw(), MPFR_RNDN);
  return out;
}
Real operator*(double a, const Real& b) { return Real(b) *= a; }
Real operator/(double a, const Real& b) {
  Real out(b.bits());
  mpfr_d_div(out.raw(), a, b.raw(), MPFR_RNDN);
  return out;
}
Real operator-(const Real& a) { return unary(a, mpfr_neg); }

bool operator<(const Real& a, const Real& b) { return mpfr_less_p(a.raw(), b.raw()) != 0; }
bool operator>(const Real& a, const Real& b) { return mpfr_greater_p(a.raw(), b.raw()) != 0; }
bool operator<=(const Real& a, const Real& b) { return mpfr_lessequal_p(a.raw(), b.raw()) != 0; }
bool operator>=(const Real& a, const Real& b) { return mpfr_greaterequal_p(a.raw(), b.raw()) != 0; }
bool operator==(const Real& a, const Real& b) { return mpfr_equal_p(a.raw(), b.raw()) != 0; }

Real abs(const Real& a) { return unary(a, mpfr_abs); }
Real exp(const Real& a) { return unary(a, mpfr_exp); }
Real log(const Real& a) { return unary(a, mpfr_log); }
Real sqrt(const Real& a) { return unary(a, mpfr_sqrt); }
Real sin(const Real& a) { return unary(a, mpfr_sin); }
Real pow(const Real& a, const Real& b) { return binary(a, b, mpfr_pow); }
Real pow(const Real& a, double b) { return pow(a, Real(b, a.bits())); }

Real pow(const Real& a, long n) {
  Real out(a.bits());
  mpfr_pow_si(out.raw(), a.raw(), n, MPFR_RNDN);
  return out;
}

Real max(const Real& a, const Real& b) { return binary(a, b, mpfr_max); }

Real ldexp(const Real& a, long e) {
  Real out(a.bits());
  mpfr_mul_2si(out.raw(), a.raw(), e, MPFR_RNDN);
  return out;
}

Real factorial(unsigned long n, unsigned bits) {
  Real out(bits);
  mpfr_fac_ui(out.raw(), n, MPFR_RNDN);
  return out;
}

Real unit_roundoff(unsigned bits) { return ldexp(Real(1.0, bits), -static_cast<long>(bits)); }

}  // namespace stieltjes
