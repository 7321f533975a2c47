#pragma once

#include <mpfr.h>

#include <string>

namespace stieltjes {

/// MPFR number that carries its own precision. Binary operations round to the
/// larger precision of their operands; nothing reads a global default.
class Real {
 public:
  explicit Real(unsigned bits = 128);
  Real(double v, unsigned bits);
  Real(const Real& other);
  Real(Real&& other) noexcept;
  Real& operator=(const Real& other);
  Real& operator=(Real&& other) noexcept;
  ~Real();

  unsigned bits() const { return static_cast<unsigned>(mpfr_get_prec(v_)); }
  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
  std::string to_string(int digits = 20) const;
  bool is_finite() const { return mpfr_number_p(v_) != 0; }
  bool is_zero() const { return mpfr_zero_p(v_) != 0; }
  int sign() const { return mpfr_sgn(v_); }

  mpfr_ptr raw() { return v_; }
  mpfr_srcptr raw() const { return v_; }

  Real& operator+=(const Real& o);
  Real& operator-=(const Real& o);
  Real& operator*=(const Real& o);
  Real& operator/=(const Real& o);
  Real& operator+=(double o);
  Real& operator-=(double o);
  Real& operator*=(double o);
  Real& operator/=(double o);

 private:
  mpfr_t v_;
};

Real operator+(const Real& a, const Real& b);
Real operator-(const Real& a, const Real& b);
Real operator*(const Real& a, const Real& b);
Real operator/(const Real& a, const Real& b);
Real operator+(const Real& a, double b);
Real operator-(const Real& a, double b);
Real operator*(const Real& a, double b);
Real operator/(const Real& a, double b);
Real operator+(double a, const Real& b);
Real operator-(double a, const Real& b);
Real operator*(double a, const Real& b);
Real operator/(double a, const Real& b);
Real operator-(const Real& a);

bool operator<(const Real& a, const Real& b);
bool operator>(const Real& a, const Real& b);
bool operator<=(const Real& a, const Real& b);
bool operator>=(const Real& a, const Real& b);
bool operator==(const Real& a, const Real& b);

Real abs(const Real& a);
Real exp(const Real& a);
Real log(const Real& a);
Real sqrt(const Real& a);
Real sin(const Real& a);
Real pow(const Real& a, const Real& b);
Real pow(const Real& a, double b);
Real pow(const Real& a, long n);
Real max(const Real& a, const Real& b);
/// a * 2^e
Real ldexp(const Real& a, long e);
Real factorial(unsigned long n, unsigned bits);
/// 2^-bits, one unit of relative rounding at that precision.
Real unit_roundoff(unsigned bits);

}  // namespace stieltjes
