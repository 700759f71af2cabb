#pragma once

#include <gmpxx.h>

#include <cmath>
#include <cstdint>
#include <string>

namespace antsel {

// Exact rational arithmetic for expansion coefficients, pole locations and
// partial-fraction residues. Everything stays in Q until the final conversion
// to floating point, so alternating-sum coefficients never lose digits before
// they are combined.
using Rational = mpq_class;
using BigInt = mpz_class;

inline Rational rat(long num, long den = 1) {
    Rational q(num, den);
    q.canonicalize();
    return q;
}

inline BigInt factorial(unsigned n) {
    BigInt r;
    mpz_fac_ui(r.get_mpz_t(), n);
    return r;
}

inline BigInt binomial(unsigned n, unsigned k) {
    if (k > n) return BigInt(0);
    BigInt r;
    mpz_bin_uiui(r.get_mpz_t(), n, k);
    return r;
}

// long double conversion that keeps the full 64-bit mantissa. mpq_get_d would
// round through double and lose the extra bits the extended accumulators rely on.
inline long double to_long_double(const BigInt& z) {
    int sgn = mpz_sgn(z.get_mpz_t());
    if (sgn == 0) return 0.0L;
    BigInt a = abs(z);
    long shift = 0;
    long bits = static_cast<long>(mpz_sizeinbase(a.get_mpz_t(), 2));
    if (bits > 256) {
        shift = bits - 256;
        a >>= static_cast<unsigned long>(shift);
    }
    long double acc = 0.0L;
    for (std::size_t i = mpz_size(a.get_mpz_t()); i-- > 0;) {
        acc = std::ldexp(acc, GMP_NUMB_BITS);
        acc += static_cast<long double>(mpz_getlimbn(a.get_mpz_t(), i));
    }
    acc = std::ldexp(acc, static_cast<int>(shift));
    return sgn < 0 ? -acc : acc;
}

inline long double to_long_double(const Rational& q) {
    int sgn = mpq_sgn(q.get_mpq_t());
    if (sgn == 0) return 0.0L;
    const BigInt& nu = q.get_num();
    const BigInt& de = q.get_den();
    long bn = static_cast<long>(mpz_sizeinbase(nu.get_mpz_t(), 2));
    long bd = static_cast<long>(mpz_sizeinbase(de.get_mpz_t(), 2));
    long sn = bn > 256 ? bn - 256 : 0;
    long sd = bd > 256 ? bd - 256 : 0;
    BigInt an = abs(nu);
    BigInt ad = de;
    if (sn) an >>= static_cast<unsigned long>(sn);
    if (sd) ad >>= static_cast<unsigned long>(sd);
    long double v = to_long_double(an) / to_long_double(ad);
    v = std::ldexp(v, static_cast<int>(sn - sd));
    return sgn < 0 ? -v : v;
}

inline double to_double(const Rational& q) {
    return static_cast<double>(to_long_double(q));
}

inline std::string to_string(const Rational& q) { return q.get_str(); }

} // namespace antsel
