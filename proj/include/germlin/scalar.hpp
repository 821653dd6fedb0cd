#pragma once

#include <gmpxx.h>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace germlin {

// Complex number with exact rational parts.
struct QC {
    mpq_class re{0}, im{0};

    QC() = default;
    QC(long r) : re(r), im(0) {}
    QC(mpq_class r, mpq_class i = 0) : re(std::move(r)), im(std::move(i)) {
        re.canonicalize();
        im.canonicalize();
    }

    QC& operator+=(const QC& o) { re += o.re; im += o.im; return *this; }
    QC& operator-=(const QC& o) { re -= o.re; im -= o.im; return *this; }
    QC& operator*=(const QC& o) {
        mpq_class r = re * o.re - im * o.im;
        mpq_class i = re * o.im + im * o.re;
        re = r;
        im = i;
        return *this;
    }
    QC& operator/=(const QC& o) {
        mpq_class d = o.re * o.re + o.im * o.im;
        if (d == 0) throw std::domain_error("division by exact zero");
        mpq_class r = (re * o.re + im * o.im) / d;
        mpq_class i = (im * o.re - re * o.im) / d;
        re = r;
        im = i;
        return *this;
    }
};

inline QC operator+(QC a, const QC& b) { return a += b; }
inline QC operator-(QC a, const QC& b) { return a -= b; }
inline QC operator*(QC a, const QC& b) { return a *= b; }
inline QC operator/(QC a, const QC& b) { return a /= b; }
inline QC operator-(const QC& a) { return QC(-a.re, -a.im); }
inline bool operator==(const QC& a, const QC& b) { return a.re == b.re && a.im == b.im; }
inline bool operator!=(const QC& a, const QC& b) { return !(a == b); }

using CD = std::complex<double>;

// Parse a decimal ("-0.125", "3", "1e-3") or fraction ("2/3") string exactly.
mpq_class parse_rational(const std::string& s);
// Finite decimal when the reduced denominator is 2^a 5^b, else "p/q".
std::string format_rational(const mpq_class& q);
std::string format_double(double x);
// Correctly rounded for decimal input, so format_double round-trips.
double parse_double(const std::string& s);

template <class C>
struct scalar_traits;

template <>
struct scalar_traits<QC> {
    static constexpr bool exact = true;
    static const char* mode_name() { return "exact"; }
    static QC zero() { return QC(); }
    static QC one() { return QC(1); }
    static QC from_int(long k) { return QC(k); }
    static QC from_rational(const mpq_class& q) { return QC(q, 0); }
    static bool is_zero(const QC& z) { return z.re == 0 && z.im == 0; }
    static mpq_class norm2_exact(const QC& z) { return z.re * z.re + z.im * z.im; }
    static double norm2(const QC& z) { return norm2_exact(z).get_d(); }
    static double abs(const QC& z) { return std::sqrt(norm2(z)); }
    static CD to_cd(const QC& z) { return CD(z.re.get_d(), z.im.get_d()); }
    static QC conj(const QC& z) { return QC(z.re, -z.im); }
    static QC parse(const std::string& re, const std::string& im) {
        return QC(parse_rational(re), parse_rational(im));
    }
    static std::string re_str(const QC& z) { return format_rational(z.re); }
    static std::string im_str(const QC& z) { return format_rational(z.im); }
    // a larger in modulus than b
    static bool abs_greater(const QC& a, const QC& b) { return norm2_exact(a) > norm2_exact(b); }
};

template <>
struct scalar_traits<CD> {
    static constexpr bool exact = false;
    static const char* mode_name() { return "float"; }
    static CD zero() { return CD(0.0, 0.0); }
    static CD one() { return CD(1.0, 0.0); }
    static CD from_int(long k) { return CD(static_cast<double>(k), 0.0); }
    static CD from_rational(const mpq_class& q) { return CD(q.get_d(), 0.0); }
    static bool is_zero(const CD& z) { return z.real() == 0.0 && z.imag() == 0.0; }
    static double norm2(const CD& z) { return std::norm(z); }
    static double abs(const CD& z) { return std::abs(z); }
    static CD to_cd(const CD& z) { return z; }
    static CD conj(const CD& z) { return std::conj(z); }
    static CD parse(const std::string& re, const std::string& im) {
        return CD(parse_double(re), parse_double(im));
    }
    static std::string re_str(const CD& z) { return format_double(z.real()); }
    static std::string im_str(const CD& z) { return format_double(z.imag()); }
    static bool abs_greater(const CD& a, const CD& b) { return std::norm(a) > std::norm(b); }
};

template <class C>
C ipow(const C& base, int e) {
    C acc = scalar_traits<C>::one();
    if (e >= 0) {
        for (int k = 0; k < e; ++k) acc *= base;
    } else {
        C inv = scalar_traits<C>::one() / base;
        for (int k = 0; k < -e; ++k) acc *= inv;
    }
    return acc;
}

}  // namespace germlin
