#include "germlin/scalar.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>

namespace germlin {

namespace {

mpz_class pow10(unsigned long e) {
    mpz_class r;
    mpz_ui_pow_ui(r.get_mpz_t(), 10, e);
    return r;
}

std::string trim(const std::string& s) {
    size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

}  // namespace

mpq_class parse_rational(const std::string& raw) {
    std::string s = trim(raw);
    if (s.empty()) throw std::invalid_argument("empty number");
    auto slash = s.find('/');
    if (slash != std::string::npos) {
        mpq_class num = parse_rational(s.substr(0, slash));
        mpq_class den = parse_rational(s.substr(slash + 1));
        if (den == 0) throw std::invalid_argument("zero denominator: " + s);
        mpq_class q = num / den;
        q.canonicalize();
        return q;
    }
    size_t i = 0;
    bool neg = false;
    if (s[i] == '+' || s[i] == '-') {
        neg = s[i] == '-';
        ++i;
    }
    std::string intpart, fracpart;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) intpart += s[i++];
    if (i < s.size() && s[i] == '.') {
        ++i;
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) fracpart += s[i++];
    }
    if (intpart.empty() && fracpart.empty()) throw std::invalid_argument("bad number: " + s);
    long exp10 = 0;
    if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
        ++i;
        std::string e = s.substr(i);
        if (e.empty()) throw std::invalid_argument("bad exponent: " + s);
        size_t used = 0;
        exp10 = std::stol(e, &used);
        if (used != e.size()) throw std::invalid_argument("bad exponent: " + s);
        i = s.size();
    }
    if (i != s.size()) throw std::invalid_argument("bad number: " + s);
    mpz_class digits(intpart + fracpart, 10);
    long scale = exp10 - static_cast<long>(fracpart.size());
    mpq_class q;
    if (scale >= 0) {
        q = mpq_class(digits * pow10(static_cast<unsigned long>(scale)));
    } else {
        q = mpq_class(digits, pow10(static_cast<unsigned long>(-scale)));
    }
    q.canonicalize();
    if (neg) q = -q;
    return q;
}

std::string format_rational(const mpq_class& q) {
    mpz_class den = q.get_den();
    unsigned long twos = 0, fives = 0;
    mpz_class d = den;
    while (mpz_divisible_ui_p(d.get_mpz_t(), 2)) { d /= 2; ++twos; }
    while (mpz_divisible_ui_p(d.get_mpz_t(), 5)) { d /= 5; ++fives; }
    if (d != 1) return q.get_str();
    unsigned long k = std::max(twos, fives);
    mpz_class scaled = q.get_num() * (pow10(k) / den);
    bool neg = scaled < 0;
    if (neg) scaled = -scaled;
    std::string digits = scaled.get_str();
    if (k > 0) {
        if (digits.size() <= k) digits = std::string(k - digits.size() + 1, '0') + digits;
        digits.insert(digits.size() - k, ".");
    }
    return neg ? "-" + digits : digits;
}

double parse_double(const std::string& raw) {
    std::string s = trim(raw);
    if (s.find('/') != std::string::npos) {
        mpq_class q = parse_rational(s);
        return q.get_num().get_d() / q.get_den().get_d();
    }
    parse_rational(s);  // validates the syntax
    return std::strtod(s.c_str(), nullptr);
}

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace germlin
