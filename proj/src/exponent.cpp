#include "specrad/exponent.hpp"

#include <charconv>
#include <cmath>
#include <numeric>

#include "specrad/errors.hpp"

namespace specrad {

Rational Rational::make(std::int64_t n, std::int64_t d) {
    if (d == 0)
        throw InvalidInput("zero denominator");
    if (d < 0) {
        n = -n;
        d = -d;
    }
    std::int64_t g = std::gcd(n < 0 ? -n : n, d);
    if (g == 0)
        g = 1;
    return {n / g, d / g};
}

Rational operator+(Rational a, Rational b) { return Rational::make(a.num * b.den + b.num * a.den, a.den * b.den); }
Rational operator-(Rational a, Rational b) { return Rational::make(a.num * b.den - b.num * a.den, a.den * b.den); }
Rational operator*(Rational a, Rational b) { return Rational::make(a.num * b.num, a.den * b.den); }
Rational operator/(Rational a, Rational b) { return Rational::make(a.num * b.den, a.den * b.num); }
bool operator<(Rational a, Rational b) { return a.num * b.den < b.num * a.den; }

std::string Rational::str() const {
    return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
}

Exponent::Exponent(Rational p) : p_(Rational::make(p.num, p.den)) {
    if (p_ < Rational{1, 1})
        throw InvalidInput("exponent must be >= 1, got " + p_.str());
}

Exponent Exponent::infinity() {
    Exponent e;
    e.infinite_ = true;
    e.p_ = {1, 0};
    return e;
}

Exponent Exponent::from_double(double p) {
    if (std::isinf(p))
        return infinity();
    // Exact for values with up to six decimal places.
    for (std::int64_t d : {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 12, 16, 100, 1000, 1000000}) {
        double n = std::round(p * static_cast<double>(d));
        if (std::abs(n / static_cast<double>(d) - p) < 1e-12)
            return Exponent(Rational::make(static_cast<std::int64_t>(n), d));
    }
    throw InvalidInput("exponent " + std::to_string(p) + " has no short rational form");
}

Exponent Exponent::parse(std::string_view text) {
    if (text == "inf" || text == "infinity")
        return infinity();
    auto slash = text.find('/');
    if (slash != std::string_view::npos) {
        std::int64_t n = 0, d = 0;
        auto r1 = std::from_chars(text.data(), text.data() + slash, n);
        auto r2 = std::from_chars(text.data() + slash + 1, text.data() + text.size(), d);
        if (r1.ec != std::errc() || r2.ec != std::errc() || r1.ptr != text.data() + slash ||
            r2.ptr != text.data() + text.size())
            throw InvalidInput("cannot parse exponent '" + std::string(text) + "'");
        return Exponent(Rational::make(n, d));
    }
    double v = 0;
    try {
        std::size_t used = 0;
        v = std::stod(std::string(text), &used);
        if (used != text.size())
            throw InvalidInput("");
    } catch (const std::exception&) {
        throw InvalidInput("cannot parse exponent '" + std::string(text) + "'");
    }
    return from_double(v);
}

double Exponent::value() const { return infinite_ ? INFINITY : p_.value(); }

Rational Exponent::reciprocal() const { return infinite_ ? Rational{0, 1} : Rational::make(p_.den, p_.num); }

Exponent Exponent::conjugate() const {
    if (infinite_)
        return Exponent(Rational{1, 1});
    if (p_ == Rational{1, 1})
        return infinity();
    return Exponent(Rational::make(p_.num, p_.num - p_.den));
}

std::string Exponent::str() const { return infinite_ ? "inf" : p_.str(); }

InterpolationParams InterpolationParams::make(Exponent p1, Exponent p2, Exponent p3) {
    if (p1.is_infinite() || p2.is_infinite() || p3.is_infinite())
        throw InvalidInput("interpolation exponents must be finite");
    Rational two{2, 1};
    if (!(p1.rational() < p2.rational() && p2.rational() < p3.rational()) || two < p3.rational())
        throw InvalidInput("interpolation needs 1 <= p1 < p2 < p3 <= 2");
    InterpolationParams ip;
    ip.p1 = p1;
    ip.p2 = p2;
    ip.p3 = p3;
    ip.theta = (p1.reciprocal() - p2.reciprocal()) / (p1.reciprocal() - p3.reciprocal());
    ip.q1 = p1.conjugate();
    ip.q2 = p2.conjugate();
    ip.q3 = p3.conjugate();
    return ip;
}

}  // namespace specrad
