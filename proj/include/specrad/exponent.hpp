#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace specrad {

/// Exact rational a/b with b > 0, in lowest terms.
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    static Rational make(std::int64_t n, std::int64_t d);
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    friend bool operator==(const Rational&, const Rational&) = default;
    friend Rational operator+(Rational a, Rational b);
    friend Rational operator-(Rational a, Rational b);
    friend Rational operator*(Rational a, Rational b);
    friend Rational operator/(Rational a, Rational b);
    friend bool operator<(Rational a, Rational b);
    std::string str() const;
};

/// A Lebesgue exponent p in [1, inf], stored exactly so that the conjugate
/// q = p/(p-1) and interpolation parameters carry no rounding drift.
class Exponent {
public:
    Exponent() = default;
    explicit Exponent(Rational p);
    static Exponent infinity();
    static Exponent from_double(double p);
    /// Accepts "3/2", "1.25", "2", "inf".
    static Exponent parse(std::string_view text);

    bool is_infinite() const { return infinite_; }
    /// Undefined for the infinite exponent.
    Rational rational() const { return p_; }
    double value() const;
    /// 1/p, exactly (0 for p = inf).
    Rational reciprocal() const;
    Exponent conjugate() const;
    std::string str() const;

    friend bool operator==(const Exponent&, const Exponent&) = default;

private:
    Rational p_{1, 1};
    bool infinite_ = false;
};

/// Exponent triple p1 < p2 < p3 in [1, 2] with 1/p2 = (1-theta)/p1 + theta/p3.
struct InterpolationParams {
    Exponent p1, p2, p3;
    Rational theta;
    Exponent q1, q2, q3;

    static InterpolationParams make(Exponent p1, Exponent p2, Exponent p3);
    double theta_value() const { return theta.value(); }
};

}  // namespace specrad
