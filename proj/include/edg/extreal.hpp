#pragma once

#include <string>

namespace edg {

/**
 * Extended real number with an explicit infinity state.
 *
 * Products follow the measure-theoretic table: 0 * (+-inf) = 0, a * (+inf)
 * carries the sign of a. The sum (+inf) + (-inf) is undefined and throws.
 */
class ExtReal {
public:
    enum class Kind { Finite, PosInf, NegInf };

    constexpr ExtReal() = default;
    constexpr ExtReal(double v) : kind_(Kind::Finite), v_(v) {}  // NOLINT implicit on purpose

    static constexpr ExtReal pos_inf() { return ExtReal(Kind::PosInf); }
    static constexpr ExtReal neg_inf() { return ExtReal(Kind::NegInf); }

    constexpr Kind kind() const { return kind_; }
    constexpr bool finite() const { return kind_ == Kind::Finite; }
    constexpr bool is_pos_inf() const { return kind_ == Kind::PosInf; }
    constexpr bool is_neg_inf() const { return kind_ == Kind::NegInf; }

    /// Finite value; throws for infinities.
    double value() const;
    /// IEEE image, only for output.
    double to_double() const;
    std::string str() const;

    friend ExtReal operator+(ExtReal a, ExtReal b);
    friend ExtReal operator-(ExtReal a);
    friend ExtReal operator-(ExtReal a, ExtReal b) { return a + (-b); }
    friend ExtReal operator*(ExtReal a, ExtReal b);
    ExtReal& operator+=(ExtReal o) { return *this = *this + o; }

    friend bool operator==(ExtReal a, ExtReal b);
    friend bool operator<(ExtReal a, ExtReal b);
    friend bool operator<=(ExtReal a, ExtReal b) { return a < b || a == b; }
    friend bool operator>(ExtReal a, ExtReal b) { return b < a; }
    friend bool operator>=(ExtReal a, ExtReal b) { return b <= a; }

private:
    constexpr explicit ExtReal(Kind k) : kind_(k) {}
    Kind kind_ = Kind::Finite;
    double v_ = 0.0;
};

}  // namespace edg
