#include "edg/extreal.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "edg/errors.hpp"

namespace edg {

double ExtReal::value() const {
    if (kind_ != Kind::Finite) throw RangeError("ExtReal::value on an infinite value");
    return v_;
}

double ExtReal::to_double() const {
    switch (kind_) {
        case Kind::PosInf: return std::numeric_limits<double>::infinity();
        case Kind::NegInf: return -std::numeric_limits<double>::infinity();
        default: return v_;
    }
}

std::string ExtReal::str() const {
    if (kind_ == Kind::PosInf) return "+inf";
    if (kind_ == Kind::NegInf) return "-inf";
    std::ostringstream os;
    os.precision(17);
    os << v_;
    return os.str();
}

ExtReal operator+(ExtReal a, ExtReal b) {
    if (a.finite() && b.finite()) return ExtReal(a.v_ + b.v_);
    if ((a.is_pos_inf() && b.is_neg_inf()) || (a.is_neg_inf() && b.is_pos_inf()))
        throw RangeError("ExtReal: +inf + -inf is undefined");
    return a.finite() ? b : a;
}

ExtReal operator-(ExtReal a) {
    if (a.is_pos_inf()) return ExtReal::neg_inf();
    if (a.is_neg_inf()) return ExtReal::pos_inf();
    return ExtReal(-a.v_);
}

ExtReal operator*(ExtReal a, ExtReal b) {
    if (a.finite() && b.finite()) return ExtReal(a.v_ * b.v_);
    auto sign = [](ExtReal x) {
        if (x.is_pos_inf()) return 1;
        if (x.is_neg_inf()) return -1;
        return x.v_ > 0 ? 1 : (x.v_ < 0 ? -1 : 0);
    };
    int s = sign(a) * sign(b);
    if (s == 0) return ExtReal(0.0);
    return s > 0 ? ExtReal::pos_inf() : ExtReal::neg_inf();
}

bool operator==(ExtReal a, ExtReal b) {
    if (a.kind_ != b.kind_) return false;
    return !a.finite() || a.v_ == b.v_;
}

bool operator<(ExtReal a, ExtReal b) {
    if (a.is_neg_inf()) return !b.is_neg_inf();
    if (a.is_pos_inf()) return false;
    if (b.is_pos_inf()) return true;
    if (b.is_neg_inf()) return false;
    return a.v_ < b.v_;
}

}  // namespace edg
