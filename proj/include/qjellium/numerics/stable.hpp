#pragma once

#include <algorithm>
#include <cmath>

namespace qjellium::num {

// ln(1 + e^x) without overflow/cancellation on either side
inline double softplus(double x) {
    return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

// ln(1 - e^{-a}) for a > 0 (accurate in both the a->0 and a->inf regimes)
inline double log1mexp(double a) {
    return a > 0.6931471805599453 ? std::log1p(-std::exp(-a)) : std::log(-std::expm1(-a));
}

// ln(e^{la} + e^{lb}) given the two logarithms
inline double logaddexp(double la, double lb) {
    if (la == -std::numeric_limits<double>::infinity()) return lb;
    if (lb == -std::numeric_limits<double>::infinity()) return la;
    const double m = std::max(la, lb);
    return m + std::log1p(std::exp(-std::abs(la - lb)));
}

} // namespace qjellium::num
