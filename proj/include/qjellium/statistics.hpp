#pragma once

#include <string>

#include "qjellium/errors.hpp"

namespace qjellium {

enum class Statistics { fermi, bose };

// Sign that multiplies the exchange/pairing correction throughout: -1 for Fermi,
// +1 for Bose.  Matches the upper/lower sign convention of the momentum occupation
// 1/(z^{-1} e^{beta p^2} +- 1) via  e^a - quantum_sign.
constexpr double quantum_sign(Statistics s) noexcept {
    return s == Statistics::fermi ? -1.0 : +1.0;
}

inline const char* to_string(Statistics s) noexcept {
    return s == Statistics::fermi ? "fermi" : "bose";
}

inline Statistics statistics_from_string(const std::string& name) {
    if (name == "fermi" || name == "f") return Statistics::fermi;
    if (name == "bose" || name == "b") return Statistics::bose;
    throw domain_error("unknown statistics '" + name + "' (expected fermi|bose)");
}

} // namespace qjellium
