#ifndef FOPFORGE_BIGNAT_HPP
#define FOPFORGE_BIGNAT_HPP

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

#include "fopforge/errors.hpp"

namespace fopforge {

// Arbitrary-precision natural number. Sizes in reduced instances reach
// 2^(n^8) scale, far past any machine word.
using BigNat = boost::multiprecision::cpp_int;

inline std::string to_decimal(const BigNat& v) { return v.str(); }

inline BigNat from_decimal(const std::string& s) {
    if (s.empty()) throw DomainError("empty decimal string");
    for (char c : s)
        if (c < '0' || c > '9') throw DomainError("not a decimal natural: " + s);
    return BigNat(s);
}

// 2^e as a BigNat.
inline BigNat pow2(std::size_t e) {
    BigNat v = 1;
    return v << e;
}

}  // namespace fopforge

#endif
