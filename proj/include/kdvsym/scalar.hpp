#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

#include "kdvsym/error.hpp"

namespace kdvsym {

// Arbitrary-precision rational; mpq_class keeps num/den canonical after every operation.
using Scalar = mpq_class;

inline std::string to_string(const Scalar& q) { return q.get_str(); }

// Accepts "p", "-p", "p/q" and finite decimals ("0.25" -> 1/4).
inline Scalar parse_scalar(std::string_view text) {
    std::string s(text);
    if (s.empty()) throw Error("empty rational literal");
    auto dot = s.find('.');
    Scalar out;
    try {
        if (dot == std::string::npos) {
            out = Scalar(s);
        } else {
            std::string digits = s.substr(0, dot) + s.substr(dot + 1);
            mpz_class den = 1;
            for (std::size_t i = dot + 1; i < s.size(); ++i) den *= 10;
            out = Scalar(mpz_class(digits.empty() ? "0" : digits), den);
        }
    } catch (const std::invalid_argument&) {
        throw Error("malformed rational literal '" + s + "'");
    }
    out.canonicalize();
    return out;
}

inline bool is_integer(const Scalar& q) { return q.get_den() == 1; }

}  // namespace kdvsym
