#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace qakns {

using Scalar = mpq_class;

// Accepts "p", "-p", "p/q"; the result is canonicalized.
Scalar parse_scalar(std::string_view text);
std::string to_string(const Scalar& s);

Scalar power(const Scalar& base, int exponent);

// [k]_q = 1 + q + ... + q^{k-1}; equals k at q = 1.
Scalar q_number(int k, const Scalar& q);

// (q;q)_k = (1-q)(1-q^2)...(1-q^k)
Scalar q_pochhammer(int k, const Scalar& q);

Scalar abs(const Scalar& s);

} // namespace qakns
