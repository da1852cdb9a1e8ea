#include "qakns/scalar.hpp"

#include "qakns/errors.hpp"

#include <cctype>

namespace qakns {

namespace {

bool is_integer_text(std::string_view s)
{
    if (s.empty()) return false;
    size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (i == s.size()) return false;
    for (; i < s.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    return true;
}

std::string_view trim(std::string_view s)
{
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

} // namespace

Scalar parse_scalar(std::string_view text)
{
    std::string_view t = trim(text);
    auto slash = t.find('/');
    std::string_view num = trim(t.substr(0, slash));
    std::string_view den = slash == std::string_view::npos ? std::string_view("1") : trim(t.substr(slash + 1));
    if (!is_integer_text(num) || !is_integer_text(den) || den[0] == '-' || den[0] == '+')
        throw ConfigError("not a rational number: \"" + std::string(text) + "\"");
    std::string n(num.front() == '+' ? num.substr(1) : num);
    mpz_class nz(n, 10), dz(std::string(den), 10);
    if (dz == 0) throw ConfigError("zero denominator: \"" + std::string(text) + "\"");
    Scalar r(nz, dz);
    r.canonicalize();
    return r;
}

std::string to_string(const Scalar& s) { return s.get_str(); }

Scalar power(const Scalar& base, int exponent)
{
    if (exponent < 0) {
        if (base == 0) throw Error("zero raised to a negative power");
        return Scalar(1) / power(base, -exponent);
    }
    Scalar r(1);
    mpz_pow_ui(r.get_num_mpz_t(), base.get_num_mpz_t(), static_cast<unsigned long>(exponent));
    mpz_pow_ui(r.get_den_mpz_t(), base.get_den_mpz_t(), static_cast<unsigned long>(exponent));
    r.canonicalize();
    return r;
}

Scalar q_number(int k, const Scalar& q)
{
    Scalar r(0), p(1);
    for (int i = 0; i < k; ++i) {
        r += p;
        p *= q;
    }
    return r;
}

Scalar q_pochhammer(int k, const Scalar& q)
{
    Scalar r(1), p(1);
    for (int i = 1; i <= k; ++i) {
        p *= q;
        r *= Scalar(1) - p;
    }
    return r;
}

Scalar abs(const Scalar& s) { return s < 0 ? Scalar(-s) : s; }

} // namespace qakns
