#include "occlab/numeric.hpp"

#include <cctype>
#include <cmath>
#include <stdexcept>

#include "occlab/errors.hpp"

namespace occlab {

std::string to_string(Mode mode)
{
    return mode == Mode::exact ? "exact" : "float";
}

Mode parse_mode(std::string_view text)
{
    if (text == "exact")
        return Mode::exact;
    if (text == "float")
        return Mode::floating;
    throw InvalidArgument("unknown mode '" + std::string(text) + "' (expected exact|float)");
}

namespace {

using boost::multiprecision::mpz_int;

bool all_digits(std::string_view s)
{
    if (s.empty())
        return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c)))
            return false;
    return true;
}

mpz_int pow10(unsigned exponent)
{
    mpz_int result = 1;
    for (unsigned i = 0; i < exponent; ++i)
        result *= 10;
    return result;
}

Rational parse_decimal(std::string_view text, std::string_view original)
{
    auto fail = [&] { return InvalidArgument("malformed number '" + std::string(original) + "'"); };
    bool negative = false;
    if (!text.empty() && (text.front() == '-' || text.front() == '+')) {
        negative = text.front() == '-';
        text.remove_prefix(1);
    }
    long exponent = 0;
    if (auto e = text.find_first_of("eE"); e != std::string_view::npos) {
        std::string_view exp_part = text.substr(e + 1);
        text = text.substr(0, e);
        bool exp_negative = false;
        if (!exp_part.empty() && (exp_part.front() == '-' || exp_part.front() == '+')) {
            exp_negative = exp_part.front() == '-';
            exp_part.remove_prefix(1);
        }
        if (!all_digits(exp_part) || exp_part.size() > 6)
            throw fail();
        exponent = std::stol(std::string(exp_part));
        if (exp_negative)
            exponent = -exponent;
    }
    std::string digits;
    std::size_t frac_digits = 0;
    if (auto dot = text.find('.'); dot != std::string_view::npos) {
        std::string_view int_part = text.substr(0, dot);
        std::string_view frac_part = text.substr(dot + 1);
        if ((int_part.empty() && frac_part.empty()) || (!int_part.empty() && !all_digits(int_part)) ||
            (!frac_part.empty() && !all_digits(frac_part)))
            throw fail();
        digits = std::string(int_part) + std::string(frac_part);
        frac_digits = frac_part.size();
    } else {
        if (!all_digits(text))
            throw fail();
        digits = std::string(text);
    }
    // mpz reads a leading 0 as an octal prefix
    std::size_t nz = digits.find_first_not_of('0');
    mpz_int mantissa(nz == std::string::npos ? std::string("0") : digits.substr(nz));
    long scale = exponent - static_cast<long>(frac_digits);
    Rational value = scale >= 0 ? Rational(mantissa * pow10(static_cast<unsigned>(scale)))
                                : Rational(mantissa) / Rational(pow10(static_cast<unsigned>(-scale)));
    return negative ? Rational(-value) : value;
}

}  // namespace

Rational parse_rational(std::string_view text)
{
    std::string_view original = text;
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front())))
        text.remove_prefix(1);
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back())))
        text.remove_suffix(1);
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        Rational num = parse_decimal(text.substr(0, slash), original);
        Rational den = parse_decimal(text.substr(slash + 1), original);
        if (den == 0)
            throw InvalidArgument("zero denominator in '" + std::string(original) + "'");
        return num / den;
    }
    return parse_decimal(text, original);
}

std::string format_rational(const Rational& value)
{
    return value.str();
}

Rational rational_from_double(double value)
{
    if (!std::isfinite(value))
        throw InvalidArgument("non-finite number");
    int exponent = 0;
    double mantissa = std::frexp(value, &exponent);
    // 53 bits of mantissa scaled to an integer.
    auto scaled = static_cast<long long>(std::ldexp(mantissa, 53));
    exponent -= 53;
    Rational result{boost::multiprecision::mpz_int(scaled)};
    boost::multiprecision::mpz_int two_pow = 1;
    two_pow <<= static_cast<unsigned>(std::abs(exponent));
    if (exponent >= 0)
        result *= Rational(two_pow);
    else
        result /= Rational(two_pow);
    return result;
}

}  // namespace occlab
