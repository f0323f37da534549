#include "refauction/money.hpp"

#include <cctype>
#include <limits>
#include <stdexcept>

namespace refauction {

namespace {

using BigInt = boost::multiprecision::cpp_int;

UInt128 gcd_u128(UInt128 a, UInt128 b) {
    while (b != 0) {
        const UInt128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

constexpr Int128 kMin64 = std::numeric_limits<std::int64_t>::min();
constexpr Int128 kMax64 = std::numeric_limits<std::int64_t>::max();

bool fits64(Int128 v) { return v >= kMin64 && v <= kMax64; }

BigInt to_bigint(Int128 v) {
    const bool neg = v < 0;
    UInt128 u = neg ? static_cast<UInt128>(-(v + 1)) + 1 : static_cast<UInt128>(v);
    BigInt hi = static_cast<std::uint64_t>(u >> 64);
    BigInt out = (hi << 64) | BigInt(static_cast<std::uint64_t>(u));
    return neg ? BigInt(-out) : out;
}

bool big_fits64(const BigInt& v) {
    return v >= BigInt(std::numeric_limits<std::int64_t>::min()) &&
           v <= BigInt(std::numeric_limits<std::int64_t>::max());
}

}  // namespace

Money::Money(const BigRational& value) { *this = from_big(value); }

Money Money::fraction(std::int64_t numerator, std::int64_t denominator) {
    if (denominator == 0) {
        throw std::domain_error("Money: zero denominator");
    }
    return from_wide(numerator, denominator);
}

Money Money::from_wide(Int128 num, Int128 den) {
    if (den < 0) {
        num = -num;
        den = -den;
    }
    if (num == 0) {
        return Money{};
    }
    const UInt128 abs_num =
        num < 0 ? static_cast<UInt128>(-(num + 1)) + 1 : static_cast<UInt128>(num);
    const UInt128 g = gcd_u128(abs_num, static_cast<UInt128>(den));
    if (g > 1) {
        num /= static_cast<Int128>(g);
        den /= static_cast<Int128>(g);
    }
    Money out;
    if (fits64(num) && fits64(den)) {
        out.rep_ = Small{static_cast<std::int64_t>(num), static_cast<std::int64_t>(den)};
    } else {
        out.rep_ = BigRational(to_bigint(num), to_bigint(den));
    }
    return out;
}

Money Money::from_big(BigRational value) {
    Money out;
    const BigInt num = boost::multiprecision::numerator(value);
    const BigInt den = boost::multiprecision::denominator(value);
    if (big_fits64(num) && big_fits64(den)) {
        out.rep_ = Small{num.convert_to<std::int64_t>(), den.convert_to<std::int64_t>()};
    } else {
        out.rep_ = std::move(value);
    }
    return out;
}

BigRational Money::to_big() const {
    if (const auto* s = std::get_if<Small>(&rep_)) {
        return BigRational(BigInt(s->num), BigInt(s->den));
    }
    return std::get<BigRational>(rep_);
}

Money Money::parse(std::string_view text) {
    auto fail = [&](const char* why) {
        return std::invalid_argument("invalid amount '" + std::string(text) + "': " + why);
    };
    if (text.empty()) {
        throw fail("empty");
    }
    std::size_t pos = 0;
    bool negative = false;
    if (text[0] == '-' || text[0] == '+') {
        negative = text[0] == '-';
        pos = 1;
    }
    auto digits = [&](std::size_t from) {
        std::size_t end = from;
        while (end < text.size() && std::isdigit(static_cast<unsigned char>(text[end]))) {
            ++end;
        }
        return end;
    };
    const std::size_t int_end = digits(pos);
    if (int_end == pos) {
        throw fail("expected digits");
    }
    BigInt numerator(std::string(text.substr(pos, int_end - pos)));
    BigInt denominator = 1;
    if (int_end == text.size()) {
        // plain integer
    } else if (text[int_end] == '.') {
        const std::size_t frac_end = digits(int_end + 1);
        if (frac_end == int_end + 1 || frac_end != text.size()) {
            throw fail("malformed decimal");
        }
        const auto frac = text.substr(int_end + 1, frac_end - int_end - 1);
        for (char c : frac) {
            numerator = numerator * 10 + (c - '0');
            denominator *= 10;
        }
    } else if (text[int_end] == '/') {
        const std::size_t den_end = digits(int_end + 1);
        if (den_end == int_end + 1 || den_end != text.size()) {
            throw fail("malformed fraction");
        }
        denominator = BigInt(std::string(text.substr(int_end + 1, den_end - int_end - 1)));
        if (denominator == 0) {
            throw fail("zero denominator");
        }
    } else {
        throw fail("unexpected character");
    }
    if (negative) {
        numerator = -numerator;
    }
    return from_big(BigRational(numerator, denominator));
}

std::string Money::to_string() const {
    const BigRational v = to_big();
    const BigInt num = boost::multiprecision::numerator(v);
    const BigInt den = boost::multiprecision::denominator(v);
    if (den == 1) {
        return num.str();
    }
    BigInt rest = den;
    int twos = 0;
    int fives = 0;
    while (rest % 2 == 0) {
        rest /= 2;
        ++twos;
    }
    while (rest % 5 == 0) {
        rest /= 5;
        ++fives;
    }
    if (rest != 1) {
        return num.str() + "/" + den.str();
    }
    const int places = std::max(twos, fives);
    BigInt scale = 1;
    for (int k = 0; k < places; ++k) {
        scale *= 10;
    }
    const BigInt scaled = abs(num) * (scale / den);
    std::string digits = scaled.str();
    if (static_cast<int>(digits.size()) <= places) {
        digits.insert(0, static_cast<std::size_t>(places) + 1 - digits.size(), '0');
    }
    digits.insert(digits.size() - static_cast<std::size_t>(places), ".");
    return (num < 0 ? "-" : "") + digits;
}

std::string Money::to_fixed(int scale) const {
    if (scale < 0) {
        throw std::invalid_argument("Money::to_fixed: negative scale");
    }
    const BigRational v = to_big();
    const BigInt num = boost::multiprecision::numerator(v);
    const BigInt den = boost::multiprecision::denominator(v);
    BigInt pow10 = 1;
    for (int k = 0; k < scale; ++k) {
        pow10 *= 10;
    }
    const BigInt rounded = (2 * abs(num) * pow10 + den) / (2 * den);
    std::string digits = rounded.str();
    if (scale > 0) {
        if (static_cast<int>(digits.size()) <= scale) {
            digits.insert(0, static_cast<std::size_t>(scale) + 1 - digits.size(), '0');
        }
        digits.insert(digits.size() - static_cast<std::size_t>(scale), ".");
    }
    return (num < 0 && rounded != 0 ? "-" : "") + digits;
}

bool Money::is_zero() const {
    if (const auto* s = std::get_if<Small>(&rep_)) {
        return s->num == 0;
    }
    return std::get<BigRational>(rep_) == 0;
}

bool Money::is_negative() const {
    if (const auto* s = std::get_if<Small>(&rep_)) {
        return s->num < 0;
    }
    return std::get<BigRational>(rep_) < 0;
}

bool Money::is_integer() const {
    if (const auto* s = std::get_if<Small>(&rep_)) {
        return s->den == 1;
    }
    return boost::multiprecision::denominator(std::get<BigRational>(rep_)) == 1;
}

Money operator+(const Money& a, const Money& b) {
    const auto* x = std::get_if<Money::Small>(&a.rep_);
    const auto* y = std::get_if<Money::Small>(&b.rep_);
    if (x && y) {
        if (x->den == y->den) {
            return Money::from_wide(static_cast<Int128>(x->num) + y->num, x->den);
        }
        return Money::from_wide(static_cast<Int128>(x->num) * y->den + static_cast<Int128>(y->num) * x->den,
                                static_cast<Int128>(x->den) * y->den);
    }
    return Money::from_big(a.to_big() + b.to_big());
}

Money operator-(const Money& a, const Money& b) {
    const auto* x = std::get_if<Money::Small>(&a.rep_);
    const auto* y = std::get_if<Money::Small>(&b.rep_);
    if (x && y) {
        if (x->den == y->den) {
            return Money::from_wide(static_cast<Int128>(x->num) - y->num, x->den);
        }
        return Money::from_wide(static_cast<Int128>(x->num) * y->den - static_cast<Int128>(y->num) * x->den,
                                static_cast<Int128>(x->den) * y->den);
    }
    return Money::from_big(a.to_big() - b.to_big());
}

Money operator*(const Money& a, const Money& b) {
    const auto* x = std::get_if<Money::Small>(&a.rep_);
    const auto* y = std::get_if<Money::Small>(&b.rep_);
    if (x && y) {
        return Money::from_wide(static_cast<Int128>(x->num) * y->num, static_cast<Int128>(x->den) * y->den);
    }
    return Money::from_big(a.to_big() * b.to_big());
}

Money operator/(const Money& a, const Money& b) {
    if (b.is_zero()) {
        throw std::domain_error("Money: division by zero");
    }
    const auto* x = std::get_if<Money::Small>(&a.rep_);
    const auto* y = std::get_if<Money::Small>(&b.rep_);
    if (x && y) {
        return Money::from_wide(static_cast<Int128>(x->num) * y->den, static_cast<Int128>(x->den) * y->num);
    }
    return Money::from_big(a.to_big() / b.to_big());
}

Money Money::operator-() const {
    if (const auto* s = std::get_if<Small>(&rep_)) {
        return from_wide(-static_cast<Int128>(s->num), s->den);
    }
    return from_big(-std::get<BigRational>(rep_));
}

bool operator==(const Money& a, const Money& b) {
    const auto* x = std::get_if<Money::Small>(&a.rep_);
    const auto* y = std::get_if<Money::Small>(&b.rep_);
    if (x && y) {
        return x->num == y->num && x->den == y->den;
    }
    if (x || y) {
        // canonical form: a value that fits inline is never stored as big
        return false;
    }
    return std::get<BigRational>(a.rep_) == std::get<BigRational>(b.rep_);
}

std::strong_ordering operator<=>(const Money& a, const Money& b) {
    const auto* x = std::get_if<Money::Small>(&a.rep_);
    const auto* y = std::get_if<Money::Small>(&b.rep_);
    if (x && y) {
        if (x->den == y->den) {
            return x->num <=> y->num;
        }
        const Int128 lhs = static_cast<Int128>(x->num) * y->den;
        const Int128 rhs = static_cast<Int128>(y->num) * x->den;
        return lhs <=> rhs;
    }
    const BigRational l = a.to_big();
    const BigRational r = b.to_big();
    if (l < r) {
        return std::strong_ordering::less;
    }
    if (r < l) {
        return std::strong_ordering::greater;
    }
    return std::strong_ordering::equal;
}

}  // namespace refauction
