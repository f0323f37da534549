#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <variant>

namespace refauction {

using BigRational = boost::multiprecision::cpp_rational;
__extension__ using Int128 = __int128;
__extension__ using UInt128 = unsigned __int128;

/// Exact signed rational amount used for valuations, bids, payments and
/// utilities.
///
/// Values whose reduced numerator and denominator fit in 64 bits are kept
/// inline and compared with 128-bit cross multiplication; anything larger
/// transparently moves to an arbitrary-precision rational. The representation
/// is always canonical, so two equal amounts compare equal regardless of how
/// they were produced.
class Money {
public:
    Money() = default;
    Money(std::int64_t integer) : rep_(Small{integer, 1}) {}  // NOLINT: implicit by design of arithmetic
    explicit Money(const BigRational& value);

    static Money fraction(std::int64_t numerator, std::int64_t denominator);

    /// Parses "12", "-3", "0.25" or "7/2". Throws std::invalid_argument.
    static Money parse(std::string_view text);

    /// Exact rendering: an integer, a terminating decimal, or "p/q".
    std::string to_string() const;

    /// Fixed-point rendering with `scale` fractional digits, rounded half away
    /// from zero.
    std::string to_fixed(int scale) const;

    bool is_zero() const;
    bool is_negative() const;
    bool is_positive() const { return !is_zero() && !is_negative(); }
    bool is_integer() const;

    BigRational to_big() const;

    friend Money operator+(const Money& a, const Money& b);
    friend Money operator-(const Money& a, const Money& b);
    friend Money operator*(const Money& a, const Money& b);
    friend Money operator/(const Money& a, const Money& b);
    Money operator-() const;

    Money& operator+=(const Money& other) { return *this = *this + other; }
    Money& operator-=(const Money& other) { return *this = *this - other; }

    friend bool operator==(const Money& a, const Money& b);
    friend std::strong_ordering operator<=>(const Money& a, const Money& b);

    friend std::ostream& operator<<(std::ostream& os, const Money& m) { return os << m.to_string(); }

private:
    struct Small {
        std::int64_t num = 0;
        std::int64_t den = 1;
    };

    static Money from_wide(Int128 num, Int128 den);
    static Money from_big(BigRational value);

    std::variant<Small, BigRational> rep_{Small{}};
};

inline const Money& max_of(const Money& a, const Money& b) { return a < b ? b : a; }
inline const Money& min_of(const Money& a, const Money& b) { return b < a ? b : a; }

}  // namespace refauction
