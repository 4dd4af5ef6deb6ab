#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace tvlnet {

/// Fixed-point USD/token amount with six decimal places, stored as a signed
/// 64-bit count of micro-units. Addition and subtraction are exact and
/// order-independent, which is what keeps the flow conservation checks
/// byte-for-byte equal; binary floating point would not.
class Decimal {
public:
    static constexpr std::int64_t kScale = 1'000'000;

    constexpr Decimal() = default;

    static constexpr Decimal from_micro(std::int64_t micro) {
        Decimal d;
        d.micro_ = micro;
        return d;
    }

    static Decimal from_int(std::int64_t units) {
        if (units > INT64_MAX / kScale || units < INT64_MIN / kScale)
            throw std::overflow_error("Decimal::from_int overflow");
        return from_micro(units * kScale);
    }

    /// Accepts [-]digits[.digits]. Digits past the sixth fractional place
    /// round half away from zero. Rejects empty input, stray characters,
    /// and exponents.
    static std::optional<Decimal> parse(std::string_view s) {
        if (s.empty()) return std::nullopt;
        bool neg = false;
        std::size_t i = 0;
        if (s[0] == '-' || s[0] == '+') {
            neg = s[0] == '-';
            i = 1;
        }
        if (i >= s.size()) return std::nullopt;
        std::int64_t units = 0;
        bool any_digit = false;
        for (; i < s.size() && s[i] != '.'; ++i) {
            if (s[i] < '0' || s[i] > '9') return std::nullopt;
            if (units > (INT64_MAX - 9) / 10) return std::nullopt;
            units = units * 10 + (s[i] - '0');
            any_digit = true;
        }
        std::int64_t frac = 0;
        int frac_digits = 0;
        int round_up = 0;
        if (i < s.size()) {  // saw '.'
            ++i;
            if (i >= s.size() && !any_digit) return std::nullopt;
            for (; i < s.size(); ++i) {
                if (s[i] < '0' || s[i] > '9') return std::nullopt;
                if (frac_digits < 6) {
                    frac = frac * 10 + (s[i] - '0');
                    ++frac_digits;
                } else if (frac_digits == 6) {
                    round_up = s[i] >= '5' ? 1 : 0;
                    ++frac_digits;
                }
                any_digit = true;
            }
        }
        if (!any_digit) return std::nullopt;
        while (frac_digits < 6) {
            frac *= 10;
            ++frac_digits;
        }
        if (units > (INT64_MAX / kScale) - 1) return std::nullopt;
        std::int64_t micro = units * kScale + frac + round_up;
        return from_micro(neg ? -micro : micro);
    }

    /// Nearest micro-unit; throws on NaN/inf/overflow.
    static Decimal from_double(double v) {
        if (!std::isfinite(v)) throw std::invalid_argument("Decimal::from_double: non-finite");
        const double scaled = v * static_cast<double>(kScale);
        if (scaled >= 9.3e18 || scaled <= -9.3e18)
            throw std::overflow_error("Decimal::from_double overflow");
        return from_micro(std::llround(scaled));
    }

    std::int64_t micro() const { return micro_; }
    double to_double() const { return static_cast<double>(micro_) / kScale; }
    bool negative() const { return micro_ < 0; }
    bool zero() const { return micro_ == 0; }

    Decimal abs() const { return from_micro(micro_ < 0 ? -micro_ : micro_); }

    Decimal operator-() const { return from_micro(-micro_); }

    Decimal operator+(Decimal o) const {
        std::int64_t r;
        if (__builtin_add_overflow(micro_, o.micro_, &r))
            throw std::overflow_error("Decimal addition overflow");
        return from_micro(r);
    }

    Decimal operator-(Decimal o) const {
        std::int64_t r;
        if (__builtin_sub_overflow(micro_, o.micro_, &r))
            throw std::overflow_error("Decimal subtraction overflow");
        return from_micro(r);
    }

    Decimal& operator+=(Decimal o) { return *this = *this + o; }
    Decimal& operator-=(Decimal o) { return *this = *this - o; }

    auto operator<=>(const Decimal&) const = default;

    /// Canonical form: minimal digits, no trailing fractional zeros.
    std::string str() const {
        std::int64_t m = micro_;
        std::string out;
        if (m < 0) {
            out.push_back('-');
            m = -m;
        }
        out += std::to_string(m / kScale);
        std::int64_t frac = m % kScale;
        if (frac != 0) {
            char buf[8];
            std::snprintf(buf, sizeof(buf), "%06lld", static_cast<long long>(frac));
            std::string f(buf);
            while (f.back() == '0') f.pop_back();
            out.push_back('.');
            out += f;
        }
        return out;
    }

private:
    std::int64_t micro_ = 0;
};

}  // namespace tvlnet
