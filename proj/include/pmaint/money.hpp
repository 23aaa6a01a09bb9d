#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <string>

namespace pmaint {

/// Monetary amount held as integer cents. Costs follow the loss-positive
/// convention: losses are positive, savings negative.
class money {
public:
    constexpr money() = default;

    static constexpr money from_cents(std::int64_t c) { return money{c}; }
    static money from_euros(double e) { return money{std::llround(e * 100.0)}; }

    constexpr std::int64_t cents() const { return cents_; }
    constexpr double euros() const { return static_cast<double>(cents_) / 100.0; }

    /// `this * num / den`, rounded half away from zero to the nearest cent.
    constexpr money scaled(std::int64_t num, std::int64_t den) const {
        const std::int64_t p = cents_ * num;
        const std::int64_t q = (p >= 0 ? 2 * p + den : 2 * p - den) / (2 * den);
        return money{q};
    }

    constexpr money operator-() const { return money{-cents_}; }
    constexpr money& operator+=(money o) { cents_ += o.cents_; return *this; }
    constexpr money& operator-=(money o) { cents_ -= o.cents_; return *this; }
    friend constexpr money operator+(money a, money b) { return money{a.cents_ + b.cents_}; }
    friend constexpr money operator-(money a, money b) { return money{a.cents_ - b.cents_}; }
    friend constexpr money operator*(money a, std::int64_t k) { return money{a.cents_ * k}; }
    friend constexpr money operator*(std::int64_t k, money a) { return money{a.cents_ * k}; }
    friend constexpr auto operator<=>(money, money) = default;

    /// Whole euros, rounded half away from zero.
    std::int64_t whole_euros() const { return std::llround(euros()); }

private:
    constexpr explicit money(std::int64_t c) : cents_(c) {}
    std::int64_t cents_ = 0;
};

} // namespace pmaint
