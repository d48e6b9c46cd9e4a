#pragma once

#include <chrono>
#include <compare>
#include <string>
#include <string_view>

namespace frontier {

/// Calendar date with day resolution, parsed from and printed as ISO-8601.
class Date {
public:
    constexpr Date() = default;
    constexpr explicit Date(std::chrono::sys_days days) : days_(days) {}
    Date(int year, unsigned month, unsigned day);

    /// Throws DataError on anything but a valid `YYYY-MM-DD`.
    static Date parse(std::string_view text);

    std::string to_string() const;
    constexpr std::chrono::sys_days days() const { return days_; }
    std::chrono::weekday weekday() const { return std::chrono::weekday{days_}; }

    Date next_day() const { return Date{days_ + std::chrono::days{1}}; }

    friend constexpr auto operator<=>(const Date&, const Date&) = default;

private:
    std::chrono::sys_days days_{};
};

/// Half-open date interval [first, last).
struct DateRange {
    Date first;
    Date last;

    bool contains(const Date& d) const { return first <= d && d < last; }
    bool empty() const { return !(first < last); }
};

}  // namespace frontier
