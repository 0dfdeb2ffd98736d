#pragma once

#include <cstdint>
#include <string>
#include <tuple>

namespace windcast::util {

// Calendar date, UTC, no DST handling.
struct Date {
    int year = 1970;
    int month = 1;
    int day = 1;

    auto tie() const { return std::tie(year, month, day); }
    bool operator==(const Date& o) const { return tie() == o.tie(); }
    bool operator!=(const Date& o) const { return !(*this == o); }
    bool operator<(const Date& o) const { return tie() < o.tie(); }
    bool operator<=(const Date& o) const { return tie() <= o.tie(); }
};

// Days since 1970-01-01 (Howard Hinnant's civil-day algorithms).
std::int64_t days_from_civil(const Date& d);
Date civil_from_days(std::int64_t days);

bool is_valid_date(const Date& d);

// Minutes since 1970-01-01T00:00 UTC.
struct Timestamp {
    std::int64_t minutes = 0;

    Date date() const { return civil_from_days(minutes >= 0 ? minutes / 1440
                                                            : (minutes - 1439) / 1440); }
    int minute_of_day() const {
        std::int64_t m = minutes % 1440;
        return static_cast<int>(m < 0 ? m + 1440 : m);
    }
    bool operator==(const Timestamp& o) const { return minutes == o.minutes; }
    bool operator<(const Timestamp& o) const { return minutes < o.minutes; }
};

Timestamp make_timestamp(const Date& d, int hour, int minute);

// Parses "YYYY-MM-DD". Throws std::invalid_argument on malformed input.
Date parse_date(const std::string& s);

// Parses ISO-8601 "YYYY-MM-DDTHH:MM", optionally with ":SS" and a trailing
// "Z". Seconds must be zero (the data cadence is minutes).
Timestamp parse_timestamp(const std::string& s);

std::string format_date(const Date& d);
std::string format_timestamp(const Timestamp& t);

}  // namespace windcast::util
