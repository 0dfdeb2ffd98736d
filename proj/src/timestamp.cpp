#include "windcast/util/timestamp.hpp"

#include <cstdio>
#include <stdexcept>

namespace windcast::util {

std::int64_t days_from_civil(const Date& d) {
    int y = d.year;
    const int m = d.month;
    const int day = d.day;
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2u) / 5u +
                         static_cast<unsigned>(day) - 1u;
    const unsigned doe = yoe * 365u + yoe / 4u - yoe / 100u + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

Date civil_from_days(std::int64_t z) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp < 10 ? mp + 3 : mp - 9;
    return Date{static_cast<int>(y + (m <= 2)), static_cast<int>(m), static_cast<int>(d)};
}

bool is_valid_date(const Date& d) {
    if (d.month < 1 || d.month > 12 || d.day < 1) return false;
    static const int lens[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    int len = lens[d.month - 1];
    const bool leap = (d.year % 4 == 0 && d.year % 100 != 0) || d.year % 400 == 0;
    if (d.month == 2 && leap) len = 29;
    return d.day <= len;
}

Timestamp make_timestamp(const Date& d, int hour, int minute) {
    return Timestamp{days_from_civil(d) * 1440 + hour * 60 + minute};
}

namespace {

bool read_int(const std::string& s, size_t pos, size_t len, int& out) {
    if (pos + len > s.size()) return false;
    int v = 0;
    for (size_t i = pos; i < pos + len; ++i) {
        if (s[i] < '0' || s[i] > '9') return false;
        v = v * 10 + (s[i] - '0');
    }
    out = v;
    return true;
}

}  // namespace

Date parse_date(const std::string& s) {
    Date d;
    if (s.size() != 10 || s[4] != '-' || s[7] != '-' ||
        !read_int(s, 0, 4, d.year) || !read_int(s, 5, 2, d.month) ||
        !read_int(s, 8, 2, d.day) || !is_valid_date(d)) {
        throw std::invalid_argument("invalid date: '" + s + "'");
    }
    return d;
}

Timestamp parse_timestamp(const std::string& s) {
    if (s.size() < 16 || s[10] != 'T') {
        throw std::invalid_argument("invalid timestamp: '" + s + "'");
    }
    Date d = parse_date(s.substr(0, 10));
    int hour = 0, minute = 0;
    if (!read_int(s, 11, 2, hour) || s[13] != ':' || !read_int(s, 14, 2, minute) ||
        hour > 23 || minute > 59) {
        throw std::invalid_argument("invalid timestamp: '" + s + "'");
    }
    size_t pos = 16;
    if (pos + 1 < s.size() + 1 && pos < s.size() && s[pos] == ':') {
        int sec = 0;
        if (!read_int(s, pos + 1, 2, sec) || sec != 0) {
            throw std::invalid_argument("invalid timestamp (nonzero seconds): '" + s + "'");
        }
        pos += 3;
    }
    if (pos < s.size() && s[pos] == 'Z') ++pos;
    if (pos != s.size()) {
        throw std::invalid_argument("invalid timestamp: '" + s + "'");
    }
    return make_timestamp(d, hour, minute);
}

std::string format_date(const Date& d) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", d.year, d.month, d.day);
    return buf;
}

std::string format_timestamp(const Timestamp& t) {
    char buf[24];
    const Date d = t.date();
    const int mod = t.minute_of_day();
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d", d.year, d.month, d.day,
                  mod / 60, mod % 60);
    return buf;
}

}  // namespace windcast::util
