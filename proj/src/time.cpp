#include "stormdiag/time.hpp"

#include <cctype>
#include <cstdio>

#include "stormdiag/error.hpp"

namespace stormdiag {

namespace {

int read_digits(std::string_view text, std::size_t& pos, int count) {
    int value = 0;
    for (int k = 0; k < count; ++k, ++pos) {
        if (pos >= text.size() || !std::isdigit(static_cast<unsigned char>(text[pos]))) {
            throw Error("malformed time '" + std::string(text) + "'");
        }
        value = value * 10 + (text[pos] - '0');
    }
    return value;
}

void expect(std::string_view text, std::size_t& pos, char c) {
    if (pos >= text.size() || text[pos] != c) {
        throw Error("malformed time '" + std::string(text) + "'");
    }
    ++pos;
}

}  // namespace

TimePoint parse_time(std::string_view text) {
    using namespace std::chrono;
    std::size_t pos = 0;
    const int y = read_digits(text, pos, 4);
    expect(text, pos, '-');
    const int mo = read_digits(text, pos, 2);
    expect(text, pos, '-');
    const int d = read_digits(text, pos, 2);
    int hh = 0, mm = 0, ss = 0;
    if (pos < text.size() && (text[pos] == 'T' || text[pos] == ' ')) {
        ++pos;
        hh = read_digits(text, pos, 2);
        expect(text, pos, ':');
        mm = read_digits(text, pos, 2);
        if (pos < text.size() && text[pos] == ':') {
            ++pos;
            ss = read_digits(text, pos, 2);
        }
    }
    if (pos < text.size() && text[pos] == 'Z') ++pos;
    if (pos != text.size()) throw Error("malformed time '" + std::string(text) + "'");

    const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok() || hh > 23 || mm > 59 || ss > 60) {
        throw Error("invalid calendar time '" + std::string(text) + "'");
    }
    return sys_days{ymd} + hours{hh} + minutes{mm} + seconds{ss};
}

namespace {

struct Parts {
    int y;
    unsigned mo, d;
    long long hh, mm, ss;
};

Parts split(TimePoint t) {
    using namespace std::chrono;
    const auto day_point = floor<days>(t);
    const year_month_day ymd{day_point};
    const long long secs = (t - day_point).count();
    return {int(ymd.year()), unsigned(ymd.month()), unsigned(ymd.day()), secs / 3600,
            (secs / 60) % 60, secs % 60};
}

}  // namespace

std::string format_time(TimePoint t) {
    const Parts p = split(t);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02lld:%02lld:%02lldZ", p.y, p.mo, p.d, p.hh, p.mm,
                  p.ss);
    return buf;
}

std::string compact_time(TimePoint t) {
    const Parts p = split(t);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%04d%02u%02uT%02lld%02lld%02lldZ", p.y, p.mo, p.d, p.hh, p.mm, p.ss);
    return buf;
}

}  // namespace stormdiag
