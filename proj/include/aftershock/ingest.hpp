#pragma once

#include "aftershock/error.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace aftershock {

using Minute = std::chrono::sys_time<std::chrono::minutes>;

struct RawRecord {
    Minute wall_clock;
    double price = 0.0;

    bool operator==(const RawRecord&) const = default;
};

/// Which columns hold the timestamp and the quote, and how to read them.
/// Defaults follow a finam-style minute export.
struct ColumnMap {
    std::string date = "DATE";
    std::string time = "TIME";  // empty: the date column carries the full timestamp
    std::string price = "CLOSE";
    std::string date_format = "%Y%m%d";
    std::string time_format = "%H%M%S";
    char delimiter = ',';
};

/// Minute-indexed quotes on the compacted exchange-time axis. Position k in
/// the vectors has exchange-minute index t = k - origin.
struct PriceSeries {
    std::vector<Minute> wall_clock;
    std::vector<double> x;
    std::size_t origin = 0;
    std::optional<Minute> origin_wall_clock;
    std::optional<Minute> requested_origin;

    [[nodiscard]] std::size_t size() const noexcept { return x.size(); }
    [[nodiscard]] std::int64_t index_at(std::size_t k) const noexcept {
        return static_cast<std::int64_t>(k) - static_cast<std::int64_t>(origin);
    }
    [[nodiscard]] std::int64_t first_index() const noexcept { return index_at(0); }
    [[nodiscard]] bool origin_snapped() const noexcept {
        return origin_wall_clock && requested_origin && *origin_wall_clock != *requested_origin;
    }
};

namespace detail {

inline std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

inline std::string normalize_header(std::string_view s) {
    std::string h = trim(s);
    if (h.size() >= 2 && h.front() == '<' && h.back() == '>') h = h.substr(1, h.size() - 2);
    std::transform(h.begin(), h.end(), h.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    return h;
}

inline std::vector<std::string> split(std::string_view line, char delim) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        auto pos = line.find(delim, start);
        out.push_back(trim(line.substr(start, pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

inline bool read_digits(std::string_view s, std::size_t& pos, int width, int& value) {
    if (pos + static_cast<std::size_t>(width) > s.size()) return false;
    value = 0;
    for (int i = 0; i < width; ++i) {
        char c = s[pos + static_cast<std::size_t>(i)];
        if (c < '0' || c > '9') return false;
        value = value * 10 + (c - '0');
    }
    pos += static_cast<std::size_t>(width);
    return true;
}

}  // namespace detail

/// Parses `text` against a strftime-like `format`. Supported fields: %Y (4
/// digits), %m %d %H %M %S (2 digits each) and %%; other characters must
/// match literally. Seconds are truncated to the minute.
inline std::optional<Minute> parse_timestamp(std::string_view text, std::string_view format) {
    int year = 1970, month = 1, day = 1, hour = 0, minute = 0, second = 0;
    std::size_t pos = 0;
    for (std::size_t i = 0; i < format.size(); ++i) {
        if (format[i] != '%') {
            if (pos >= text.size() || text[pos] != format[i]) return std::nullopt;
            ++pos;
            continue;
        }
        if (++i == format.size()) return std::nullopt;
        bool ok = true;
        switch (format[i]) {
            case 'Y': ok = detail::read_digits(text, pos, 4, year); break;
            case 'm': ok = detail::read_digits(text, pos, 2, month); break;
            case 'd': ok = detail::read_digits(text, pos, 2, day); break;
            case 'H': ok = detail::read_digits(text, pos, 2, hour); break;
            case 'M': ok = detail::read_digits(text, pos, 2, minute); break;
            case 'S': ok = detail::read_digits(text, pos, 2, second); break;
            case '%': ok = pos < text.size() && text[pos++] == '%'; break;
            default: return std::nullopt;
        }
        if (!ok) return std::nullopt;
    }
    if (pos != text.size()) return std::nullopt;
    using namespace std::chrono;
    const year_month_day ymd{std::chrono::year{year}, std::chrono::month{static_cast<unsigned>(month)},
                             std::chrono::day{static_cast<unsigned>(day)}};
    if (!ymd.ok() || hour > 23 || minute > 59 || second > 60) return std::nullopt;
    return Minute{sys_days{ymd}} + hours{hour} + minutes{minute};
}

/// "YYYY-MM-DD HH:MM"
inline std::string format_timestamp(Minute m) {
    using namespace std::chrono;
    const auto day = floor<days>(m);
    const year_month_day ymd{day};
    const hh_mm_ss hms{m - day};
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u %02d:%02d", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()));
    return buf;
}

/// Accepts "YYYY-MM-DD HH:MM", "YYYY-MM-DDTHH:MM" or "YYYYMMDD HHMM".
inline std::optional<Minute> parse_instant(std::string_view text) {
    for (std::string_view fmt : {"%Y-%m-%d %H:%M", "%Y-%m-%dT%H:%M", "%Y%m%d %H%M",
                                 "%Y-%m-%d %H:%M:%S", "%Y%m%d %H%M%S"}) {
        if (auto m = parse_timestamp(text, fmt)) return m;
    }
    return std::nullopt;
}

/// Reads delimiter-separated minute bars with a header row. Rows are kept
/// in file order; ordering is checked by compact_gaps.
inline std::vector<RawRecord> load_records(std::istream& source, const ColumnMap& columns) {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(source, line)) {
        ++line_no;
        if (!detail::trim(line).empty()) break;
    }
    if (detail::trim(line).empty()) throw DataError("input has no header row");

    const auto header = detail::split(line, columns.delimiter);
    auto column_index = [&](const std::string& name) {
        const auto wanted = detail::normalize_header(name);
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (detail::normalize_header(header[i]) == wanted) return i;
        }
        throw DataError("missing column '" + name + "' in header");
    };
    const std::size_t date_col = column_index(columns.date);
    std::optional<std::size_t> time_col;
    if (!columns.time.empty()) time_col = column_index(columns.time);
    const std::size_t price_col = column_index(columns.price);
    const std::string format =
        time_col ? columns.date_format + ' ' + columns.time_format : columns.date_format;

    std::vector<RawRecord> records;
    while (std::getline(source, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        const auto fields = detail::split(line, columns.delimiter);
        const auto where = "line " + std::to_string(line_no);
        const std::size_t needed = std::max({date_col, price_col, time_col.value_or(0)}) + 1;
        if (fields.size() < needed) {
            throw DataError(where + ": expected at least " + std::to_string(needed) +
                            " fields, got " + std::to_string(fields.size()));
        }
        const std::string stamp =
            time_col ? fields[date_col] + ' ' + fields[*time_col] : fields[date_col];
        const auto when = parse_timestamp(stamp, format);
        if (!when) throw DataError(where + ": unparseable date-time '" + stamp + "'");

        double price = 0.0;
        try {
            std::size_t used = 0;
            price = std::stod(fields[price_col], &used);
            if (used != fields[price_col].size()) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            throw DataError(where + ": malformed price '" + fields[price_col] + "'");
        }
        if (!(price > 0.0) || !std::isfinite(price)) {
            throw DataError(where + ": non-positive price " + fields[price_col]);
        }
        records.push_back({*when, price});
    }
    return records;
}

/// Maps the k-th record to exchange minute k, dropping the wall-clock gaps.
inline PriceSeries compact_gaps(const std::vector<RawRecord>& records) {
    PriceSeries series;
    series.wall_clock.reserve(records.size());
    series.x.reserve(records.size());
    for (std::size_t k = 0; k < records.size(); ++k) {
        const auto& rec = records[k];
        if (!(rec.price > 0.0)) {
            throw DataError("record " + std::to_string(k) + ": non-positive price");
        }
        if (k > 0) {
            const auto prev = records[k - 1].wall_clock;
            if (rec.wall_clock == prev) {
                throw DataError("duplicate timestamp " + format_timestamp(rec.wall_clock) +
                                " at record " + std::to_string(k));
            }
            if (rec.wall_clock < prev) {
                throw DataError("timestamps out of order at record " + std::to_string(k) + " (" +
                                format_timestamp(rec.wall_clock) + ")");
            }
        }
        series.wall_clock.push_back(rec.wall_clock);
        series.x.push_back(rec.price);
    }
    return series;
}

inline std::vector<RawRecord> to_records(const PriceSeries& series) {
    std::vector<RawRecord> out;
    out.reserve(series.size());
    for (std::size_t k = 0; k < series.size(); ++k) out.push_back({series.wall_clock[k], series.x[k]});
    return out;
}

/// Re-bases the index so the crash minute is t = 0. A crash inside a
/// no-trading gap snaps forward to the next recorded minute.
inline PriceSeries align_origin(PriceSeries series, Minute crash) {
    if (series.wall_clock.empty()) throw DataError("cannot align an empty series");
    if (crash < series.wall_clock.front() || crash > series.wall_clock.back()) {
        throw DataError("crash instant " + format_timestamp(crash) + " outside data range [" +
                        format_timestamp(series.wall_clock.front()) + ", " +
                        format_timestamp(series.wall_clock.back()) + "]");
    }
    auto it = std::lower_bound(series.wall_clock.begin(), series.wall_clock.end(), crash);
    series.origin = static_cast<std::size_t>(it - series.wall_clock.begin());
    series.origin_wall_clock = *it;
    series.requested_origin = crash;
    return series;
}

/// Median number of records per calendar date among positions [from, size).
inline double minutes_per_day(const PriceSeries& series, std::size_t from = 0) {
    using namespace std::chrono;
    std::vector<double> counts;
    std::optional<sys_days> current;
    for (std::size_t k = from; k < series.size(); ++k) {
        const auto day = floor<days>(series.wall_clock[k]);
        if (!current || day != *current) {
            counts.push_back(0.0);
            current = day;
        }
        counts.back() += 1.0;
    }
    if (counts.empty()) return 0.0;
    std::sort(counts.begin(), counts.end());
    const std::size_t n = counts.size();
    return n % 2 ? counts[n / 2] : 0.5 * (counts[n / 2 - 1] + counts[n / 2]);
}

}  // namespace aftershock
