#pragma once

#include "aftershock/correlation.hpp"
#include "aftershock/error.hpp"
#include "aftershock/events.hpp"
#include "aftershock/ingest.hpp"
#include "aftershock/waiting.hpp"

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace aftershock {

/// Shortest decimal form that reads back to the same double.
inline std::string format_number(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline std::optional<double> parse_number(std::string_view s) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

inline void write_events_csv(std::ostream& out, const EventSequence& events) {
    out << "minutes_since_crash\n";
    for (double t : events.times) out << format_number(t) << '\n';
}

/// Single-column file of event times; a non-numeric first line is a header.
inline EventSequence read_events_csv(std::istream& in) {
    EventSequence ev;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto field = detail::trim(line);
        if (field.empty()) continue;
        const auto v = parse_number(field);
        if (!v) {
            if (line_no == 1) continue;
            throw DataError("events file line " + std::to_string(line_no) + ": not a number");
        }
        ev.times.push_back(*v);
    }
    check_event_times(ev.times);
    return ev;
}

inline void write_waits_csv(std::ostream& out, const WaitingTimes& waits) {
    out << "tau\n";
    for (double t : waits.taus) out << format_number(t) << '\n';
}

inline void write_histogram_csv(std::ostream& out, const WaitingHistogram& hist) {
    out << "tau,count\n";
    for (const auto& [j, n] : hist.counts) {
        out << format_number(hist.center(j)) << ',' << format_number(hist.value(j)) << '\n';
    }
}

inline void write_series_csv(std::ostream& out, const PriceSeries& series) {
    out << "t,wall_clock,price\n";
    for (std::size_t k = 0; k < series.size(); ++k) {
        out << series.index_at(k) << ',' << format_timestamp(series.wall_clock[k]) << ','
            << format_number(series.x[k]) << '\n';
    }
}

inline void write_curves_csv(std::ostream& out, const std::vector<CorrelationCurve>& curves) {
    out << "n_w,n,C\n";
    for (const auto& c : curves) {
        for (const auto& pt : c.points) {
            out << c.n_w << ',' << pt.n << ',' << format_number(pt.C) << '\n';
        }
    }
}

inline void write_collapsed_csv(std::ostream& out, const std::vector<CorrelationCurve>& curves,
                                const CollapseResult& collapse) {
    out << "n_w,n_over_f,C\n";
    for (const auto& c : curves) {
        const auto it = collapse.scale_factors.find(c.n_w);
        if (it == collapse.scale_factors.end()) continue;
        for (const auto& pt : c.points) {
            out << c.n_w << ',' << format_number(static_cast<double>(pt.n) / it->second) << ','
                << format_number(pt.C) << '\n';
        }
    }
}

inline void write_scale_factors_csv(std::ostream& out, const CollapseResult& collapse) {
    out << "n_w,f\n";
    for (const auto& [n_w, f] : collapse.scale_factors) out << n_w << ',' << format_number(f) << '\n';
}

/// Generic numeric table: header row then one row per record.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

inline void write_table(std::ostream& out, const Table& table) {
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
        out << (i ? "," : "") << table.columns[i];
    }
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_number(row[i]);
        out << '\n';
    }
}

inline Table read_table(std::istream& in) {
    Table t;
    std::string line;
    if (!std::getline(in, line)) throw DataError("table: missing header");
    t.columns = detail::split(line, ',');
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        std::vector<double> row;
        for (const auto& f : detail::split(line, ',')) {
            const auto v = parse_number(f);
            if (!v) throw DataError("table line " + std::to_string(line_no) + ": bad number '" + f + "'");
            row.push_back(*v);
        }
        if (row.size() != t.columns.size()) {
            throw DataError("table line " + std::to_string(line_no) + ": wrong field count");
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

inline std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    return in;
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + path.string());
    out << content;
    if (!out) throw DataError("write failed for " + path.string());
}

template <class Writer>
std::string to_text(Writer&& writer) {
    std::ostringstream os;
    writer(os);
    return os.str();
}

}  // namespace aftershock
