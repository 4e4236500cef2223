#include "aftershock/ingest.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace aftershock;

namespace {

Minute at(const char* text) { return *parse_instant(text); }

std::vector<RawRecord> records(std::initializer_list<std::pair<const char*, double>> rows) {
    std::vector<RawRecord> out;
    for (const auto& [when, price] : rows) out.push_back({at(when), price});
    return out;
}

std::string error_of(const std::string& csv, ColumnMap cols = {}) {
    std::istringstream in(csv);
    try {
        load_records(in, cols);
    } catch (const DataError& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST(LoadRecords, HeaderAndTwoRows) {
    std::istringstream in("<DATE>,<TIME>,<CLOSE>\n20141215,201700,64.5\n20141215,201800,65.25\n");
    const auto recs = load_records(in, {});
    ASSERT_EQ(recs.size(), 2u);
    EXPECT_EQ(recs[0].wall_clock, at("2014-12-15 20:17"));
    EXPECT_DOUBLE_EQ(recs[1].price, 65.25);
}

TEST(LoadRecords, ZeroPriceNamesTheRow) {
    const auto msg = error_of("DATE,TIME,CLOSE\n20141215,201700,64.5\n20141215,201800,0\n");
    EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
    EXPECT_NE(msg.find("non-positive"), std::string::npos) << msg;
}

TEST(LoadRecords, MissingColumnNamed) {
    const auto msg = error_of("DATE,TIME,OPEN\n20141215,201700,64.5\n");
    EXPECT_NE(msg.find("CLOSE"), std::string::npos) << msg;
}

TEST(LoadRecords, BadTimestampAndShortRow) {
    EXPECT_NE(error_of("DATE,TIME,CLOSE\n20141315,201700,1\n").find("line 2"), std::string::npos);
    EXPECT_NE(error_of("DATE,TIME,CLOSE\n20141215,201700\n").find("fields"), std::string::npos);
    EXPECT_NE(error_of("DATE,TIME,CLOSE\n20141215,201700,1.2x\n").find("malformed"), std::string::npos);
    EXPECT_NE(error_of("").find("header"), std::string::npos);
}

TEST(LoadRecords, CustomColumnMapAndCombinedTimestamp) {
    ColumnMap cols;
    cols.date = "when";
    cols.time = "";
    cols.price = "bid";
    cols.date_format = "%Y-%m-%d %H:%M";
    cols.delimiter = ';';
    std::istringstream in("when;bid\n2014-12-15 20:17;64.5\n\n2014-12-15 20:18;64.6\n");
    const auto recs = load_records(in, cols);
    ASSERT_EQ(recs.size(), 2u);
    EXPECT_EQ(recs[1].wall_clock, at("2014-12-15 20:18"));
}

TEST(ParseTimestamp, SecondsTruncatedAndRejectsGarbage) {
    EXPECT_EQ(parse_timestamp("20141215 201759", "%Y%m%d %H%M%S"), at("2014-12-15 20:17"));
    EXPECT_FALSE(parse_timestamp("20140230 000000", "%Y%m%d %H%M%S"));
    EXPECT_FALSE(parse_timestamp("20141215 2017", "%Y%m%d %H%M%S"));
    EXPECT_FALSE(parse_timestamp("20141215 201700x", "%Y%m%d %H%M%S"));
    EXPECT_EQ(format_timestamp(at("20141215 2017")), "2014-12-15 20:17");
}

TEST(CompactGaps, OvernightGapRemoved) {
    const auto s = compact_gaps(records({{"2014-12-15 09:00", 1}, {"2014-12-15 09:01", 2}, {"2014-12-16 10:00", 3}}));
    ASSERT_EQ(s.size(), 3u);
    EXPECT_EQ(s.index_at(0), 0);
    EXPECT_EQ(s.index_at(2), 2);
    EXPECT_EQ(s.wall_clock[2], at("2014-12-16 10:00"));
}

TEST(CompactGaps, SingleRecord) {
    const auto s = compact_gaps(records({{"2014-12-15 09:00", 1}}));
    ASSERT_EQ(s.size(), 1u);
    EXPECT_EQ(s.first_index(), 0);
}

TEST(CompactGaps, DuplicateAndUnsortedAreErrors) {
    EXPECT_THROW(compact_gaps(records({{"2014-12-15 09:00", 1}, {"2014-12-15 09:00", 2}})), DataError);
    EXPECT_THROW(compact_gaps(records({{"2014-12-15 09:01", 1}, {"2014-12-15 09:00", 2}})), DataError);
}

TEST(CompactGaps, IdempotentAndRoundTrips) {
    const auto recs = records({{"2014-12-12 23:49", 60}, {"2014-12-15 10:00", 61}, {"2014-12-15 10:02", 62}});
    const auto once = compact_gaps(recs);
    const auto twice = compact_gaps(to_records(once));
    EXPECT_EQ(once.wall_clock, twice.wall_clock);
    EXPECT_EQ(once.x, twice.x);
    EXPECT_EQ(to_records(once), recs);
    EXPECT_EQ(once.size(), recs.size());
}

TEST(AlignOrigin, CrashAtThirdRecord) {
    auto s = compact_gaps(records({{"2014-12-15 20:15", 1}, {"2014-12-15 20:16", 1}, {"2014-12-15 20:17", 1},
                                   {"2014-12-15 20:18", 1}}));
    s = align_origin(std::move(s), at("2014-12-15 20:17"));
    EXPECT_EQ(s.index_at(2), 0);
    EXPECT_EQ(s.first_index(), -2);
    EXPECT_FALSE(s.origin_snapped());
}

TEST(AlignOrigin, CrashOutsideRangeIsError) {
    const auto s = compact_gaps(records({{"2014-12-15 20:15", 1}, {"2014-12-15 20:16", 1}}));
    EXPECT_THROW(align_origin(s, at("2014-12-15 20:14")), DataError);
    EXPECT_THROW(align_origin(s, at("2014-12-15 20:17")), DataError);
}

TEST(AlignOrigin, CrashInGapSnapsForward) {
    auto s = compact_gaps(records({{"2014-12-15 23:49", 1}, {"2014-12-16 10:00", 1}, {"2014-12-16 10:01", 1}}));
    s = align_origin(std::move(s), at("2014-12-16 03:00"));
    EXPECT_EQ(s.origin, 1u);
    EXPECT_EQ(*s.origin_wall_clock, at("2014-12-16 10:00"));
    EXPECT_TRUE(s.origin_snapped());
}

TEST(MinutesPerDay, MedianOfDailyCounts) {
    auto recs = records({{"2014-12-15 10:00", 1}, {"2014-12-15 10:01", 1}, {"2014-12-16 10:00", 1},
                         {"2014-12-16 10:01", 1}, {"2014-12-16 10:02", 1}, {"2014-12-17 10:00", 1},
                         {"2014-12-17 10:01", 1}});
    const auto s = compact_gaps(recs);
    EXPECT_DOUBLE_EQ(minutes_per_day(s), 2.0);
    EXPECT_DOUBLE_EQ(minutes_per_day(s, 2), 2.5);
}
