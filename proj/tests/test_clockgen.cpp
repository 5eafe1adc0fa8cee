#include <gtest/gtest.h>

#include "sdlnet/clockgen.hpp"

using namespace sdlnet;

namespace {

NetworkSpec spec_for(int n, double delta = 1e-9) { return make_full_spec(n, delta, {3.0, 60e3, 0.0}); }

}  // namespace

TEST(Clockgen, SlotIndexExamples) {
    EXPECT_EQ(slot_index(1, 1, 2), 1);
    EXPECT_EQ(slot_index(2, 1, 2), 2);
    EXPECT_EQ(slot_index(1, 2, 2), 3);
    EXPECT_EQ(slot_index(4, 1, 2), 0);
    EXPECT_EQ(slot_index(4, 2, 2), 2);
    EXPECT_EQ(slot_index(6, 3, 3), 4);
    EXPECT_THROW(slot_index(0, 1, 2), std::out_of_range);
    EXPECT_THROW(slot_index(5, 1, 2), std::out_of_range);
    EXPECT_THROW(slot_index(1, 3, 2), std::out_of_range);
}

TEST(Clockgen, ClockStateExamples) {
    const double d = 1e-9;
    // Switch (1,1) of a 4-port network is on during [0, 2d).
    EXPECT_TRUE(clock_state(0.0, 1, 1, 2, d));
    EXPECT_TRUE(clock_state(1.5 * d, 1, 1, 2, d));
    EXPECT_FALSE(clock_state(2.0 * d, 1, 1, 2, d));
    EXPECT_FALSE(clock_state(3.5 * d, 1, 1, 2, d));
    // Switch (4,1) has slot 0 and wraps: on during [3d, 4d) and [0, d).
    EXPECT_TRUE(clock_state(0.5 * d, 4, 1, 2, d));
    EXPECT_TRUE(clock_state(3.5 * d, 4, 1, 2, d));
    EXPECT_FALSE(clock_state(1.5 * d, 4, 1, 2, d));
    EXPECT_TRUE(clock_state(-0.5 * d, 4, 1, 2, d));
    EXPECT_TRUE(clock_state(4.5 * d, 1, 1, 2, d));
}

TEST(Clockgen, TickClockMatchesContinuous) {
    const double d = 1.0;
    for (int n_lines : {1, 2, 3}) {
        for (Port m = 1; m <= 2 * n_lines; ++m) {
            for (Line n = 1; n <= n_lines; ++n) {
                for (long t = -40; t < 40; ++t) {
                    EXPECT_EQ(clock_state_ticks(t, 4, m, n, n_lines), clock_state((t + 0.5) / 4.0, m, n, n_lines, d));
                }
            }
        }
    }
}

TEST(Clockgen, CanonicalExamples) {
    const auto one = canonical_schedule(1, 1.0);
    EXPECT_DOUBLE_EQ(one.hyperperiod, 2.0);
    EXPECT_EQ(one.switches.at({1, 1}), (std::vector<Interval>{{0.0, 2.0}}));
    EXPECT_EQ(one.switches.at({2, 1}), (std::vector<Interval>{{0.0, 2.0}}));

    const auto two = canonical_schedule(2, 1.0);
    EXPECT_DOUBLE_EQ(two.hyperperiod, 4.0);
    EXPECT_EQ(two.switches.size(), 8u);
    EXPECT_EQ(two.switches.at({1, 1}), (std::vector<Interval>{{0.0, 2.0}}));
    EXPECT_EQ(two.switches.at({2, 1}), (std::vector<Interval>{{1.0, 3.0}}));
    EXPECT_EQ(two.switches.at({4, 1}), (std::vector<Interval>{{0.0, 1.0}, {3.0, 4.0}}));
}

TEST(Clockgen, OffsetProperty) {
    // Port m+1 sees port m's clock one line delay later, on every line.
    for (int n_lines : {1, 2, 3, 4}) {
        const int p = 2 * n_lines;
        for (Port m = 1; m <= p; ++m) {
            const Port rx = m % p + 1;
            for (Line n = 1; n <= n_lines; ++n) {
                for (long slot = 0; slot < 2L * p; ++slot) {
                    EXPECT_EQ(clock_state_ticks(slot + 1, 1, rx, n, n_lines), clock_state_ticks(slot, 1, m, n, n_lines));
                }
            }
        }
    }
}

TEST(Clockgen, SidesTileEveryLine) {
    // At every slot each line is used by exactly one port per side, and each
    // port uses exactly one line.
    for (int n_lines : {1, 2, 3, 5}) {
        for (long slot = 0; slot < 2L * n_lines; ++slot) {
            for (Line n = 1; n <= n_lines; ++n) {
                int left = 0, right = 0;
                for (Port m = 1; m <= 2 * n_lines; ++m) {
                    if (clock_state_ticks(slot, 1, m, n, n_lines)) (side_of(m) == Side::left ? left : right)++;
                }
                EXPECT_EQ(left, 1);
                EXPECT_EQ(right, 1);
            }
            for (Port m = 1; m <= 2 * n_lines; ++m) {
                int lines = 0;
                for (Line n = 1; n <= n_lines; ++n) lines += clock_state_ticks(slot, 1, m, n, n_lines);
                EXPECT_EQ(lines, 1);
            }
        }
    }
}

TEST(Clockgen, IntervalsFromSlotsMerges) {
    const std::vector<char> on{1, 1, 0, 1};
    EXPECT_EQ(intervals_from_slots(on, 2.0), (std::vector<Interval>{{0.0, 4.0}, {6.0, 8.0}}));
    EXPECT_TRUE(intervals_from_slots({0, 0}, 1.0).empty());
}

TEST(Clockgen, CanonicalSchedulesValidate) {
    for (int n_lines : {1, 2, 3, 4, 6}) {
        const auto spec = spec_for(n_lines);
        const auto r = validate_schedule(canonical_schedule(n_lines, spec.line.delay), spec);
        EXPECT_TRUE(r.passed()) << n_lines;
        EXPECT_TRUE(r.violations.empty());
        for (const auto& [key, duty] : r.duty_cycles) EXPECT_DOUBLE_EQ(duty, 1.0 / n_lines);
        for (Port m = 1; m <= 2 * n_lines; ++m) {
            const std::pair<Port, Port> pair{m, m % (2 * n_lines) + 1};
            EXPECT_NE(std::find(r.receiver_offset_pairs.begin(), r.receiver_offset_pairs.end(), pair),
                      r.receiver_offset_pairs.end())
                << n_lines << " " << m;
        }
    }
}

TEST(Clockgen, ContentionReported) {
    const double d = 1e-9;
    const auto spec = spec_for(2, d);
    auto s = canonical_schedule(2, d);
    s.switches[{3, 1}] = {{0.0, d}, {2 * d, 4 * d}};  // overlaps port 1 on line 1 during [0, 1)
    const auto r = validate_schedule(s, spec);
    EXPECT_FALSE(r.passed());
    EXPECT_FALSE(r.no_line_contention_per_side);
    EXPECT_FALSE(r.one_hot_per_port);
    bool named = false;
    for (const auto& v : r.violations) named = named || v == "line 1 (left): ports 1,3 on together during [0, 1) ns";
    EXPECT_TRUE(named);
}

TEST(Clockgen, OneHotGapReported) {
    const double d = 1e-9;
    const auto spec = spec_for(2, d);
    auto s = canonical_schedule(2, d);
    s.switches[{1, 2}] = {{2 * d, 3 * d}};
    const auto r = validate_schedule(s, spec);
    EXPECT_FALSE(r.one_hot_per_port);
    EXPECT_TRUE(r.no_line_contention_per_side);
    ASSERT_EQ(r.violations.size(), 1u);
    EXPECT_EQ(r.violations[0], "port 1: 0 switches on during [3, 4) ns");
}

TEST(Clockgen, ValidateRejectsBadInput) {
    auto spec = spec_for(2, 1.0);
    EXPECT_THROW(validate_schedule(Schedule{}, spec), ConfigError);
    spec.ports_present = {1, 2, 3};
    EXPECT_THROW(validate_schedule(canonical_schedule(2, 1.0), spec), ConfigError);
    EXPECT_TRUE(validate_schedule(restrict_to(canonical_schedule(2, 1.0), spec), spec).passed());
}

TEST(Clockgen, ScheduleJsonRoundTrip) {
    const auto s = canonical_schedule(3, 10.5e-9);
    const auto doc = schedule_to_json(s);
    const auto back = schedule_from_json(doc);
    EXPECT_EQ(schedule_to_json(back).dump(), doc.dump());
    EXPECT_EQ(back.switches.size(), s.switches.size());
}

TEST(Clockgen, ScheduleJsonRejectsDuplicatesAndUnknownKeys) {
    auto doc = schedule_to_json(canonical_schedule(1, 1e-9));
    auto dup = doc;
    dup["switches"].push_back(dup["switches"][0]);
    EXPECT_THROW(schedule_from_json(dup), ConfigError);
    auto extra = doc;
    extra["note"] = 1;
    EXPECT_THROW(schedule_from_json(extra), ConfigError);
}
