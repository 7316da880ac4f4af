#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "support.hpp"
#include "svaport/error.hpp"
#include "svaport/rtl.hpp"
#include "svaport/serialize.hpp"
#include "svaport/sim.hpp"
#include "svaport/sva.hpp"

using namespace svaport;

namespace {

sim::Trace bit_trace(const testkit::RandomProperty::Rows& rows) {
    std::vector<std::string> names;
    for (int i = 0; i < testkit::RandomProperty::kSignals; ++i) names.push_back("x" + std::to_string(i));
    sim::Trace t(names, std::vector<unsigned>(names.size(), 1), {});
    for (const auto& r : rows) {
        std::vector<std::uint64_t> row(r.begin(), r.end());
        t.append(row);
    }
    return t;
}

testkit::RandomProperty::Rows random_rows(std::mt19937_64& rng, std::size_t n) {
    testkit::RandomProperty::Rows rows(n, std::vector<int>(testkit::RandomProperty::kSignals));
    for (auto& r : rows)
        for (auto& v : r) v = static_cast<int>(rng() % 4 != 0);
    return rows;
}

int code(sim::Status s) {
    switch (s) {
        case sim::Status::not_attempted: return 0;
        case sim::Status::vacuous_pass: return 1;
        case sim::Status::pass: return 2;
        case sim::Status::fail: return 3;
        case sim::Status::pending: return 4;
    }
    return -1;
}

}  // namespace

TEST(Sim, RandomDesignsMatchDirectEvaluation) {
    std::mt19937_64 rng(17);
    for (int i = 0; i < 100; ++i) {
        auto d = testkit::RandomDesign::make(rng, true);
        sim::CompiledDesign cd(rtl::parse_design(d.verilog()));
        sim::Stimulus stim;
        const std::size_t n = 12;
        std::vector<std::vector<std::uint64_t>> ins(n);
        std::vector<std::uint64_t> rst(n);
        for (std::size_t c = 0; c < n; ++c) {
            std::map<std::string, std::uint64_t> cyc;
            rst[c] = (c == 0 || rng() % 6 == 0) ? 0 : 1;
            cyc["rst_ni"] = rst[c];
            for (std::size_t k = 0; k < d.n_inputs(); ++k) {
                ins[c].push_back(rng() & testkit::mask(d.input_widths[k]));
                cyc[d.input_names[k]] = ins[c].back();
            }
            stim.cycles.push_back(cyc);
        }
        auto trace = sim::simulate(cd, stim);
        ASSERT_EQ(trace.length(), n);

        std::vector<std::uint64_t> regs;
        for (const auto& r : d.regs) regs.push_back(r.reset_value);
        for (std::size_t c = 0; c < n; ++c) {
            auto v = d.eval(ins[c], regs);
            for (std::size_t s = 0; s < d.n_signals(); ++s)
                ASSERT_EQ(trace.value(d.name_of(static_cast<int>(s)), c), v[s])
                    << d.name_of(static_cast<int>(s)) << " @" << c << "\n" << d.verilog();
            for (std::size_t r = 0; r < d.regs.size(); ++r)
                regs[r] = rst[c] == 0 ? d.regs[r].reset_value : v[static_cast<std::size_t>(d.regs[r].src)] & testkit::mask(d.regs[r].width);
        }
    }
}

TEST(Sim, ResetCyclesDriveTheResetInput) {
    sim::CompiledDesign cd(rtl::parse_design(io::read_file(testkit::corpus("debug/ibex_debug.sv"))));
    ASSERT_TRUE(cd.reset());
    sim::Stimulus stim;
    stim.reset_cycles = 2;
    stim.cycles.resize(4);
    auto t = sim::simulate(cd, stim);
    std::uint64_t active = cd.reset_active_high() ? 1 : 0;
    EXPECT_EQ(t.value(*cd.reset(), 0), active);
    EXPECT_EQ(t.value(*cd.reset(), 1), active);
    EXPECT_EQ(t.value(*cd.reset(), 2), 1 - active);
}

TEST(Monitor, RandomPropertiesMatchOracle) {
    std::mt19937_64 rng(29);
    for (int i = 0; i < 400; ++i) {
        auto p = testkit::RandomProperty::make(rng);
        auto a = sva::parse_assertion(p.text("p"));
        auto rows = random_rows(rng, 10);
        auto trace = bit_trace(rows);
        auto verdict = sim::AssertionMonitor(a, trace.lookup()).check(trace);
        auto expected = p.oracle(rows);
        ASSERT_EQ(verdict.attempts.size(), expected.size());
        for (std::size_t c = 0; c < expected.size(); ++c)
            EXPECT_EQ(code(verdict.attempts[c].status), expected[c]) << p.text("p") << " start " << c;
        std::size_t fails = static_cast<std::size_t>(std::count(expected.begin(), expected.end(), 3));
        EXPECT_EQ(verdict.summary.failures, fails);
    }
}

TEST(Monitor, NonOverlappedEqualsDelayedOverlapped) {
    std::mt19937_64 rng(31);
    for (int i = 0; i < 200; ++i) {
        auto p = testkit::RandomProperty::make(rng);
        p.non_overlapped = true;
        auto q = p;
        q.non_overlapped = false;
        q.consequent[0].delay += 1;
        auto rows = random_rows(rng, 9);
        auto trace = bit_trace(rows);
        auto a = sim::AssertionMonitor(sva::parse_assertion(p.text("a")), trace.lookup()).check(trace);
        auto b = sim::AssertionMonitor(sva::parse_assertion(q.text("b")), trace.lookup()).check(trace);
        for (std::size_t c = 0; c < rows.size(); ++c) EXPECT_EQ(a.attempts[c].status, b.attempts[c].status);
        EXPECT_EQ(a.failure_cycles, b.failure_cycles);
    }
}

TEST(Monitor, PastReadsEarlierCyclesAndZeroBeforeStart) {
    std::mt19937_64 rng(37);
    auto rows = random_rows(rng, 8);
    auto trace = bit_trace(rows);
    auto a = sva::parse_assertion("p: assert property (@(posedge clk) 1'b1 |-> x0 == $past(x1, 2));");
    auto v = sim::AssertionMonitor(a, trace.lookup()).check(trace);
    for (std::size_t c = 0; c < rows.size(); ++c) {
        int past = c >= 2 ? rows[c - 2][1] : 0;
        EXPECT_EQ(v.status_at(c), rows[c][0] == past ? sim::Status::pass : sim::Status::fail) << c;
    }
    EXPECT_EQ(v.past_underflows, 2u);
}

TEST(Monitor, AlwaysDisabledNeverFails) {
    testkit::RandomProperty::Rows rows(6, std::vector<int>{1, 0, 0, 0});
    auto trace = bit_trace(rows);
    auto a = sva::parse_assertion("p: assert property (@(posedge clk) disable iff (x0) 1'b1 |-> x1);");
    auto v = sim::AssertionMonitor(a, trace.lookup()).check(trace);
    EXPECT_EQ(v.summary.failures, 0u);
    EXPECT_EQ(v.summary.not_attempted, rows.size());
}

TEST(Monitor, AttemptsRunningPastTheTraceArePending) {
    testkit::RandomProperty::Rows rows(4, std::vector<int>{1, 1, 1, 1});
    auto trace = bit_trace(rows);
    auto a = sva::parse_assertion("p: assert property (@(posedge clk) x0 |-> ##2 x1);");
    auto v = sim::AssertionMonitor(a, trace.lookup()).check(trace);
    EXPECT_EQ(v.summary.non_vacuous_passes, 2u);
    EXPECT_EQ(v.summary.pending_at_end, 2u);
    EXPECT_EQ(v.status_at(3), sim::Status::pending);
}

TEST(Monitor, UnknownSignalIsReported) {
    testkit::RandomProperty::Rows rows(2, std::vector<int>{0, 0, 0, 0});
    auto trace = bit_trace(rows);
    auto a = sva::parse_assertion("p: assert property (@(posedge clk) x0 |-> nope);");
    EXPECT_THROW(sim::AssertionMonitor(a, trace.lookup()), UnknownSignalError);
}

TEST(Sim, VcdListsEverySignalAndCycle) {
    sim::CompiledDesign cd(rtl::parse_design(io::read_file(testkit::corpus("debug/ibex_debug.sv"))));
    sim::Stimulus stim;
    stim.reset_cycles = 1;
    stim.cycles.resize(3);
    auto t = sim::simulate(cd, stim);
    std::ostringstream os;
    sim::write_vcd(os, t, cd.netlist().name, cd.clock());
    std::string vcd = os.str();
    EXPECT_NE(vcd.find("$enddefinitions"), std::string::npos);
    for (const auto& s : t.signals()) EXPECT_NE(vcd.find(" " + s + " "), std::string::npos) << s;
    EXPECT_NE(vcd.find("#0"), std::string::npos);
}

TEST(Sim, SearchFindsAStimulusReachingATarget) {
    sim::CompiledDesign cd(rtl::parse_design(io::read_file(testkit::corpus("golden/irq_handle.sv"))));
    sim::SearchConfig cfg;
    cfg.seed = 4;
    cfg.horizon = 4;
    cfg.reset_cycles = 0;
    auto res = sim::search_stimulus(
        cd,
        [](const sim::Trace& t) {
            for (std::size_t c = 0; c < t.length(); ++c)
                if (t.value("handle_irq", c)) return true;
            return false;
        },
        {}, cfg);
    ASSERT_TRUE(res.stimulus);
    auto t = sim::simulate(cd, *res.stimulus);
    bool hit = false;
    for (std::size_t c = 0; c < t.length(); ++c) hit = hit || t.value("handle_irq", c);
    EXPECT_TRUE(hit);
}

TEST(Monitor, DelayedPastInConsequent) {
    std::mt19937_64 rng(41);
    auto rows = random_rows(rng, 12);
    auto trace = bit_trace(rows);
    auto a = sva::parse_assertion("p: assert property (@(posedge clk) x0 |-> ##2 $past(x0));");
    auto v = sim::AssertionMonitor(a, trace.lookup()).check(trace);
    for (std::size_t c = 0; c < rows.size(); ++c) {
        sim::Status expect;
        if (!rows[c][0]) expect = sim::Status::vacuous_pass;
        else if (c + 2 >= rows.size()) expect = sim::Status::pending;
        else expect = rows[c + 1][0] ? sim::Status::pass : sim::Status::fail;
        EXPECT_EQ(v.status_at(c), expect) << c;
    }
}
