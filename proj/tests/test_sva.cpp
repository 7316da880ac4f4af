#include <gtest/gtest.h>

#include <random>

#include "support.hpp"
#include "svaport/error.hpp"
#include "svaport/serialize.hpp"
#include "svaport/sva.hpp"

using namespace svaport;

TEST(Sva, ConciseFormWithDisable) {
    auto a = sva::parse_assertion(io::read_file(testkit::corpus("golden/ns31a_csr.sva")));
    EXPECT_EQ(a.clock, "clk");
    EXPECT_EQ(a.clock_edge, sva::Edge::posedge);
    ASSERT_TRUE(a.disable);
    EXPECT_EQ(to_string(a.disable), "rst");
    EXPECT_EQ(a.implication, sva::Implication::overlapped);
    ASSERT_EQ(a.antecedent.terms.size(), 1u);
    ASSERT_EQ(a.consequent.terms.size(), 1u);
    EXPECT_EQ(sva::signals_of(a), (std::set<std::string>{"CsrWtAddr", "MstatusAddr", "WriteEn_mstatus", "rst"}));
}

TEST(Sva, NamedFormWithActionBlock) {
    auto a = sva::parse_assertion(io::read_file(testkit::corpus("golden/ibex_csr_expected.sva")));
    EXPECT_EQ(a.name, "csr_write_with_matchaddr");
    EXPECT_EQ(a.label, "CSR_2");
    EXPECT_EQ(a.clock, "clk_i");
    EXPECT_FALSE(a.disable);
    ASSERT_TRUE(a.action);
    EXPECT_EQ(*a.action, "Test_failed_for_mstatus_write");
    EXPECT_EQ(a.antecedent.terms.size(), 1u);
    EXPECT_EQ(sva::signals_of(a), (std::set<std::string>{"csr_addr_i", "CSR_MSTATUS", "csr_op_i", "CSR_OP_WRITE",
                                                         "csr_we_int", "mstatus_en"}));
}

TEST(Sva, RenderRoundTrip) {
    for (const char* f : {"golden/ns31a_csr.sva", "golden/ibex_csr_expected.sva"}) {
        auto a = sva::parse_assertion(io::read_file(testkit::corpus(f)));
        auto b = sva::parse_assertion(sva::render_assertion(a));
        EXPECT_TRUE(sva::structurally_equal(a, b)) << sva::render_assertion(a);
    }
    for (const char* f : {"pmp/ns31a_pmp.sva", "csr/ns31a_csr.sva", "debug/ns31a_debug.sva", "eti/ns31a_eti.sva",
                          "cf/ns31a_cf.sva"}) {
        auto all = sva::parse_assertion_file(io::read_file(testkit::corpus(f)));
        auto again = sva::parse_assertion_file(sva::render_assertion_file(all));
        ASSERT_EQ(all.size(), again.size());
        for (std::size_t i = 0; i < all.size(); ++i) EXPECT_TRUE(sva::structurally_equal(all[i], again[i]));
    }
}

TEST(Sva, SequencesDelaysAndPast) {
    auto a = sva::parse_assertion(
        "p: assert property (@(posedge clk) a ##2 b |=> c ##1 d == $past(e, 3));");
    EXPECT_EQ(a.implication, sva::Implication::non_overlapped);
    ASSERT_EQ(a.antecedent.terms.size(), 2u);
    EXPECT_EQ(a.antecedent.terms[1].delay, 2u);
    EXPECT_EQ(a.antecedent.span(), 2u);
    EXPECT_EQ(a.consequent.length(), 1u);
    auto past = a.consequent.terms[1].expr->operand(1);
    EXPECT_EQ(past->kind(), ExprKind::past);
    EXPECT_EQ(past->depth(), 3u);
}

TEST(Sva, ImplicationFreePropertyBecomesTrivialAntecedent) {
    auto a = sva::parse_assertion("p: assert property (@(posedge clk) x == y);");
    ASSERT_EQ(a.antecedent.terms.size(), 1u);
    EXPECT_EQ(to_string(a.antecedent.terms[0].expr), "1'b1");
}

TEST(Sva, FileNamesUnlabelledAssertionsByPosition) {
    auto all = sva::parse_assertion_file(io::read_file(testkit::corpus("csr/ns31a_csr.sva")));
    ASSERT_EQ(all.size(), 7u);
    EXPECT_EQ(all[0].name, "assertion_1");
    EXPECT_EQ(all[1].name, "csr_mtvec_write");
}

TEST(Sva, DuplicateNamesRejected) {
    EXPECT_THROW(sva::parse_assertion_file("a1: assert property (@(posedge clk) x |-> y);\n"
                                           "a1: assert property (@(posedge clk) y |-> x);\n"),
                 Error);
}

TEST(Sva, UnsupportedOperatorsNameTheConstruct) {
    const char* cases[] = {
        "p: assert property (@(posedge clk) a |-> b throughout c);",
        "p: assert property (@(posedge clk) a |-> ##[1:3] b);",
        "p: assert property (@(posedge clk) a[*2] |-> b);",
        "p: assert property (@(posedge clk) a |-> $rose(b));",
        "p: assert property (@(posedge clk) a |-> b intersect c);",
    };
    for (const char* c : cases) {
        try {
            sva::parse_assertion(c);
            ADD_FAILURE() << c;
        } catch (const UnsupportedConstructError& e) {
            EXPECT_GT(e.where().column, 0u) << c;
        }
    }
}

TEST(Sva, SyntaxErrorReportsExpectedToken) {
    try {
        sva::parse_assertion("p: assert property (@(posedge clk) a |-> );");
        FAIL();
    } catch (const SyntaxError& e) {
        EXPECT_EQ(e.where().line, 1u);
    }
}

TEST(Sva, NormalizeImplicationRewritesNonOverlapped) {
    auto a = sva::parse_assertion("p: assert property (@(posedge clk) a |=> b);");
    auto b = sva::parse_assertion("p: assert property (@(posedge clk) a |-> ##1 b);");
    EXPECT_TRUE(sva::structurally_equal(sva::normalize_implication(a), b));
}

TEST(Sva, RandomAssertionsRoundTrip) {
    std::mt19937_64 rng(3);
    const char* atoms[] = {"a", "b", "c[1:0] == 2'b10", "!d", "e != f", "$past(a)", "$past(g, 2) == 3'd5"};
    for (int i = 0; i < 300; ++i) {
        auto seq = [&](bool allow_past) {
            std::string s;
            int n = 1 + static_cast<int>(rng() % 3);
            for (int k = 0; k < n; ++k) {
                if (k) s += " ##" + std::to_string(1 + rng() % 3) + " ";
                std::string atom = atoms[rng() % (allow_past ? 7 : 5)];
                if (rng() % 2) atom += " && " + std::string(atoms[rng() % 5]);
                s += atom;
            }
            return s;
        };
        std::string text = "r" + std::to_string(i) + ": assert property (@(posedge clk) ";
        if (rng() % 2) text += "disable iff (rst) ";
        text += seq(false) + (rng() % 2 ? " |-> " : " |=> ") + seq(true) + ");";
        auto a = sva::parse_assertion(text);
        auto b = sva::parse_assertion(sva::render_assertion(a));
        EXPECT_TRUE(sva::structurally_equal(a, b)) << text;
    }
}

namespace {

void walk(const ExprPtr& e, std::set<std::string>& out) {
    if (!e) return;
    if (e->kind() == ExprKind::identifier || e->kind() == ExprKind::select) out.insert(e->name());
    for (const auto& o : e->operands()) walk(o, out);
}

}  // namespace

TEST(Sva, SignalsOfMatchesLeafWalk) {
    for (const char* f : {"pmp/ns31a_pmp.sva", "csr/ns31a_csr.sva", "debug/ns31a_debug.sva", "eti/ns31a_eti.sva",
                          "cf/ns31a_cf.sva"}) {
        for (const auto& a : sva::parse_assertion_file(io::read_file(testkit::corpus(f)))) {
            std::set<std::string> leaves;
            walk(a.disable, leaves);
            for (const auto& t : a.antecedent.terms) walk(t.expr, leaves);
            for (const auto& t : a.consequent.terms) walk(t.expr, leaves);
            EXPECT_EQ(sva::signals_of(a), leaves) << a.name;
        }
    }
}
