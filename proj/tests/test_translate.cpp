#include <gtest/gtest.h>

#include <random>

#include "support.hpp"
#include "svaport/error.hpp"
#include "svaport/rtl.hpp"
#include "svaport/serialize.hpp"
#include "svaport/sim.hpp"
#include "svaport/sva.hpp"
#include "svaport/translate.hpp"

using namespace svaport;

namespace {

struct Fixture {
    rtl::Netlist target;
    translate::SignalMap map;
    std::vector<sva::Assertion> source;
};

Fixture load(const std::string& dir, const std::string& design, const std::string& sva, const std::string& map) {
    Fixture f;
    f.target = rtl::parse_design(io::read_file(testkit::corpus(dir + "/" + design)));
    f.map = translate::parse_signal_map(io::read_file(testkit::corpus(dir + "/" + map)));
    f.source = sva::parse_assertion_file(io::read_file(testkit::corpus(dir + "/" + sva)));
    return f;
}

translate::TranslationConfig quick_config() {
    translate::TranslationConfig cfg;
    cfg.search.seed = 2024;
    cfg.search.random_budget = 2000;
    return cfg;
}

}  // namespace

TEST(Translate, ConciseCsrAssertionBecomesNamedForm) {
    auto f = load("csr", "ibex_cs_registers.sv", "ns31a_csr.sva", "csr_map.json");
    auto source = sva::parse_assertion(io::read_file(testkit::corpus("golden/ns31a_csr.sva")));
    source.name = "assertion_1";
    auto out = translate::translate(source, f.target, f.map, quick_config());
    ASSERT_TRUE(out.translatable) << (out.reasons.empty() ? "" : out.reasons.front());
    std::string golden = io::read_file(testkit::corpus("golden/ibex_csr_expected.sva"));
    EXPECT_TRUE(sva::structurally_equal(*out.assertion, sva::parse_assertion(golden)));
    EXPECT_EQ(sva::render_assertion(*out.assertion), sva::render_assertion(sva::parse_assertion(golden)));

    const auto* rst = out.link_report.find("rst");
    ASSERT_NE(rst, nullptr);
    EXPECT_EQ(rst->status, translate::LinkStatus::dropped);
    EXPECT_EQ(out.link_report.find("CsrWtAddr")->target, std::optional<std::string>("csr_addr_i"));
    EXPECT_EQ(out.applied_augmentations.size(), 2u);
    EXPECT_TRUE(out.validation.activated);
    EXPECT_EQ(out.validation.clean_failures, 0u);
}

TEST(Translate, NormalizationStripsAffixesAndCase) {
    translate::NormalizeRules rules;
    EXPECT_EQ(translate::normalize_name("Debug_Mode_Q", rules), "debug_mode");
    EXPECT_EQ(translate::normalize_name("csr_addr_i", rules), "csr_addr");
    EXPECT_EQ(translate::normalize_name("_q", rules), "_q");
    rules.strip_prefixes = {"ns31a_"};
    EXPECT_EQ(translate::normalize_name("NS31A_irq_o", rules), "irq");
    rules.case_fold = false;
    EXPECT_EQ(translate::normalize_name("Irq_o", rules), "Irq");
}

TEST(Translate, IdentificationPrefersMapThenExactThenNormalized) {
    auto nl = rtl::parse_design(io::read_file(testkit::corpus("golden/irq_handle.sv")));
    auto map = translate::parse_signal_map(R"({"mappings": [{"source": "Enabled", "target": "irq_enabled"}]})");
    auto a = sva::parse_assertion(
        "p: assert property (@(posedge clk) Enabled && handle_irq |-> Irq_Pending_I);");
    auto rep = translate::identify_signals(a, nl, map);
    EXPECT_EQ(rep.find("Enabled")->method, "alias_file");
    EXPECT_EQ(rep.find("handle_irq")->method, "exact");
    EXPECT_EQ(rep.find("Irq_Pending_I")->method, "normalized");
    EXPECT_EQ(rep.find("Irq_Pending_I")->target, std::optional<std::string>("irq_pending_i"));
    EXPECT_TRUE(rep.all_resolved());
}

TEST(Translate, AmbiguousOrMissingNamesStayUnresolved) {
    auto nl = rtl::parse_design(R"(
module m (input logic clk, input logic a_i, input logic a_o_i, output logic a_o);
  assign a_o = a_i & a_o_i;
endmodule
)");
    auto a = sva::parse_assertion("p: assert property (@(posedge clk) A |-> ghost);");
    auto rep = translate::identify_signals(a, nl, {});
    EXPECT_EQ(rep.find("A")->status, translate::LinkStatus::unresolved);
    EXPECT_NE(rep.find("A")->method.find("ambiguous"), std::string::npos);
    EXPECT_EQ(rep.find("ghost")->status, translate::LinkStatus::unresolved);
    EXPECT_FALSE(rep.all_resolved());
}

TEST(Translate, UnresolvableConsequentMakesAssertionUntranslatable) {
    auto nl = rtl::parse_design(io::read_file(testkit::corpus("golden/irq_handle.sv")));
    auto a = sva::parse_assertion("p: assert property (@(posedge clk) irq_enabled |-> ghost);");
    auto out = translate::translate(a, nl, {}, quick_config());
    EXPECT_FALSE(out.translatable);
    ASSERT_FALSE(out.reasons.empty());
    EXPECT_NE(out.reasons.front().find("ghost"), std::string::npos);
    EXPECT_FALSE(out.assertion);
}

TEST(Translate, RemovableConjunctIsDropped) {
    auto nl = rtl::parse_design(io::read_file(testkit::corpus("golden/irq_handle.sv")));
    auto a = sva::parse_assertion("p: assert property (@(posedge clk) irq_enabled && ghost |-> handle_irq);");
    auto rep = translate::drop_untranslatable(translate::identify_signals(a, nl, {}), a, {});
    EXPECT_EQ(rep.find("ghost")->status, translate::LinkStatus::dropped);
    auto dropped = translate::apply_drops(a, rep);
    EXPECT_EQ(sva::signals_of(dropped), (std::set<std::string>{"irq_enabled", "handle_irq"}));
    translate::DropPolicy strict{false};
    EXPECT_EQ(translate::drop_untranslatable(translate::identify_signals(a, nl, {}), a, strict).find("ghost")->status,
              translate::LinkStatus::unresolved);
}

TEST(Translate, MapErrorsAreConfigErrors) {
    EXPECT_THROW(translate::parse_signal_map("{not json"), ConfigError);
    EXPECT_THROW(translate::parse_signal_map(R"({"mappings": [{"source": "a"}]})"), ConfigError);
    auto nl = rtl::parse_design(io::read_file(testkit::corpus("golden/irq_handle.sv")));
    auto bad = translate::parse_signal_map(R"({"mappings": [{"source": "a", "target": "missing"}]})");
    EXPECT_THROW(translate::validate_signal_map(bad, nl), ConfigError);
}

TEST(Translate, InternalLogicTracingReportsRelationships) {
    auto nl = rtl::parse_design(io::read_file(testkit::corpus("golden/irq_handle.sv")));
    auto a = sva::parse_assertion("p: assert property (@(posedge clk) irq_enabled |-> handle_irq);");
    auto g = graph::build_graph(nl);
    auto rep = translate::trace_internal_logic(translate::identify_signals(a, nl, {}), g, nl);
    const auto* h = rep.find("handle_irq");
    ASSERT_TRUE(h->relationship);
    EXPECT_EQ(h->fanin, graph::fanin(g, "handle_irq"));
    EXPECT_FALSE(rep.gating_candidates.empty());
}

TEST(Translate, CorpusTranslationsAreCompleteAndSound) {
    struct Case {
        const char *dir, *design, *sva, *map;
    };
    for (const auto& c : {Case{"pmp", "ibex_pmp.sv", "ns31a_pmp.sva", "pmp_map.json"},
                          Case{"csr", "ibex_cs_registers.sv", "ns31a_csr.sva", "csr_map.json"},
                          Case{"debug", "ibex_debug.sv", "ns31a_debug.sva", "debug_map.json"},
                          Case{"eti", "ibex_eti.sv", "ns31a_eti.sva", "eti_map.json"},
                          Case{"cf", "ibex_cf.sv", "ns31a_cf.sva", "cf_map.json"}}) {
        auto f = load(c.dir, c.design, c.sva, c.map);
        EXPECT_NO_THROW(translate::validate_signal_map(f.map, f.target));
        sim::CompiledDesign cd(f.target);
        for (const auto& a : f.source) {
            auto out = translate::translate(a, f.target, f.map, quick_config());
            ASSERT_TRUE(out.translatable) << c.dir << "/" << a.name;
            // Every name the translation mentions exists in the target.
            for (const auto& s : sva::signals_of(*out.assertion))
                EXPECT_TRUE(f.target.find_net(s) || f.target.find_param(s)) << s;
            // Its test case exercises the assertion without a failure.
            ASSERT_TRUE(out.testcase);
            auto v = sim::AssertionMonitor(*out.assertion, cd.lookup()).check(sim::simulate(cd, *out.testcase));
            EXPECT_GT(v.summary.non_vacuous_passes, 0u) << a.name;
            EXPECT_EQ(v.summary.failures, 0u) << a.name;
        }
    }
}

TEST(Translate, RenamedRandomDesignSignalsAreRecovered) {
    std::mt19937_64 rng(43);
    for (int i = 0; i < 60; ++i) {
        auto d = testkit::RandomDesign::make(rng, i % 2 == 0);
        auto nl = rtl::parse_design(d.verilog());
        const char* suffixes[] = {"_i", "_o", "_q", ""};
        std::map<std::string, std::string> expect;
        auto pick = [&] {
            int idx = static_cast<int>(rng() % d.n_signals());
            std::string name = d.name_of(idx);
            std::string src = name + suffixes[rng() % 4];
            std::transform(src.begin(), src.end(), src.begin(), [](unsigned char ch) { return std::toupper(ch); });
            if (src == name) src += "_I";
            expect[src] = name;
            return "(" + src + " != 0)";
        };
        std::string text = "p: assert property (@(posedge clk) " + pick() + " && " + pick() + " |-> " + pick() + ");";
        auto a = sva::parse_assertion(text);
        auto rep = translate::identify_signals(a, nl, {});
        for (const auto& [src, tgt] : expect) {
            const auto* link = rep.find(src);
            ASSERT_NE(link, nullptr) << src;
            EXPECT_EQ(link->target, std::optional<std::string>(tgt)) << text;
            EXPECT_EQ(link->method, "normalized");
        }
    }
}
