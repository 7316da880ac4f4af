#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <fstream>
#include <sstream>

#include "support.hpp"
#include "svaport/driver.hpp"
#include "svaport/error.hpp"
#include "svaport/serialize.hpp"

using namespace svaport;
namespace fs = std::filesystem;

namespace {

class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        path_ = fs::temp_directory_path() / ("svaport_" + tag + "_" + std::to_string(::getpid()));
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    const fs::path& path() const { return path_; }

private:
    fs::path path_;
};

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

driver::ProjectConfig corpus_config(const fs::path& out) {
    auto c = driver::load_config(testkit::corpus("project.json"));
    c.out = out;
    return c;
}

struct Run {
    int code;
    std::string out, err;
};

template <typename F>
Run run(F cmd, const driver::ProjectConfig& c) {
    std::ostringstream o, e;
    int code = cmd(c, o, e);
    return {code, o.str(), e.str()};
}

std::string small_module(const fs::path& dir, const std::string& sva_text, std::size_t count) {
    write(dir / "a.sva", sva_text);
    return R"({"seed": 5, "out": "out", "modules": [{"name": "DO", "target_design": ")" +
           testkit::corpus("debug/ibex_debug.sv").string() + R"(", "assertions": "a.sva", "signal_map": ")" +
           testkit::corpus("debug/debug_map.json").string() + R"(", "forge": {"count": )" + std::to_string(count) +
           R"(, "k_min": 1, "k_max": 3}}]})";
}

}  // namespace

TEST(Driver, CorpusPipelineIsCompleteAndDeterministic) {
    TempDir tmp("pipeline");
    auto c = corpus_config(tmp.path() / "a");
    ASSERT_EQ(run(driver::cmd_translate, c).code, 0);
    ASSERT_EQ(run(driver::cmd_inject, c).code, 0);
    auto first = run(driver::cmd_evaluate, c);
    ASSERT_EQ(first.code, 0) << first.err;

    auto report = metrics::parse_report(io::read_file(driver::report_dir(c) / "metrics.json"));
    ASSERT_EQ(report.modules.size(), 5u);
    for (const auto& m : report.modules) {
        EXPECT_EQ(m.translated, m.source_assertions) << m.module;
        EXPECT_EQ(m.detection_pct, std::optional<double>(100.0)) << m.module;
    }
    EXPECT_EQ(report.trojans.size(), 33u);

    // Same seed, more threads, different directory: identical bytes.
    auto d = corpus_config(tmp.path() / "b");
    d.jobs = 4;
    run(driver::cmd_translate, d);
    run(driver::cmd_inject, d);
    auto second = run(driver::cmd_evaluate, d);
    EXPECT_EQ(first.out, second.out);
    for (const char* f : {"metrics.json", "report.table"})
        EXPECT_EQ(io::read_file(driver::report_dir(c) / f), io::read_file(driver::report_dir(d) / f)) << f;
    EXPECT_EQ(io::read_file(driver::trojan_dir(c, "CF") / "HW-T25.spec.json"),
              io::read_file(driver::trojan_dir(d, "CF") / "HW-T25.spec.json"));

    // `report` re-renders without recomputing.
    d.format = metrics::Format::csv;
    auto csv = run(driver::cmd_report, d);
    EXPECT_EQ(csv.code, 0);
    EXPECT_NE(csv.out.find("HW-T33"), std::string::npos);
}

TEST(Driver, ConfigErrors) {
    TempDir tmp("config");
    EXPECT_THROW(driver::load_config(tmp.path() / "missing.json"), ConfigError);
    EXPECT_THROW(driver::parse_config("{", tmp.path()), ConfigError);
    EXPECT_THROW(driver::parse_config(R"({"modules": [{"name": "X", "target_design": "nope.sv", "assertions": "a.sva"}]})",
                                      tmp.path()),
                 ConfigError);
    std::string ok = small_module(tmp.path(), "", 0);
    EXPECT_NO_THROW(driver::parse_config(ok, tmp.path()));
    std::string dup = ok;
    auto mods = dup.find("[{");
    auto end = dup.rfind("}]");
    std::string entry = dup.substr(mods + 1, end - mods);
    dup.insert(end + 1, ", " + entry);
    EXPECT_THROW(driver::parse_config(dup, tmp.path()), ConfigError);
}

TEST(Driver, OverridesReplaceExplicitKValues) {
    auto c = driver::load_config(testkit::corpus("project.json"));
    driver::Overrides o;
    o.seed = 9;
    o.k_min = 2;
    o.count = 3;
    driver::apply_overrides(c, o);
    EXPECT_EQ(c.seed, 9u);
    for (const auto& m : c.modules) {
        EXPECT_TRUE(m.forge.k_values.empty());
        EXPECT_EQ(m.forge.k_min, 2u);
        EXPECT_EQ(m.forge.count, 3u);
    }
}

TEST(Driver, UntranslatableAssertionGivesExitTwo) {
    TempDir tmp("untranslatable");
    auto text = small_module(tmp.path(),
                             "ok: assert property (@(posedge clk) disable iff (!rst_n) debug_req && !DebugMode |-> "
                             "DbgCauseHalt);\n"
                             "bad: assert property (@(posedge clk) debug_req |-> Ghost);\n",
                             1);
    auto c = driver::parse_config(text, tmp.path());
    auto r = run(driver::cmd_translate, c);
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.out.find("1/2"), std::string::npos);
    EXPECT_TRUE(fs::exists(driver::translate_dir(c, "DO") / "ok.sva"));
    EXPECT_FALSE(fs::exists(driver::translate_dir(c, "DO") / "bad.sva"));
    auto link = io::read_json(driver::translate_dir(c, "DO") / "bad.link.json");
    EXPECT_EQ(link.at("verdict"), "untranslatable");
    EXPECT_EQ(driver::load_translated(c, "DO").size(), 1u);
    // The translatable part still flows through the rest of the pipeline.
    EXPECT_EQ(run(driver::cmd_inject, c).code, 0);
    EXPECT_EQ(run(driver::cmd_evaluate, c).code, 0);
}

TEST(Driver, EmptyAssertionFileWarnsAndZeroTrojansReportsNA) {
    TempDir tmp("empty");
    auto c = driver::parse_config(small_module(tmp.path(), "// nothing here\n", 0), tmp.path());
    auto t = run(driver::cmd_translate, c);
    EXPECT_EQ(t.code, 0);
    EXPECT_NE(t.err.find("warning"), std::string::npos);
    EXPECT_EQ(run(driver::cmd_inject, c).code, 0);
    auto e = run(driver::cmd_evaluate, c);
    EXPECT_EQ(e.code, 0) << e.err;
    EXPECT_NE(e.out.find("n/a"), std::string::npos);
}

TEST(Driver, EvaluateBeforeTranslateFails) {
    TempDir tmp("order");
    auto c = driver::parse_config(small_module(tmp.path(), "", 1), tmp.path());
    auto r = run(driver::cmd_evaluate, c);
    EXPECT_EQ(r.code, 1);
    EXPECT_FALSE(r.err.empty());
}

TEST(Driver, ParallelForRethrowsAndCoversEveryIndex) {
    std::vector<int> hit(100, 0);
    driver::parallel_for(hit.size(), 4, [&](std::size_t i) { hit[i] += 1; });
    EXPECT_EQ(std::count(hit.begin(), hit.end(), 1), 100);
    EXPECT_THROW(driver::parallel_for(10, 3,
                                      [](std::size_t i) {
                                          if (i == 7) throw ConfigError("x");
                                      }),
                 ConfigError);
}

namespace {

int cli(const std::string& args) {
    std::string cmd = std::string(SVAPORT_CLI) + " " + args + " >/dev/null 2>&1";
    int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Cli, ExitCodes) {
    TempDir tmp("cli");
    write(tmp.path() / "p.json", small_module(tmp.path(), "bad: assert property (@(posedge clk) debug_req |-> Ghost);\n", 1));
    std::string cfg = "--config " + (tmp.path() / "p.json").string();
    EXPECT_EQ(cli(cfg + " translate"), 2);
    EXPECT_EQ(cli("--config " + (tmp.path() / "missing.json").string() + " translate"), 1);
    EXPECT_EQ(cli(cfg + " --format xml translate"), 1);
    EXPECT_EQ(cli(cfg + " frobnicate"), 1);
    EXPECT_EQ(cli("--help"), 0);

    std::string corpus = "--config " + testkit::corpus("project.json").string() + " --out " +
                         (tmp.path() / "out").string() + " --format json --jobs 2";
    EXPECT_EQ(cli(corpus + " translate"), 0);
    EXPECT_EQ(cli(corpus + " --seed 7 inject --count 2 --k-min 1 --k-max 3"), 0);
    EXPECT_EQ(cli(corpus + " --seed 7 evaluate"), 0);
    EXPECT_EQ(cli(corpus + " report"), 0);
    auto j = io::read_json(tmp.path() / "out" / "report" / "metrics.json");
    EXPECT_EQ(j.at("seed"), 7);
    EXPECT_EQ(j.at("trojans").size(), 10u);
}
