// svaport: translate assertions, inject Trojans, evaluate detection.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "svaport/driver.hpp"
#include "svaport/error.hpp"

int main(int argc, char** argv) {
    using namespace svaport;

    CLI::App app{"Security assertion porting and Trojan-based evaluation"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    driver::Overrides ov;
    std::string format;
    std::string out;
    app.add_option("--config", config_path, "Project configuration (JSON)")->required();
    app.add_option("--seed", ov.seed, "Global seed");
    app.add_option("--format", format, "Report format")->check(CLI::IsMember({"table", "json", "csv"}));
    app.add_option("--out", out, "Output directory");
    app.add_option("--jobs", ov.jobs, "Worker threads")->check(CLI::PositiveNumber);

    auto* translate = app.add_subcommand("translate", "Translate source assertions to the target designs");
    auto* inject = app.add_subcommand("inject", "Forge and inject Trojans into the target designs");
    inject->add_option("--count", ov.count, "Trojans per module");
    inject->add_option("--k-min", ov.k_min, "Smallest trigger width")->check(CLI::PositiveNumber);
    inject->add_option("--k-max", ov.k_max, "Largest trigger width")->check(CLI::PositiveNumber);
    auto* evaluate = app.add_subcommand("evaluate", "Simulate injected designs and compute metrics");
    auto* report = app.add_subcommand("report", "Re-render the last metrics report");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        driver::ProjectConfig cfg = driver::load_config(config_path);
        if (!format.empty()) ov.format = metrics::format_from_string(format);
        if (!out.empty()) ov.out = out;
        driver::apply_overrides(cfg, ov);

        if (translate->parsed()) return driver::cmd_translate(cfg, std::cout, std::cerr);
        if (inject->parsed()) return driver::cmd_inject(cfg, std::cout, std::cerr);
        if (evaluate->parsed()) return driver::cmd_evaluate(cfg, std::cout, std::cerr);
        if (report->parsed()) return driver::cmd_report(cfg, std::cout, std::cerr);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
