#include "svaport/driver.hpp"

#include <atomic>
#include <exception>
#include <mutex>
#include <set>
#include <thread>

#include "svaport/error.hpp"
#include "svaport/serialize.hpp"
#include "svaport/translate.hpp"

namespace svaport::driver {

using nlohmann::json;
using io::ojson;

namespace {

fs::path resolve(const fs::path& base, const std::string& p) {
    fs::path r(p);
    return r.is_absolute() ? r : base / r;
}

fs::path existing(const fs::path& base, const json& j, const char* key, const std::string& module) {
    if (!j.contains(key) || !j.at(key).is_string())
        throw ConfigError("module '" + module + "': missing path '" + key + "'");
    fs::path p = resolve(base, j.at(key).get<std::string>());
    if (!fs::exists(p)) throw ConfigError("module '" + module + "': " + key + " '" + p.string() + "' does not exist");
    return p;
}

std::string display(const fs::path& p) { return p.lexically_normal().string(); }

struct ModuleInputs {
    rtl::Netlist target;
    std::vector<sva::Assertion> assertions;
    translate::SignalMap map;
};

ModuleInputs load_inputs(const ModuleConfig& m) {
    ModuleInputs in;
    auto with_file = [](const fs::path& p, auto&& fn) {
        try {
            return fn(io::read_file(p));
        } catch (const ConfigError&) {
            throw;
        } catch (const Error& e) {
            throw ConfigError(display(p) + ": " + e.what());
        }
    };
    in.target = with_file(m.target_design, [](const std::string& s) { return rtl::parse_design(s); });
    if (m.source_design)
        with_file(*m.source_design, [](const std::string& s) { return rtl::parse_design(s); });
    in.assertions = with_file(m.assertions, [](const std::string& s) { return sva::parse_assertion_file(s); });
    if (m.signal_map)
        in.map = with_file(*m.signal_map, [](const std::string& s) { return translate::parse_signal_map(s); });
    return in;
}

sim::SearchConfig search_config(const ProjectConfig& c) {
    sim::SearchConfig s;
    s.seed = c.seed;
    s.horizon = c.horizon;
    s.reset_cycles = c.reset_cycles;
    s.random_budget = c.search_budget;
    return s;
}

ojson outcome_json(const ProjectConfig& c, const ModuleConfig& m, const sva::Assertion& src,
                   const translate::TranslationOutcome& o) {
    ojson j;
    j["seed"] = c.seed;
    j["module"] = m.name;
    j["source_assertion"] = src.name;
    j["verdict"] = o.translatable ? "translatable" : "untranslatable";
    j["translated_name"] = o.assertion ? ojson(o.assertion->name) : ojson(nullptr);
    j["reasons"] = o.reasons;
    j["clock"] = {{"source", src.clock}, {"method", o.clock_method}};
    j["augmentations"] = o.applied_augmentations;
    j["validation"] = {{"activated", o.validation.activated},
                       {"clean_failures", o.validation.clean_failures},
                       {"notes", o.validation.notes}};
    j["link_report"] = io::to_json(o.link_report);
    return j;
}

std::vector<std::size_t> first_indices(const ProjectConfig& c) {
    std::vector<std::size_t> first;
    std::size_t next = 1;
    for (const auto& m : c.modules) {
        first.push_back(next);
        next += m.forge.count;
    }
    return first;
}

}  // namespace

ProjectConfig parse_config(std::string_view json_text, const fs::path& base) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    ProjectConfig c;
    try {
        c.seed = j.value("seed", std::uint64_t{0});
        c.horizon = j.value("horizon", std::size_t{16});
        c.reset_cycles = j.value("reset_cycles", 1u);
        c.search_budget = j.value("search_budget", std::size_t{10000});
        c.format = metrics::format_from_string(j.value("format", std::string("table")));
        c.out = resolve(base, j.value("out", std::string("out")));
        c.jobs = j.value("jobs", 1u);
        if (c.horizon == 0) throw ConfigError("config: horizon must be positive");
        std::set<std::string> names;
        for (const auto& mj : j.at("modules")) {
            ModuleConfig m;
            m.name = mj.at("name").get<std::string>();
            if (m.name.empty() || m.name.find_first_of("/\\") != std::string::npos)
                throw ConfigError("config: invalid module name '" + m.name + "'");
            if (!names.insert(m.name).second) throw ConfigError("config: duplicate module '" + m.name + "'");
            m.target_design = existing(base, mj, "target_design", m.name);
            m.assertions = existing(base, mj, "assertions", m.name);
            if (mj.contains("source_design")) m.source_design = existing(base, mj, "source_design", m.name);
            if (mj.contains("signal_map")) m.signal_map = existing(base, mj, "signal_map", m.name);
            if (mj.contains("forge")) {
                const auto& f = mj.at("forge");
                m.forge.count = f.value("count", std::size_t{0});
                m.forge.k_min = f.value("k_min", 1u);
                m.forge.k_max = f.value("k_max", 8u);
                m.forge.k_values = f.value("k_values", std::vector<unsigned>{});
            }
            c.modules.push_back(std::move(m));
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return c;
}

ProjectConfig load_config(const fs::path& path) {
    return parse_config(io::read_file(path), path.has_parent_path() ? path.parent_path() : fs::path("."));
}

void apply_overrides(ProjectConfig& c, const Overrides& o) {
    if (o.seed) c.seed = *o.seed;
    if (o.format) c.format = *o.format;
    if (o.out) c.out = *o.out;
    if (o.jobs) c.jobs = std::max(1u, *o.jobs);
    for (auto& m : c.modules) {
        if (o.count) m.forge.count = *o.count;
        if (o.k_min || o.k_max) m.forge.k_values.clear();
        if (o.k_min) m.forge.k_min = *o.k_min;
        if (o.k_max) m.forge.k_max = *o.k_max;
    }
}

fs::path translate_dir(const ProjectConfig& c, const std::string& m) { return c.out / m / "translate"; }
fs::path trojan_dir(const ProjectConfig& c, const std::string& m) { return c.out / m / "trojans"; }
fs::path eval_dir(const ProjectConfig& c, const std::string& m) { return c.out / m / "eval"; }
fs::path report_dir(const ProjectConfig& c) { return c.out / "report"; }

std::vector<sva::Assertion> load_translated(const ProjectConfig& c, const std::string& module) {
    fs::path p = translate_dir(c, module) / "translated.sva";
    if (!fs::exists(p)) throw ConfigError("module '" + module + "': no translations found (run translate first)");
    try {
        return sva::parse_assertion_file(io::read_file(p));
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(display(p) + ": " + e.what());
    }
}

std::vector<std::string> load_trojan_ids(const ProjectConfig& c, const std::string& module) {
    fs::path p = trojan_dir(c, module) / "index.json";
    if (!fs::exists(p)) throw ConfigError("module '" + module + "': no Trojans found (run inject first)");
    json j = io::read_json(p);
    std::vector<std::string> ids;
    try {
        for (const auto& t : j.at("trojans")) ids.push_back(t.at("id").get<std::string>());
    } catch (const json::exception& e) {
        throw ConfigError(display(p) + ": " + e.what());
    }
    return ids;
}

Detection evaluate_trojan(const rtl::Netlist& injected, const sim::Stimulus& stimulus,
                          const std::vector<sva::Assertion>& assertions) {
    Detection d;
    sim::Trace trace = sim::simulate(injected, stimulus);
    d.verdicts = sim::check_assertions(trace, assertions);
    for (const auto& v : d.verdicts)
        if (v.summary.failures > 0) d.detected_by.push_back(v.name);
    d.detected = !d.detected_by.empty();
    return d;
}

void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& fn) {
    if (jobs <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first;
    std::mutex mu;
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < n;) {
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(mu);
                if (!first) first = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    unsigned t = std::min<std::size_t>(jobs, n);
    for (unsigned i = 0; i < t; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (first) std::rethrow_exception(first);
}

int cmd_translate(const ProjectConfig& c, std::ostream& out, std::ostream& err) {
    int rc = 0;
    for (const auto& m : c.modules) {
        ModuleInputs in;
        try {
            in = load_inputs(m);
            translate::validate_signal_map(in.map, in.target);
        } catch (const Error& e) {
            err << "error: " << m.name << ": " << e.what() << "\n";
            rc = 1;
            continue;
        }
        if (in.assertions.empty()) err << "warning: " << m.name << ": assertion file contains no assertions\n";

        translate::TranslationConfig tc;
        tc.search = search_config(c);
        std::vector<translate::TranslationOutcome> outcomes(in.assertions.size());
        std::vector<std::string> errors(in.assertions.size());
        parallel_for(in.assertions.size(), c.jobs, [&](std::size_t i) {
            try {
                outcomes[i] = translate::translate(in.assertions[i], in.target, in.map, tc);
            } catch (const Error& e) {
                errors[i] = e.what();
            }
        });

        fs::path dir = translate_dir(c, m.name);
        std::error_code ec;
        fs::remove_all(dir, ec);
        std::vector<sva::Assertion> translated;
        ojson files = ojson::array();
        bool untranslatable = false;
        for (std::size_t i = 0; i < in.assertions.size(); ++i) {
            const auto& src = in.assertions[i];
            if (!errors[i].empty()) {
                err << "error: " << m.name << ": " << src.name << ": " << errors[i] << "\n";
                rc = 1;
                continue;
            }
            const auto& o = outcomes[i];
            io::write_json(dir / (src.name + ".link.json"), outcome_json(c, m, src, o));
            ojson entry = {{"source", src.name}, {"verdict", o.translatable ? "translatable" : "untranslatable"}};
            if (o.translatable) {
                io::write_atomic(dir / (src.name + ".sva"), sva::render_assertion(*o.assertion));
                ojson tcj = io::to_json(*o.testcase);
                tcj["seed"] = c.seed;
                io::write_json(dir / (src.name + ".testcase.json"), tcj);
                translated.push_back(*o.assertion);
                entry["translated_name"] = o.assertion->name;
                entry["file"] = src.name + ".sva";
            } else {
                untranslatable = true;
                for (const auto& r : o.reasons) err << m.name << ": " << src.name << ": untranslatable: " << r << "\n";
            }
            files.push_back(entry);
        }
        io::write_atomic(dir / "translated.sva", sva::render_assertion_file(translated));
        ojson summary;
        summary["seed"] = c.seed;
        summary["module"] = m.name;
        summary["source_assertions"] = in.assertions.size();
        summary["translated"] = translated.size();
        summary["assertions"] = files;
        io::write_json(dir / "summary.json", summary);
        out << m.name << ": " << translated.size() << "/" << in.assertions.size() << " assertions translated\n";
        if (untranslatable && rc == 0) rc = 2;
    }
    return rc;
}

int cmd_inject(const ProjectConfig& c, std::ostream& out, std::ostream& err) {
    int rc = 0;
    auto first = first_indices(c);
    for (std::size_t mi = 0; mi < c.modules.size(); ++mi) {
        const auto& m = c.modules[mi];
        try {
            rtl::Netlist target = rtl::parse_design(io::read_file(m.target_design));
            auto assertions = load_translated(c, m.name);
            fs::path dir = trojan_dir(c, m.name);
            std::error_code ec;
            fs::remove_all(dir, ec);

            trojan::ForgeParams fp;
            fp.seed = c.seed;
            fp.count = m.forge.count;
            fp.k_min = m.forge.k_min;
            fp.k_max = m.forge.k_max;
            fp.k_values = m.forge.k_values;
            fp.module = m.name;
            fp.first_index = first[mi];
            fp.search = search_config(c);
            std::vector<trojan::TrojanSpec> specs;
            if (fp.count > 0) specs = trojan::forge(target, assertions, fp);

            std::vector<sim::Stimulus> stimuli(specs.size());
            std::vector<std::string> designs(specs.size());
            parallel_for(specs.size(), c.jobs, [&](std::size_t i) {
                auto injected = trojan::inject(target, specs[i]);
                designs[i] = rtl::render_design(injected.netlist);
                stimuli[i] = trojan::activation_stimulus(specs[i], target, c.horizon, fp.search);
            });

            ojson index;
            index["seed"] = c.seed;
            index["module"] = m.name;
            index["trojans"] = ojson::array();
            for (std::size_t i = 0; i < specs.size(); ++i) {
                const auto& s = specs[i];
                ojson sj = io::to_json(s);
                sj["seed"] = c.seed;
                io::write_json(dir / (s.id + ".spec.json"), sj);
                io::write_atomic(dir / (s.id + ".sv"), "// seed " + std::to_string(c.seed) + "\n" + designs[i]);
                ojson st = io::to_json(stimuli[i]);
                st["seed"] = c.seed;
                io::write_json(dir / (s.id + ".stimulus.json"), st);
                index["trojans"].push_back({{"id", s.id}, {"k", s.k}, {"target_assertion", s.target_assertion}});
            }
            io::write_json(dir / "index.json", index);
            out << m.name << ": " << specs.size() << " Trojans injected\n";
        } catch (const Error& e) {
            err << "error: " << m.name << ": " << e.what() << "\n";
            rc = 1;
        }
    }
    return rc;
}

int cmd_evaluate(const ProjectConfig& c, std::ostream& out, std::ostream& err) {
    int rc = 0;
    metrics::MetricsReport report;
    report.seed = c.seed;
    for (const auto& m : c.modules) {
        metrics::ModuleRow row;
        row.module = m.name;
        std::vector<sva::Assertion> assertions;
        std::vector<std::string> ids;
        try {
            json summary = io::read_json(translate_dir(c, m.name) / "summary.json");
            row.source_assertions = summary.at("source_assertions").get<std::size_t>();
            row.translated = summary.at("translated").get<std::size_t>();
            assertions = load_translated(c, m.name);
            ids = load_trojan_ids(c, m.name);
        } catch (const std::exception& e) {
            err << "error: " << m.name << ": " << e.what() << "\n";
            rc = 1;
            continue;
        }
        row.translation_pct = row.source_assertions ? 100.0 * row.translated / row.source_assertions : 0.0;

        std::vector<metrics::TrojanRow> rows(ids.size());
        parallel_for(ids.size(), c.jobs, [&](std::size_t i) {
            auto& r = rows[i];
            r.id = ids[i];
            r.module = m.name;
            ojson ej;
            ej["seed"] = c.seed;
            ej["id"] = r.id;
            try {
                fs::path dir = trojan_dir(c, m.name);
                auto spec = io::spec_from_json(io::read_json(dir / (r.id + ".spec.json")));
                auto stim = io::stimulus_from_json(io::read_json(dir / (r.id + ".stimulus.json")));
                rtl::Netlist injected = rtl::parse_design(io::read_file(dir / (r.id + ".sv")));
                r.k = spec.k;
                r.probability = metrics::analytic_probability(spec);
                r.tpi = metrics::tpi(r.probability);
                auto d = evaluate_trojan(injected, stim, assertions);
                r.detected = d.detected;
                r.detected_by = d.detected_by;
                ej["k"] = r.k;
                ej["probability"] = r.probability.to_string();
                ej["tpi"] = r.tpi;
                ej["detected"] = r.detected;
                ej["detected_by"] = r.detected_by;
                ej["verdicts"] = ojson::array();
                for (const auto& v : d.verdicts) ej["verdicts"].push_back(io::to_json(v));
            } catch (const std::exception& e) {
                r.error = e.what();
                ej["error"] = e.what();
            }
            io::write_json(eval_dir(c, m.name) / (r.id + ".json"), ej);
        });
        for (auto& r : rows) {
            if (r.error) {
                err << "error: " << m.name << ": " << r.id << ": " << *r.error << "\n";
                rc = 1;
            }
            row.generated++;
            if (r.detected) row.detected++;
            report.trojans.push_back(std::move(r));
        }
        if (row.generated > 0) row.detection_pct = metrics::tder(row.detected, row.generated);
        report.modules.push_back(row);
    }
    fs::path dir = report_dir(c);
    std::string json_text = metrics::emit_report(report, metrics::Format::json);
    io::write_atomic(dir / "metrics.json", json_text);
    std::string rendered = metrics::emit_report(report, c.format);
    io::write_atomic(dir / ("report." + std::string(metrics::to_string(c.format))), rendered);
    out << rendered;
    return rc;
}

int cmd_report(const ProjectConfig& c, std::ostream& out, std::ostream& err) {
    fs::path dir = report_dir(c);
    try {
        auto report = metrics::parse_report(io::read_file(dir / "metrics.json"));
        std::string rendered = metrics::emit_report(report, c.format);
        io::write_atomic(dir / ("report." + std::string(metrics::to_string(c.format))), rendered);
        out << rendered;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace svaport::driver
