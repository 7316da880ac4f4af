#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "svaport/driver.hpp"
#include "svaport/error.hpp"
#include "svaport/graph.hpp"
#include "svaport/metrics.hpp"
#include "svaport/rtl.hpp"
#include "svaport/sim.hpp"
#include "svaport/sva.hpp"
#include "svaport/translate.hpp"

namespace py = pybind11;
using namespace svaport;

namespace {

struct Design {
    rtl::Netlist netlist;
    graph::DependencyGraph graph;
    std::shared_ptr<sim::CompiledDesign> compiled;

    explicit Design(const std::string& text)
        : netlist(rtl::parse_design(text)),
          graph(graph::build_graph(netlist)),
          compiled(std::make_shared<sim::CompiledDesign>(netlist)) {}
};

sim::Stimulus to_stimulus(const std::vector<std::map<std::string, std::uint64_t>>& cycles, unsigned reset_cycles) {
    sim::Stimulus s;
    s.cycles = cycles;
    s.reset_cycles = reset_cycles;
    return s;
}

py::dict relationship(const graph::Relationship& r) {
    py::dict d;
    d["kind"] = std::string(graph::to_string(r.kind));
    d["depth"] = r.depth;
    d["path"] = r.witness_path;
    return d;
}

py::dict summary(const sim::AssertionVerdict& v) {
    py::dict d;
    d["name"] = v.name;
    d["attempts"] = v.summary.attempts;
    d["vacuous_passes"] = v.summary.vacuous_passes;
    d["passes"] = v.summary.non_vacuous_passes;
    d["failures"] = v.summary.failures;
    d["pending"] = v.summary.pending_at_end;
    d["not_attempted"] = v.summary.not_attempted;
    d["failure_cycles"] = v.failure_cycles;
    return d;
}

}  // namespace

PYBIND11_MODULE(svaport, m) {
    m.doc() = "Assertion porting, Trojan injection and detection metrics";

    auto base = py::register_exception<Error>(m, "Error");
    py::register_exception<SyntaxError>(m, "SyntaxError", base.ptr());
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<UnknownSignalError>(m, "UnknownSignalError", base.ptr());
    py::register_exception<DomainError>(m, "DomainError", base.ptr());

    m.def("tpi", py::overload_cast<double>(&metrics::tpi), py::arg("p"), "log10(1 / p).");
    m.def("tder", &metrics::tder, py::arg("detected"), py::arg("generated"));
    m.def(
        "analytic_probability",
        [](unsigned k) {
            auto p = metrics::analytic_probability(k);
            return py::make_tuple(p.num, p.exp);
        },
        py::arg("k"), "Trigger probability 2^-k as (numerator, exponent).");

    py::class_<sva::Assertion>(m, "Assertion")
        .def(py::init([](const std::string& text) { return sva::parse_assertion(text); }), py::arg("text"))
        .def_readonly("name", &sva::Assertion::name)
        .def_readonly("clock", &sva::Assertion::clock)
        .def_property_readonly("signals", [](const sva::Assertion& a) { return sva::signals_of(a); })
        .def("render", &sva::render_assertion)
        .def("__eq__", [](const sva::Assertion& a, const sva::Assertion& b) { return sva::structurally_equal(a, b); })
        .def("__repr__", [](const sva::Assertion& a) { return "<Assertion " + a.name + ">"; });
    m.def("parse_assertions", &sva::parse_assertion_file, py::arg("text"));

    py::class_<Design>(m, "Design")
        .def(py::init<const std::string&>(), py::arg("verilog"))
        .def_property_readonly("name", [](const Design& d) { return d.netlist.name; })
        .def_property_readonly("inputs", [](const Design& d) { return d.compiled->inputs(); })
        .def("fanin", [](const Design& d, const std::string& s) { return graph::fanin(d.graph, s); }, py::arg("signal"))
        .def("fanout", [](const Design& d, const std::string& s) { return graph::fanout(d.graph, s); }, py::arg("signal"))
        .def(
            "classify",
            [](const Design& d, const std::string& reader, const std::string& source) {
                return relationship(graph::classify(d.graph, reader, source));
            },
            py::arg("reader"), py::arg("source"))
        .def("dot", [](const Design& d) { return graph::to_dot(d.graph); })
        .def(
            "simulate",
            [](const Design& d, const std::vector<std::map<std::string, std::uint64_t>>& cycles, unsigned reset_cycles) {
                auto t = sim::simulate(*d.compiled, to_stimulus(cycles, reset_cycles));
                std::map<std::string, std::vector<std::uint64_t>> out;
                for (const auto& s : t.signals())
                    for (std::size_t c = 0; c < t.length(); ++c) out[s].push_back(t.value(s, c));
                return out;
            },
            py::arg("cycles"), py::arg("reset_cycles") = 0, "Per-signal value lists, one entry per cycle.")
        .def(
            "check",
            [](const Design& d, const sva::Assertion& a, const std::vector<std::map<std::string, std::uint64_t>>& cycles,
               unsigned reset_cycles) {
                auto t = sim::simulate(*d.compiled, to_stimulus(cycles, reset_cycles));
                return summary(sim::AssertionMonitor(a, t.lookup()).check(t));
            },
            py::arg("assertion"), py::arg("cycles"), py::arg("reset_cycles") = 0);

    m.def(
        "translate",
        [](const sva::Assertion& source, const Design& target, const std::string& map_json, std::uint64_t seed) {
            auto map = map_json.empty() ? translate::SignalMap{} : translate::parse_signal_map(map_json);
            translate::TranslationConfig cfg;
            cfg.search.seed = seed;
            auto out = translate::translate(source, target.netlist, map, cfg);
            py::dict d;
            d["translatable"] = out.translatable;
            d["assertion"] = out.assertion ? py::cast(*out.assertion) : py::none();
            d["reasons"] = out.reasons;
            py::dict links;
            for (const auto& l : out.link_report.signals) {
                py::dict e;
                e["status"] = std::string(translate::to_string(l.status));
                e["method"] = l.method;
                e["target"] = l.target ? py::cast(*l.target) : py::none();
                links[py::str(l.source)] = e;
            }
            d["links"] = links;
            return d;
        },
        py::arg("source"), py::arg("target"), py::arg("signal_map") = "", py::arg("seed") = 0);

    m.def(
        "run",
        [](const std::string& config_path, const std::string& command, std::optional<std::uint64_t> seed,
           std::optional<std::string> out, std::optional<std::string> format, unsigned jobs) {
            auto cfg = driver::load_config(config_path);
            driver::Overrides o;
            o.seed = seed;
            if (out) o.out = *out;
            if (format) o.format = metrics::format_from_string(*format);
            o.jobs = jobs;
            driver::apply_overrides(cfg, o);
            std::ostringstream so, se;
            int code;
            {
                py::gil_scoped_release release;
                if (command == "translate") code = driver::cmd_translate(cfg, so, se);
                else if (command == "inject") code = driver::cmd_inject(cfg, so, se);
                else if (command == "evaluate") code = driver::cmd_evaluate(cfg, so, se);
                else if (command == "report") code = driver::cmd_report(cfg, so, se);
                else throw ConfigError("unknown command '" + command + "'");
            }
            return py::make_tuple(code, so.str(), se.str());
        },
        py::arg("config"), py::arg("command"), py::arg("seed") = py::none(), py::arg("out") = py::none(),
        py::arg("format") = py::none(), py::arg("jobs") = 1,
        "Runs one pipeline stage; returns (exit code, stdout, stderr).");
}
