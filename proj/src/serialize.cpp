#include "svaport/serialize.hpp"

#include <fstream>
#include <sstream>
#include <system_error>

#include "svaport/error.hpp"

namespace svaport::io {

using nlohmann::json;

ojson to_json(const sim::Stimulus& s) {
    ojson j;
    j["reset_cycles"] = s.reset_cycles;
    j["cycles"] = ojson::array();
    for (const auto& c : s.cycles) {
        ojson row = ojson::object();
        for (const auto& [k, v] : c) row[k] = v;
        j["cycles"].push_back(row);
    }
    return j;
}

sim::Stimulus stimulus_from_json(const json& j) {
    sim::Stimulus s;
    try {
        const json* cycles = &j;
        if (j.is_object()) {
            s.reset_cycles = j.value("reset_cycles", 0u);
            cycles = &j.at("cycles");
        }
        if (!cycles->is_array()) throw ConfigError("stimulus: 'cycles' must be an array");
        for (const auto& row : *cycles) {
            auto& m = s.cycles.emplace_back();
            for (const auto& [k, v] : row.items()) m[k] = v.get<std::uint64_t>();
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("stimulus: ") + e.what());
    }
    return s;
}

ojson to_json(const trojan::TrojanSpec& spec) {
    ojson j;
    j["id"] = spec.id;
    j["module"] = spec.module;
    j["module_kind"] = std::string(to_string(spec.module_kind));
    j["target_assertion"] = spec.target_assertion;
    j["k"] = spec.k;
    j["trigger"] = ojson::array();
    for (const auto& t : spec.trigger)
        j["trigger"].push_back({{"signal", t.signal}, {"msb", t.msb}, {"lsb", t.lsb}, {"value", t.value}});
    j["payload"] = {{"kind", std::string(to_string(spec.payload.kind))},
                    {"target", spec.payload.target},
                    {"value", spec.payload.value}};
    j["activation_hint"] = spec.activation_hint ? to_json(*spec.activation_hint) : ojson(nullptr);
    return j;
}

trojan::TrojanSpec spec_from_json(const json& j) {
    trojan::TrojanSpec s;
    try {
        s.id = j.at("id").get<std::string>();
        s.module = j.value("module", "");
        std::string kind = j.value("module_kind", "combinational");
        if (kind == "combinational")
            s.module_kind = trojan::ModuleKind::combinational;
        else if (kind == "sequential")
            s.module_kind = trojan::ModuleKind::sequential;
        else
            throw ConfigError("trojan spec: module_kind must be 'combinational' or 'sequential'");
        s.target_assertion = j.value("target_assertion", "");
        for (const auto& t : j.at("trigger")) {
            trojan::TriggerTerm term;
            term.signal = t.at("signal").get<std::string>();
            if (t.contains("bit")) {
                term.msb = term.lsb = t.at("bit").get<unsigned>();
            } else {
                term.msb = t.at("msb").get<unsigned>();
                term.lsb = t.at("lsb").get<unsigned>();
            }
            term.value = t.at("value").get<std::uint64_t>();
            s.trigger.push_back(term);
        }
        s.k = j.contains("k") ? j.at("k").get<unsigned>() : trojan::trigger_bits(s);
        const json& p = j.at("payload");
        s.payload.kind = trojan::payload_kind_from_string(p.at("kind").get<std::string>());
        s.payload.target = p.at("target").get<std::string>();
        s.payload.value = p.value("value", std::uint64_t{0});
        if (j.contains("activation_hint") && !j.at("activation_hint").is_null())
            s.activation_hint = stimulus_from_json(j.at("activation_hint"));
    } catch (const json::exception& e) {
        throw ConfigError(std::string("trojan spec: ") + e.what());
    }
    return s;
}

ojson to_json(const graph::Relationship& r) {
    return {{"kind", std::string(to_string(r.kind))}, {"depth", r.depth}, {"path", r.witness_path}};
}

ojson to_json(const translate::LinkReport& r) {
    ojson j;
    j["signals"] = ojson::array();
    for (const auto& s : r.signals) {
        ojson e;
        e["source"] = s.source;
        e["status"] = std::string(to_string(s.status));
        e["method"] = s.method;
        e["target"] = s.target ? ojson(*s.target) : ojson(nullptr);
        e["relationship"] = s.relationship ? to_json(*s.relationship) : ojson(nullptr);
        ojson fan = ojson::object();
        for (const auto& [n, d] : s.fanin) fan[n] = d;
        e["fanin"] = fan;
        e["gating_candidates"] = s.gating_candidates;
        j["signals"].push_back(e);
    }
    j["gating_candidates"] = r.gating_candidates;
    return j;
}

ojson to_json(const sim::AssertionVerdict& v) {
    ojson j;
    j["name"] = v.name;
    j["summary"] = {{"attempts", v.summary.attempts},
                    {"vacuous_passes", v.summary.vacuous_passes},
                    {"non_vacuous_passes", v.summary.non_vacuous_passes},
                    {"failures", v.summary.failures},
                    {"pending_at_end", v.summary.pending_at_end},
                    {"not_attempted", v.summary.not_attempted}};
    j["failure_cycles"] = v.failure_cycles;
    j["past_underflows"] = v.past_underflows;
    ojson per = ojson::array();
    for (const auto& a : v.attempts) per.push_back(std::string(to_string(a.status)));
    j["per_cycle"] = per;
    return j;
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw ConfigError("cannot read '" + p.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json read_json(const std::filesystem::path& p) {
    try {
        return json::parse(read_file(p));
    } catch (const json::parse_error& e) {
        throw ConfigError("'" + p.string() + "': invalid JSON: " + e.what());
    }
}

void write_atomic(const std::filesystem::path& p, std::string_view content) {
    std::error_code ec;
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path(), ec);
    std::filesystem::path tmp = p;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ConfigError("cannot write '" + tmp.string() + "'");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw ConfigError("write failed for '" + tmp.string() + "'");
    }
    std::filesystem::rename(tmp, p, ec);
    if (ec) throw ConfigError("cannot move '" + tmp.string() + "' into place: " + ec.message());
}

}  // namespace svaport::io
