#include "svaport/metrics.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#include <boost/math/special_functions/beta.hpp>
#include <json.hpp>

#include "svaport/error.hpp"
#include "svaport/rng.hpp"
#include "svaport/sim.hpp"

namespace svaport::metrics {

Dyadic Dyadic::make(std::uint64_t num, unsigned exp) {
    while (num != 0 && (num & 1) == 0 && exp > 0) {
        num >>= 1;
        --exp;
    }
    if (num == 0) exp = 0;
    return Dyadic{num, exp};
}

double Dyadic::to_double() const { return std::ldexp(static_cast<double>(num), -static_cast<int>(exp)); }

double Dyadic::log10() const {
    if (num == 0) return -INFINITY;
    return std::log10(static_cast<double>(num)) - exp * std::log10(2.0);
}

std::string Dyadic::to_string() const { return std::to_string(num) + "/2^" + std::to_string(exp); }

double tpi(double p) {
    if (!(p > 0.0) || p > 1.0) throw DomainError("TPI needs 0 < P <= 1, got " + std::to_string(p));
    return -std::log10(p);
}

double tpi(const Dyadic& p) {
    if (p.num == 0 || p.log10() > 0) throw DomainError("TPI needs 0 < P <= 1, got " + p.to_string());
    return -p.log10();
}

double tder(std::size_t detected, std::size_t generated) {
    if (generated == 0) throw DomainError("TDER needs at least one generated Trojan");
    if (detected > generated) throw DomainError("TDER: detected exceeds generated");
    return 100.0 * static_cast<double>(detected) / static_cast<double>(generated);
}

Dyadic analytic_probability(unsigned k) {
    if (k == 0) throw DomainError("trigger must constrain at least one bit");
    return Dyadic{1, k};
}

Dyadic analytic_probability(const trojan::TrojanSpec& spec) { return analytic_probability(spec.k); }

std::vector<ConeLeaf> trigger_cone(const rtl::Netlist& nl, const trojan::TrojanSpec& spec) {
    // Walks assign drivers only: a register is a free bit within the cycle.
    std::map<std::string, std::uint64_t> leaves;
    std::set<std::string> seen;
    std::vector<std::string> work;
    auto is_leaf = [&nl](const std::string& s) { return nl.is_primary_input(s) || nl.driver_register(s); };
    for (const auto& t : spec.trigger) {
        if (is_leaf(t.signal))
            leaves[t.signal] |= width_mask(t.width()) << t.lsb;
        else
            work.push_back(t.signal);
    }
    while (!work.empty()) {
        std::string s = work.back();
        work.pop_back();
        if (!seen.insert(s).second || nl.find_param(s)) continue;
        if (is_leaf(s)) {
            leaves[s] |= width_mask(nl.nets.at(s).width);
        } else if (const auto* a = nl.driver_assign(s)) {
            for (const auto& id : identifiers_of(*a->rhs)) work.push_back(id);
        }
    }
    std::vector<ConeLeaf> out;
    for (const auto& [s, m] : leaves) out.push_back({s, static_cast<unsigned>(std::popcount(m)), m});
    return out;
}

namespace {

// Spreads the low bits of `v` over the set bits of `mask`.
std::uint64_t deposit(std::uint64_t v, std::uint64_t mask) {
    std::uint64_t out = 0;
    for (std::uint64_t bit = 1; mask; bit <<= 1) {
        std::uint64_t low = mask & (~mask + 1);
        if (v & bit) out |= low;
        mask ^= low;
    }
    return out;
}

struct ConeEvaluator {
    sim::CompiledDesign design;
    CompiledExpr trigger;
    std::vector<std::pair<std::uint32_t, ConeLeaf>> leaves;  // slot, leaf
    std::vector<std::uint64_t> frame;
    unsigned bits = 0;

    ConeEvaluator(const rtl::Netlist& nl, const trojan::TrojanSpec& spec) : design(nl) {
        trojan::validate_spec(spec, nl);
        trigger = compile(*trojan::trigger_expr(spec, nl), design.lookup());
        for (const auto& l : trigger_cone(nl, spec)) {
            leaves.emplace_back(*design.slot(l.signal), l);
            bits += l.width;
        }
        frame.assign(design.signals().size(), 0);
    }

    bool fires() {
        design.settle(frame);
        return trigger.eval(frame) != 0;
    }
};

}  // namespace

Dyadic brute_force_probability(const rtl::Netlist& nl, const trojan::TrojanSpec& spec, unsigned max_bits) {
    ConeEvaluator ev(nl, spec);
    if (ev.bits > max_bits)
        throw ConeTooLargeError("trigger cone of " + spec.id + " has " + std::to_string(ev.bits) +
                                    " free bits (limit " + std::to_string(max_bits) + "); use Monte Carlo",
                                ev.bits);
    std::uint64_t hits = 0;
    for (std::uint64_t combo = 0; combo < (std::uint64_t{1} << ev.bits); ++combo) {
        unsigned shift = 0;
        for (const auto& [slot, leaf] : ev.leaves) {
            ev.frame[slot] = deposit(combo >> shift, leaf.mask);
            shift += leaf.width;
        }
        if (ev.fires()) ++hits;
    }
    return Dyadic::make(hits, ev.bits);
}

std::pair<double, double> clopper_pearson(std::uint64_t hits, std::uint64_t n, double confidence) {
    const double alpha = 1.0 - confidence;
    const double x = static_cast<double>(hits);
    const double m = static_cast<double>(n);
    double lo = hits == 0 ? 0.0 : boost::math::ibeta_inv(x, m - x + 1, alpha / 2);
    double hi = hits == n ? 1.0 : boost::math::ibeta_inv(x + 1, m - x, 1 - alpha / 2);
    return {lo, hi};
}

MonteCarloEstimate monte_carlo_probability(const rtl::Netlist& nl, const trojan::TrojanSpec& spec,
                                           std::uint64_t samples, std::uint64_t seed) {
    if (samples < 1000) throw DomainError("Monte Carlo needs at least 1000 samples");
    ConeEvaluator ev(nl, spec);
    rng::Engine eng = rng::stream(seed, "monte-carlo:" + spec.id);
    MonteCarloEstimate est;
    est.samples = samples;
    est.seed = seed;
    for (std::uint64_t s = 0; s < samples; ++s) {
        for (const auto& [slot, leaf] : ev.leaves) ev.frame[slot] = eng() & leaf.mask;
        if (ev.fires()) ++est.hits;
    }
    est.estimate = static_cast<double>(est.hits) / static_cast<double>(samples);
    std::tie(est.lower, est.upper) = clopper_pearson(est.hits, samples);
    return est;
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

Format format_from_string(std::string_view s) {
    if (s == "table") return Format::table;
    if (s == "json") return Format::json;
    if (s == "csv") return Format::csv;
    throw ConfigError("unknown report format '" + std::string(s) + "' (expected table, json or csv)");
}

std::string_view to_string(Format f) {
    switch (f) {
        case Format::table: return "table";
        case Format::json: return "json";
        case Format::csv: return "csv";
    }
    return "?";
}

std::string format_probability(const Dyadic& p) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", p.to_double());
    return buf;
}

std::string format_fixed(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

namespace {

using ojson = nlohmann::ordered_json;

std::vector<std::string> module_cells(const ModuleRow& m) {
    return {m.module,
            std::to_string(m.source_assertions),
            std::to_string(m.translated),
            format_fixed(m.translation_pct, 0) + "%",
            std::to_string(m.generated),
            std::to_string(m.detected),
            m.detection_pct ? format_fixed(*m.detection_pct, 0) + "%" : "n/a"};
}

std::vector<std::string> trojan_cells(const TrojanRow& t) {
    return {t.id, t.module, std::to_string(t.k), format_probability(t.probability), format_fixed(t.tpi, 2),
            t.error ? "error" : (t.detected ? "yes" : "no")};
}

const std::vector<std::string> kModuleHeader{"Module",           "Source assertions", "Translated",
                                             "Translation %",    "Generated Trojans", "Detected Trojans",
                                             "Trojan detection %"};
const std::vector<std::string> kTrojanHeader{"HW-T", "Module", "k", "Triggering probability", "TPI", "Detected"};

std::string render_table(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
    std::vector<std::size_t> w(header.size());
    for (std::size_t i = 0; i < header.size(); ++i) w[i] = header[i].size();
    for (const auto& r : rows)
        for (std::size_t i = 0; i < r.size(); ++i) w[i] = std::max(w[i], r[i].size());
    std::ostringstream os;
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) os << "  ";
            if (i == 0 || i == 1)
                os << std::left << std::setw(static_cast<int>(w[i])) << cells[i];
            else
                os << std::right << std::setw(static_cast<int>(w[i])) << cells[i];
        }
        os << '\n';
    };
    line(header);
    std::size_t total = 0;
    for (auto x : w) total += x;
    os << std::string(total + 2 * (w.size() - 1), '-') << '\n';
    for (const auto& r : rows) line(r);
    return os.str();
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

}  // namespace

std::string emit_report(const MetricsReport& r, Format format) {
    std::vector<std::vector<std::string>> mrows, trows;
    for (const auto& m : r.modules) mrows.push_back(module_cells(m));
    for (const auto& t : r.trojans) trows.push_back(trojan_cells(t));

    switch (format) {
        case Format::table: {
            std::string out = "Security assertion translation and Trojan detection (seed " + std::to_string(r.seed) +
                              ")\n\n" + render_table(kModuleHeader, mrows) + "\nTrojan triggering probability\n\n";
            out += trows.empty() ? "(no Trojans)\n" : render_table(kTrojanHeader, trows);
            return out;
        }
        case Format::csv: {
            std::ostringstream os;
            auto line = [&](const std::vector<std::string>& cells) {
                for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << csv_escape(cells[i]);
                os << '\n';
            };
            os << "# seed," << r.seed << '\n';
            line(kModuleHeader);
            for (const auto& m : mrows) line(m);
            os << '\n';
            line(kTrojanHeader);
            for (const auto& t : trows) line(t);
            return os.str();
        }
        case Format::json: {
            ojson doc;
            doc["seed"] = r.seed;
            doc["modules"] = ojson::array();
            for (const auto& m : r.modules) {
                ojson j;
                j["module"] = m.module;
                j["source_assertions"] = m.source_assertions;
                j["translated"] = m.translated;
                j["translation_pct"] = m.translation_pct;
                j["generated"] = m.generated;
                j["detected"] = m.detected;
                j["detection_pct"] = m.detection_pct ? ojson(*m.detection_pct) : ojson(nullptr);
                doc["modules"].push_back(j);
            }
            doc["trojans"] = ojson::array();
            for (const auto& t : r.trojans) {
                ojson j;
                j["id"] = t.id;
                j["module"] = t.module;
                j["k"] = t.k;
                j["probability"] = {{"num", t.probability.num}, {"exp", t.probability.exp},
                                    {"text", format_probability(t.probability)}};
                j["tpi"] = std::round(t.tpi * 1e6) / 1e6;
                j["tpi_text"] = format_fixed(t.tpi, 2);
                j["detected"] = t.detected;
                j["detected_by"] = t.detected_by;
                j["error"] = t.error ? ojson(*t.error) : ojson(nullptr);
                doc["trojans"].push_back(j);
            }
            return doc.dump(2) + "\n";
        }
    }
    return {};
}

MetricsReport parse_report(std::string_view text) {
    MetricsReport r;
    try {
        auto doc = nlohmann::json::parse(text);
        r.seed = doc.at("seed").get<std::uint64_t>();
        for (const auto& j : doc.at("modules")) {
            ModuleRow m;
            m.module = j.at("module").get<std::string>();
            m.source_assertions = j.at("source_assertions").get<std::size_t>();
            m.translated = j.at("translated").get<std::size_t>();
            m.translation_pct = j.at("translation_pct").get<double>();
            m.generated = j.at("generated").get<std::size_t>();
            m.detected = j.at("detected").get<std::size_t>();
            if (!j.at("detection_pct").is_null()) m.detection_pct = j.at("detection_pct").get<double>();
            r.modules.push_back(m);
        }
        for (const auto& j : doc.at("trojans")) {
            TrojanRow t;
            t.id = j.at("id").get<std::string>();
            t.module = j.at("module").get<std::string>();
            t.k = j.at("k").get<unsigned>();
            t.probability = Dyadic{j.at("probability").at("num").get<std::uint64_t>(),
                                   j.at("probability").at("exp").get<unsigned>()};
            t.tpi = j.at("tpi").get<double>();
            t.detected = j.at("detected").get<bool>();
            t.detected_by = j.at("detected_by").get<std::vector<std::string>>();
            if (!j.at("error").is_null()) t.error = j.at("error").get<std::string>();
            r.trojans.push_back(t);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("metrics report: ") + e.what());
    }
    return r;
}

}  // namespace svaport::metrics
