#include "svaport/translate.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include <json.hpp>

#include "svaport/error.hpp"

namespace svaport::translate {

using nlohmann::json;

std::string_view to_string(Origin o) {
    switch (o) {
        case Origin::exact: return "exact";
        case Origin::normalized: return "normalized";
        case Origin::alias_file: return "alias_file";
        case Origin::manual: return "manual";
    }
    return "?";
}

std::string_view to_string(LinkStatus s) {
    switch (s) {
        case LinkStatus::matched: return "matched";
        case LinkStatus::dropped: return "dropped";
        case LinkStatus::unresolved: return "unresolved";
    }
    return "?";
}

const MapEntry* SignalMap::find(const std::string& source) const {
    for (const auto& e : entries)
        if (e.source == source) return &e;
    return nullptr;
}

const AssertionMeta* SignalMap::meta_for(const std::string& source_assertion) const {
    for (const auto& m : assertions)
        if (m.source == source_assertion) return &m;
    return nullptr;
}

const SignalLink* LinkReport::find(const std::string& source) const {
    for (const auto& s : signals)
        if (s.source == source) return &s;
    return nullptr;
}

bool LinkReport::all_resolved() const {
    return std::none_of(signals.begin(), signals.end(),
                        [](const SignalLink& s) { return s.status == LinkStatus::unresolved; });
}

// ---------------------------------------------------------------------------
// Signal map loading
// ---------------------------------------------------------------------------

namespace {

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return fallback;
    return it->get<T>();
}

std::vector<std::string> string_list(const json& j, const char* key, std::vector<std::string> fallback) {
    auto it = j.find(key);
    if (it == j.end()) return fallback;
    if (!it->is_array()) throw ConfigError(std::string("signal map: '") + key + "' must be an array of strings");
    std::vector<std::string> out;
    for (const auto& v : *it) out.push_back(v.get<std::string>());
    return out;
}

}  // namespace

SignalMap parse_signal_map(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("signal map: invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("signal map: top level must be an object");
    SignalMap map;
    try {
        std::set<std::string> sources;
        for (const auto& m : doc.value("mappings", json::array())) {
            MapEntry e;
            e.source = m.at("source").get<std::string>();
            e.target = m.at("target").get<std::string>();
            std::string origin = get_or<std::string>(m, "origin", "alias_file");
            if (origin == "alias_file")
                e.origin = Origin::alias_file;
            else if (origin == "manual")
                e.origin = Origin::manual;
            else
                throw ConfigError("signal map: mapping origin must be 'alias_file' or 'manual', got '" + origin + "'");
            if (!sources.insert(e.source).second)
                throw ConfigError("signal map: duplicate mapping for source '" + e.source + "'");
            map.entries.push_back(std::move(e));
        }
        for (const auto& a : doc.value("augmentations", json::array())) {
            Augmentation aug;
            aug.signal = a.at("signal").get<std::string>();
            std::string cond = a.at("condition").get<std::string>();
            try {
                aug.condition = parse_expression_text(cond, true);
            } catch (const SyntaxError& e) {
                throw ConfigError("signal map: augmentation condition '" + cond + "': " + e.message());
            }
            std::string attach = get_or<std::string>(a, "attach", "antecedent");
            if (attach == "antecedent")
                aug.attach = Attach::antecedent;
            else if (attach == "consequent")
                aug.attach = Attach::consequent;
            else
                throw ConfigError("signal map: attach must be 'antecedent' or 'consequent'");
            std::string pos = get_or<std::string>(a, "position", "append");
            if (pos == "append")
                aug.position = Position::append;
            else if (pos == "prepend")
                aug.position = Position::prepend;
            else
                throw ConfigError("signal map: position must be 'append' or 'prepend'");
            if (a.contains("assertion")) aug.assertion = a.at("assertion").get<std::string>();
            aug.note = get_or<std::string>(a, "note", "");
            map.augmentations.push_back(std::move(aug));
        }
        if (doc.contains("normalize")) {
            const json& n = doc.at("normalize");
            map.normalize.strip_suffixes = string_list(n, "strip_suffixes", map.normalize.strip_suffixes);
            map.normalize.strip_prefixes = string_list(n, "strip_prefixes", map.normalize.strip_prefixes);
            map.normalize.case_fold = get_or<bool>(n, "case_fold", true);
        }
        if (doc.contains("style")) {
            std::string neg = get_or<std::string>(doc.at("style"), "negation", "preserve");
            if (neg == "preserve")
                map.negation = NegationStyle::preserve;
            else if (neg == "eq_zero")
                map.negation = NegationStyle::eq_zero;
            else
                throw ConfigError("signal map: style.negation must be 'preserve' or 'eq_zero'");
        }
        for (const auto& m : doc.value("assertions", json::array())) {
            AssertionMeta meta;
            meta.source = m.at("source").get<std::string>();
            if (m.contains("name")) meta.name = m.at("name").get<std::string>();
            if (m.contains("label")) meta.label = m.at("label").get<std::string>();
            if (m.contains("message")) meta.message = m.at("message").get<std::string>();
            map.assertions.push_back(std::move(meta));
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("signal map: ") + e.what());
    }
    return map;
}

void validate_signal_map(const SignalMap& map, const rtl::Netlist& target) {
    auto known = [&](const std::string& n) { return target.find_net(n) || target.find_param(n); };
    for (const auto& e : map.entries)
        if (!known(e.target))
            throw ConfigError("signal map: mapping target '" + e.target + "' does not exist in module '" +
                              target.name + "'");
    for (const auto& a : map.augmentations) {
        if (!known(a.signal))
            throw ConfigError("signal map: augmentation signal '" + a.signal + "' does not exist in module '" +
                              target.name + "'");
        for (const auto& id : identifiers_of(*a.condition))
            if (!known(id))
                throw ConfigError("signal map: augmentation condition references unknown signal '" + id + "'");
    }
}

std::string normalize_name(std::string_view name, const NormalizeRules& rules) {
    auto fold = [&](std::string s) {
        if (rules.case_fold)
            std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
        return s;
    };
    std::string s = fold(std::string(name));
    for (const auto& p : rules.strip_prefixes) {
        std::string fp = fold(p);
        if (!fp.empty() && s.size() > fp.size() && s.compare(0, fp.size(), fp) == 0) {
            s.erase(0, fp.size());
            break;
        }
    }
    for (const auto& x : rules.strip_suffixes) {
        std::string fx = fold(x);
        if (!fx.empty() && s.size() > fx.size() && s.compare(s.size() - fx.size(), fx.size(), fx) == 0) {
            s.erase(s.size() - fx.size());
            break;
        }
    }
    return s;
}

// ---------------------------------------------------------------------------
// Linking stages
// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> target_names(const rtl::Netlist& target) {
    std::vector<std::string> out;
    for (const auto& [n, _] : target.nets) out.push_back(n);
    for (const auto& [n, _] : target.params)
        if (!target.find_net(n)) out.push_back(n);
    std::sort(out.begin(), out.end());
    return out;
}

struct Resolution {
    std::optional<std::string> target;
    std::string method;
};

Resolution resolve(const std::string& name, const rtl::Netlist& target, const SignalMap& map,
                   const std::vector<std::string>& names) {
    if (const MapEntry* e = map.find(name)) return {e->target, std::string(to_string(e->origin))};
    if (target.find_net(name) || target.find_param(name)) return {name, "exact"};
    const std::string key = normalize_name(name, map.normalize);
    std::vector<std::string> hits;
    for (const auto& n : names)
        if (normalize_name(n, map.normalize) == key) hits.push_back(n);
    if (hits.size() == 1) return {hits.front(), "normalized"};
    if (hits.empty()) return {std::nullopt, "no matching signal in target design"};
    std::string m = "ambiguous normalized match:";
    for (const auto& h : hits) m += " " + h;
    return {std::nullopt, m};
}

}  // namespace

LinkReport identify_signals(const sva::Assertion& source, const rtl::Netlist& target, const SignalMap& map) {
    LinkReport r;
    const auto names = target_names(target);
    for (const auto& s : sva::signals_of(source)) {
        SignalLink link;
        link.source = s;
        Resolution res = resolve(s, target, map, names);
        link.target = res.target;
        link.method = res.method;
        link.status = res.target ? LinkStatus::matched : LinkStatus::unresolved;
        r.signals.push_back(std::move(link));
    }
    return r;
}

LinkReport trace_internal_logic(const LinkReport& report, const graph::DependencyGraph& g,
                                const rtl::Netlist& target) {
    LinkReport out = report;
    std::set<std::string> gating;
    std::vector<std::string> inputs;
    for (const auto& p : target.ports)
        if (p.direction == rtl::PortDirection::input) inputs.push_back(p.name);
    std::sort(inputs.begin(), inputs.end());

    for (auto& link : out.signals) {
        link.relationship.reset();
        link.fanin.clear();
        link.gating_candidates.clear();
        if (link.status != LinkStatus::matched || !link.target || !g.contains(*link.target)) continue;
        const std::string& t = *link.target;
        link.fanin = graph::fanin(g, t);
        if (target.is_primary_input(t)) continue;
        for (const auto& in : inputs) {
            auto rel = graph::classify(g, t, in);
            if (rel.kind == graph::RelationKind::unrelated) continue;
            if (!link.relationship || rel.depth < link.relationship->depth) link.relationship = rel;
        }
        const bool driven = target.driver_assign(t) || target.driver_register(t);
        if (driven && target.nets.at(t).width == 1) {
            for (const auto& n : g.reads(t))
                if (n != t) link.gating_candidates.push_back(n);
            gating.insert(link.gating_candidates.begin(), link.gating_candidates.end());
        }
    }
    out.gating_candidates.assign(gating.begin(), gating.end());
    return out;
}

namespace {

bool mentions(const ExprPtr& e, const std::string& name) { return identifiers_of(*e).count(name) != 0; }

bool seq_mentions(const sva::SeqExpr& s, const std::string& name) {
    return std::any_of(s.terms.begin(), s.terms.end(), [&](const sva::SeqTerm& t) { return mentions(t.expr, name); });
}

// Removes conjuncts naming `name`; false when a term would become empty.
bool strip_from(sva::SeqExpr& s, const std::string& name) {
    for (auto& t : s.terms) {
        std::vector<ExprPtr> keep;
        for (const auto& c : conjuncts(t.expr))
            if (!mentions(c, name)) keep.push_back(c);
        if (keep.empty()) return false;
        t.expr = conjoin(keep);
    }
    return true;
}

enum class DropOutcome { dropped_disable, dropped_conjuncts, blocked };

DropOutcome try_drop(sva::Assertion& a, const std::string& name) {
    const bool in_body = seq_mentions(a.antecedent, name) || seq_mentions(a.consequent, name);
    const bool in_disable = a.disable && mentions(a.disable, name);
    if (!in_body) {
        if (in_disable) a.disable = nullptr;
        return DropOutcome::dropped_disable;
    }
    sva::Assertion trial = a;
    if (!strip_from(trial.antecedent, name) || !strip_from(trial.consequent, name)) return DropOutcome::blocked;
    if (in_disable) trial.disable = nullptr;
    a = std::move(trial);
    return DropOutcome::dropped_conjuncts;
}

}  // namespace

LinkReport drop_untranslatable(const LinkReport& report, const sva::Assertion& source, const DropPolicy& policy) {
    LinkReport out = report;
    sva::Assertion work = source;
    for (auto& link : out.signals) {  // sorted by name
        if (link.status != LinkStatus::unresolved || !policy.allow) continue;
        switch (try_drop(work, link.source)) {
            case DropOutcome::dropped_disable:
                link.status = LinkStatus::dropped;
                link.method = "referenced only by the disable condition; disable clause removed";
                break;
            case DropOutcome::dropped_conjuncts:
                link.status = LinkStatus::dropped;
                link.method = "removable conjunct";
                break;
            case DropOutcome::blocked:
                link.method += "; not droppable (removing it would empty a sequence term)";
                break;
        }
    }
    return out;
}

sva::Assertion apply_drops(const sva::Assertion& source, const LinkReport& report) {
    sva::Assertion work = source;
    for (const auto& link : report.signals)
        if (link.status == LinkStatus::dropped) try_drop(work, link.source);
    return work;
}

// ---------------------------------------------------------------------------
// Rewrite
// ---------------------------------------------------------------------------

namespace {

ExprPtr negation_to_eq_zero(const ExprPtr& e) {
    if (e->kind() == ExprKind::unary && e->unary_op() == UnaryOp::logic_not) {
        const ExprPtr& op = e->operand(0);
        if (op->kind() == ExprKind::identifier || op->kind() == ExprKind::select)
            return Expr::binary(BinaryOp::eq, op, Expr::constant(0));
    }
    switch (e->kind()) {
        case ExprKind::unary: return Expr::unary(e->unary_op(), negation_to_eq_zero(e->operand(0)));
        case ExprKind::binary:
            return Expr::binary(e->binary_op(), negation_to_eq_zero(e->operand(0)), negation_to_eq_zero(e->operand(1)));
        case ExprKind::ternary:
            return Expr::ternary(negation_to_eq_zero(e->operand(0)), negation_to_eq_zero(e->operand(1)),
                                 negation_to_eq_zero(e->operand(2)));
        case ExprKind::past: return Expr::past(negation_to_eq_zero(e->operand(0)), e->depth());
        default: return e;
    }
}

void add_conjunct(sva::SeqTerm& term, const ExprPtr& cond, Position pos) {
    auto cs = conjuncts(term.expr);
    for (const auto& c : cs)
        if (structurally_equal(c, cond)) return;
    if (pos == Position::append)
        cs.push_back(cond);
    else
        cs.insert(cs.begin(), cond);
    term.expr = conjoin(cs);
}

std::set<std::string> input_cone(const rtl::Netlist& target, const graph::DependencyGraph& g,
                                 const std::set<std::string>& signals) {
    std::set<std::string> out;
    for (const auto& s : signals) {
        if (!g.contains(s)) continue;
        if (target.is_primary_input(s)) out.insert(s);
        for (const auto& [n, _] : graph::fanin(g, s))
            if (target.is_primary_input(n)) out.insert(n);
    }
    return out;
}

}  // namespace

TranslationOutcome translate(const sva::Assertion& source, const rtl::Netlist& target, const SignalMap& map,
                             const TranslationConfig& config) {
    validate_signal_map(map, target);
    TranslationOutcome out;
    const auto g = graph::build_graph(target);
    out.link_report = identify_signals(source, target, map);
    out.link_report = trace_internal_logic(out.link_report, g, target);
    out.link_report = drop_untranslatable(out.link_report, source, config.drop);

    // Clock: same resolution order as data signals, falling back to the design clock.
    std::optional<std::string> clock;
    {
        Resolution res = resolve(source.clock, target, map, target_names(target));
        if (res.target && target.is_primary_input(*res.target)) {
            clock = res.target;
            out.clock_method = res.method;
        } else if (auto c = target.clock()) {
            clock = c;
            out.clock_method = "design clock";
        } else {
            out.clock_method = "unresolved";
        }
    }

    for (const auto& link : out.link_report.signals)
        if (link.status == LinkStatus::unresolved)
            out.reasons.push_back("signal '" + link.source + "' is untranslatable: " + link.method);
    if (!clock) out.reasons.push_back("clock '" + source.clock + "' has no counterpart in the target design");
    if (!out.reasons.empty()) return out;

    sva::Assertion a = apply_drops(source, out.link_report);
    std::map<std::string, std::string> rename;
    for (const auto& link : out.link_report.signals)
        if (link.status == LinkStatus::matched) rename[link.source] = *link.target;
    auto rewrite = [&](const ExprPtr& e) {
        ExprPtr r = rename_identifiers(e, [&](const std::string& n) -> std::optional<std::string> {
            auto it = rename.find(n);
            if (it == rename.end()) return std::nullopt;
            return it->second;
        });
        return map.negation == NegationStyle::eq_zero ? negation_to_eq_zero(r) : r;
    };
    for (auto& t : a.antecedent.terms) t.expr = rewrite(t.expr);
    for (auto& t : a.consequent.terms) t.expr = rewrite(t.expr);
    if (a.disable) a.disable = rewrite(a.disable);
    a.clock = *clock;

    std::set<std::string> referenced = sva::signals_of(a);
    for (const auto& aug : map.augmentations) {
        if (aug.assertion && *aug.assertion != source.name) continue;
        if (!referenced.count(aug.signal)) continue;
        if (aug.attach == Attach::antecedent)
            add_conjunct(a.antecedent.terms.back(), aug.condition, aug.position);
        else
            add_conjunct(a.consequent.terms.front(), aug.condition, aug.position);
        out.applied_augmentations.push_back(to_string(aug.condition));
    }

    if (const AssertionMeta* meta = map.meta_for(source.name)) {
        if (meta->name) a.name = *meta->name;
        if (meta->label) a.label = *meta->label;
        if (meta->message) a.action = *meta->message;
    }

    // Width and name check against the target before searching for a test case.
    sim::CompiledDesign design(target);
    sim::Trace layout = sim::empty_trace(design);
    sim::AssertionMonitor monitor(a, layout.lookup());

    auto accept = [&](const sim::Trace& t) {
        auto v = monitor.check(t);
        return v.summary.failures == 0 && v.summary.non_vacuous_passes > 0;
    };
    auto found = sim::search_stimulus(design, accept, input_cone(target, g, sva::signals_of(a)), config.search);
    if (found.stimulus) {
        out.testcase = found.stimulus;
        auto v = monitor.check(sim::simulate(design, *found.stimulus));
        out.validation.activated = true;
        out.validation.clean_failures = v.summary.failures;
        out.validation.notes.push_back("test case found after " +
                                       std::to_string(found.statistics.candidates_tried) + " candidates");
    } else {
        sim::Stimulus idle;
        idle.reset_cycles = design.reset() ? config.search.reset_cycles : 0;
        idle.cycles.resize(config.search.horizon);
        out.testcase = idle;
        auto v = monitor.check(sim::simulate(design, idle));
        out.validation.clean_failures = v.summary.failures;
        out.validation.notes.push_back("no stimulus reached a non-vacuous pass within the search budget");
    }
    out.assertion = std::move(a);
    out.translatable = true;
    return out;
}

}  // namespace svaport::translate
