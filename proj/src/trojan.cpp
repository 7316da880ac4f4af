#include "svaport/trojan.hpp"

#include <algorithm>
#include <set>

#include "svaport/error.hpp"
#include "svaport/graph.hpp"

namespace svaport::trojan {

std::string_view to_string(PayloadKind k) {
    switch (k) {
        case PayloadKind::invert_net: return "invert_net";
        case PayloadKind::force_constant: return "force_constant";
        case PayloadKind::xor_into_assign: return "xor_into_assign";
    }
    return "?";
}

PayloadKind payload_kind_from_string(std::string_view s) {
    if (s == "invert_net") return PayloadKind::invert_net;
    if (s == "force_constant") return PayloadKind::force_constant;
    if (s == "xor_into_assign") return PayloadKind::xor_into_assign;
    throw ConfigError("unknown payload kind '" + std::string(s) + "'");
}

std::string_view to_string(ModuleKind k) { return k == ModuleKind::combinational ? "combinational" : "sequential"; }

unsigned trigger_bits(const TrojanSpec& spec) {
    unsigned k = 0;
    for (const auto& t : spec.trigger) k += t.width();
    return k;
}

void validate_spec(const TrojanSpec& spec, const rtl::Netlist& nl) {
    if (spec.trigger.empty()) throw ConfigError("trojan " + spec.id + ": empty trigger");
    if (spec.k != trigger_bits(spec))
        throw ConfigError("trojan " + spec.id + ": k = " + std::to_string(spec.k) + " but trigger constrains " +
                          std::to_string(trigger_bits(spec)) + " bits");
    for (const auto& t : spec.trigger) {
        const rtl::Net* n = nl.find_net(t.signal);
        if (!n || n->kind == rtl::NetKind::constant)
            throw ConfigError("trojan " + spec.id + ": trigger signal '" + t.signal + "' is not a readable net");
        if (t.lsb > t.msb || t.msb >= n->width)
            throw ConfigError("trojan " + spec.id + ": trigger range out of bounds on '" + t.signal + "'");
        if (t.value & ~width_mask(t.width()))
            throw ConfigError("trojan " + spec.id + ": trigger value does not fit on '" + t.signal + "'");
    }
    const rtl::Net* target = nl.find_net(spec.payload.target);
    if (!target) throw ConfigError("trojan " + spec.id + ": payload target '" + spec.payload.target + "' not found");
    if (spec.payload.value & ~width_mask(target->width))
        throw ConfigError("trojan " + spec.id + ": payload value does not fit on '" + spec.payload.target + "'");
}

ExprPtr trigger_expr(const TrojanSpec& spec, const rtl::Netlist& nl) {
    std::vector<ExprPtr> terms;
    for (const auto& t : spec.trigger) {
        unsigned w = nl.nets.at(t.signal).width;
        ExprPtr lhs = t.width() == w ? Expr::identifier(t.signal) : Expr::select(t.signal, t.msb, t.lsb);
        terms.push_back(Expr::binary(BinaryOp::eq, lhs, Expr::constant(t.value, t.width(), t.width() == 1 ? 'b' : 'h')));
    }
    return conjoin(terms);
}

InjectedDesign inject(const rtl::Netlist& netlist, const TrojanSpec& spec) {
    validate_spec(spec, netlist);
    InjectedDesign out{netlist, rtl::design_hash(netlist), spec.id};
    rtl::Netlist& nl = out.netlist;
    const std::string& target = spec.payload.target;
    const unsigned w = nl.nets.at(target).width;
    ExprPtr trig = trigger_expr(spec, nl);

    if (spec.module_kind == ModuleKind::combinational) {
        std::set<std::string> forbidden;
        if (auto c = nl.clock()) forbidden.insert(*c);
        for (const auto& r : nl.reset_nets()) forbidden.insert(r);
        for (const auto& id : identifiers_of(*trig))
            if (forbidden.count(id))
                throw PayloadConflictError("trojan " + spec.id + ": combinational trigger reads clock/reset '" + id + "'");
    }

    auto wrap = [&](const ExprPtr& orig) -> ExprPtr {
        auto lit = [&](std::uint64_t v) { return Expr::constant(v, w, w == 1 ? 'b' : 'h'); };
        switch (spec.payload.kind) {
            case PayloadKind::invert_net: return Expr::ternary(trig, Expr::unary(UnaryOp::bit_not, orig), orig);
            case PayloadKind::force_constant: return Expr::ternary(trig, lit(spec.payload.value), orig);
            case PayloadKind::xor_into_assign:
                return Expr::binary(BinaryOp::bit_xor, orig, Expr::ternary(trig, lit(spec.payload.value), lit(0)));
        }
        return orig;
    };

    bool placed = false;
    for (auto& a : nl.assigns)
        if (a.lhs == target) {
            a.rhs = wrap(a.rhs);
            placed = true;
        }
    for (auto& r : nl.registers)
        if (r.target == target) {
            if (spec.payload.kind == PayloadKind::xor_into_assign)
                throw PayloadConflictError("trojan " + spec.id + ": xor_into_assign needs an assign driver on '" +
                                           target + "'");
            r.next = wrap(r.next);
            placed = true;
        }
    if (!placed)
        throw PayloadConflictError("trojan " + spec.id + ": payload target '" + target +
                                   "' has no driver to guard; adding one would create a second driver");
    try {
        rtl::check_netlist(nl);
    } catch (const CombinationalLoopError& e) {
        throw PayloadConflictError("trojan " + spec.id + ": payload creates a loop: " + e.what());
    } catch (const ElaborationError& e) {
        throw PayloadConflictError("trojan " + spec.id + ": injected design does not elaborate: " + e.what());
    }
    return out;
}

// ---------------------------------------------------------------------------
// Forge
// ---------------------------------------------------------------------------

namespace {

struct Bit {
    std::string signal;
    unsigned index;
    bool operator<(const Bit& o) const { return std::tie(signal, index) < std::tie(o.signal, o.index); }
};

std::vector<unsigned> k_schedule(const ForgeParams& p, rng::Engine& eng) {
    std::vector<unsigned> ks;
    for (std::size_t i = 0; i < p.count; ++i) {
        if (!p.k_values.empty()) {
            ks.push_back(p.k_values[i % p.k_values.size()]);
        } else if (p.count == 1) {
            ks.push_back(p.k_min);
        } else {
            double f = static_cast<double>(i) / static_cast<double>(p.count - 1);
            ks.push_back(p.k_min + static_cast<unsigned>(f * (p.k_max - p.k_min) + 0.5));
        }
    }
    if (p.k_values.empty()) rng::shuffle(ks, eng);
    return ks;
}

std::vector<Bit> sample_bits(const std::vector<Bit>& inputs, const std::vector<Bit>& internal, unsigned k,
                             rng::Engine& eng) {
    auto take = [&](std::vector<Bit> pool, std::size_t n) {
        for (std::size_t i = 0; i < n; ++i) std::swap(pool[i], pool[i + rng::below(eng, pool.size() - i)]);
        pool.resize(n);
        return pool;
    };
    std::vector<Bit> out;
    if (k <= inputs.size()) {
        out = take(inputs, k);
    } else {
        out = inputs;
        auto more = take(internal, k - inputs.size());
        out.insert(out.end(), more.begin(), more.end());
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<TriggerTerm> group_terms(const std::vector<Bit>& bits, const sim::Trace& trace, std::size_t cycle) {
    std::vector<TriggerTerm> terms;
    for (std::size_t i = 0; i < bits.size();) {
        std::size_t j = i;
        while (j + 1 < bits.size() && bits[j + 1].signal == bits[i].signal && bits[j + 1].index == bits[j].index + 1)
            ++j;
        TriggerTerm t{bits[i].signal, bits[j].index, bits[i].index, 0};
        t.value = (trace.value(t.signal, cycle) >> t.lsb) & width_mask(t.width());
        terms.push_back(t);
        i = j + 1;
    }
    return terms;
}

struct Witness {
    sim::Stimulus stimulus;
    sim::Trace trace;
    sim::Attempt attempt;
};

std::string spec_key(const TrojanSpec& s) {
    std::string k = std::string(to_string(s.payload.kind)) + ":" + s.payload.target + ":";
    for (const auto& t : s.trigger)
        k += t.signal + "[" + std::to_string(t.msb) + ":" + std::to_string(t.lsb) + "]=" + std::to_string(t.value) + ";";
    return k;
}

// Offset, from the consequent start, of the first consequent term reading `signal`.
std::optional<std::size_t> consequent_offset(const sva::Assertion& a, const std::string& signal) {
    std::size_t off = 0;
    for (const auto& t : a.consequent.terms) {
        off += t.delay;
        if (identifiers_of(*t.expr).count(signal)) return off;
    }
    return std::nullopt;
}

}  // namespace

std::vector<TrojanSpec> forge(const rtl::Netlist& nl, const std::vector<sva::Assertion>& assertions,
                              const ForgeParams& params) {
    std::vector<TrojanSpec> out;
    if (params.count == 0) return out;
    if (assertions.empty()) throw InsufficientSignalsError("no assertions to place Trojans under");

    const auto g = graph::build_graph(nl);
    const sim::CompiledDesign design(nl);
    const sim::Trace layout = sim::empty_trace(design);

    std::set<std::string> excluded;
    if (auto c = nl.clock()) excluded.insert(*c);
    for (const auto& r : nl.reset_nets()) excluded.insert(r);
    for (const auto& a : assertions) {
        excluded.insert(a.clock);
        if (a.disable)
            for (const auto& id : identifiers_of(*a.disable)) excluded.insert(id);
    }

    std::set<std::string> cone;
    for (const auto& a : assertions)
        for (const auto& s : sva::signals_of(a)) {
            if (!g.contains(s)) continue;
            cone.insert(s);
            for (const auto& [n, _] : graph::fanin(g, s)) cone.insert(n);
        }
    std::size_t cone_bits = 0;
    for (const auto& s : cone)
        if (!excluded.count(s)) cone_bits += nl.nets.at(s).width;
    if (cone_bits < params.k_min)
        throw InsufficientSignalsError("assertion cones of '" + nl.name + "' hold " + std::to_string(cone_bits) +
                                       " trigger bits, fewer than k_min = " + std::to_string(params.k_min));

    rng::Engine eng = rng::stream(params.seed, "forge:" + params.module);
    const std::vector<unsigned> ks = k_schedule(params, eng);

    std::vector<sim::AssertionMonitor> monitors;
    for (const auto& a : assertions) monitors.emplace_back(a, layout.lookup());

    std::map<std::size_t, Witness> witnesses;
    auto witness_for = [&](std::size_t j) -> const Witness& {
        if (auto it = witnesses.find(j); it != witnesses.end()) return it->second;
        sim::SearchConfig cfg = params.search;
        cfg.seed = rng::substream_seed(params.seed, "witness:" + params.module + ":" + assertions[j].name);
        auto accept = [&](const sim::Trace& t) {
            for (std::size_t m = 0; m < monitors.size(); ++m) {
                auto v = monitors[m].check(t);
                if (v.summary.failures) return false;
                if (m == j && v.summary.non_vacuous_passes == 0) return false;
            }
            return true;
        };
        std::set<std::string> focus;
        for (const auto& s : sva::signals_of(assertions[j]))
            if (g.contains(s)) {
                if (nl.is_primary_input(s)) focus.insert(s);
                for (const auto& [n, _] : graph::fanin(g, s))
                    if (nl.is_primary_input(n)) focus.insert(n);
            }
        auto found = sim::search_stimulus(design, accept, focus, cfg);
        if (!found.stimulus)
            throw ActivationNotFoundError("no stimulus passes assertion '" + assertions[j].name +
                                              "' non-vacuously on the clean design",
                                          found.statistics);
        Witness w{*found.stimulus, sim::simulate(design, *found.stimulus), {}};
        auto v = monitors[j].check(w.trace);
        for (const auto& at : v.attempts)
            if (at.status == sim::Status::pass) {
                w.attempt = at;
                break;
            }
        return witnesses.emplace(j, std::move(w)).first->second;
    };

    std::set<std::string> seen_keys;
    for (std::size_t i = 0; i < params.count; ++i) {
        const std::size_t j = i % assertions.size();
        const sva::Assertion& a = assertions[j];
        const Witness& wit = witness_for(j);
        const unsigned k = ks[i];

        std::set<std::string> ante;
        for (const auto& t : a.antecedent.terms) collect_identifiers(*t.expr, ante);
        if (a.disable) collect_identifiers(*a.disable, ante);
        std::set<std::string> others;
        for (std::size_t m = 0; m < assertions.size(); ++m)
            if (m != j)
                for (const auto& s : sva::signals_of(assertions[m])) others.insert(s);

        struct Candidate {
            bool touches_others;
            std::string name;
            std::set<std::string> reach;  // target and its fan-out
        };
        std::vector<Candidate> candidates;
        std::set<std::string> cons;
        for (const auto& t : a.consequent.terms) collect_identifiers(*t.expr, cons);
        for (const auto& s : cons) {
            if (!g.contains(s) || !(nl.driver_assign(s) || nl.driver_register(s))) continue;
            std::set<std::string> reach{s};
            for (const auto& [n, _] : graph::fanout(g, s)) reach.insert(n);
            if (std::any_of(ante.begin(), ante.end(), [&](const std::string& x) { return reach.count(x); })) continue;
            bool touches = std::any_of(others.begin(), others.end(), [&](const std::string& x) { return reach.count(x); });
            candidates.push_back({touches, s, std::move(reach)});
        }
        std::sort(candidates.begin(), candidates.end(), [](const Candidate& x, const Candidate& y) {
            return std::tie(x.touches_others, x.name) < std::tie(y.touches_others, y.name);
        });
        if (candidates.empty())
            throw InsufficientSignalsError("assertion '" + a.name +
                                           "' has no driven consequent signal that can carry a payload");

        std::optional<TrojanSpec> chosen;
        for (const auto& cand : candidates) {
            const bool is_reg = nl.driver_register(cand.name) != nullptr;
            const std::size_t cons_start = *wit.attempt.antecedent_end +
                                           (a.implication == sva::Implication::non_overlapped ? 1 : 0);
            const std::size_t effect = cons_start + *consequent_offset(a, cand.name);
            if (is_reg && effect == 0) continue;
            const std::size_t when = is_reg ? effect - 1 : effect;

            std::vector<Bit> in_bits, int_bits;
            for (const auto& s : cone) {
                if (excluded.count(s) || cand.reach.count(s)) continue;
                auto& dst = nl.is_primary_input(s) ? in_bits : int_bits;
                for (unsigned b = 0; b < nl.nets.at(s).width; ++b) dst.push_back({s, b});
            }
            if (in_bits.size() + int_bits.size() < k)
                throw InsufficientSignalsError("assertion cones of '" + nl.name + "' leave " +
                                               std::to_string(in_bits.size() + int_bits.size()) +
                                               " trigger bits for payload on '" + cand.name + "', k = " +
                                               std::to_string(k));

            const unsigned w = nl.nets.at(cand.name).width;
            const std::uint64_t observed = wit.trace.value(cand.name, effect);
            std::vector<PayloadKind> kinds{PayloadKind::invert_net, PayloadKind::force_constant,
                                           PayloadKind::xor_into_assign};
            std::rotate(kinds.begin(), kinds.begin() + static_cast<long>(i % 3), kinds.end());
            for (PayloadKind kind : kinds) {
                if (is_reg && kind == PayloadKind::xor_into_assign) kind = PayloadKind::invert_net;
                TrojanSpec spec;
                spec.id = params.id_prefix + std::to_string(params.first_index + i);
                spec.k = k;
                spec.module = params.module;
                spec.module_kind = nl.registers.empty() ? ModuleKind::combinational : ModuleKind::sequential;
                spec.target_assertion = a.name;
                spec.activation_hint = wit.stimulus;
                spec.payload.kind = kind;
                spec.payload.target = cand.name;
                if (kind == PayloadKind::force_constant) spec.payload.value = ~observed & width_mask(w);
                if (kind == PayloadKind::xor_into_assign) spec.payload.value = width_mask(w);
                for (int attempt = 0; attempt < 16; ++attempt) {
                    spec.trigger = group_terms(sample_bits(in_bits, int_bits, k, eng), wit.trace, when);
                    if (!seen_keys.count(spec_key(spec))) break;
                }
                if (seen_keys.count(spec_key(spec))) continue;

                InjectedDesign inj = inject(nl, spec);
                sim::CompiledDesign bad(inj.netlist);
                sim::Trace t = sim::simulate(bad, wit.stimulus);
                if (sim::AssertionMonitor(a, t.lookup()).check(t).summary.failures == 0) continue;
                chosen = std::move(spec);
                break;
            }
            if (chosen) break;
        }
        if (!chosen)
            throw InsufficientSignalsError("no payload on the consequent of '" + a.name +
                                           "' makes it fail under its witness");
        seen_keys.insert(spec_key(*chosen));
        out.push_back(std::move(*chosen));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Activation and dormancy
// ---------------------------------------------------------------------------

std::vector<bool> trigger_activity(const TrojanSpec& spec, const sim::CompiledDesign& clean, const sim::Trace& trace) {
    CompiledExpr trig = compile(*trigger_expr(spec, clean.netlist()), trace.lookup());
    std::vector<bool> out(trace.length());
    for (std::size_t c = 0; c < trace.length(); ++c) out[c] = trig.eval(trace.row(c)) != 0;
    return out;
}

sim::Stimulus activation_stimulus(const TrojanSpec& spec, const rtl::Netlist& nl, std::size_t horizon,
                                  const sim::SearchConfig& config) {
    validate_spec(spec, nl);
    sim::CompiledDesign design(nl);
    auto fires = [&](const sim::Trace& t) {
        auto act = trigger_activity(spec, design, t);
        return std::find(act.begin(), act.end(), true) != act.end();
    };
    if (spec.activation_hint && fires(sim::simulate(design, *spec.activation_hint))) return *spec.activation_hint;

    const auto g = graph::build_graph(nl);
    std::set<std::string> focus;
    for (const auto& t : spec.trigger) {
        if (nl.is_primary_input(t.signal)) focus.insert(t.signal);
        for (const auto& [n, _] : graph::fanin(g, t.signal))
            if (nl.is_primary_input(n)) focus.insert(n);
    }
    sim::SearchConfig cfg = config;
    cfg.horizon = horizon;
    auto found = sim::search_stimulus(design, fires, focus, cfg);
    if (!found.stimulus)
        throw ActivationNotFoundError("trojan " + spec.id + ": no stimulus fires the trigger (" +
                                          std::to_string(found.statistics.candidates_tried) + " candidates, " +
                                          std::to_string(found.statistics.free_bits) + " free input bits" +
                                          (found.statistics.exhaustive ? ", exhaustive" : "") + ")",
                                      found.statistics);
    return *found.stimulus;
}

std::optional<sim::Stimulus> dormant_stimulus(const TrojanSpec& spec, const sim::CompiledDesign& clean,
                                              std::size_t horizon, unsigned reset_cycles, rng::Engine& eng) {
    CompiledExpr trig = compile(*trigger_expr(spec, clean.netlist()), clean.lookup());
    const auto& inputs = clean.inputs();
    const auto& widths = clean.input_widths();
    auto reset_idx = clean.reset() ? clean.input_index(*clean.reset()) : std::nullopt;
    auto clock_idx = clean.clock() ? clean.input_index(*clean.clock()) : std::nullopt;
    if (!clean.reset()) reset_cycles = 0;

    sim::Stimulus s;
    s.reset_cycles = reset_cycles;
    sim::Simulator simr(clean);
    std::vector<std::uint64_t> row(inputs.size());
    for (std::size_t c = 0; c < horizon; ++c) {
        bool ok = false;
        for (int attempt = 0; attempt < 256 && !ok; ++attempt) {
            for (std::size_t i = 0; i < inputs.size(); ++i) row[i] = i == clock_idx ? 0 : rng::bits(eng, widths[i]);
            if (reset_idx) row[*reset_idx] = (c < reset_cycles) == clean.reset_active_high() ? 1 : 0;
            auto state = simr.save();
            auto snap = simr.step(row);
            if (trig.eval(snap) == 0) {
                ok = true;
            } else {
                simr.restore(state);
            }
        }
        if (!ok) return std::nullopt;
        auto& m = s.cycles.emplace_back();
        for (std::size_t i = 0; i < inputs.size(); ++i)
            if (i != reset_idx && i != clock_idx) m[inputs[i]] = row[i];
    }
    return s;
}

}  // namespace svaport::trojan
