#include "svaport/sim.hpp"

#include <algorithm>
#include <sstream>

#include "svaport/rng.hpp"

namespace svaport::sim {

namespace {

void collect_literals(const Expr& e, std::set<std::uint64_t>& out) {
    if (e.kind() == ExprKind::constant) out.insert(e.value());
    for (const auto& op : e.operands()) collect_literals(*op, out);
}

}  // namespace

CompiledDesign::CompiledDesign(rtl::Netlist netlist) : netlist_(std::move(netlist)) {
    for (const auto& [name, net] : netlist_.nets) {
        if (net.kind == rtl::NetKind::constant) continue;
        slot_of_[name] = static_cast<std::uint32_t>(signals_.size());
        signals_.push_back(name);
        widths_.push_back(net.width);
    }
    for (const auto& p : netlist_.ports) {
        if (p.direction != rtl::PortDirection::input) continue;
        inputs_.push_back(p.name);
        input_widths_.push_back(p.width);
        input_slots_.push_back(slot_of_.at(p.name));
    }
    clock_ = netlist_.clock();
    auto resets = netlist_.reset_nets();
    if (!resets.empty()) {
        reset_ = resets.front();
        reset_active_high_ = netlist_.reset_of(*reset_)->active_high;
    }

    std::set<std::uint64_t> lits;
    for (const auto& [_, p] : netlist_.params) lits.insert(p.value);

    SymbolLookup look = lookup();
    for (const rtl::Assign* a : rtl::combinational_closure(netlist_)) {
        unsigned w = netlist_.nets.at(a->lhs).width;
        assigns_.emplace_back(slot_of_.at(a->lhs), compile(*a->rhs, look, w));
        collect_literals(*a->rhs, lits);
    }
    for (const auto& r : netlist_.registers) {
        CompiledRegister cr{slot_of_.at(r.target), compile(*r.next, look, netlist_.nets.at(r.target).width)};
        collect_literals(*r.next, lits);
        if (r.reset) {
            cr.has_reset = true;
            cr.reset_slot = slot_of_.at(r.reset->net);
            cr.active_high = r.reset->active_high;
            std::vector<std::uint64_t> empty(signals_.size(), 0);
            cr.reset_value = compile(*r.reset->value, look, netlist_.nets.at(r.target).width).eval(empty) &
                             width_mask(netlist_.nets.at(r.target).width);
        }
        registers_.push_back(std::move(cr));
    }
    literals_.assign(lits.begin(), lits.end());
}

std::optional<std::uint32_t> CompiledDesign::slot(const std::string& name) const {
    auto it = slot_of_.find(name);
    if (it == slot_of_.end()) return std::nullopt;
    return it->second;
}

std::optional<std::size_t> CompiledDesign::input_index(const std::string& name) const {
    auto it = std::find(inputs_.begin(), inputs_.end(), name);
    if (it == inputs_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - inputs_.begin());
}

SymbolLookup CompiledDesign::lookup() const { return netlist_.lookup(slot_of_); }

std::vector<std::vector<std::uint64_t>> CompiledDesign::input_matrix(const Stimulus& s) const {
    std::vector<std::vector<std::uint64_t>> m(s.cycles.size(), std::vector<std::uint64_t>(inputs_.size(), 0));
    std::optional<std::size_t> reset_idx = reset_ ? input_index(*reset_) : std::nullopt;
    for (std::size_t c = 0; c < s.cycles.size(); ++c) {
        if (reset_idx) m[c][*reset_idx] = (c < s.reset_cycles) == reset_active_high_ ? 1 : 0;
        for (const auto& [name, value] : s.cycles[c]) {
            auto idx = input_index(name);
            if (!idx) throw UnknownSignalError(name);
            m[c][*idx] = value & width_mask(input_widths_[*idx]);
        }
    }
    return m;
}

Stimulus CompiledDesign::complete(const Stimulus& s) const {
    Stimulus out;
    out.reset_cycles = s.reset_cycles;
    for (const auto& row : input_matrix(s)) {
        auto& m = out.cycles.emplace_back();
        for (std::size_t i = 0; i < inputs_.size(); ++i) m[inputs_[i]] = row[i];
    }
    return out;
}

void CompiledDesign::settle(std::vector<std::uint64_t>& frame) const {
    for (const auto& [slot, expr] : assigns_) frame[slot] = expr.eval(frame) & width_mask(widths_[slot]);
}

bool CompiledDesign::is_register(const std::string& name) const { return netlist_.driver_register(name) != nullptr; }

// ---------------------------------------------------------------------------

Trace::Trace(std::vector<std::string> signals, std::vector<unsigned> widths,
             std::map<std::string, TraceConstant> constants)
    : signals_(std::move(signals)), widths_(std::move(widths)), constants_(std::move(constants)) {
    for (std::size_t i = 0; i < signals_.size(); ++i) slot_of_[signals_[i]] = static_cast<std::uint32_t>(i);
}

std::optional<std::uint32_t> Trace::slot(const std::string& name) const {
    auto it = slot_of_.find(name);
    if (it == slot_of_.end()) return std::nullopt;
    return it->second;
}

std::span<const std::uint64_t> Trace::row(std::size_t cycle) const {
    return {data_.data() + cycle * signals_.size(), signals_.size()};
}

std::uint64_t Trace::value(const std::string& name, std::size_t cycle) const {
    auto s = slot(name);
    if (!s) throw UnknownSignalError(name);
    return row(cycle)[*s];
}

void Trace::append(std::span<const std::uint64_t> row) {
    data_.insert(data_.end(), row.begin(), row.end());
    ++rows_;
}

SymbolLookup Trace::lookup() const {
    return [this](const std::string& name) -> std::optional<Symbol> {
        if (auto it = constants_.find(name); it != constants_.end()) {
            Symbol s;
            s.is_constant = true;
            s.width = it->second.width;
            s.constant_value = it->second.value;
            return s;
        }
        auto s = slot(name);
        if (!s) return std::nullopt;
        Symbol sym;
        sym.slot = *s;
        sym.width = widths_[*s];
        return sym;
    };
}

// ---------------------------------------------------------------------------

Simulator::Simulator(const CompiledDesign& design) : d_(design) {
    frame_.assign(d_.signals_.size(), 0);
    snapshot_.assign(d_.signals_.size(), 0);
    next_regs_.assign(d_.registers_.size(), 0);
    reset_state();
}

void Simulator::reset_state() {
    std::fill(frame_.begin(), frame_.end(), 0);
    for (const auto& r : d_.registers_) frame_[r.slot] = r.has_reset ? r.reset_value : 0;
}

std::span<const std::uint64_t> Simulator::step(std::span<const std::uint64_t> inputs) {
    for (std::size_t i = 0; i < d_.input_slots_.size(); ++i)
        frame_[d_.input_slots_[i]] = inputs[i] & width_mask(d_.input_widths_[i]);
    d_.settle(frame_);
    snapshot_ = frame_;
    for (std::size_t i = 0; i < d_.registers_.size(); ++i) {
        const auto& r = d_.registers_[i];
        bool in_reset = r.has_reset && (frame_[r.reset_slot] != 0) == r.active_high;
        next_regs_[i] = in_reset ? r.reset_value : (r.next.eval(frame_) & width_mask(d_.widths_[r.slot]));
    }
    for (std::size_t i = 0; i < d_.registers_.size(); ++i) frame_[d_.registers_[i].slot] = next_regs_[i];
    return snapshot_;
}

Trace empty_trace(const CompiledDesign& design) {
    std::map<std::string, TraceConstant> constants;
    for (const auto& [name, p] : design.netlist().params) constants[name] = TraceConstant{p.value, p.width};
    std::vector<unsigned> widths;
    for (const auto& s : design.signals()) widths.push_back(design.netlist().nets.at(s).width);
    return Trace(design.signals(), std::move(widths), std::move(constants));
}

Trace simulate(const CompiledDesign& design, const std::vector<std::vector<std::uint64_t>>& input_matrix) {
    Trace t = empty_trace(design);
    Simulator sim(design);
    for (const auto& row : input_matrix) t.append(sim.step(row));
    return t;
}

Trace simulate(const CompiledDesign& design, const Stimulus& stimulus) {
    return simulate(design, design.input_matrix(stimulus));
}

Trace simulate(const rtl::Netlist& netlist, const Stimulus& stimulus) {
    return simulate(CompiledDesign(netlist), stimulus);
}

// ---------------------------------------------------------------------------
// Monitor
// ---------------------------------------------------------------------------

std::string_view to_string(Status s) {
    switch (s) {
        case Status::not_attempted: return "not_attempted";
        case Status::vacuous_pass: return "vacuous_pass";
        case Status::pass: return "pass";
        case Status::fail: return "fail";
        case Status::pending: return "pending";
    }
    return "?";
}

namespace {

CompiledExpr compile_checked(const Expr& e, const SymbolLookup& lookup) {
    for (const auto& id : identifiers_of(e))
        if (!lookup(id)) throw UnknownSignalError(id);
    return compile(e, lookup);
}

}  // namespace

AssertionMonitor::AssertionMonitor(const sva::Assertion& a, const SymbolLookup& lookup) : name_(a.name) {
    if (a.disable) disable_ = compile_checked(*a.disable, lookup);
    std::size_t off = 0;
    for (const auto& t : a.antecedent.terms) {
        off += t.delay;
        antecedent_.push_back(Term{off, compile_checked(*t.expr, lookup)});
    }
    consequent_start_ = a.implication == sva::Implication::non_overlapped ? 1 : 0;
    off = 0;
    for (const auto& t : a.consequent.terms) {
        off += t.delay;
        consequent_.push_back(Term{off, compile_checked(*t.expr, lookup)});
    }
}

AssertionVerdict AssertionMonitor::check(const Trace& trace) const {
    AssertionVerdict v;
    v.name = name_;
    const std::size_t n = trace.length();
    auto row = [&trace](std::size_t c) { return trace.row(c); };
    auto eval = [&](const CompiledExpr& e, std::size_t c) {
        if (!e.uses_past()) return e.eval(trace.row(c)) != 0;
        return e.eval_at(row, c, &v.past_underflows) != 0;
    };
    std::vector<char> disabled(n, 0);
    if (disable_)
        for (std::size_t c = 0; c < n; ++c) disabled[c] = eval(*disable_, c);

    v.attempts.resize(n);
    for (std::size_t t = 0; t < n; ++t) {
        Attempt& at = v.attempts[t];
        at.start = t;
        if (disabled[t]) {
            at.status = Status::not_attempted;
            ++v.summary.not_attempted;
            continue;
        }
        // Walks the attempt in time order; a disabled cycle cancels it.
        std::size_t checked = t;
        bool cancelled = false;
        auto reach = [&](std::size_t c) {
            for (; checked < c && checked + 1 < n; ++checked)
                if (disabled[checked + 1]) cancelled = true;
            return !cancelled;
        };
        Status status = Status::pass;
        for (const auto& term : antecedent_) {
            std::size_t c = t + term.offset;
            if (c >= n) {
                reach(n - 1);
                status = Status::pending;
                break;
            }
            if (!reach(c)) break;
            if (!eval(term.expr, c)) {
                status = Status::vacuous_pass;
                at.end = c;
                break;
            }
        }
        if (!cancelled && status == Status::pass) {
            std::size_t aend = t + antecedent_.back().offset;
            at.antecedent_end = aend;
            std::size_t base = aend + consequent_start_;
            for (const auto& term : consequent_) {
                std::size_t c = base + term.offset;
                if (c >= n) {
                    reach(n - 1);
                    status = Status::pending;
                    break;
                }
                if (!reach(c)) break;
                if (!eval(term.expr, c)) {
                    status = Status::fail;
                    at.end = c;
                    break;
                }
                at.end = c;
            }
        }
        if (cancelled) {
            at.status = Status::not_attempted;
            at.end.reset();
            ++v.summary.not_attempted;
            continue;
        }
        at.status = status;
        ++v.summary.attempts;
        switch (status) {
            case Status::vacuous_pass: ++v.summary.vacuous_passes; break;
            case Status::pass: ++v.summary.non_vacuous_passes; break;
            case Status::fail:
                ++v.summary.failures;
                v.failure_cycles.push_back(*at.end);
                break;
            case Status::pending: ++v.summary.pending_at_end; break;
            case Status::not_attempted: break;
        }
    }
    std::sort(v.failure_cycles.begin(), v.failure_cycles.end());
    v.failure_cycles.erase(std::unique(v.failure_cycles.begin(), v.failure_cycles.end()), v.failure_cycles.end());
    return v;
}

std::vector<AssertionVerdict> check_assertions(const Trace& trace, const std::vector<sva::Assertion>& assertions) {
    std::vector<AssertionVerdict> out;
    SymbolLookup look = trace.lookup();
    for (const auto& a : assertions) out.push_back(AssertionMonitor(a, look).check(trace));
    return out;
}

// ---------------------------------------------------------------------------
// Stimulus search
// ---------------------------------------------------------------------------

namespace {

Stimulus to_stimulus(const CompiledDesign& d, const std::vector<std::vector<std::uint64_t>>& m, unsigned reset_cycles) {
    Stimulus s;
    s.reset_cycles = reset_cycles;
    for (const auto& row : m) {
        auto& cyc = s.cycles.emplace_back();
        for (std::size_t i = 0; i < d.inputs().size(); ++i) {
            const auto& name = d.inputs()[i];
            if (name == d.clock() || name == d.reset()) continue;
            cyc[name] = row[i];
        }
    }
    return s;
}

}  // namespace

SearchResult search_stimulus(const CompiledDesign& d, const std::function<bool(const Trace&)>& accept,
                             const std::set<std::string>& focus, const SearchConfig& cfg) {
    SearchResult result;
    const auto& inputs = d.inputs();
    const auto& widths = d.input_widths();
    auto reset_idx = d.reset() ? d.input_index(*d.reset()) : std::nullopt;
    auto clock_idx = d.clock() ? d.input_index(*d.clock()) : std::nullopt;
    const unsigned reset_cycles = d.reset() ? cfg.reset_cycles : 0;
    auto drive_reset = [&](std::vector<std::vector<std::uint64_t>>& m) {
        if (!reset_idx) return;
        for (std::size_t c = 0; c < m.size(); ++c)
            m[c][*reset_idx] = (c < reset_cycles) == d.reset_active_high() ? 1 : 0;
    };
    auto try_matrix = [&](std::vector<std::vector<std::uint64_t>>& m) {
        drive_reset(m);
        ++result.statistics.candidates_tried;
        if (accept(simulate(d, m))) {
            result.stimulus = to_stimulus(d, m, reset_cycles);
            return true;
        }
        return false;
    };

    std::vector<std::size_t> free;  // drivable inputs
    for (std::size_t i = 0; i < inputs.size(); ++i)
        if (i != reset_idx && i != clock_idx) free.push_back(i);

    rng::Engine eng = rng::stream(cfg.seed, "stimulus-search");
    const auto& lits = d.literals();
    std::vector<std::vector<std::uint64_t>> m(cfg.horizon, std::vector<std::uint64_t>(inputs.size(), 0));
    for (std::size_t k = 0; k < cfg.random_budget; ++k) {
        for (auto& row : m)
            for (std::size_t i : free) {
                unsigned w = widths[i];
                std::uint64_t pick = rng::below(eng, 4);
                std::uint64_t v;
                if (pick < 2 || (pick == 2 && lits.empty()))
                    v = rng::bits(eng, w);
                else if (pick == 2)
                    v = lits[rng::below(eng, lits.size())];
                else
                    v = rng::below(eng, 2) ? width_mask(w) : 0;
                row[i] = v & width_mask(w);
            }
        if (try_matrix(m)) return result;
    }

    std::vector<std::size_t> focus_idx;
    unsigned bits = 0;
    for (std::size_t i : free)
        if (focus.count(inputs[i])) {
            focus_idx.push_back(i);
            bits += widths[i];
        }
    result.statistics.free_bits = bits;
    if (bits > cfg.exhaustive_bit_limit) return result;
    result.statistics.exhaustive = true;
    for (std::uint64_t combo = 0; combo < (std::uint64_t{1} << bits); ++combo) {
        std::vector<std::uint64_t> row(inputs.size(), 0);
        unsigned shift = 0;
        for (std::size_t i : focus_idx) {
            row[i] = (combo >> shift) & width_mask(widths[i]);
            shift += widths[i];
        }
        std::vector<std::vector<std::uint64_t>> held(cfg.horizon, row);
        if (try_matrix(held)) return result;
    }
    return result;
}

// ---------------------------------------------------------------------------
// VCD
// ---------------------------------------------------------------------------

namespace {

std::string vcd_id(std::size_t i) {
    std::string id;
    do {
        id.push_back(static_cast<char>('!' + i % 94));
        i /= 94;
    } while (i);
    return id;
}

std::string vcd_value(std::uint64_t v, unsigned width, const std::string& id) {
    if (width == 1) return std::to_string(v & 1) + id;
    std::string bits;
    for (int b = static_cast<int>(width) - 1; b >= 0; --b) bits.push_back(((v >> b) & 1) ? '1' : '0');
    auto first = bits.find('1');
    bits = first == std::string::npos ? "0" : bits.substr(first);
    return "b" + bits + " " + id;
}

}  // namespace

void write_vcd(std::ostream& os, const Trace& trace, const std::string& module_name,
               const std::optional<std::string>& clock) {
    const auto& sigs = trace.signals();
    constexpr std::size_t none = static_cast<std::size_t>(-1);
    std::size_t clock_slot = none;
    if (clock)
        if (auto s = trace.slot(*clock)) clock_slot = *s;
    os << "$timescale 1ns $end\n$scope module " << module_name << " $end\n";
    for (std::size_t i = 0; i < sigs.size(); ++i)
        os << "$var wire " << trace.widths()[i] << ' ' << vcd_id(i) << ' ' << sigs[i] << " $end\n";
    os << "$upscope $end\n$enddefinitions $end\n";
    std::vector<std::uint64_t> last;
    for (std::size_t c = 0; c < trace.length(); ++c) {
        auto row = trace.row(c);
        os << '#' << c * 10 << '\n';
        if (c == 0) os << "$dumpvars\n";
        for (std::size_t i = 0; i < sigs.size(); ++i) {
            if (i == clock_slot) {
                os << "0" << vcd_id(i) << '\n';
                continue;
            }
            if (c == 0 || row[i] != last[i]) os << vcd_value(row[i], trace.widths()[i], vcd_id(i)) << '\n';
        }
        if (c == 0) os << "$end\n";
        if (clock_slot != none) os << '#' << c * 10 + 5 << "\n1" << vcd_id(clock_slot) << '\n';
        last.assign(row.begin(), row.end());
    }
    os << '#' << trace.length() * 10 << '\n';
}

}  // namespace svaport::sim
