#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "svaport/error.hpp"
#include "svaport/expr.hpp"
#include "svaport/rtl.hpp"
#include "svaport/sva.hpp"

namespace svaport::sim {

/// Per-cycle primary-input values.  Inputs missing from a cycle's map are
/// driven 0; the design's reset input is held active for the first
/// `reset_cycles` cycles unless the map drives it explicitly.
struct Stimulus {
    std::vector<std::map<std::string, std::uint64_t>> cycles;
    unsigned reset_cycles = 0;

    std::size_t length() const { return cycles.size(); }
    bool operator==(const Stimulus&) const = default;
};

/// Netlist prepared for simulation: slot layout, evaluation order and
/// compiled expressions.  Immutable and shareable across threads.
class CompiledDesign {
public:
    explicit CompiledDesign(rtl::Netlist netlist);

    const rtl::Netlist& netlist() const { return netlist_; }
    /// Signal names in slot order (sorted, named constants excluded).
    const std::vector<std::string>& signals() const { return signals_; }
    const std::map<std::string, std::uint32_t>& slot_of() const { return slot_of_; }
    std::optional<std::uint32_t> slot(const std::string& name) const;
    /// Primary inputs in port order.
    const std::vector<std::string>& inputs() const { return inputs_; }
    const std::vector<unsigned>& input_widths() const { return input_widths_; }
    std::optional<std::size_t> input_index(const std::string& name) const;
    const std::optional<std::string>& clock() const { return clock_; }
    /// Reset input and its active level, when registers declare one.
    const std::optional<std::string>& reset() const { return reset_; }
    bool reset_active_high() const { return reset_active_high_; }
    /// Constants appearing in the design (params and literals), for biased search.
    const std::vector<std::uint64_t>& literals() const { return literals_; }
    SymbolLookup lookup() const;

    /// Fully specified input matrix (cycle-major, input order) for a stimulus.
    std::vector<std::vector<std::uint64_t>> input_matrix(const Stimulus& s) const;
    /// Stimulus listing every input on every cycle (the explicit form of `s`).
    Stimulus complete(const Stimulus& s) const;

    /// Evaluates every assign in place over a frame whose inputs and
    /// registers are already set.
    void settle(std::vector<std::uint64_t>& frame) const;
    /// True when `name` is driven by a register.
    bool is_register(const std::string& name) const;

private:
    friend class Simulator;
    struct CompiledRegister {
        std::uint32_t slot;
        CompiledExpr next;
        bool has_reset = false;
        std::uint32_t reset_slot = 0;
        bool active_high = true;
        std::uint64_t reset_value = 0;
    };

    rtl::Netlist netlist_;
    std::vector<std::string> signals_;
    std::map<std::string, std::uint32_t> slot_of_;
    std::vector<unsigned> widths_;
    std::vector<std::string> inputs_;
    std::vector<unsigned> input_widths_;
    std::vector<std::uint32_t> input_slots_;
    std::optional<std::string> clock_;
    std::optional<std::string> reset_;
    bool reset_active_high_ = true;
    std::vector<std::uint64_t> literals_;
    std::vector<std::pair<std::uint32_t, CompiledExpr>> assigns_;  // topological order
    std::vector<CompiledRegister> registers_;
};

/// Named constant visible to assertions evaluated over a trace.
struct TraceConstant {
    std::uint64_t value = 0;
    unsigned width = 0;
};

/// Per-cycle snapshot of every signal: settled combinational values and the
/// register values in effect during the cycle.
class Trace {
public:
    Trace() = default;
    Trace(std::vector<std::string> signals, std::vector<unsigned> widths,
          std::map<std::string, TraceConstant> constants);

    const std::vector<std::string>& signals() const { return signals_; }
    const std::vector<unsigned>& widths() const { return widths_; }
    const std::map<std::string, TraceConstant>& constants() const { return constants_; }
    std::optional<std::uint32_t> slot(const std::string& name) const;
    std::size_t length() const { return signals_.empty() ? rows_ : data_.size() / signals_.size(); }

    std::span<const std::uint64_t> row(std::size_t cycle) const;
    /// Throws UnknownSignalError for names not in the trace.
    std::uint64_t value(const std::string& name, std::size_t cycle) const;

    void append(std::span<const std::uint64_t> row);
    SymbolLookup lookup() const;

    bool operator==(const Trace& o) const {
        return signals_ == o.signals_ && widths_ == o.widths_ && data_ == o.data_ && rows_ == o.rows_;
    }

private:
    std::vector<std::string> signals_;
    std::vector<unsigned> widths_;
    std::map<std::string, std::uint32_t> slot_of_;
    std::map<std::string, TraceConstant> constants_;
    std::vector<std::uint64_t> data_;
    std::size_t rows_ = 0;  // row count for designs without signals
};

/// Stepwise two-phase simulator over a compiled design.
class Simulator {
public:
    explicit Simulator(const CompiledDesign& design);

    /// Registers back to their reset value (or 0).
    void reset_state();
    /// Applies one cycle of inputs (input order), settles assigns, returns the
    /// sampled snapshot, then clocks the registers.
    std::span<const std::uint64_t> step(std::span<const std::uint64_t> inputs);

    /// Register state, for speculative stepping.
    std::vector<std::uint64_t> save() const { return frame_; }
    void restore(const std::vector<std::uint64_t>& state) { frame_ = state; }

private:
    const CompiledDesign& d_;
    std::vector<std::uint64_t> frame_;
    std::vector<std::uint64_t> snapshot_;
    std::vector<std::uint64_t> next_regs_;
};

Trace empty_trace(const CompiledDesign& design);
Trace simulate(const CompiledDesign& design, const Stimulus& stimulus);
Trace simulate(const CompiledDesign& design, const std::vector<std::vector<std::uint64_t>>& input_matrix);
Trace simulate(const rtl::Netlist& netlist, const Stimulus& stimulus);

// ---------------------------------------------------------------------------
// Assertion monitor
// ---------------------------------------------------------------------------

enum class Status { not_attempted, vacuous_pass, pass, fail, pending };
std::string_view to_string(Status s);

/// Outcome of the attempt started at `start`.  `antecedent_end` is set when
/// the antecedent matched; `end` is the cycle that decided the attempt.
struct Attempt {
    std::size_t start = 0;
    Status status = Status::not_attempted;
    std::optional<std::size_t> antecedent_end;
    std::optional<std::size_t> end;
};

struct VerdictSummary {
    std::size_t attempts = 0;
    std::size_t vacuous_passes = 0;
    std::size_t non_vacuous_passes = 0;
    std::size_t failures = 0;
    std::size_t pending_at_end = 0;
    std::size_t not_attempted = 0;
};

struct AssertionVerdict {
    std::string name;
    std::vector<Attempt> attempts;  // one per cycle, indexed by start cycle
    VerdictSummary summary;
    std::vector<std::size_t> failure_cycles;  // cycles where a consequent term failed
    std::uint64_t past_underflows = 0;        // `$past` reads before cycle 0 (value 0 used)

    Status status_at(std::size_t cycle) const { return attempts.at(cycle).status; }
};

/// Assertion compiled against a trace's signal layout.
class AssertionMonitor {
public:
    /// Throws UnknownSignalError for identifiers missing from the layout.
    AssertionMonitor(const sva::Assertion& a, const SymbolLookup& lookup);

    AssertionVerdict check(const Trace& trace) const;
    const std::string& name() const { return name_; }

private:
    struct Term {
        std::size_t offset;
        CompiledExpr expr;
    };
    std::string name_;
    std::optional<CompiledExpr> disable_;
    std::vector<Term> antecedent_;
    std::vector<Term> consequent_;
    std::size_t consequent_start_ = 0;  // offset of consequent from antecedent end
};

std::vector<AssertionVerdict> check_assertions(const Trace& trace, const std::vector<sva::Assertion>& assertions);

// ---------------------------------------------------------------------------
// Stimulus search and trace dumps
// ---------------------------------------------------------------------------

struct SearchConfig {
    std::uint64_t seed = 0;
    std::size_t horizon = 16;
    unsigned reset_cycles = 1;
    std::size_t random_budget = 10000;
    unsigned exhaustive_bit_limit = 20;
};

struct SearchResult {
    std::optional<Stimulus> stimulus;
    SearchStatistics statistics;
};

/// Looks for a stimulus whose trace satisfies `accept`.  A seeded random
/// phase (values biased towards design constants) is followed, when the
/// `focus` inputs total at most `exhaustive_bit_limit` bits, by enumerating
/// every assignment of those inputs held constant after reset.
SearchResult search_stimulus(const CompiledDesign& design, const std::function<bool(const Trace&)>& accept,
                             const std::set<std::string>& focus, const SearchConfig& config);

/// Value-change dump of a trace; one timestep per cycle, clock toggling.
void write_vcd(std::ostream& os, const Trace& trace, const std::string& module_name,
               const std::optional<std::string>& clock = std::nullopt);

}  // namespace svaport::sim
