#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "svaport/rng.hpp"
#include "svaport/rtl.hpp"
#include "svaport/sim.hpp"
#include "svaport/sva.hpp"

namespace svaport::trojan {

/// `signal[msb:lsb] == value`; the whole signal when the range covers it.
struct TriggerTerm {
    std::string signal;
    unsigned msb = 0;
    unsigned lsb = 0;
    std::uint64_t value = 0;

    unsigned width() const { return msb - lsb + 1; }
    bool operator==(const TriggerTerm&) const = default;
};

enum class PayloadKind { invert_net, force_constant, xor_into_assign };
std::string_view to_string(PayloadKind k);
PayloadKind payload_kind_from_string(std::string_view s);

/// Payload on the driver of `target`: invert it, force `value`, or xor
/// `value` (the mask) into it while the trigger holds.
struct Payload {
    PayloadKind kind = PayloadKind::invert_net;
    std::string target;
    std::uint64_t value = 0;

    bool operator==(const Payload&) const = default;
};

enum class ModuleKind { combinational, sequential };
std::string_view to_string(ModuleKind k);

struct TrojanSpec {
    std::string id;
    std::vector<TriggerTerm> trigger;  // conjunction
    unsigned k = 0;                    // total constrained bits
    Payload payload;
    ModuleKind module_kind = ModuleKind::combinational;
    std::string module;
    std::string target_assertion;
    /// Stimulus known to fire the trigger (the forge's witness).
    std::optional<sim::Stimulus> activation_hint;
};

/// Sum of trigger term widths.
unsigned trigger_bits(const TrojanSpec& spec);
/// Checks the spec against a netlist.  Throws ConfigError.
void validate_spec(const TrojanSpec& spec, const rtl::Netlist& netlist);
/// Trigger condition as an expression over the netlist's signals.
ExprPtr trigger_expr(const TrojanSpec& spec, const rtl::Netlist& netlist);

struct InjectedDesign {
    rtl::Netlist netlist;
    std::uint64_t original_hash = 0;
    std::string spec_id;
};

/// Guards the payload by the trigger on the target's existing driver.
/// Throws PayloadConflictError when the target has no assign or register
/// driver, or when the result would loop or touch clock/reset in a
/// combinational module.
InjectedDesign inject(const rtl::Netlist& netlist, const TrojanSpec& spec);

struct ForgeParams {
    std::uint64_t seed = 0;
    std::size_t count = 0;
    unsigned k_min = 1;
    unsigned k_max = 8;
    std::vector<unsigned> k_values;  // used cyclically when non-empty
    std::string module;
    std::string id_prefix = "HW-T";
    std::size_t first_index = 1;
    sim::SearchConfig search;
};

/// Rule-based Trojan generation.  Trojan i targets assertion i mod n: a
/// witness stimulus where that assertion passes non-vacuously fixes the
/// trigger values, trigger bits are drawn from the assertion cones (primary
/// inputs first), and the payload corrupts a consequent signal.
std::vector<TrojanSpec> forge(const rtl::Netlist& netlist, const std::vector<sva::Assertion>& assertions,
                              const ForgeParams& params);

/// Trigger value per cycle of a trace of the clean design.
std::vector<bool> trigger_activity(const TrojanSpec& spec, const sim::CompiledDesign& clean, const sim::Trace& trace);

/// Stimulus under which the trigger holds in some cycle: the hint when it
/// fires, otherwise a search.  Throws ActivationNotFoundError.
sim::Stimulus activation_stimulus(const TrojanSpec& spec, const rtl::Netlist& netlist, std::size_t horizon,
                                  const sim::SearchConfig& config = {});

/// Random stimulus whose trace never fires the trigger, built cycle by
/// cycle with rejection.  Returns nullopt when some cycle cannot avoid it.
std::optional<sim::Stimulus> dormant_stimulus(const TrojanSpec& spec, const sim::CompiledDesign& clean,
                                              std::size_t horizon, unsigned reset_cycles, rng::Engine& engine);

}  // namespace svaport::trojan
