#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "svaport/expr.hpp"

namespace svaport::rtl {

enum class PortDirection { input, output };
enum class NetKind { input, output, internal, register_, constant };

std::string_view to_string(PortDirection d);
std::string_view to_string(NetKind k);

struct Port {
    std::string name;
    PortDirection direction = PortDirection::input;
    unsigned width = 1;

    bool operator==(const Port&) const = default;
};

struct Net {
    std::string name;
    unsigned width = 1;
    NetKind kind = NetKind::internal;

    bool operator==(const Net&) const = default;
};

/// Named constant (`parameter` / `localparam`).  `width == 0` means the
/// declaration carried no range and the value is unsized.
struct Param {
    std::string name;
    std::uint64_t value = 0;
    unsigned width = 0;
    bool local = true;
    ExprPtr value_expr;

    bool operator==(const Param& o) const {
        return name == o.name && value == o.value && width == o.width && local == o.local;
    }
};

struct Assign {
    std::string lhs;
    ExprPtr rhs;
};

struct ResetSpec {
    std::string net;
    bool active_high = true;
    ExprPtr value;
};

struct Register {
    std::string target;
    ExprPtr next;
    std::string clock;
    std::optional<ResetSpec> reset;
};

/// Elaborated single-module design.  Immutable by convention once returned
/// from `parse_design`; transformations produce fresh copies.
class Netlist {
public:
    std::string name;
    std::vector<Port> ports;
    std::map<std::string, Net> nets;       // includes ports and named constants
    std::vector<Assign> assigns;
    std::vector<Register> registers;
    std::map<std::string, Param> params;

    const Net* find_net(const std::string& n) const;
    const Port* find_port(const std::string& n) const;
    const Param* find_param(const std::string& n) const;
    const Assign* driver_assign(const std::string& n) const;
    const Register* driver_register(const std::string& n) const;

    bool is_primary_input(const std::string& n) const;
    /// The single clock net shared by every register, if any register exists.
    std::optional<std::string> clock() const;
    /// Reset nets referenced by register reset specs.
    std::vector<std::string> reset_nets() const;
    std::optional<ResetSpec> reset_of(const std::string& net) const;

    /// Symbol lookup over nets (by declaration slot order given) and params.
    /// `slot_of` maps signal names to frame slots.
    SymbolLookup lookup(const std::map<std::string, std::uint32_t>& slot_of) const;
};

/// Structural equality used for round-trip checks: ports, nets, params,
/// assigns (as a set keyed by lhs) and registers (keyed by target).
bool structurally_equal(const Netlist& a, const Netlist& b);

/// Parses and elaborates one module of the supported Verilog subset.
/// Throws SyntaxError / UnsupportedConstructError / ElaborationError.
Netlist parse_design(std::string_view source);

/// Emits source that `parse_design` maps back to a structurally equal netlist.
std::string render_design(const Netlist& netlist);

/// Topological order of continuous assigns: every assign follows all assigns
/// whose targets it reads.  Ties keep declaration order.  Throws
/// CombinationalLoopError naming the nets of one cycle.
std::vector<const Assign*> combinational_closure(const Netlist& netlist);

/// Re-runs the elaboration checks on a netlist built or mutated in code.
void check_netlist(const Netlist& netlist);

/// Stable 64-bit FNV-1a digest of `render_design(netlist)`.
std::uint64_t design_hash(const Netlist& netlist);

}  // namespace svaport::rtl
