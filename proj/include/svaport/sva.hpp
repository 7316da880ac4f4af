#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "svaport/expr.hpp"

namespace svaport::sva {

enum class Edge { posedge, negedge };
enum class Implication { overlapped, non_overlapped };  // |->  |=>

/// One boolean term of a sequence, preceded by `##delay` (0 for the first
/// term when no leading delay is written).
struct SeqTerm {
    unsigned delay = 0;
    ExprPtr expr;
};

struct SeqExpr {
    std::vector<SeqTerm> terms;

    /// Cycles from the first term's evaluation to the last term's.
    unsigned span() const;
    /// Offset of the final term from the sequence start (leading delay included).
    unsigned length() const;
};

struct Assertion {
    std::string name;   // property name, or statement label for the concise form
    std::string label;  // statement label of a named-property assertion (may be empty)
    Edge clock_edge = Edge::posedge;
    std::string clock;
    ExprPtr disable;    // null when no `disable iff`
    SeqExpr antecedent;
    Implication implication = Implication::overlapped;
    SeqExpr consequent;
    std::optional<std::string> action;  // `else $error("...")` message
};

bool structurally_equal(const SeqExpr& a, const SeqExpr& b);
/// Field-by-field structural equality (rendering style is not part of the AST).
bool structurally_equal(const Assertion& a, const Assertion& b);

/// Parses exactly one assertion, in either the concise
/// `[label:] assert property (@(posedge clk) ...)` form or the named
/// `property ...; endproperty` + `assert property (name)` form.
Assertion parse_assertion(std::string_view text);

/// Parses every assertion in a `.sva` file.  Unlabelled concise assertions
/// are named `assertion_<n>` (1-based position).  Names must be unique.
std::vector<Assertion> parse_assertion_file(std::string_view text);

/// Named-property layout when the assertion carries a statement label or a
/// failure message, otherwise the one-line concise form.
std::string render_assertion(const Assertion& a);
std::string render_assertion_file(const std::vector<Assertion>& assertions);

std::string render_sequence(const SeqExpr& s);

/// Every identifier referenced by antecedent, consequent, or disable
/// condition.  Literals are not identifiers; named constants are.
std::set<std::string> signals_of(const Assertion& a);

/// Rewrites `a |=> c` as `a |-> ##1 c`; other assertions are returned as-is.
Assertion normalize_implication(const Assertion& a);

}  // namespace svaport::sva
