#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "svaport/graph.hpp"
#include "svaport/rtl.hpp"
#include "svaport/sim.hpp"
#include "svaport/sva.hpp"

namespace svaport::translate {

enum class Origin { exact, normalized, alias_file, manual };
std::string_view to_string(Origin o);

struct MapEntry {
    std::string source;
    std::string target;
    Origin origin = Origin::alias_file;
};

enum class Attach { antecedent, consequent };
enum class Position { append, prepend };

/// Extra conjunct required by the target design.  It applies to every
/// translated assertion that references `signal` (optionally restricted to
/// one source assertion by name).  Antecedent conditions join the last
/// antecedent term, consequent conditions the first consequent term.
struct Augmentation {
    std::string signal;
    ExprPtr condition;
    Attach attach = Attach::antecedent;
    Position position = Position::append;
    std::optional<std::string> assertion;
    std::string note;
};

struct NormalizeRules {
    std::vector<std::string> strip_suffixes{"_i", "_o", "_q", "_d", "_n"};
    std::vector<std::string> strip_prefixes;
    bool case_fold = true;
};

enum class NegationStyle { preserve, eq_zero };

/// Output naming for one source assertion.
struct AssertionMeta {
    std::string source;
    std::optional<std::string> name;
    std::optional<std::string> label;
    std::optional<std::string> message;
};

struct SignalMap {
    std::vector<MapEntry> entries;
    std::vector<Augmentation> augmentations;
    NormalizeRules normalize;
    NegationStyle negation = NegationStyle::preserve;
    std::vector<AssertionMeta> assertions;

    const MapEntry* find(const std::string& source) const;
    const AssertionMeta* meta_for(const std::string& source_assertion) const;
};

/// Parses the JSON signal-map document.  Throws ConfigError.
SignalMap parse_signal_map(std::string_view json_text);
/// Every mapping target and augmentation signal must exist in `target`.
/// Throws ConfigError.
void validate_signal_map(const SignalMap& map, const rtl::Netlist& target);

std::string normalize_name(std::string_view name, const NormalizeRules& rules);

enum class LinkStatus { matched, dropped, unresolved };
std::string_view to_string(LinkStatus s);

struct SignalLink {
    std::string source;
    LinkStatus status = LinkStatus::unresolved;
    std::string method;  // origin when matched, reason otherwise
    std::optional<std::string> target;
    /// Relationship to the nearest primary input (absent for inputs and constants).
    std::optional<graph::Relationship> relationship;
    std::map<std::string, unsigned> fanin;
    std::vector<std::string> gating_candidates;
};

struct LinkReport {
    std::vector<SignalLink> signals;  // sorted by source name
    /// Union of per-signal gating candidates, sorted.
    std::vector<std::string> gating_candidates;

    const SignalLink* find(const std::string& source) const;
    bool all_resolved() const;
};

/// Signal identification: explicit map entry, then exact name, then a
/// unique normalized match.  Ambiguous or missing names stay unresolved.
LinkReport identify_signals(const sva::Assertion& source, const rtl::Netlist& target, const SignalMap& map);

/// Annotates matched target nets with fan-in, their relationship to the
/// nearest primary input, and gating candidates (depth-1 fan-in of matched
/// single-bit driven signals).
LinkReport trace_internal_logic(const LinkReport& report, const graph::DependencyGraph& graph,
                                const rtl::Netlist& target);

struct DropPolicy {
    bool allow = true;
};

/// Marks removable unresolved signals as dropped.  A signal referenced only by
/// the disable condition is dropped with that clause; otherwise every
/// conjunct mentioning it is removed as long as no sequence term empties.
LinkReport drop_untranslatable(const LinkReport& report, const sva::Assertion& source, const DropPolicy& policy);

/// Source assertion with the conjuncts (and disable clause) of dropped
/// signals removed.
sva::Assertion apply_drops(const sva::Assertion& source, const LinkReport& report);

struct TranslationConfig {
    sim::SearchConfig search;
    DropPolicy drop;
};

struct Validation {
    bool activated = false;  // test case reached a non-vacuous pass
    std::size_t clean_failures = 0;
    std::vector<std::string> notes;
};

struct TranslationOutcome {
    bool translatable = false;
    std::optional<sva::Assertion> assertion;
    std::optional<sim::Stimulus> testcase;
    Validation validation;
    std::vector<std::string> reasons;  // non-empty iff untranslatable
    LinkReport link_report;
    std::string clock_method;
    std::vector<std::string> applied_augmentations;
};

TranslationOutcome translate(const sva::Assertion& source, const rtl::Netlist& target, const SignalMap& map,
                             const TranslationConfig& config = {});

}  // namespace svaport::translate
