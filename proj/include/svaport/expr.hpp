#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "svaport/lexer.hpp"

namespace svaport {

inline constexpr unsigned kMaxWidth = 64;

inline std::uint64_t width_mask(unsigned width) {
    return width >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << width) - 1);
}

enum class ExprKind { identifier, constant, select, unary, binary, ternary, past };
enum class UnaryOp { bit_not, logic_not };
enum class BinaryOp { bit_and, bit_or, bit_xor, logic_and, logic_or, eq, ne, add };

class Expr;
using ExprPtr = std::shared_ptr<const Expr>;

/// Immutable expression tree node.  Nodes are shared freely between
/// netlists and assertions; rewriting always builds new nodes.
class Expr {
public:
    static ExprPtr identifier(std::string name);
    /// `width == 0` marks an unsized literal whose width follows its context.
    static ExprPtr constant(std::uint64_t value, unsigned width = 0, char base = 'd');
    static ExprPtr select(std::string name, unsigned msb, unsigned lsb);
    static ExprPtr unary(UnaryOp op, ExprPtr operand);
    static ExprPtr binary(BinaryOp op, ExprPtr lhs, ExprPtr rhs);
    static ExprPtr ternary(ExprPtr cond, ExprPtr then_e, ExprPtr else_e);
    static ExprPtr past(ExprPtr operand, unsigned depth = 1);

    ExprKind kind() const { return kind_; }
    const std::string& name() const { return name_; }
    std::uint64_t value() const { return value_; }
    unsigned width() const { return width_; }
    char base() const { return base_; }
    unsigned msb() const { return msb_; }
    unsigned lsb() const { return lsb_; }
    UnaryOp unary_op() const { return uop_; }
    BinaryOp binary_op() const { return bop_; }
    unsigned depth() const { return depth_; }
    const std::vector<ExprPtr>& operands() const { return operands_; }
    const ExprPtr& operand(std::size_t i) const { return operands_.at(i); }

    bool is_identifier() const { return kind_ == ExprKind::identifier; }

private:
    Expr() = default;

    ExprKind kind_ = ExprKind::constant;
    std::string name_;
    std::uint64_t value_ = 0;
    unsigned width_ = 0;
    char base_ = 'd';
    unsigned msb_ = 0;
    unsigned lsb_ = 0;
    UnaryOp uop_ = UnaryOp::bit_not;
    BinaryOp bop_ = BinaryOp::bit_and;
    unsigned depth_ = 1;
    std::vector<ExprPtr> operands_;
};

/// Structural equality: same shape, names, constant values and widths.
/// Literal base (hex vs decimal) is presentation only and is ignored.
bool structurally_equal(const Expr& a, const Expr& b);
bool structurally_equal(const ExprPtr& a, const ExprPtr& b);

std::string to_string(const Expr& e);
inline std::string to_string(const ExprPtr& e) { return e ? to_string(*e) : std::string{}; }
std::string_view to_string(BinaryOp op);

/// Every identifier (including select bases and names under `$past`).
void collect_identifiers(const Expr& e, std::set<std::string>& out);
std::set<std::string> identifiers_of(const Expr& e);

/// Rebuilds the tree with identifiers renamed through `rename`; names that
/// map to nullopt are left untouched.
ExprPtr rename_identifiers(const ExprPtr& e,
                           const std::function<std::optional<std::string>(const std::string&)>& rename);

/// Substitutes whole identifier nodes with arbitrary expressions.
ExprPtr substitute(const ExprPtr& e, const std::function<ExprPtr(const std::string&)>& replacement);

/// Flattens a left- or right-nested chain of `&&` into its conjuncts.
std::vector<ExprPtr> conjuncts(const ExprPtr& e);
/// Left-nested `&&` of the given terms; the list must be non-empty.
ExprPtr conjoin(const std::vector<ExprPtr>& terms);

/// Parses one expression from a token stream.  `allow_past` enables the
/// `$past(e[, depth])` form used inside assertions.
ExprPtr parse_expr(TokenStream& ts, bool allow_past);
/// Parses a literal token such as `12'h300` into a constant node.
ExprPtr parse_number(TokenStream& ts, const Token& tok);
/// Standalone helper for tests and config files (e.g. augmentation conditions).
ExprPtr parse_expression_text(std::string_view text, bool allow_past = false);

// ---------------------------------------------------------------------------
// Width checking and compiled evaluation
// ---------------------------------------------------------------------------

struct Symbol {
    std::uint32_t slot = 0;     // index into a value frame (ignored for constants)
    unsigned width = 1;         // 0 only for unsized named constants
    bool is_constant = false;
    std::uint64_t constant_value = 0;
};

/// Name resolution for `compile`.  Returns nullopt for unknown names.
using SymbolLookup = std::function<std::optional<Symbol>(const std::string&)>;

/// Flat, width-annotated form of an Expr.  Evaluation is two-state over
/// 64-bit words; every result is masked to its node width.
class CompiledExpr {
public:
    enum class Op : std::uint8_t {
        load, constant, select, bit_not, logic_not, bit_and, bit_or, bit_xor,
        logic_and, logic_or, eq, ne, add, ternary, past
    };
    struct Node {
        Op op;
        unsigned width;  // 0 = unsized (evaluated at 64 bits)
        std::uint32_t a = 0, b = 0, c = 0;
        std::uint32_t slot = 0;
        std::uint64_t value = 0;
        unsigned shift = 0;
        unsigned depth = 0;
    };

    CompiledExpr() = default;

    unsigned width() const { return nodes_.empty() ? 0 : nodes_[root_].width; }
    bool uses_past() const { return max_past_depth_ > 0; }
    unsigned max_past_depth() const { return max_past_depth_; }
    const std::vector<Node>& nodes() const { return nodes_; }
    const std::vector<std::uint32_t>& slots_read() const { return slots_read_; }

    /// Evaluates against a single value frame; `$past` is not permitted.
    std::uint64_t eval(std::span<const std::uint64_t> frame) const;

    /// Evaluates at `cycle` of a history of frames.  `$past` reads earlier
    /// rows; a `$past` reaching before row 0 yields 0 and bumps
    /// `*past_underflows`.
    std::uint64_t eval_at(const std::function<std::span<const std::uint64_t>(std::size_t)>& row,
                          std::size_t cycle, std::uint64_t* past_underflows) const;

private:
    friend CompiledExpr compile(const Expr& e, const SymbolLookup& lookup, unsigned context_width);
    friend class ExprCompiler;

    std::uint64_t eval_node(std::uint32_t n, std::span<const std::uint64_t> frame) const;
    std::uint64_t eval_node_at(std::uint32_t n,
                               const std::function<std::span<const std::uint64_t>(std::size_t)>& row,
                               std::size_t cycle, std::uint64_t* past_underflows) const;

    std::vector<Node> nodes_;
    std::uint32_t root_ = 0;
    unsigned max_past_depth_ = 0;
    std::vector<std::uint32_t> slots_read_;
};

/// Resolves names, checks widths and produces the evaluable form.  A
/// non-zero `context_width` sizes an unsized result (assignment targets).
/// Throws ElaborationError on unknown identifiers or width mismatches.
CompiledExpr compile(const Expr& e, const SymbolLookup& lookup, unsigned context_width = 0);

}  // namespace svaport
