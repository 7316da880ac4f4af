#include "svaport/expr.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "svaport/error.hpp"

namespace svaport {

ExprPtr Expr::identifier(std::string name) {
    auto e = std::shared_ptr<Expr>(new Expr());
    e->kind_ = ExprKind::identifier;
    e->name_ = std::move(name);
    return e;
}

ExprPtr Expr::constant(std::uint64_t value, unsigned width, char base) {
    auto e = std::shared_ptr<Expr>(new Expr());
    e->kind_ = ExprKind::constant;
    e->value_ = width ? (value & width_mask(width)) : value;
    e->width_ = width;
    e->base_ = base;
    return e;
}

ExprPtr Expr::select(std::string name, unsigned msb, unsigned lsb) {
    auto e = std::shared_ptr<Expr>(new Expr());
    e->kind_ = ExprKind::select;
    e->name_ = std::move(name);
    e->msb_ = msb;
    e->lsb_ = lsb;
    return e;
}

ExprPtr Expr::unary(UnaryOp op, ExprPtr operand) {
    auto e = std::shared_ptr<Expr>(new Expr());
    e->kind_ = ExprKind::unary;
    e->uop_ = op;
    e->operands_ = {std::move(operand)};
    return e;
}

ExprPtr Expr::binary(BinaryOp op, ExprPtr lhs, ExprPtr rhs) {
    auto e = std::shared_ptr<Expr>(new Expr());
    e->kind_ = ExprKind::binary;
    e->bop_ = op;
    e->operands_ = {std::move(lhs), std::move(rhs)};
    return e;
}

ExprPtr Expr::ternary(ExprPtr cond, ExprPtr then_e, ExprPtr else_e) {
    auto e = std::shared_ptr<Expr>(new Expr());
    e->kind_ = ExprKind::ternary;
    e->operands_ = {std::move(cond), std::move(then_e), std::move(else_e)};
    return e;
}

ExprPtr Expr::past(ExprPtr operand, unsigned depth) {
    auto e = std::shared_ptr<Expr>(new Expr());
    e->kind_ = ExprKind::past;
    e->depth_ = depth;
    e->operands_ = {std::move(operand)};
    return e;
}

bool structurally_equal(const Expr& a, const Expr& b) {
    if (a.kind() != b.kind()) return false;
    switch (a.kind()) {
        case ExprKind::identifier:
            return a.name() == b.name();
        case ExprKind::constant:
            return a.value() == b.value() && a.width() == b.width();
        case ExprKind::select:
            return a.name() == b.name() && a.msb() == b.msb() && a.lsb() == b.lsb();
        case ExprKind::unary:
            if (a.unary_op() != b.unary_op()) return false;
            break;
        case ExprKind::binary:
            if (a.binary_op() != b.binary_op()) return false;
            break;
        case ExprKind::ternary:
            break;
        case ExprKind::past:
            if (a.depth() != b.depth()) return false;
            break;
    }
    if (a.operands().size() != b.operands().size()) return false;
    for (std::size_t i = 0; i < a.operands().size(); ++i)
        if (!structurally_equal(*a.operands()[i], *b.operands()[i])) return false;
    return true;
}

bool structurally_equal(const ExprPtr& a, const ExprPtr& b) {
    if (!a || !b) return !a && !b;
    return a == b || structurally_equal(*a, *b);
}

// ---------------------------------------------------------------------------
// Rendering
// ---------------------------------------------------------------------------

namespace {

int precedence(BinaryOp op) {
    switch (op) {
        case BinaryOp::logic_or: return 2;
        case BinaryOp::logic_and: return 3;
        case BinaryOp::bit_or: return 4;
        case BinaryOp::bit_xor: return 5;
        case BinaryOp::bit_and: return 6;
        case BinaryOp::eq:
        case BinaryOp::ne: return 7;
        case BinaryOp::add: return 8;
    }
    return 0;
}

constexpr int kTernaryPrec = 1;
constexpr int kUnaryPrec = 9;
constexpr int kPrimaryPrec = 10;

int precedence(const Expr& e) {
    switch (e.kind()) {
        case ExprKind::ternary: return kTernaryPrec;
        case ExprKind::binary: return precedence(e.binary_op());
        case ExprKind::unary: return kUnaryPrec;
        default: return kPrimaryPrec;
    }
}

std::string render_constant(const Expr& e) {
    std::ostringstream os;
    if (e.width() == 0) {
        if (e.base() == 'h')
            os << "'h" << std::hex << e.value();
        else if (e.base() == 'b') {
            os << "'b";
            std::string bits;
            std::uint64_t v = e.value();
            do {
                bits.insert(bits.begin(), static_cast<char>('0' + (v & 1)));
                v >>= 1;
            } while (v);
            os << bits;
        } else
            os << e.value();
        return os.str();
    }
    os << e.width() << '\'';
    switch (e.base()) {
        case 'h': os << 'h' << std::hex << e.value(); break;
        case 'b': {
            os << 'b';
            for (int i = static_cast<int>(e.width()) - 1; i >= 0; --i) os << ((e.value() >> i) & 1);
            break;
        }
        default: os << 'd' << e.value(); break;
    }
    return os.str();
}

void render(const Expr& e, std::ostream& os);

void render_operand(const Expr& child, bool parens, std::ostream& os) {
    if (parens) os << '(';
    render(child, os);
    if (parens) os << ')';
}

void render(const Expr& e, std::ostream& os) {
    switch (e.kind()) {
        case ExprKind::identifier:
            os << e.name();
            return;
        case ExprKind::constant:
            os << render_constant(e);
            return;
        case ExprKind::select:
            os << e.name() << '[' << e.msb();
            if (e.msb() != e.lsb()) os << ':' << e.lsb();
            os << ']';
            return;
        case ExprKind::unary: {
            os << (e.unary_op() == UnaryOp::bit_not ? '~' : '!');
            const Expr& op = *e.operand(0);
            render_operand(op, precedence(op) < kUnaryPrec, os);
            return;
        }
        case ExprKind::past:
            os << "$past(";
            render(*e.operand(0), os);
            if (e.depth() != 1) os << ", " << e.depth();
            os << ')';
            return;
        case ExprKind::ternary: {
            const Expr& c = *e.operand(0);
            render_operand(c, precedence(c) <= kTernaryPrec, os);
            os << " ? ";
            render_operand(*e.operand(1), precedence(*e.operand(1)) <= kTernaryPrec, os);
            os << " : ";
            render_operand(*e.operand(2), false, os);
            return;
        }
        case ExprKind::binary: {
            int p = precedence(e.binary_op());
            const Expr& l = *e.operand(0);
            const Expr& r = *e.operand(1);
            // Binary operands with a different operator are parenthesized
            // for readability even where precedence would not require it.
            auto needs = [&](const Expr& child, bool right) {
                int cp = precedence(child);
                if (right ? cp <= p : cp < p) return true;
                if (child.kind() == ExprKind::binary && child.binary_op() != e.binary_op()) return true;
                return child.kind() == ExprKind::ternary;
            };
            render_operand(l, needs(l, false), os);
            os << ' ' << to_string(e.binary_op()) << ' ';
            render_operand(r, needs(r, true), os);
            return;
        }
    }
}

}  // namespace

std::string_view to_string(BinaryOp op) {
    switch (op) {
        case BinaryOp::bit_and: return "&";
        case BinaryOp::bit_or: return "|";
        case BinaryOp::bit_xor: return "^";
        case BinaryOp::logic_and: return "&&";
        case BinaryOp::logic_or: return "||";
        case BinaryOp::eq: return "==";
        case BinaryOp::ne: return "!=";
        case BinaryOp::add: return "+";
    }
    return "?";
}

std::string to_string(const Expr& e) {
    std::ostringstream os;
    render(e, os);
    return os.str();
}

// ---------------------------------------------------------------------------
// Traversal and rewriting
// ---------------------------------------------------------------------------

void collect_identifiers(const Expr& e, std::set<std::string>& out) {
    if (e.kind() == ExprKind::identifier || e.kind() == ExprKind::select) out.insert(e.name());
    for (const auto& op : e.operands()) collect_identifiers(*op, out);
}

std::set<std::string> identifiers_of(const Expr& e) {
    std::set<std::string> out;
    collect_identifiers(e, out);
    return out;
}

namespace {

ExprPtr rebuild(const ExprPtr& e, std::vector<ExprPtr> ops) {
    bool same = true;
    for (std::size_t i = 0; i < ops.size(); ++i) same = same && ops[i] == e->operands()[i];
    if (same) return e;
    switch (e->kind()) {
        case ExprKind::unary: return Expr::unary(e->unary_op(), ops[0]);
        case ExprKind::binary: return Expr::binary(e->binary_op(), ops[0], ops[1]);
        case ExprKind::ternary: return Expr::ternary(ops[0], ops[1], ops[2]);
        case ExprKind::past: return Expr::past(ops[0], e->depth());
        default: return e;
    }
}

}  // namespace

ExprPtr rename_identifiers(const ExprPtr& e,
                           const std::function<std::optional<std::string>(const std::string&)>& rename) {
    switch (e->kind()) {
        case ExprKind::identifier:
            if (auto n = rename(e->name()); n && *n != e->name()) return Expr::identifier(*n);
            return e;
        case ExprKind::select:
            if (auto n = rename(e->name()); n && *n != e->name())
                return Expr::select(*n, e->msb(), e->lsb());
            return e;
        case ExprKind::constant:
            return e;
        default: {
            std::vector<ExprPtr> ops;
            for (const auto& op : e->operands()) ops.push_back(rename_identifiers(op, rename));
            return rebuild(e, std::move(ops));
        }
    }
}

ExprPtr substitute(const ExprPtr& e, const std::function<ExprPtr(const std::string&)>& replacement) {
    if (e->kind() == ExprKind::identifier) {
        if (auto r = replacement(e->name())) return r;
        return e;
    }
    if (e->operands().empty()) return e;
    std::vector<ExprPtr> ops;
    for (const auto& op : e->operands()) ops.push_back(substitute(op, replacement));
    return rebuild(e, std::move(ops));
}

std::vector<ExprPtr> conjuncts(const ExprPtr& e) {
    std::vector<ExprPtr> out;
    std::function<void(const ExprPtr&)> walk = [&](const ExprPtr& x) {
        if (x->kind() == ExprKind::binary && x->binary_op() == BinaryOp::logic_and) {
            walk(x->operand(0));
            walk(x->operand(1));
        } else {
            out.push_back(x);
        }
    };
    walk(e);
    return out;
}

ExprPtr conjoin(const std::vector<ExprPtr>& terms) {
    if (terms.empty()) throw Error("conjoin: empty term list");
    ExprPtr acc = terms.front();
    for (std::size_t i = 1; i < terms.size(); ++i) acc = Expr::binary(BinaryOp::logic_and, acc, terms[i]);
    return acc;
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

namespace {

std::optional<BinaryOp> binary_op_of(const Token& t) {
    if (t.kind != TokenKind::punct) return std::nullopt;
    if (t.text == "||") return BinaryOp::logic_or;
    if (t.text == "&&") return BinaryOp::logic_and;
    if (t.text == "|") return BinaryOp::bit_or;
    if (t.text == "^") return BinaryOp::bit_xor;
    if (t.text == "&") return BinaryOp::bit_and;
    if (t.text == "==") return BinaryOp::eq;
    if (t.text == "!=") return BinaryOp::ne;
    if (t.text == "+") return BinaryOp::add;
    return std::nullopt;
}

bool is_unsupported_infix(const Token& t) {
    static const std::set<std::string> ops = {"<", ">", ">=", "-", "*", "/", "%"};
    return t.kind == TokenKind::punct && ops.count(t.text) > 0;
}

unsigned parse_index(TokenStream& ts) {
    const Token& t = ts.peek();
    if (t.kind != TokenKind::number) ts.fail("unexpected token", "constant bit index");
    ts.next();
    ExprPtr c = parse_number(ts, t);
    if (c->value() > 4096) ts.fail_at(t, "bit index out of range", "index below 64");
    return static_cast<unsigned>(c->value());
}

class Parser {
public:
    Parser(TokenStream& ts, bool allow_past) : ts_(ts), allow_past_(allow_past) {}

    ExprPtr parse() { return ternary(); }

private:
    ExprPtr ternary() {
        ExprPtr cond = binary(kTernaryPrec + 1);
        if (ts_.accept_punct("?")) {
            ExprPtr a = ternary();
            ts_.expect_punct(":");
            ExprPtr b = ternary();
            return Expr::ternary(cond, a, b);
        }
        return cond;
    }

    ExprPtr binary(int min_prec) {
        ExprPtr lhs = unary();
        for (;;) {
            const Token& t = ts_.peek();
            if (is_unsupported_infix(t)) ts_.unsupported(t, "operator '" + t.text + "'");
            auto op = binary_op_of(t);
            if (!op || precedence(*op) < min_prec) return lhs;
            ts_.next();
            ExprPtr rhs = binary(precedence(*op) + 1);
            lhs = Expr::binary(*op, lhs, rhs);
        }
    }

    ExprPtr unary() {
        const Token& t = ts_.peek();
        if (t.is_punct("~")) {
            ts_.next();
            return Expr::unary(UnaryOp::bit_not, unary());
        }
        if (t.is_punct("!")) {
            ts_.next();
            return Expr::unary(UnaryOp::logic_not, unary());
        }
        if (t.is_punct("&") || t.is_punct("|") || t.is_punct("^"))
            ts_.unsupported(t, "reduction operator '" + t.text + "'");
        if (t.is_punct("-")) ts_.unsupported(t, "unary minus");
        return primary();
    }

    ExprPtr primary() {
        const Token& t = ts_.peek();
        if (t.is_punct("(")) {
            ts_.next();
            ExprPtr inner = ternary();
            ts_.expect_punct(")");
            return inner;
        }
        if (t.kind == TokenKind::number) {
            ts_.next();
            return parse_number(ts_, t);
        }
        if (t.kind == TokenKind::system_name) {
            if (t.text != "$past" || !allow_past_) ts_.unsupported(t, "system function " + t.text);
            ts_.next();
            ts_.expect_punct("(");
            ExprPtr inner = ternary();
            unsigned depth = 1;
            if (ts_.accept_punct(",")) {
                const Token& d = ts_.peek();
                if (d.kind != TokenKind::number) ts_.fail("unexpected token", "constant $past depth");
                ts_.next();
                ExprPtr c = parse_number(ts_, d);
                if (c->value() < 1 || c->value() > 1024)
                    ts_.fail_at(d, "invalid $past depth", "depth between 1 and 1024");
                depth = static_cast<unsigned>(c->value());
            }
            if (ts_.peek().is_punct(",")) ts_.unsupported(ts_.peek(), "$past gating/clocking arguments");
            ts_.expect_punct(")");
            return Expr::past(inner, depth);
        }
        if (t.is_punct("{")) ts_.unsupported(t, "concatenation");
        if (t.kind == TokenKind::identifier) {
            ts_.next();
            if (ts_.peek().is_punct("[")) {
                const Token& open = ts_.next();
                const Token& first = ts_.peek();
                if (first.is_punct("*") || first.is_punct("=") || first.is_punct("-"))
                    ts_.unsupported(open, "repetition operator");
                unsigned msb = parse_index(ts_);
                unsigned lsb = msb;
                if (ts_.accept_punct(":")) lsb = parse_index(ts_);
                ts_.expect_punct("]");
                if (lsb > msb) ts_.fail_at(open, "descending part-select required", "[msb:lsb]");
                return Expr::select(t.text, msb, lsb);
            }
            if (ts_.peek().is_punct("(")) ts_.unsupported(t, "function call");
            return Expr::identifier(t.text);
        }
        ts_.fail("unexpected token", "expression");
    }

    TokenStream& ts_;
    bool allow_past_;
};

}  // namespace

ExprPtr parse_number(TokenStream& ts, const Token& tok) {
    std::string text;
    for (char c : tok.text)
        if (c != '_') text.push_back(c);
    auto q = text.find('\'');
    unsigned width = 0;
    char base = 'd';
    std::string digits = text;
    if (q != std::string::npos) {
        if (q > 0) {
            unsigned long w = std::stoul(text.substr(0, q));
            if (w == 0 || w > kMaxWidth) ts.fail_at(tok, "literal width out of range", "width 1..64");
            width = static_cast<unsigned>(w);
        }
        std::size_t b = q + 1;
        if (text[b] == 's' || text[b] == 'S') ++b;
        base = static_cast<char>(std::tolower(static_cast<unsigned char>(text[b])));
        digits = text.substr(b + 1);
    }
    unsigned radix = base == 'h' ? 16 : base == 'b' ? 2 : base == 'o' ? 8 : 10;
    std::uint64_t value = 0;
    for (char c : digits) {
        unsigned d;
        if (std::isdigit(static_cast<unsigned char>(c)))
            d = static_cast<unsigned>(c - '0');
        else
            d = static_cast<unsigned>(std::tolower(static_cast<unsigned char>(c)) - 'a' + 10);
        if (d >= radix) ts.fail_at(tok, "invalid digit in literal", "digits of the literal base");
        if (value > (~std::uint64_t{0} - d) / radix) ts.fail_at(tok, "literal exceeds 64 bits", "");
        value = value * radix + d;
    }
    if (width && (value & ~width_mask(width)) != 0)
        ts.fail_at(tok, "literal value does not fit its width", "");
    return Expr::constant(value, width, base == 'o' ? 'd' : base);
}

ExprPtr parse_expr(TokenStream& ts, bool allow_past) { return Parser(ts, allow_past).parse(); }

ExprPtr parse_expression_text(std::string_view text, bool allow_past) {
    TokenStream ts(text, tokenize(text));
    ExprPtr e = parse_expr(ts, allow_past);
    if (!ts.at_end()) ts.fail("trailing input", "end of expression");
    return e;
}

// ---------------------------------------------------------------------------
// Compilation
// ---------------------------------------------------------------------------

class ExprCompiler {
public:
    ExprCompiler(CompiledExpr& out, const SymbolLookup& lookup) : out_(out), lookup_(lookup) {}

    std::uint32_t build(const Expr& e) {
        using Op = CompiledExpr::Op;
        switch (e.kind()) {
            case ExprKind::identifier: {
                auto sym = resolve(e.name());
                if (sym.is_constant) return push({Op::constant, sym.width, 0, 0, 0, 0, sym.constant_value});
                return push({Op::load, sym.width, 0, 0, 0, sym.slot});
            }
            case ExprKind::constant:
                return push({Op::constant, e.width(), 0, 0, 0, 0, e.value()});
            case ExprKind::select: {
                auto sym = resolve(e.name());
                unsigned base_width = sym.width ? sym.width : kMaxWidth;
                if (e.msb() >= base_width)
                    throw ElaborationError("select " + to_string(e) + " exceeds width " +
                                           std::to_string(base_width) + " of '" + e.name() + "'");
                unsigned w = e.msb() - e.lsb() + 1;
                if (sym.is_constant)
                    return push({Op::constant, w, 0, 0, 0, 0, (sym.constant_value >> e.lsb()) & width_mask(w)});
                CompiledExpr::Node n{Op::select, w, 0, 0, 0, sym.slot};
                n.shift = e.lsb();
                return push(n);
            }
            case ExprKind::unary: {
                auto a = build(*e.operand(0));
                if (e.unary_op() == UnaryOp::logic_not) return push({Op::logic_not, 1, a});
                return push({Op::bit_not, out_.nodes_[a].width, a});
            }
            case ExprKind::past: {
                auto a = build(*e.operand(0));
                CompiledExpr::Node n{Op::past, out_.nodes_[a].width, a};
                n.depth = e.depth();
                out_.max_past_depth_ = std::max(out_.max_past_depth_, e.depth());
                return push(n);
            }
            case ExprKind::ternary: {
                auto c = build(*e.operand(0));
                auto a = build(*e.operand(1));
                auto b = build(*e.operand(2));
                unsigned w = unify(a, b, e);
                return push({Op::ternary, w, c, a, b});
            }
            case ExprKind::binary: {
                auto a = build(*e.operand(0));
                auto b = build(*e.operand(1));
                switch (e.binary_op()) {
                    case BinaryOp::logic_and: return push({Op::logic_and, 1, a, b});
                    case BinaryOp::logic_or: return push({Op::logic_or, 1, a, b});
                    case BinaryOp::eq: unify(a, b, e); return push({Op::eq, 1, a, b});
                    case BinaryOp::ne: unify(a, b, e); return push({Op::ne, 1, a, b});
                    case BinaryOp::bit_and: return push({Op::bit_and, unify(a, b, e), a, b});
                    case BinaryOp::bit_or: return push({Op::bit_or, unify(a, b, e), a, b});
                    case BinaryOp::bit_xor: return push({Op::bit_xor, unify(a, b, e), a, b});
                    case BinaryOp::add: return push({Op::add, unify(a, b, e), a, b});
                }
            }
        }
        throw ElaborationError("unhandled expression kind");
    }

    /// Gives an unsized subtree a concrete width from its context.
    void coerce(std::uint32_t n, unsigned w, const Expr& where) {
        using Op = CompiledExpr::Op;
        auto& node = out_.nodes_[n];
        if (node.width != 0 || w == 0) return;
        node.width = w;
        switch (node.op) {
            case Op::constant:
                if ((node.value & ~width_mask(w)) != 0)
                    throw ElaborationError("constant " + std::to_string(node.value) + " does not fit in " +
                                           std::to_string(w) + " bits in '" + to_string(where) + "'");
                break;
            case Op::bit_not:
            case Op::past:
                coerce(node.a, w, where);
                break;
            case Op::bit_and:
            case Op::bit_or:
            case Op::bit_xor:
            case Op::add: {
                auto a = node.a, b = node.b;
                coerce(a, w, where);
                coerce(b, w, where);
                break;
            }
            case Op::ternary: {
                auto a = node.b, b = node.c;
                coerce(a, w, where);
                coerce(b, w, where);
                break;
            }
            default:
                break;
        }
    }

private:
    Symbol resolve(const std::string& name) {
        auto sym = lookup_(name);
        if (!sym) throw ElaborationError("undeclared identifier '" + name + "'");
        return *sym;
    }

    unsigned unify(std::uint32_t a, std::uint32_t b, const Expr& where) {
        unsigned wa = out_.nodes_[a].width;
        unsigned wb = out_.nodes_[b].width;
        if (wa && wb && wa != wb)
            throw ElaborationError("width mismatch (" + std::to_string(wa) + " vs " + std::to_string(wb) +
                                   ") in '" + to_string(where) + "'");
        unsigned w = wa ? wa : wb;
        coerce(a, w, where);
        coerce(b, w, where);
        return w;
    }

    std::uint32_t push(CompiledExpr::Node n) {
        if (n.op == CompiledExpr::Op::load || n.op == CompiledExpr::Op::select) {
            auto& s = out_.slots_read_;
            if (std::find(s.begin(), s.end(), n.slot) == s.end()) s.push_back(n.slot);
        }
        out_.nodes_.push_back(n);
        return static_cast<std::uint32_t>(out_.nodes_.size() - 1);
    }

    CompiledExpr& out_;
    const SymbolLookup& lookup_;
};

CompiledExpr compile(const Expr& e, const SymbolLookup& lookup, unsigned context_width) {
    CompiledExpr out;
    ExprCompiler c(out, lookup);
    out.root_ = c.build(e);
    c.coerce(out.root_, context_width, e);
    std::sort(out.slots_read_.begin(), out.slots_read_.end());
    return out;
}

namespace {

inline std::uint64_t mask_to(std::uint64_t v, unsigned w) { return w ? (v & width_mask(w)) : v; }

}  // namespace

std::uint64_t CompiledExpr::eval(std::span<const std::uint64_t> frame) const {
    return eval_node(root_, frame);
}

std::uint64_t CompiledExpr::eval_node(std::uint32_t i, std::span<const std::uint64_t> f) const {
    const Node& n = nodes_[i];
    switch (n.op) {
        case Op::load: return f[n.slot];
        case Op::constant: return n.value;
        case Op::select: return (f[n.slot] >> n.shift) & width_mask(n.width);
        case Op::bit_not: return mask_to(~eval_node(n.a, f), n.width);
        case Op::logic_not: return eval_node(n.a, f) == 0;
        case Op::bit_and: return eval_node(n.a, f) & eval_node(n.b, f);
        case Op::bit_or: return eval_node(n.a, f) | eval_node(n.b, f);
        case Op::bit_xor: return eval_node(n.a, f) ^ eval_node(n.b, f);
        case Op::logic_and: return eval_node(n.a, f) != 0 && eval_node(n.b, f) != 0;
        case Op::logic_or: return eval_node(n.a, f) != 0 || eval_node(n.b, f) != 0;
        case Op::eq: return eval_node(n.a, f) == eval_node(n.b, f);
        case Op::ne: return eval_node(n.a, f) != eval_node(n.b, f);
        case Op::add: return mask_to(eval_node(n.a, f) + eval_node(n.b, f), n.width);
        case Op::ternary: return eval_node(n.a, f) ? eval_node(n.b, f) : eval_node(n.c, f);
        case Op::past: throw Error("$past is not valid in single-frame evaluation");
    }
    return 0;
}

std::uint64_t CompiledExpr::eval_at(const std::function<std::span<const std::uint64_t>(std::size_t)>& row,
                                    std::size_t cycle, std::uint64_t* past_underflows) const {
    return eval_node_at(root_, row, cycle, past_underflows);
}

std::uint64_t CompiledExpr::eval_node_at(std::uint32_t i,
                                         const std::function<std::span<const std::uint64_t>(std::size_t)>& row,
                                         std::size_t cycle, std::uint64_t* past_underflows) const {
    const Node& n = nodes_[i];
    auto sub = [&](std::uint32_t k) { return eval_node_at(k, row, cycle, past_underflows); };
    switch (n.op) {
        case Op::load: return row(cycle)[n.slot];
        case Op::constant: return n.value;
        case Op::select: return (row(cycle)[n.slot] >> n.shift) & width_mask(n.width);
        case Op::bit_not: return mask_to(~sub(n.a), n.width);
        case Op::logic_not: return sub(n.a) == 0;
        case Op::bit_and: return sub(n.a) & sub(n.b);
        case Op::bit_or: return sub(n.a) | sub(n.b);
        case Op::bit_xor: return sub(n.a) ^ sub(n.b);
        case Op::logic_and: return sub(n.a) != 0 && sub(n.b) != 0;
        case Op::logic_or: return sub(n.a) != 0 || sub(n.b) != 0;
        case Op::eq: return sub(n.a) == sub(n.b);
        case Op::ne: return sub(n.a) != sub(n.b);
        case Op::add: return mask_to(sub(n.a) + sub(n.b), n.width);
        case Op::ternary: return sub(n.a) ? sub(n.b) : sub(n.c);
        case Op::past:
            // Two-state history has no X: reads before cycle 0 are 0 and counted.
            if (cycle < n.depth) {
                if (past_underflows) ++*past_underflows;
                return 0;
            }
            return eval_node_at(n.a, row, cycle - n.depth, past_underflows);
    }
    return 0;
}

}  // namespace svaport
