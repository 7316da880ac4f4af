#include "svaport/rtl.hpp"

#include <algorithm>
#include <functional>
#include <queue>
#include <set>
#include <sstream>

#include "svaport/error.hpp"

namespace svaport::rtl {

std::string_view to_string(PortDirection d) { return d == PortDirection::input ? "input" : "output"; }

std::string_view to_string(NetKind k) {
    switch (k) {
        case NetKind::input: return "input";
        case NetKind::output: return "output";
        case NetKind::internal: return "internal";
        case NetKind::register_: return "register";
        case NetKind::constant: return "constant";
    }
    return "?";
}

const Net* Netlist::find_net(const std::string& n) const {
    auto it = nets.find(n);
    return it == nets.end() ? nullptr : &it->second;
}

const Port* Netlist::find_port(const std::string& n) const {
    for (const auto& p : ports)
        if (p.name == n) return &p;
    return nullptr;
}

const Param* Netlist::find_param(const std::string& n) const {
    auto it = params.find(n);
    return it == params.end() ? nullptr : &it->second;
}

const Assign* Netlist::driver_assign(const std::string& n) const {
    for (const auto& a : assigns)
        if (a.lhs == n) return &a;
    return nullptr;
}

const Register* Netlist::driver_register(const std::string& n) const {
    for (const auto& r : registers)
        if (r.target == n) return &r;
    return nullptr;
}

bool Netlist::is_primary_input(const std::string& n) const {
    const Port* p = find_port(n);
    return p && p->direction == PortDirection::input;
}

std::optional<std::string> Netlist::clock() const {
    if (registers.empty()) return std::nullopt;
    return registers.front().clock;
}

std::vector<std::string> Netlist::reset_nets() const {
    std::vector<std::string> out;
    for (const auto& r : registers)
        if (r.reset && std::find(out.begin(), out.end(), r.reset->net) == out.end())
            out.push_back(r.reset->net);
    return out;
}

std::optional<ResetSpec> Netlist::reset_of(const std::string& net) const {
    for (const auto& r : registers)
        if (r.reset && r.reset->net == net) return r.reset;
    return std::nullopt;
}

SymbolLookup Netlist::lookup(const std::map<std::string, std::uint32_t>& slot_of) const {
    return [this, &slot_of](const std::string& name) -> std::optional<Symbol> {
        if (const Param* p = find_param(name)) {
            Symbol s;
            s.is_constant = true;
            s.width = p->width;
            s.constant_value = p->value;
            return s;
        }
        const Net* n = find_net(name);
        if (!n) return std::nullopt;
        auto it = slot_of.find(name);
        if (it == slot_of.end()) return std::nullopt;
        Symbol s;
        s.slot = it->second;
        s.width = n->width;
        return s;
    };
}

bool structurally_equal(const Netlist& a, const Netlist& b) {
    if (a.name != b.name || a.ports != b.ports || a.nets != b.nets || a.params != b.params) return false;
    if (a.assigns.size() != b.assigns.size() || a.registers.size() != b.registers.size()) return false;
    for (std::size_t i = 0; i < a.assigns.size(); ++i) {
        if (a.assigns[i].lhs != b.assigns[i].lhs) return false;
        if (!svaport::structurally_equal(a.assigns[i].rhs, b.assigns[i].rhs)) return false;
    }
    for (std::size_t i = 0; i < a.registers.size(); ++i) {
        const auto& x = a.registers[i];
        const auto& y = b.registers[i];
        if (x.target != y.target || x.clock != y.clock) return false;
        if (!svaport::structurally_equal(x.next, y.next)) return false;
        if (x.reset.has_value() != y.reset.has_value()) return false;
        if (x.reset && (x.reset->net != y.reset->net || x.reset->active_high != y.reset->active_high ||
                        !svaport::structurally_equal(x.reset->value, y.reset->value)))
            return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

namespace {

struct Stmt {
    enum class Kind { block, if_, nba } kind = Kind::block;
    std::vector<Stmt> body;       // block
    ExprPtr cond;                 // if
    std::vector<Stmt> branches;   // if: [then] or [then, else]
    std::string target;           // nba
    ExprPtr value;                // nba
    Token where;
};

struct RawDecl {
    std::string name;
    unsigned width = 1;
    Token where;
};

struct RawAlways {
    std::string clock;
    std::optional<std::pair<std::string, bool>> reset_edge;  // net, posedge?
    Stmt body;
    Token where;
};

struct RawAssign {
    std::string lhs;
    ExprPtr rhs;
    Token where;
};

bool is_reset_name(const std::string& n) {
    std::string lower;
    for (char c : n) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    return lower.find("rst") != std::string::npos || lower.find("reset") != std::string::npos;
}

class DesignParser {
public:
    explicit DesignParser(std::string_view src) : src_(src), ts_(src, tokenize(src)) {}

    Netlist run() {
        ts_.expect_keyword("module");
        const Token& name = ts_.expect_identifier("module name");
        nl_.name = name.text;
        if (ts_.accept_punct("#")) {
            ts_.expect_punct("(");
            if (!ts_.peek().is_punct(")")) {
                parse_param_list_in_header();
            }
            ts_.expect_punct(")");
        }
        if (ts_.accept_punct("(")) {
            if (!ts_.peek().is_punct(")")) parse_ansi_ports();
            ts_.expect_punct(")");
        }
        ts_.expect_punct(";");
        while (!ts_.peek().is_keyword("endmodule")) {
            if (ts_.at_end()) ts_.fail("unexpected end of input", "'endmodule'");
            parse_item();
        }
        ts_.next();
        if (!ts_.at_end()) {
            if (ts_.peek().is_keyword("module")) ts_.unsupported(ts_.peek(), "multiple modules per file");
            ts_.fail("trailing input after endmodule", "end of file");
        }
        elaborate();
        return std::move(nl_);
    }

private:
    // -- declarations -------------------------------------------------------

    std::uint64_t const_eval(const ExprPtr& e, const Token& where, unsigned* width_out = nullptr) {
        CompiledExpr c;
        try {
            c = compile(*e, [this](const std::string& n) -> std::optional<Symbol> {
                if (auto it = nl_.params.find(n); it != nl_.params.end()) {
                    Symbol s;
                    s.is_constant = true;
                    s.width = it->second.width;
                    s.constant_value = it->second.value;
                    return s;
                }
                return std::nullopt;
            });
        } catch (const ElaborationError& err) {
            elab_fail(where, std::string("constant expression: ") + err.what());
        }
        if (width_out) *width_out = c.width();
        return c.eval({});
    }

    unsigned parse_range() {
        // [msb:lsb] with constant bounds; lsb must be 0.
        const Token& open = ts_.expect_punct("[");
        ExprPtr msb = parse_expr(ts_, false);
        ts_.expect_punct(":");
        ExprPtr lsb = parse_expr(ts_, false);
        ts_.expect_punct("]");
        std::uint64_t m = const_eval(msb, open);
        std::uint64_t l = const_eval(lsb, open);
        if (l != 0) ts_.unsupported(open, "ranges with non-zero lsb");
        if (m + 1 > kMaxWidth) elab_fail(open, "width exceeds 64 bits");
        return static_cast<unsigned>(m + 1);
    }

    void skip_data_type() {
        while (ts_.peek().is_keyword("logic") || ts_.peek().is_keyword("wire") ||
               ts_.peek().is_keyword("reg") || ts_.peek().is_keyword("bit") ||
               ts_.peek().is_keyword("unsigned"))
            ts_.next();
        if (ts_.peek().is_keyword("signed")) ts_.unsupported(ts_.peek(), "signed types");
    }

    void parse_param_decl(bool local, bool in_header) {
        // [type] [range] NAME = expr {, NAME = expr}
        bool typed_int = false;
        if (ts_.peek().is_keyword("int") || ts_.peek().is_keyword("integer")) {
            ts_.next();
            typed_int = true;
        }
        skip_data_type();
        unsigned range_width = 0;
        if (ts_.peek().is_punct("[")) range_width = parse_range();
        if (typed_int && range_width == 0) range_width = 32;
        for (;;) {
            const Token& n = ts_.expect_identifier("parameter name");
            ts_.expect_punct("=");
            ExprPtr value = parse_expr(ts_, false);
            unsigned vw = 0;
            std::uint64_t v = const_eval(value, n, &vw);
            declare_name(n);
            Param p;
            p.name = n.text;
            p.local = local;
            p.width = range_width ? range_width : vw;
            if (p.width && (v & ~width_mask(p.width)) != 0)
                elab_fail(n, "parameter value does not fit its width");
            p.value = v;
            p.value_expr = value;
            nl_.params[p.name] = p;
            param_order_.push_back(p.name);
            if (in_header) {
                if (!ts_.peek().is_punct(",")) break;
                if (ts_.peek(1).is_keyword("parameter") || ts_.peek(1).is_keyword("localparam")) break;
                ts_.next();
                continue;
            }
            if (!ts_.accept_punct(",")) break;
        }
    }

    void parse_param_list_in_header() {
        for (;;) {
            bool local = false;
            if (ts_.accept_keyword("localparam"))
                local = true;
            else
                ts_.accept_keyword("parameter");
            parse_param_decl(local, true);
            if (!ts_.accept_punct(",")) break;
        }
    }

    void parse_ansi_ports() {
        std::optional<PortDirection> dir;
        unsigned width = 1;
        for (;;) {
            const Token& t = ts_.peek();
            if (t.is_keyword("input") || t.is_keyword("output")) {
                dir = t.is_keyword("input") ? PortDirection::input : PortDirection::output;
                ts_.next();
                skip_data_type();
                width = ts_.peek().is_punct("[") ? parse_range() : 1;
            } else if (t.is_keyword("inout")) {
                ts_.unsupported(t, "inout ports");
            } else if (!dir) {
                ts_.fail("unexpected token", "port direction");
            } else if (t.is_keyword("logic") || t.is_keyword("wire") || t.is_keyword("reg") || t.is_punct("[")) {
                skip_data_type();
                width = ts_.peek().is_punct("[") ? parse_range() : 1;
            }
            const Token& n = ts_.expect_identifier("port name");
            declare_name(n);
            nl_.ports.push_back(Port{n.text, *dir, width});
            decl_tokens_[n.text] = n;
            if (!ts_.accept_punct(",")) break;
        }
    }

    void parse_net_decl() {
        skip_data_type();
        unsigned width = ts_.peek().is_punct("[") ? parse_range() : 1;
        for (;;) {
            const Token& n = ts_.expect_identifier("net name");
            declare_name(n);
            if (ts_.peek().is_punct("=")) ts_.unsupported(ts_.peek(), "net declaration assignment");
            if (ts_.peek().is_punct("[")) ts_.unsupported(ts_.peek(), "unpacked arrays");
            nets_.push_back(RawDecl{n.text, width, n});
            decl_tokens_[n.text] = n;
            if (!ts_.accept_punct(",")) break;
        }
        ts_.expect_punct(";");
    }

    void parse_item() {
        const Token& t = ts_.peek();
        if (t.is_keyword("parameter") || t.is_keyword("localparam")) {
            ts_.next();
            parse_param_decl(t.text == "localparam", false);
            ts_.expect_punct(";");
        } else if (t.is_keyword("logic") || t.is_keyword("wire") || t.is_keyword("reg") || t.is_keyword("bit")) {
            parse_net_decl();
        } else if (t.is_keyword("assign")) {
            ts_.next();
            for (;;) {
                const Token& lhs = ts_.expect_identifier("assignment target");
                if (ts_.peek().is_punct("[")) ts_.unsupported(ts_.peek(), "part-select assignment targets");
                ts_.expect_punct("=");
                ExprPtr rhs = parse_expr(ts_, false);
                assigns_.push_back(RawAssign{lhs.text, rhs, lhs});
                if (!ts_.accept_punct(",")) break;
            }
            ts_.expect_punct(";");
        } else if (t.is_keyword("always_ff")) {
            parse_always_ff();
        } else if (t.kind == TokenKind::identifier &&
                   (t.text == "always" || t.text == "always_comb" || t.text == "always_latch" ||
                    t.text == "initial" || t.text == "generate" || t.text == "function" ||
                    t.text == "task" || t.text == "interface" || t.text == "typedef" || t.text == "genvar")) {
            ts_.unsupported(t, "'" + t.text + "'");
        } else if (t.is_keyword("input") || t.is_keyword("output") || t.is_keyword("inout")) {
            ts_.unsupported(t, "non-ANSI port declarations");
        } else if (t.kind == TokenKind::identifier && ts_.peek(1).kind == TokenKind::identifier) {
            ts_.unsupported(t, "module instantiation");
        } else {
            ts_.fail("unexpected token", "module item");
        }
    }

    void parse_always_ff() {
        const Token& kw = ts_.next();
        RawAlways blk;
        blk.where = kw;
        ts_.expect_punct("@");
        ts_.expect_punct("(");
        if (!ts_.accept_keyword("posedge")) {
            if (ts_.peek().is_keyword("negedge")) ts_.unsupported(ts_.peek(), "negedge clocking");
            ts_.fail("unexpected token", "'posedge'");
        }
        blk.clock = ts_.expect_identifier("clock name").text;
        if (ts_.accept_keyword("or") || ts_.accept_punct(",")) {
            bool pos = false;
            if (ts_.accept_keyword("posedge"))
                pos = true;
            else
                ts_.expect_keyword("negedge");
            blk.reset_edge = std::make_pair(ts_.expect_identifier("reset name").text, pos);
        }
        ts_.expect_punct(")");
        blk.body = parse_stmt();
        always_.push_back(std::move(blk));
    }

    Stmt parse_stmt() {
        const Token& t = ts_.peek();
        Stmt s;
        s.where = t;
        if (ts_.accept_keyword("begin")) {
            s.kind = Stmt::Kind::block;
            if (ts_.accept_punct(":")) ts_.expect_identifier("block label");
            while (!ts_.peek().is_keyword("end")) {
                if (ts_.at_end()) ts_.fail("unexpected end of input", "'end'");
                s.body.push_back(parse_stmt());
            }
            ts_.next();
            return s;
        }
        if (ts_.accept_keyword("if")) {
            s.kind = Stmt::Kind::if_;
            ts_.expect_punct("(");
            s.cond = parse_expr(ts_, false);
            ts_.expect_punct(")");
            s.branches.push_back(parse_stmt());
            if (ts_.accept_keyword("else")) s.branches.push_back(parse_stmt());
            return s;
        }
        if (t.is_keyword("case") || t.is_keyword("unique") || t.is_keyword("for"))
            ts_.unsupported(t, "'" + t.text + "' statements");
        const Token& target = ts_.expect_identifier("register target");
        s.kind = Stmt::Kind::nba;
        s.target = target.text;
        if (ts_.peek().is_punct("[")) ts_.unsupported(ts_.peek(), "part-select register targets");
        if (ts_.peek().is_punct("=")) ts_.unsupported(ts_.peek(), "blocking assignment in always_ff");
        ts_.expect_punct("<=");
        s.value = parse_expr(ts_, false);
        ts_.expect_punct(";");
        return s;
    }

    void declare_name(const Token& n) {
        if (!declared_.insert(n.text).second) elab_fail(n, "duplicate declaration of '" + n.text + "'");
    }

    // -- elaboration --------------------------------------------------------

    [[noreturn]] void elab_fail(const Token& where, const std::string& msg) const {
        throw ElaborationError(render_diagnostic(src_, where.where, msg));
    }

    SymbolLookup width_lookup() {
        return [this](const std::string& name) -> std::optional<Symbol> {
            if (auto it = nl_.params.find(name); it != nl_.params.end()) {
                Symbol s;
                s.is_constant = true;
                s.width = it->second.width;
                s.constant_value = it->second.value;
                return s;
            }
            if (auto it = nl_.nets.find(name); it != nl_.nets.end()) {
                Symbol s;
                s.width = it->second.width;
                return s;
            }
            return std::nullopt;
        };
    }

    void check_expr(const ExprPtr& e, unsigned target_width, const Token& where, const std::string& what) {
        CompiledExpr c;
        try {
            c = compile(*e, width_lookup(), target_width);
        } catch (const ElaborationError& err) {
            elab_fail(where, what + ": " + err.what());
        }
        if (target_width && c.width() && c.width() != target_width)
            elab_fail(where, "width mismatch in " + what + ": target is " + std::to_string(target_width) +
                                 " bits, expression is " + std::to_string(c.width()) + " bits");
    }

    void lower_statements(const std::vector<Stmt>& stmts, std::map<std::string, ExprPtr>& env,
                          std::vector<std::string>& targets) {
        for (const auto& s : stmts) lower_statement(s, env, targets);
    }

    void lower_statement(const Stmt& s, std::map<std::string, ExprPtr>& env, std::vector<std::string>& targets) {
        switch (s.kind) {
            case Stmt::Kind::block:
                lower_statements(s.body, env, targets);
                return;
            case Stmt::Kind::nba:
                if (std::find(targets.begin(), targets.end(), s.target) == targets.end())
                    targets.push_back(s.target);
                env[s.target] = s.value;
                return;
            case Stmt::Kind::if_: {
                auto then_env = env;
                auto else_env = env;
                lower_statement(s.branches[0], then_env, targets);
                if (s.branches.size() > 1) lower_statement(s.branches[1], else_env, targets);
                std::set<std::string> keys;
                for (auto& [k, _] : then_env) keys.insert(k);
                for (auto& [k, _] : else_env) keys.insert(k);
                for (const auto& k : keys) {
                    ExprPtr hold = Expr::identifier(k);
                    ExprPtr a = then_env.count(k) ? then_env[k] : hold;
                    ExprPtr b = else_env.count(k) ? else_env[k] : hold;
                    if (svaport::structurally_equal(a, b))
                        env[k] = a;
                    else
                        env[k] = Expr::ternary(s.cond, a, b);
                }
                return;
            }
        }
    }

    /// Recognizes `if (rst)`, `if (!rst_n)`, `if (~rst_n)`, `if (rst == 1'b0)`.
    std::optional<std::pair<std::string, bool>> reset_condition(const ExprPtr& cond) const {
        if (cond->kind() == ExprKind::identifier) return std::make_pair(cond->name(), true);
        if (cond->kind() == ExprKind::unary && cond->operand(0)->kind() == ExprKind::identifier)
            return std::make_pair(cond->operand(0)->name(), false);
        if (cond->kind() == ExprKind::binary && cond->binary_op() == BinaryOp::eq &&
            cond->operand(0)->kind() == ExprKind::identifier &&
            cond->operand(1)->kind() == ExprKind::constant)
            return std::make_pair(cond->operand(0)->name(), cond->operand(1)->value() != 0);
        return std::nullopt;
    }

    void lower_always(const RawAlways& blk) {
        const Stmt* top = &blk.body;
        while (top->kind == Stmt::Kind::block && top->body.size() == 1) top = &top->body[0];
        std::optional<ResetSpec> reset;
        std::map<std::string, ExprPtr> reset_values;
        const Stmt* functional = top;
        std::vector<std::string> targets;
        if (top->kind == Stmt::Kind::if_) {
            auto rc = reset_condition(top->cond);
            bool in_sensitivity = rc && blk.reset_edge && blk.reset_edge->first == rc->first;
            if (rc && (in_sensitivity || is_reset_name(rc->first))) {
                ResetSpec spec;
                spec.net = rc->first;
                spec.active_high = rc->second;
                reset = spec;
                std::vector<std::string> reset_targets;
                lower_statement(top->branches[0], reset_values, reset_targets);
                functional = top->branches.size() > 1 ? &top->branches[1] : nullptr;
                for (const auto& t : reset_targets) targets.push_back(t);
            }
        }
        if (blk.reset_edge && !reset)
            elab_fail(blk.where, "sensitivity list names reset '" + blk.reset_edge->first +
                                     "' but the body does not start with a reset branch");
        std::map<std::string, ExprPtr> env;
        if (functional) lower_statement(*functional, env, targets);
        for (const auto& t : targets) {
            Register r;
            r.target = t;
            r.clock = blk.clock;
            r.next = env.count(t) ? env[t] : Expr::identifier(t);
            reg_tokens_[t] = blk.where;
            if (reset) {
                if (!reset_values.count(t))
                    elab_fail(blk.where, "register '" + t + "' has no value in the reset branch");
                ResetSpec spec = *reset;
                spec.value = reset_values[t];
                r.reset = spec;
            }
            nl_.registers.push_back(std::move(r));
        }
    }

    void elaborate() {
        for (const auto& name : param_order_) {
            const auto& p = nl_.params[name];
            nl_.nets[name] = Net{name, p.width ? p.width : 32, NetKind::constant};
        }
        for (const auto& p : nl_.ports)
            nl_.nets[p.name] = Net{p.name, p.width,
                                    p.direction == PortDirection::input ? NetKind::input : NetKind::output};
        for (const auto& d : nets_) nl_.nets[d.name] = Net{d.name, d.width, NetKind::internal};

        for (const auto& blk : always_) lower_always(blk);
        for (const auto& a : assigns_) nl_.assigns.push_back(Assign{a.lhs, a.rhs});

        std::map<std::string, std::string> driver;  // net -> description
        auto claim = [&](const std::string& net, const std::string& what, const Token& where) {
            const Net* n = nl_.find_net(net);
            if (!n) elab_fail(where, "undeclared identifier '" + net + "'");
            if (n->kind == NetKind::constant) elab_fail(where, "cannot drive named constant '" + net + "'");
            if (n->kind == NetKind::input) elab_fail(where, "cannot drive input port '" + net + "'");
            auto [it, fresh] = driver.emplace(net, what);
            if (!fresh) elab_fail(where, "multiple drivers for '" + net + "' (" + it->second + " and " + what + ")");
        };
        for (const auto& a : assigns_) claim(a.lhs, "assign", a.where);
        for (const auto& r : nl_.registers) claim(r.target, "always_ff", reg_tokens_[r.target]);

        std::optional<std::string> clock;
        for (const auto& blk : always_) {
            const Net* c = nl_.find_net(blk.clock);
            if (!c) elab_fail(blk.where, "undeclared identifier '" + blk.clock + "'");
            if (c->width != 1) elab_fail(blk.where, "clock '" + blk.clock + "' must be 1 bit wide");
            if (clock && *clock != blk.clock)
                elab_fail(blk.where, "multiple clock domains ('" + *clock + "' and '" + blk.clock + "')");
            clock = blk.clock;
        }

        for (std::size_t i = 0; i < nl_.assigns.size(); ++i) {
            const auto& a = nl_.assigns[i];
            check_expr(a.rhs, nl_.nets[a.lhs].width, assigns_[i].where, "assign to '" + a.lhs + "'");
        }
        for (auto& r : nl_.registers) {
            nl_.nets[r.target].kind = NetKind::register_;
            const Token& where = reg_tokens_[r.target];
            unsigned w = nl_.nets[r.target].width;
            check_expr(r.next, w, where, "register '" + r.target + "'");
            if (r.reset) {
                const Net* rn = nl_.find_net(r.reset->net);
                if (!rn) elab_fail(where, "undeclared identifier '" + r.reset->net + "'");
                if (rn->width != 1) elab_fail(where, "reset '" + r.reset->net + "' must be 1 bit wide");
                for (const auto& id : identifiers_of(*r.reset->value))
                    if (!nl_.params.count(id))
                        elab_fail(where, "reset value of '" + r.target + "' must be constant");
                check_expr(r.reset->value, w, where, "reset value of '" + r.target + "'");
            }
        }
        combinational_closure(nl_);
    }

    std::string_view src_;
    TokenStream ts_;
    Netlist nl_;
    std::set<std::string> declared_;
    std::vector<std::string> param_order_;
    std::vector<RawDecl> nets_;
    std::vector<RawAssign> assigns_;
    std::vector<RawAlways> always_;
    std::map<std::string, Token> decl_tokens_;
    std::map<std::string, Token> reg_tokens_;
};

}  // namespace

Netlist parse_design(std::string_view source) { return DesignParser(source).run(); }

// ---------------------------------------------------------------------------
// Rendering
// ---------------------------------------------------------------------------

namespace {

std::string range_of(unsigned width) {
    return width > 1 ? "[" + std::to_string(width - 1) + ":0] " : "";
}

std::string sized_literal(std::uint64_t value, unsigned width) {
    std::ostringstream os;
    if (width == 0)
        os << value;
    else
        os << width << "'h" << std::hex << value;
    return os.str();
}

}  // namespace

std::string render_design(const Netlist& nl) {
    std::ostringstream os;
    os << "module " << nl.name;
    if (nl.ports.empty()) {
        os << ";\n";
    } else {
        os << " (\n";
        for (std::size_t i = 0; i < nl.ports.size(); ++i) {
            const auto& p = nl.ports[i];
            os << "  " << to_string(p.direction) << " logic " << range_of(p.width) << p.name
               << (i + 1 < nl.ports.size() ? ",\n" : "\n");
        }
        os << ");\n";
    }
    // Params render their evaluated values, so declaration order is free.
    std::vector<const Param*> params;
    for (const auto& [_, p] : nl.params) params.push_back(&p);
    for (const Param* p : params) {
        os << "  " << (p->local ? "localparam " : "parameter ");
        if (p->width) os << "logic [" << p->width - 1 << ":0] ";
        os << p->name << " = " << sized_literal(p->value, p->width) << ";\n";
    }
    for (const auto& [name, net] : nl.nets) {
        if (net.kind != NetKind::internal && net.kind != NetKind::register_) continue;
        if (nl.find_port(name)) continue;
        os << "  logic " << range_of(net.width) << name << ";\n";
    }
    for (const auto& a : nl.assigns) os << "  assign " << a.lhs << " = " << to_string(a.rhs) << ";\n";
    for (const auto& r : nl.registers) {
        os << "  always_ff @(posedge " << r.clock;
        if (r.reset) os << (r.reset->active_high ? " or posedge " : " or negedge ") << r.reset->net;
        os << ") begin\n";
        if (r.reset) {
            os << "    if (" << (r.reset->active_high ? "" : "!") << r.reset->net << ") " << r.target
               << " <= " << to_string(r.reset->value) << ";\n";
            os << "    else " << r.target << " <= " << to_string(r.next) << ";\n";
        } else {
            os << "    " << r.target << " <= " << to_string(r.next) << ";\n";
        }
        os << "  end\n";
    }
    os << "endmodule\n";
    return os.str();
}

std::uint64_t design_hash(const Netlist& nl) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : render_design(nl)) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

// ---------------------------------------------------------------------------
// Combinational closure
// ---------------------------------------------------------------------------

std::vector<const Assign*> combinational_closure(const Netlist& nl) {
    const std::size_t n = nl.assigns.size();
    std::map<std::string, std::size_t> driver;
    for (std::size_t i = 0; i < n; ++i) driver[nl.assigns[i].lhs] = i;

    std::vector<std::vector<std::size_t>> readers(n);
    std::vector<std::size_t> indegree(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        for (const auto& id : identifiers_of(*nl.assigns[i].rhs)) {
            auto it = driver.find(id);
            if (it == driver.end()) continue;
            readers[it->second].push_back(i);
            ++indegree[i];
        }
    }
    std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
    for (std::size_t i = 0; i < n; ++i)
        if (indegree[i] == 0) ready.push(i);
    std::vector<const Assign*> order;
    while (!ready.empty()) {
        std::size_t i = ready.top();
        ready.pop();
        order.push_back(&nl.assigns[i]);
        for (std::size_t r : readers[i])
            if (--indegree[r] == 0) ready.push(r);
    }
    if (order.size() == n) return order;

    // Walk backwards through unresolved assigns until a node repeats.
    std::size_t start = 0;
    while (indegree[start] == 0) ++start;
    std::vector<std::size_t> path;
    std::map<std::size_t, std::size_t> seen;
    std::size_t cur = start;
    while (!seen.count(cur)) {
        seen[cur] = path.size();
        path.push_back(cur);
        std::size_t next = cur;
        for (const auto& id : identifiers_of(*nl.assigns[cur].rhs)) {
            auto it = driver.find(id);
            if (it != driver.end() && indegree[it->second] > 0) {
                next = it->second;
                break;
            }
        }
        cur = next;
    }
    std::vector<std::string> cycle;
    for (std::size_t k = seen[cur]; k < path.size(); ++k) cycle.push_back(nl.assigns[path[k]].lhs);
    std::sort(cycle.begin(), cycle.end());
    std::string msg = "combinational loop through nets {";
    for (std::size_t k = 0; k < cycle.size(); ++k) msg += (k ? ", " : "") + cycle[k];
    msg += "}";
    throw CombinationalLoopError(cycle, msg);
}

void check_netlist(const Netlist& nl) {
    // Re-parse the rendered text: this runs the full elaboration pipeline.
    Netlist reparsed = parse_design(render_design(nl));
    (void)reparsed;
    combinational_closure(nl);
}

}  // namespace svaport::rtl
