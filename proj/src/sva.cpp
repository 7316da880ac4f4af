#include "svaport/sva.hpp"

#include <map>
#include <sstream>

#include "svaport/error.hpp"

namespace svaport::sva {

unsigned SeqExpr::span() const {
    unsigned s = 0;
    for (std::size_t i = 1; i < terms.size(); ++i) s += terms[i].delay;
    return s;
}

unsigned SeqExpr::length() const { return terms.empty() ? 0 : terms.front().delay + span(); }

bool structurally_equal(const SeqExpr& a, const SeqExpr& b) {
    if (a.terms.size() != b.terms.size()) return false;
    for (std::size_t i = 0; i < a.terms.size(); ++i) {
        if (a.terms[i].delay != b.terms[i].delay) return false;
        if (!svaport::structurally_equal(a.terms[i].expr, b.terms[i].expr)) return false;
    }
    return true;
}

bool structurally_equal(const Assertion& a, const Assertion& b) {
    return a.name == b.name && a.label == b.label && a.clock_edge == b.clock_edge && a.clock == b.clock &&
           svaport::structurally_equal(a.disable, b.disable) &&
           structurally_equal(a.antecedent, b.antecedent) && a.implication == b.implication &&
           structurally_equal(a.consequent, b.consequent) && a.action == b.action;
}

namespace {

const std::set<std::string>& unsupported_sequence_keywords() {
    static const std::set<std::string> kw = {"throughout", "intersect", "within", "and",   "or",
                                             "until",      "s_until",   "implies", "iff",  "not",
                                             "first_match", "s_eventually", "eventually", "always",
                                             "nexttime",   "s_nexttime", "strong", "weak",  "accept_on",
                                             "reject_on",  "sync_accept_on", "sync_reject_on", "if",
                                             "case"};
    return kw;
}

struct PropertyBody {
    Edge edge = Edge::posedge;
    std::string clock;
    ExprPtr disable;
    SeqExpr antecedent;
    Implication implication = Implication::overlapped;
    SeqExpr consequent;
};

class AssertionParser {
public:
    explicit AssertionParser(std::string_view src) : ts_(src, tokenize(src)) {}

    std::vector<Assertion> parse_file() {
        std::vector<Assertion> out;
        std::set<std::string> names;
        while (!ts_.at_end()) {
            const Token& t = ts_.peek();
            if (t.is_keyword("property")) {
                parse_property_decl();
                continue;
            }
            if (t.is_keyword("sequence") || t.is_keyword("cover") || t.is_keyword("assume") ||
                t.is_keyword("restrict") || t.is_keyword("default") || t.is_keyword("let") ||
                t.is_keyword("checker"))
                ts_.unsupported(t, "'" + t.text + "'");
            Assertion a = parse_assert_statement(out.size() + 1);
            if (!names.insert(a.name).second)
                ts_.fail_at(t, "duplicate assertion name '" + a.name + "'", "unique assertion names");
            out.push_back(std::move(a));
        }
        return out;
    }

private:
    void parse_property_decl() {
        ts_.expect_keyword("property");
        const Token& name = ts_.expect_identifier("property name");
        if (ts_.peek().is_punct("(")) ts_.unsupported(ts_.peek(), "property arguments");
        ts_.expect_punct(";");
        PropertyBody body = parse_body();
        ts_.accept_punct(";");
        // `endproperty`, tolerating the split spelling `end property`.
        if (!ts_.accept_keyword("endproperty")) {
            if (ts_.peek().is_keyword("end") && ts_.peek(1).is_keyword("property")) {
                ts_.next();
                ts_.next();
            } else {
                ts_.fail("unexpected token", "'endproperty'");
            }
        }
        if (ts_.accept_punct(":")) {
            const Token& end_name = ts_.expect_identifier("property name");
            if (end_name.text != name.text)
                ts_.fail_at(end_name, "mismatched endproperty label", "'" + name.text + "'");
        }
        if (properties_.count(name.text)) ts_.fail_at(name, "duplicate property name", "unique property names");
        properties_[name.text] = std::move(body);
    }

    Assertion parse_assert_statement(std::size_t position) {
        std::string label;
        if (ts_.peek().kind == TokenKind::identifier && ts_.peek(1).is_punct(":")) {
            label = ts_.next().text;
            ts_.next();
        }
        ts_.expect_keyword("assert");
        ts_.expect_keyword("property");
        ts_.expect_punct("(");
        Assertion a;
        const Token& first = ts_.peek();
        if (first.kind == TokenKind::identifier && ts_.peek(1).is_punct(")") && properties_.count(first.text)) {
            ts_.next();
            const PropertyBody& body = properties_.at(first.text);
            fill(a, body);
            a.name = first.text;
            a.label = label;
        } else {
            PropertyBody body = parse_body();
            fill(a, body);
            a.name = label.empty() ? "assertion_" + std::to_string(position) : label;
        }
        ts_.expect_punct(")");
        if (ts_.accept_keyword("else")) {
            const Token& sys = ts_.peek();
            if (sys.kind != TokenKind::system_name) ts_.fail("unexpected token", "$error");
            if (sys.text != "$error") ts_.unsupported(sys, "action block " + sys.text);
            ts_.next();
            std::string msg;
            if (ts_.accept_punct("(")) {
                const Token& s = ts_.peek();
                if (s.kind != TokenKind::string) ts_.fail("unexpected token", "message string");
                msg = ts_.next().text;
                if (ts_.peek().is_punct(",")) ts_.unsupported(ts_.peek(), "formatted $error arguments");
                ts_.expect_punct(")");
            }
            a.action = msg;
        }
        ts_.expect_punct(";");
        return a;
    }

    static void fill(Assertion& a, const PropertyBody& b) {
        a.clock_edge = b.edge;
        a.clock = b.clock;
        a.disable = b.disable;
        a.antecedent = b.antecedent;
        a.implication = b.implication;
        a.consequent = b.consequent;
    }

    PropertyBody parse_body() {
        PropertyBody b;
        const Token& at = ts_.peek();
        if (!ts_.accept_punct("@")) ts_.fail("missing clocking event", "'@(posedge <clock>)'");
        ts_.expect_punct("(");
        if (ts_.accept_keyword("negedge"))
            b.edge = Edge::negedge;
        else if (!ts_.accept_keyword("posedge")) {
            if (ts_.peek().is_keyword("edge")) ts_.unsupported(ts_.peek(), "dual-edge clocking");
            ts_.fail("unexpected token", "'posedge' or 'negedge'");
        }
        b.clock = ts_.expect_identifier("clock name").text;
        if (ts_.peek().is_keyword("or") || ts_.peek().is_punct(","))
            ts_.unsupported(ts_.peek(), "multi-clock properties");
        ts_.expect_punct(")");
        (void)at;
        if (ts_.accept_keyword("disable")) {
            ts_.expect_keyword("iff");
            ts_.expect_punct("(");
            b.disable = parse_expr(ts_, false);
            ts_.expect_punct(")");
        }
        if (ts_.peek().is_punct("@")) ts_.unsupported(ts_.peek(), "multi-clock properties");
        b.antecedent = parse_sequence();
        if (ts_.accept_punct("|->")) {
            b.implication = Implication::overlapped;
        } else if (ts_.accept_punct("|=>")) {
            b.implication = Implication::non_overlapped;
        } else {
            // A bare sequence is checked on every cycle: `1'b1 |-> seq`.
            b.consequent = b.antecedent;
            b.antecedent = SeqExpr{{SeqTerm{0, Expr::constant(1, 1, 'b')}}};
            return b;
        }
        b.consequent = parse_sequence();
        return b;
    }

    SeqExpr parse_sequence() {
        SeqExpr s;
        unsigned delay = 0;
        if (ts_.peek().is_punct("##")) delay = parse_delay();
        for (;;) {
            check_unsupported_prefix();
            ExprPtr e = parse_expr(ts_, true);
            s.terms.push_back(SeqTerm{delay, e});
            check_unsupported_suffix();
            if (!ts_.peek().is_punct("##")) break;
            delay = parse_delay();
        }
        return s;
    }

    unsigned parse_delay() {
        const Token& hash = ts_.expect_punct("##");
        const Token& t = ts_.peek();
        if (t.is_punct("[")) ts_.unsupported(hash, "ranged cycle delay ##[m:n]");
        if (t.kind == TokenKind::identifier) ts_.unsupported(t, "non-constant cycle delay");
        if (t.kind != TokenKind::number) ts_.fail("unexpected token", "constant cycle delay");
        ts_.next();
        ExprPtr n = parse_number(ts_, t);
        if (n->value() > 1024) ts_.fail_at(t, "cycle delay too large", "delay of at most 1024");
        return static_cast<unsigned>(n->value());
    }

    void check_unsupported_prefix() {
        const Token& t = ts_.peek();
        if (t.kind == TokenKind::identifier && unsupported_sequence_keywords().count(t.text))
            ts_.unsupported(t, "'" + t.text + "'");
        if (t.kind == TokenKind::system_name && t.text != "$past") ts_.unsupported(t, "system function " + t.text);
    }

    void check_unsupported_suffix() {
        const Token& t = ts_.peek();
        if (t.kind == TokenKind::identifier && unsupported_sequence_keywords().count(t.text))
            ts_.unsupported(t, "'" + t.text + "'");
        if (t.is_punct("[")) ts_.unsupported(t, "repetition operator");
    }

    TokenStream ts_;
    std::map<std::string, PropertyBody> properties_;
};

}  // namespace

std::vector<Assertion> parse_assertion_file(std::string_view text) { return AssertionParser(text).parse_file(); }

Assertion parse_assertion(std::string_view text) {
    auto all = parse_assertion_file(text);
    if (all.size() != 1)
        throw SyntaxError("expected exactly one assertion", {}, "one assertion",
                          "expected exactly one assertion, found " + std::to_string(all.size()));
    return std::move(all.front());
}

std::string render_sequence(const SeqExpr& s) {
    std::ostringstream os;
    for (std::size_t i = 0; i < s.terms.size(); ++i) {
        const auto& t = s.terms[i];
        if (i > 0) os << ' ';
        if (i > 0 || t.delay > 0) os << "##" << t.delay << ' ';
        const Expr& e = *t.expr;
        bool parens = e.kind() == ExprKind::ternary;
        os << (parens ? "(" : "") << to_string(e) << (parens ? ")" : "");
    }
    return os.str();
}

namespace {

std::string render_body(const Assertion& a) {
    std::ostringstream os;
    os << "@(" << (a.clock_edge == Edge::posedge ? "posedge " : "negedge ") << a.clock << ") ";
    if (a.disable) os << "disable iff (" << to_string(a.disable) << ") ";
    os << render_sequence(a.antecedent) << (a.implication == Implication::overlapped ? " |-> " : " |=> ")
       << render_sequence(a.consequent);
    return os.str();
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    return out;
}

}  // namespace

std::string render_assertion(const Assertion& a) {
    std::ostringstream os;
    if (!a.label.empty() || a.action) {
        os << "property " << a.name << ";\n";
        os << "  " << render_body(a) << ";\n";
        os << "endproperty\n";
        if (!a.label.empty()) os << a.label << ": ";
        os << "assert property (" << a.name << ")";
        if (a.action) os << " else $error(\"" << escape(*a.action) << "\")";
        os << ";\n";
    } else {
        if (!a.name.empty()) os << a.name << ": ";
        os << "assert property (" << render_body(a) << ");\n";
    }
    return os.str();
}

std::string render_assertion_file(const std::vector<Assertion>& assertions) {
    std::string out;
    for (std::size_t i = 0; i < assertions.size(); ++i) {
        if (i) out += "\n";
        out += render_assertion(assertions[i]);
    }
    return out;
}

std::set<std::string> signals_of(const Assertion& a) {
    std::set<std::string> out;
    for (const auto& t : a.antecedent.terms) collect_identifiers(*t.expr, out);
    for (const auto& t : a.consequent.terms) collect_identifiers(*t.expr, out);
    if (a.disable) collect_identifiers(*a.disable, out);
    return out;
}

Assertion normalize_implication(const Assertion& a) {
    if (a.implication == Implication::overlapped) return a;
    Assertion out = a;
    out.implication = Implication::overlapped;
    out.consequent.terms.front().delay += 1;
    return out;
}

}  // namespace svaport::sva
