#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace svaport::testkit {

inline std::filesystem::path corpus(const std::string& rel) {
    return std::filesystem::path(SVAPORT_CORPUS_DIR) / rel;
}

using ReadMap = std::map<std::string, std::set<std::string>>;

// Reads of every `assign` in the source, found with a plain text scan.
inline ReadMap scan_assigns(const std::string& text, const std::set<std::string>& constants) {
    ReadMap m;
    std::size_t pos = 0;
    while ((pos = text.find("assign ", pos)) != std::string::npos) {
        std::size_t eq = text.find('=', pos);
        std::size_t end = text.find(';', eq);
        std::string lhs = text.substr(pos + 7, eq - pos - 7);
        lhs.erase(std::remove_if(lhs.begin(), lhs.end(), ::isspace), lhs.end());
        std::string rhs = text.substr(eq + 1, end - eq - 1);
        for (std::size_t i = 0; i < rhs.size();) {
            if (std::isalpha(static_cast<unsigned char>(rhs[i])) || rhs[i] == '_') {
                std::size_t j = i;
                while (j < rhs.size() && (std::isalnum(static_cast<unsigned char>(rhs[j])) || rhs[j] == '_')) ++j;
                bool literal = i > 0 && rhs[i - 1] == '\'';
                std::string id = rhs.substr(i, j - i);
                if (!literal && !constants.count(id)) m[lhs].insert(id);
                i = j;
            } else {
                ++i;
            }
        }
        pos = end;
    }
    return m;
}

// All-pairs shortest read distances by repeated relaxation.
inline std::map<std::string, unsigned> distances_from(const ReadMap& reads, const std::string& start) {
    std::map<std::string, unsigned> dist;
    bool changed = true;
    auto direct = reads.count(start) ? reads.at(start) : std::set<std::string>{};
    for (const auto& r : direct) dist[r] = 1;
    while (changed) {
        changed = false;
        for (auto [node, d] : std::map<std::string, unsigned>(dist)) {
            if (!reads.count(node)) continue;
            for (const auto& r : reads.at(node)) {
                if (r == start) continue;
                auto it = dist.find(r);
                if (it == dist.end() || it->second > d + 1) {
                    dist[r] = d + 1;
                    changed = true;
                }
            }
        }
    }
    dist.erase(start);
    return dist;
}

// Length of the shortest cycle through `start`, 0 when there is none.
inline unsigned cycle_length(const ReadMap& reads, const std::string& start) {
    if (reads.count(start) && reads.at(start).count(start)) return 1;
    unsigned best = 0;
    for (const auto& [node, d] : distances_from(reads, start))
        if (reads.count(node) && reads.at(node).count(start) && (best == 0 || d + 1 < best)) best = d + 1;
    return best;
}

inline std::uint64_t mask(unsigned w) { return w >= 64 ? ~0ull : ((1ull << w) - 1); }

/// Random single-module design kept in a private form so tests can evaluate
/// it without going through the library.
struct RandomDesign {
    enum class Op { and_, or_, xor_, add, not_, eq, mux };
    struct Node {
        std::string name;
        unsigned width;
        Op op;
        std::vector<int> args;       // signal indices
        unsigned operand_width = 1;  // wider operands are truncated to this
    };

    std::vector<unsigned> input_widths;
    std::vector<std::string> input_names;
    std::vector<Node> assigns;       // evaluated in order, may read inputs, registers, earlier assigns
    struct Reg {
        std::string name;
        unsigned width;
        int src;                     // signal index the register samples
        std::uint64_t reset_value;
    };
    std::vector<Reg> regs;

    // Signal index space: [inputs][regs][assigns]
    std::size_t n_inputs() const { return input_widths.size(); }
    std::string name_of(int idx) const {
        if (idx < static_cast<int>(n_inputs())) return input_names[idx];
        idx -= static_cast<int>(n_inputs());
        if (idx < static_cast<int>(regs.size())) return regs[idx].name;
        return assigns[idx - regs.size()].name;
    }
    unsigned width_of(int idx) const {
        if (idx < static_cast<int>(n_inputs())) return input_widths[idx];
        idx -= static_cast<int>(n_inputs());
        if (idx < static_cast<int>(regs.size())) return regs[idx].width;
        return assigns[idx - regs.size()].width;
    }
    std::size_t n_signals() const { return n_inputs() + regs.size() + assigns.size(); }

    static RandomDesign make(std::mt19937_64& rng, bool with_regs) {
        RandomDesign d;
        auto pick = [&](std::size_t n) { return static_cast<std::size_t>(rng() % n); };
        std::size_t ni = 2 + pick(4);
        for (std::size_t i = 0; i < ni; ++i) {
            d.input_widths.push_back(1 + static_cast<unsigned>(pick(8)));
            d.input_names.push_back("in" + std::to_string(i));
        }
        std::size_t nr = with_regs ? 1 + pick(3) : 0;
        for (std::size_t r = 0; r < nr; ++r)
            d.regs.push_back({"r" + std::to_string(r), 1 + static_cast<unsigned>(pick(8)), 0, rng() & 0xff});
        std::size_t na = 3 + pick(8);
        for (std::size_t a = 0; a < na; ++a) {
            std::size_t avail = ni + nr + a;
            Node n;
            n.name = "w" + std::to_string(a);
            n.op = static_cast<Op>(pick(7));
            auto arg = [&] { return static_cast<int>(pick(avail)); };
            switch (n.op) {
                case Op::not_: n.args = {arg()}; n.width = d.width_of(n.args[0]); break;
                case Op::eq: {
                    n.args = {arg(), arg()};
                    n.width = 1;
                    n.operand_width = std::min(d.width_of(n.args[0]), d.width_of(n.args[1]));
                    break;
                }
                case Op::mux: {
                    n.args = {arg(), arg(), arg()};
                    n.width = std::min(d.width_of(n.args[1]), d.width_of(n.args[2]));
                    break;
                }
                default: n.args = {arg(), arg()}; n.width = std::min(d.width_of(n.args[0]), d.width_of(n.args[1]));
            }
            if (n.op != Op::eq) n.operand_width = n.width;
            d.assigns.push_back(n);
        }
        for (std::size_t r = 0; r < d.regs.size(); ++r) {
            auto& reg = d.regs[r];
            reg.src = static_cast<int>(ni + r);
            for (int tries = 0; tries < 20; ++tries) {
                int c = static_cast<int>(pick(d.n_signals()));
                if (d.width_of(c) >= reg.width) {
                    reg.src = c;
                    break;
                }
            }
            reg.reset_value &= mask(reg.width);
        }
        return d;
    }

    std::string operand(int idx, unsigned w) const {
        if (width_of(idx) <= w) return name_of(idx);
        return name_of(idx) + "[" + std::to_string(w - 1) + ":0]";
    }

    std::string verilog() const {
        std::string s = "module rnd (\n  input logic clk,\n  input logic rst_ni";
        for (std::size_t i = 0; i < n_inputs(); ++i)
            s += ",\n  input logic [" + std::to_string(input_widths[i] - 1) + ":0] " + input_names[i];
        s += "\n);\n";
        for (const auto& r : regs) s += "  logic [" + std::to_string(r.width - 1) + ":0] " + r.name + ";\n";
        for (const auto& a : assigns) s += "  logic [" + std::to_string(a.width - 1) + ":0] " + a.name + ";\n";
        for (const auto& a : assigns) {
            auto n = [&](int i) {
                int idx = a.args[static_cast<std::size_t>(i)];
                bool cond = a.op == Op::mux && i == 0;
                return cond ? name_of(idx) : operand(idx, a.operand_width);
            };
            std::string rhs;
            switch (a.op) {
                case Op::and_: rhs = n(0) + " & " + n(1); break;
                case Op::or_: rhs = n(0) + " | " + n(1); break;
                case Op::xor_: rhs = n(0) + " ^ " + n(1); break;
                case Op::add: rhs = n(0) + " + " + n(1); break;
                case Op::not_: rhs = "~" + n(0); break;
                case Op::eq: rhs = n(0) + " == " + n(1); break;
                case Op::mux: rhs = "(" + n(0) + " != 0) ? " + n(1) + " : " + n(2); break;
            }
            s += "  assign " + a.name + " = " + rhs + ";\n";
        }
        if (!regs.empty()) {
            s += "  always_ff @(posedge clk or negedge rst_ni) begin\n    if (!rst_ni) begin\n";
            for (const auto& r : regs)
                s += "      " + r.name + " <= " + std::to_string(r.width) + "'d" + std::to_string(r.reset_value) + ";\n";
            s += "    end else begin\n";
            for (const auto& r : regs) s += "      " + r.name + " <= " + operand(r.src, r.width) + ";\n";
            s += "    end\n  end\n";
        }
        s += "endmodule\n";
        return s;
    }

    /// Direct evaluation of one cycle: returns every signal value by index.
    std::vector<std::uint64_t> eval(const std::vector<std::uint64_t>& inputs,
                                    const std::vector<std::uint64_t>& reg_values) const {
        std::vector<std::uint64_t> v(n_signals(), 0);
        for (std::size_t i = 0; i < n_inputs(); ++i) v[i] = inputs[i] & mask(input_widths[i]);
        for (std::size_t r = 0; r < regs.size(); ++r) v[n_inputs() + r] = reg_values[r];
        for (std::size_t a = 0; a < assigns.size(); ++a) {
            const auto& n = assigns[a];
            auto x = [&](std::size_t i) {
                std::uint64_t raw = v[static_cast<std::size_t>(n.args[i])];
                return (n.op == Op::mux && i == 0) ? raw : raw & mask(n.operand_width);
            };
            std::uint64_t r = 0;
            switch (n.op) {
                case Op::and_: r = x(0) & x(1); break;
                case Op::or_: r = x(0) | x(1); break;
                case Op::xor_: r = x(0) ^ x(1); break;
                case Op::add: r = x(0) + x(1); break;
                case Op::not_: r = ~x(0); break;
                case Op::eq: r = x(0) == x(1); break;
                case Op::mux: r = x(0) != 0 ? x(1) : x(2); break;
            }
            v[n_inputs() + regs.size() + a] = r & mask(n.width);
        }
        return v;
    }

    /// Direct read sets, for reachability oracles.
    std::map<std::string, std::set<std::string>> reads() const {
        std::map<std::string, std::set<std::string>> m;
        for (const auto& name : input_names) m[name];
        for (const auto& a : assigns)
            for (int i : a.args) m[a.name].insert(name_of(i));
        for (const auto& r : regs) {
            m[r.name].insert(name_of(r.src));
            m[r.name].insert("rst_ni");
        }
        m["clk"];
        m["rst_ni"];
        return m;
    }
};

/// Random assertion over 1-bit signals x0..x3 with a direct, cycle-by-cycle
/// reading of the attempt rules used as an oracle for the monitor.
struct RandomProperty {
    struct Atom {
        int sig;            // x<sig>
        int other = -1;     // when >= 0: x<sig> == x<other>
        bool negate = false;
        unsigned past = 0;  // $past(x<sig>, past) when > 0
    };
    struct Term {
        unsigned delay = 0;  // ##delay before this term
        std::vector<Atom> atoms;  // conjunction
    };
    std::vector<Term> antecedent;
    std::vector<Term> consequent;  // first term may carry a leading delay
    bool non_overlapped = false;
    int disable = -1;  // disable iff (x<disable>)

    static constexpr int kSignals = 4;

    static RandomProperty make(std::mt19937_64& rng) {
        RandomProperty p;
        auto atom = [&](bool past) {
            Atom a;
            a.sig = static_cast<int>(rng() % kSignals);
            switch (rng() % (past ? 4 : 3)) {
                case 0: break;
                case 1: a.negate = true; break;
                case 2: a.other = static_cast<int>(rng() % kSignals); break;
                default: a.past = 1 + static_cast<unsigned>(rng() % 2);
            }
            return a;
        };
        auto seq = [&](bool past, bool lead) {
            std::vector<Term> out;
            std::size_t n = 1 + rng() % 3;
            for (std::size_t k = 0; k < n; ++k) {
                Term t;
                if (k > 0) t.delay = 1 + static_cast<unsigned>(rng() % 2);
                if (k == 0 && lead && rng() % 3 == 0) t.delay = 1 + static_cast<unsigned>(rng() % 2);
                t.atoms.push_back(atom(past));
                if (rng() % 2) t.atoms.push_back(atom(past));
                out.push_back(t);
            }
            return out;
        };
        p.antecedent = seq(false, false);
        p.consequent = seq(true, true);
        p.non_overlapped = rng() % 2;
        if (rng() % 3 == 0) p.disable = static_cast<int>(rng() % kSignals);
        return p;
    }

    static std::string atom_text(const Atom& a) {
        std::string x = "x" + std::to_string(a.sig);
        if (a.past) return "$past(" + x + ", " + std::to_string(a.past) + ")";
        if (a.other >= 0) return "(" + x + " == x" + std::to_string(a.other) + ")";
        return a.negate ? "!" + x : x;
    }

    static std::string seq_text(const std::vector<Term>& seq) {
        std::string s;
        for (std::size_t k = 0; k < seq.size(); ++k) {
            if (seq[k].delay) s += (k ? " ##" : "##") + std::to_string(seq[k].delay) + " ";
            for (std::size_t i = 0; i < seq[k].atoms.size(); ++i) s += (i ? " && " : "") + atom_text(seq[k].atoms[i]);
        }
        return s;
    }

    std::string text(const std::string& name) const {
        std::string s = name + ": assert property (@(posedge clk) ";
        if (disable >= 0) s += "disable iff (x" + std::to_string(disable) + ") ";
        return s + seq_text(antecedent) + (non_overlapped ? " |=> " : " |-> ") + seq_text(consequent) + ");";
    }

    // trace[cycle][signal]
    using Rows = std::vector<std::vector<int>>;

    static bool holds(const Term& t, const Rows& tr, std::size_t c) {
        for (const auto& a : t.atoms) {
            int v;
            if (a.past) v = c >= a.past ? tr[c - a.past][a.sig] : 0;
            else if (a.other >= 0) v = tr[c][a.sig] == tr[c][a.other];
            else v = a.negate ? !tr[c][a.sig] : tr[c][a.sig];
            if (!v) return false;
        }
        return true;
    }

    /// Status per start cycle: 0 not attempted, 1 vacuous, 2 pass, 3 fail, 4 pending.
    std::vector<int> oracle(const Rows& tr) const {
        const std::size_t n = tr.size();
        auto off = [disabled = disable, &tr](std::size_t c) { return disabled >= 0 && tr[c][disabled]; };
        std::vector<int> out(n, 0);
        for (std::size_t t = 0; t < n; ++t) {
            if (off(t)) continue;
            int status = 2;
            std::size_t decided = n - 1;
            std::size_t c = t;
            bool matched = true;
            for (std::size_t k = 0; k < antecedent.size() && matched; ++k) {
                c += antecedent[k].delay;
                if (c >= n) {
                    status = 4;
                    matched = false;
                } else if (!holds(antecedent[k], tr, c)) {
                    status = 1;
                    decided = c;
                    matched = false;
                }
            }
            if (matched) {
                if (non_overlapped) ++c;
                for (const auto& term : consequent) {
                    c += term.delay;
                    if (c >= n) {
                        status = 4;
                        decided = n - 1;
                        break;
                    }
                    decided = c;
                    if (!holds(term, tr, c)) {
                        status = 3;
                        break;
                    }
                }
            }
            bool cancelled = false;
            for (std::size_t k = t + 1; k <= decided && k < n; ++k) cancelled = cancelled || off(k);
            out[t] = cancelled ? 0 : status;
        }
        return out;
    }
};

}  // namespace svaport::testkit
