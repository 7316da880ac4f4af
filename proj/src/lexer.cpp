#include "svaport/lexer.hpp"

#include <array>
#include <cctype>
#include <sstream>

namespace svaport {

namespace {

// Longest spellings first so that maximal munch works with a linear scan.
constexpr std::array<std::string_view, 36> kPuncts = {
    "|->", "|=>", "##", "==", "!=", "&&", "||", "<=", ">=", "::", "(", ")", "[", "]",
    "{",   "}",   ":",  ";",  ",",  "#",  "=",  "~",  "!",  "&",  "|",  "^", "+",
    "-",   "?",   "@",  ".",  "<",  ">",  "*", "/", "%"};

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}

SourceLocation location_of(std::string_view src, std::size_t offset) {
    SourceLocation loc{1, 1, static_cast<std::uint32_t>(offset)};
    for (std::size_t i = 0; i < offset && i < src.size(); ++i) {
        if (src[i] == '\n') {
            ++loc.line;
            loc.column = 1;
        } else {
            ++loc.column;
        }
    }
    return loc;
}

[[noreturn]] void lex_fail(std::string_view src, std::size_t offset, std::string_view msg) {
    auto loc = location_of(src, offset);
    throw SyntaxError(std::string(msg), loc, "", render_diagnostic(src, loc, msg));
}

}  // namespace

std::vector<Token> tokenize(std::string_view src) {
    std::vector<Token> out;
    std::size_t i = 0;
    std::uint32_t line = 1;
    std::uint32_t col = 1;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
            if (src[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
    };
    while (i < src.size()) {
        char c = src[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        if (src.substr(i, 2) == "//") {
            while (i < src.size() && src[i] != '\n') advance(1);
            continue;
        }
        if (src.substr(i, 2) == "/*") {
            auto end = src.find("*/", i + 2);
            if (end == std::string_view::npos) lex_fail(src, i, "unterminated block comment");
            advance(end + 2 - i);
            continue;
        }
        Token tok;
        tok.where = {line, col, static_cast<std::uint32_t>(i)};
        std::size_t start = i;
        if (is_ident_start(c) || (c == '$' && i + 1 < src.size() && is_ident_start(src[i + 1]))) {
            std::size_t j = i + 1;
            while (j < src.size() && is_ident_char(src[j])) ++j;
            tok.kind = c == '$' ? TokenKind::system_name : TokenKind::identifier;
            tok.text = std::string(src.substr(start, j - start));
            advance(j - start);
        } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '\'') {
            // [size]'[base]digits or plain decimal.  Underscores are allowed
            // inside digit runs.
            std::size_t j = i;
            while (j < src.size() && (std::isdigit(static_cast<unsigned char>(src[j])) || src[j] == '_'))
                ++j;
            if (j < src.size() && src[j] == '\'') {
                ++j;
                if (j < src.size() && (src[j] == 's' || src[j] == 'S')) ++j;
                if (j >= src.size() || std::string_view("bBoOdDhH").find(src[j]) == std::string_view::npos)
                    lex_fail(src, j, "expected number base after '");
                ++j;
                std::size_t digits = j;
                while (j < src.size() && (std::isxdigit(static_cast<unsigned char>(src[j])) || src[j] == '_'))
                    ++j;
                if (j == digits) lex_fail(src, j, "expected digits in based literal");
            } else if (c == '\'') {
                lex_fail(src, i, "stray quote");
            }
            tok.kind = TokenKind::number;
            tok.text = std::string(src.substr(start, j - start));
            advance(j - start);
        } else if (c == '"') {
            std::size_t j = i + 1;
            std::string text;
            while (j < src.size() && src[j] != '"') {
                if (src[j] == '\n') lex_fail(src, j, "unterminated string literal");
                if (src[j] == '\\' && j + 1 < src.size()) ++j;
                text.push_back(src[j]);
                ++j;
            }
            if (j >= src.size()) lex_fail(src, i, "unterminated string literal");
            tok.kind = TokenKind::string;
            tok.text = std::move(text);
            advance(j + 1 - start);
        } else {
            bool matched = false;
            for (auto p : kPuncts) {
                if (src.substr(i, p.size()) == p) {
                    tok.kind = TokenKind::punct;
                    tok.text = std::string(p);
                    advance(p.size());
                    matched = true;
                    break;
                }
            }
            if (!matched) lex_fail(src, i, std::string("unexpected character '") + c + "'");
        }
        out.push_back(std::move(tok));
    }
    Token eof;
    eof.kind = TokenKind::end_of_input;
    eof.where = {line, col, static_cast<std::uint32_t>(src.size())};
    out.push_back(eof);
    return out;
}

std::string render_diagnostic(std::string_view src, SourceLocation where, std::string_view message) {
    std::ostringstream os;
    os << where.line << ':' << where.column << ": " << message;
    std::size_t off = std::min<std::size_t>(where.offset, src.size());
    std::size_t line_start = src.rfind('\n', off == 0 ? 0 : off - 1);
    line_start = (line_start == std::string_view::npos || off == 0) ? 0 : line_start + 1;
    if (off > 0 && off <= src.size() && src[off - 1] == '\n') line_start = off;
    std::size_t line_end = src.find('\n', line_start);
    if (line_end == std::string_view::npos) line_end = src.size();
    std::string_view excerpt = src.substr(line_start, line_end - line_start);
    if (!excerpt.empty()) {
        os << '\n' << "  " << excerpt << '\n' << "  ";
        for (std::size_t k = line_start; k < off && k < line_end; ++k)
            os << (src[k] == '\t' ? '\t' : ' ');
        os << '^';
    }
    return os.str();
}

const Token& TokenStream::peek(std::size_t ahead) const {
    std::size_t idx = std::min(pos_ + ahead, tokens_.size() - 1);
    return tokens_[idx];
}

const Token& TokenStream::next() {
    const Token& t = tokens_[pos_];
    if (pos_ + 1 < tokens_.size()) ++pos_;
    return t;
}

bool TokenStream::accept_punct(std::string_view p) {
    if (peek().is_punct(p)) {
        next();
        return true;
    }
    return false;
}

bool TokenStream::accept_keyword(std::string_view k) {
    if (peek().is_keyword(k)) {
        next();
        return true;
    }
    return false;
}

const Token& TokenStream::expect_punct(std::string_view p) {
    if (!peek().is_punct(p)) fail("unexpected token", std::string("'") + std::string(p) + "'");
    return next();
}

const Token& TokenStream::expect_keyword(std::string_view k) {
    if (!peek().is_keyword(k)) fail("unexpected token", std::string("'") + std::string(k) + "'");
    return next();
}

const Token& TokenStream::expect_identifier(std::string_view what) {
    if (peek().kind != TokenKind::identifier) fail("unexpected token", what);
    return next();
}

void TokenStream::fail(std::string_view message, std::string_view expected) const {
    fail_at(peek(), message, expected);
}

void TokenStream::fail_at(const Token& tok, std::string_view message, std::string_view expected) const {
    std::string msg(message);
    if (tok.kind == TokenKind::end_of_input)
        msg += " (end of input)";
    else
        msg += " '" + tok.text + "'";
    if (!expected.empty()) msg += ", expected " + std::string(expected);
    throw SyntaxError(msg, tok.where, std::string(expected), render_diagnostic(source_, tok.where, msg));
}

void TokenStream::unsupported(const Token& tok, std::string_view construct) const {
    std::string msg = "unsupported construct: " + std::string(construct);
    throw UnsupportedConstructError(msg, tok.where, "", render_diagnostic(source_, tok.where, msg));
}

}  // namespace svaport
