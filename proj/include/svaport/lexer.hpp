#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "svaport/error.hpp"

namespace svaport {

enum class TokenKind {
    identifier,     // plain or escaped-free identifiers
    system_name,    // $past, $error, ...
    number,         // 12, 4'hF, 'b1
    string,         // "..."
    punct,          // operators and delimiters; text holds the spelling
    end_of_input,
};

struct Token {
    TokenKind kind = TokenKind::end_of_input;
    std::string text;
    SourceLocation where;

    bool is(TokenKind k, std::string_view t) const { return kind == k && text == t; }
    bool is_punct(std::string_view t) const { return is(TokenKind::punct, t); }
    bool is_keyword(std::string_view t) const { return is(TokenKind::identifier, t); }
};

/// Tokenizes the Verilog/SVA subset.  Comments and whitespace are skipped.
std::vector<Token> tokenize(std::string_view source);

/// Formats "line:col: message" followed by the offending source line and a caret.
std::string render_diagnostic(std::string_view source, SourceLocation where,
                              std::string_view message);

/// Cursor over a token vector with the error helpers shared by both parsers.
class TokenStream {
public:
    TokenStream(std::string_view source, std::vector<Token> tokens)
        : source_(source), tokens_(std::move(tokens)) {}

    const Token& peek(std::size_t ahead = 0) const;
    const Token& next();
    bool at_end() const { return peek().kind == TokenKind::end_of_input; }

    bool accept_punct(std::string_view p);
    bool accept_keyword(std::string_view k);
    const Token& expect_punct(std::string_view p);
    const Token& expect_keyword(std::string_view k);
    const Token& expect_identifier(std::string_view what = "identifier");

    [[noreturn]] void fail(std::string_view message, std::string_view expected) const;
    [[noreturn]] void fail_at(const Token& tok, std::string_view message,
                              std::string_view expected) const;
    [[noreturn]] void unsupported(const Token& tok, std::string_view construct) const;

    std::string_view source() const { return source_; }

private:
    std::string_view source_;
    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
};

}  // namespace svaport
