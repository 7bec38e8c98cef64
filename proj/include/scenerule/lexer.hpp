#pragma once

// Tokenizer shared by the fact files (domain, scene) and the rule language.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <string>
#include <string_view>
#include <vector>

#include "scenerule/error.hpp"

namespace scenerule {

enum class TokenKind { identifier, quoted, number, punct, end };

struct Token {
  TokenKind kind = TokenKind::end;
  std::string text;  // identifier name, quoted content, number spelling or punct char
  double number = 0.0;
  SourcePos pos;

  bool is_punct(char c) const { return kind == TokenKind::punct && text.size() == 1 && text[0] == c; }
  bool is_identifier(std::string_view s) const { return kind == TokenKind::identifier && text == s; }
};

inline const char* describe(TokenKind k) {
  switch (k) {
    case TokenKind::identifier: return "identifier";
    case TokenKind::quoted: return "quoted name";
    case TokenKind::number: return "number";
    case TokenKind::punct: return "punctuation";
    case TokenKind::end: return "end of input";
  }
  return "token";
}

struct LexOptions {
  bool slash_comments = false;  // `//` to end of line, in addition to `%`
};

inline std::vector<Token> tokenize(std::string_view text, Stage stage, LexOptions opts = {}) {
  std::vector<Token> out;
  std::size_t i = 0;
  std::size_t line = 1;
  std::size_t col = 1;

  auto advance = [&](std::size_t n = 1) {
    for (std::size_t k = 0; k < n && i < text.size(); ++k, ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  auto skip_line = [&] {
    while (i < text.size() && text[i] != '\n') advance();
  };

  // Skip a UTF-8 byte-order mark.
  if (text.starts_with("\xEF\xBB\xBF")) i = 3;

  while (i < text.size()) {
    const char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance();
      continue;
    }
    if (c == '%') {
      skip_line();
      continue;
    }
    if (opts.slash_comments && c == '/' && i + 1 < text.size() && text[i + 1] == '/') {
      skip_line();
      continue;
    }

    Token tok;
    tok.pos = {line, col};

    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < text.size() &&
             (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_'))
        ++j;
      tok.kind = TokenKind::identifier;
      tok.text = std::string(text.substr(i, j - i));
      advance(j - i);
    } else if (c == '\'') {
      std::size_t j = i + 1;
      while (j < text.size() && text[j] != '\'' && text[j] != '\n') ++j;
      if (j >= text.size() || text[j] != '\'')
        throw Error(stage, "unterminated quoted name", tok.pos);
      tok.kind = TokenKind::quoted;
      tok.text = std::string(text.substr(i + 1, j - i - 1));
      if (tok.text.empty()) throw Error(stage, "empty quoted name", tok.pos);
      advance(j - i + 1);
    } else if (std::isdigit(static_cast<unsigned char>(c)) ||
               ((c == '-' || c == '+') && i + 1 < text.size() &&
                (std::isdigit(static_cast<unsigned char>(text[i + 1])) || text[i + 1] == '.')) ||
               (c == '.' && i + 1 < text.size() &&
                std::isdigit(static_cast<unsigned char>(text[i + 1])))) {
      std::size_t start = i;
      if (c == '+') ++start;  // from_chars rejects a leading '+'
      double value = 0.0;
      auto [ptr, ec] = std::from_chars(text.data() + start, text.data() + text.size(), value);
      if (ec != std::errc{}) throw Error(stage, "malformed number", tok.pos);
      const auto len = static_cast<std::size_t>(ptr - (text.data() + i));
      tok.kind = TokenKind::number;
      tok.text = std::string(text.substr(i, len));
      tok.number = value;
      advance(len);
    } else if (std::string_view("()[]{},;.:").find(c) != std::string_view::npos) {
      tok.kind = TokenKind::punct;
      tok.text = std::string(1, c);
      advance();
    } else {
      throw Error(stage, std::string("unexpected character '") + c + "'", tok.pos);
    }
    out.push_back(std::move(tok));
  }

  Token end;
  end.kind = TokenKind::end;
  end.pos = {line, col};
  out.push_back(end);
  return out;
}

// Cursor over a token vector with expectation helpers.
class TokenStream {
 public:
  TokenStream(std::vector<Token> tokens, Stage stage) : tokens_(std::move(tokens)), stage_(stage) {}

  const Token& peek(std::size_t ahead = 0) const {
    const std::size_t k = std::min(pos_ + ahead, tokens_.size() - 1);
    return tokens_[k];
  }
  const Token& next() {
    const Token& t = tokens_[pos_];
    if (pos_ + 1 < tokens_.size()) ++pos_;
    return t;
  }
  bool at_end() const { return peek().kind == TokenKind::end; }

  bool accept_punct(char c) {
    if (!peek().is_punct(c)) return false;
    next();
    return true;
  }

  const Token& expect_punct(char c) {
    if (!peek().is_punct(c)) fail(std::string("expected '") + c + "'");
    return next();
  }

  const Token& expect(TokenKind kind, std::string_view what) {
    if (peek().kind != kind) fail("expected " + std::string(what));
    return next();
  }

  [[noreturn]] void fail(const std::string& message) const {
    const Token& t = peek();
    std::string found = t.kind == TokenKind::end ? "end of input" : "'" + t.text + "'";
    throw Error(stage_, message + ", found " + found, t.pos);
  }

  [[noreturn]] void fail_at(const Token& t, const std::string& message) const {
    throw Error(stage_, message, t.pos);
  }

 private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  Stage stage_;
};

}  // namespace scenerule
