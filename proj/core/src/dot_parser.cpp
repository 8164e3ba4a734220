#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lector/reasoning_graph.hpp"

namespace lector {

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || (c & 0x80); }
bool ident_char(char c) { return ident_start(c) || std::isdigit(static_cast<unsigned char>(c)); }

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
         });
}

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

// ---------------------------------------------------------------------------
// Wrapper stripping
// ---------------------------------------------------------------------------

/// Skips whitespace and an optional ID; true when a '{' follows.
bool header_continues(std::string_view text, std::size_t pos) {
  auto skip_ws = [&] {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  };
  skip_ws();
  if (pos < text.size() && text[pos] == '"') {
    ++pos;
    while (pos < text.size() && text[pos] != '"') pos += (text[pos] == '\\') ? 2 : 1;
    if (pos >= text.size()) return false;
    ++pos;
  } else {
    while (pos < text.size() && ident_char(text[pos])) ++pos;
  }
  skip_ws();
  return pos < text.size() && text[pos] == '{';
}

bool word_at(std::string_view text, std::size_t pos, std::string_view word) {
  if (pos + word.size() > text.size()) return false;
  if (pos > 0 && ident_char(text[pos - 1])) return false;
  if (pos + word.size() < text.size() && ident_char(text[pos + word.size()])) return false;
  return iequals(text.substr(pos, word.size()), word);
}

std::optional<std::size_t> find_graph_header(std::string_view text) {
  for (std::size_t i = 0; i < text.size(); ++i) {
    for (std::string_view kw : {"digraph", "graph"}) {
      if (!word_at(text, i, kw) || !header_continues(text, i + kw.size())) continue;
      // Include a preceding "strict".
      std::size_t j = i;
      while (j > 0 && std::isspace(static_cast<unsigned char>(text[j - 1]))) --j;
      if (j >= 6 && word_at(text, j - 6, "strict")) return j - 6;
      return i;
    }
  }
  return std::nullopt;
}

/// End (exclusive) of the brace block opened at or after `start`.
std::size_t matching_brace_end(std::string_view text, std::size_t start) {
  std::size_t pos = text.find('{', start);
  int depth = 0;
  for (; pos < text.size(); ++pos) {
    char c = text[pos];
    if (c == '"') {
      ++pos;
      while (pos < text.size() && text[pos] != '"') pos += (text[pos] == '\\') ? 2 : 1;
    } else if (c == '{') {
      ++depth;
    } else if (c == '}' && --depth == 0) {
      return pos + 1;
    }
  }
  return text.size();
}

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

enum class Tok { kId, kLBrace, kRBrace, kLBracket, kRBracket, kEq, kSemi, kComma, kColon, kArrow, kDash2, kEnd };

struct Token {
  Tok type = Tok::kEnd;
  std::string text;
  bool quoted = false;
  int line = 1;
  int col = 1;
};

struct SyntaxError {
  std::string message;
  int line;
  int col;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  Token next() {
    skip_trivia();
    Token t;
    t.line = line_;
    t.col = col_;
    if (pos_ >= src_.size()) return t;
    char c = src_[pos_];
    auto single = [&](Tok type) {
      advance();
      t.type = type;
      t.text = std::string(1, c);
      return t;
    };
    switch (c) {
      case '{': return single(Tok::kLBrace);
      case '}': return single(Tok::kRBrace);
      case '[': return single(Tok::kLBracket);
      case ']': return single(Tok::kRBracket);
      case '=': return single(Tok::kEq);
      case ';': return single(Tok::kSemi);
      case ',': return single(Tok::kComma);
      case ':': return single(Tok::kColon);
      case '<': throw SyntaxError{"HTML-like labels are not supported", t.line, t.col};
      case '"': return quoted(t);
      default: break;
    }
    if (c == '-' && pos_ + 1 < src_.size() && (src_[pos_ + 1] == '>' || src_[pos_ + 1] == '-')) {
      t.type = src_[pos_ + 1] == '>' ? Tok::kArrow : Tok::kDash2;
      t.text = std::string(src_.substr(pos_, 2));
      advance();
      advance();
      return t;
    }
    if (ident_start(c)) {
      std::size_t start = pos_;
      while (pos_ < src_.size() && ident_char(src_[pos_])) advance();
      t.type = Tok::kId;
      t.text = std::string(src_.substr(start, pos_ - start));
      return t;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == '-') {
      std::size_t start = pos_;
      if (c == '-') advance();
      bool digits = false;
      while (pos_ < src_.size() && (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.')) {
        digits |= src_[pos_] != '.';
        advance();
      }
      if (!digits) throw SyntaxError{"unexpected character '" + std::string(1, c) + "'", t.line, t.col};
      t.type = Tok::kId;
      t.text = std::string(src_.substr(start, pos_ - start));
      return t;
    }
    throw SyntaxError{"unexpected character '" + std::string(1, c) + "'", t.line, t.col};
  }

 private:
  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_trivia() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (c == '#' || (c == '/' && peek(1) == '/')) {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else if (c == '/' && peek(1) == '*') {
        int line = line_, col = col_;
        advance();
        advance();
        while (pos_ < src_.size() && !(src_[pos_] == '*' && peek(1) == '/')) advance();
        if (pos_ >= src_.size()) throw SyntaxError{"unterminated block comment", line, col};
        advance();
        advance();
      } else {
        break;
      }
    }
  }

  char peek(std::size_t ahead) const {
    return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
  }

  /// Double-quoted string with escapes, plus `"a" + "b"` concatenation.
  Token quoted(Token t) {
    t.type = Tok::kId;
    t.quoted = true;
    for (;;) {
      advance();  // opening quote
      while (true) {
        if (pos_ >= src_.size()) throw SyntaxError{"unterminated string", t.line, t.col};
        char c = src_[pos_];
        if (c == '"') break;
        if (c == '\\' && pos_ + 1 < src_.size()) {
          char e = src_[pos_ + 1];
          advance();
          advance();
          switch (e) {
            case '"': t.text.push_back('"'); break;
            case '\\': t.text.push_back('\\'); break;
            case 'n': case 'l': case 'r': t.text.push_back(' '); break;
            case '\n': break;  // line continuation
            default:
              t.text.push_back('\\');
              t.text.push_back(e);
          }
          continue;
        }
        t.text.push_back(c);
        advance();
      }
      advance();  // closing quote
      std::size_t save_pos = pos_;
      int save_line = line_, save_col = col_;
      skip_trivia();
      if (pos_ < src_.size() && src_[pos_] == '+') {
        advance();
        skip_trivia();
        if (pos_ < src_.size() && src_[pos_] == '"') continue;
        throw SyntaxError{"expected string after '+'", line_, col_};
      }
      pos_ = save_pos;
      line_ = save_line;
      col_ = save_col;
      return t;
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

using Attrs = std::vector<std::pair<std::string, std::string>>;

std::optional<std::string> attr(const Attrs& attrs, std::string_view key) {
  std::optional<std::string> value;
  for (const auto& [k, v] : attrs) {
    if (k == key) value = v;  // last one wins, as in Graphviz
  }
  return value;
}

class Parser {
 public:
  explicit Parser(std::string_view src) : lexer_(src) { shift(); }

  DotParseResult run() {
    parse_graph();
    DotParseResult result;
    for (auto& slot : nodes_) {
      result.graph.nodes.push_back({slot.id, slot.label.value_or(slot.id)});
    }
    result.graph.edges = std::move(edges_);
    result.diagnostics = std::move(diags_);
    sort_diagnostics(result.diagnostics);
    return result;
  }

 private:
  struct NodeSlot {
    std::string id;
    std::optional<std::string> label;
  };

  void shift() { tok_ = lexer_.next(); }

  [[noreturn]] void fail(const std::string& message) const { throw SyntaxError{message, tok_.line, tok_.col}; }

  bool is_keyword(std::string_view kw) const { return tok_.type == Tok::kId && !tok_.quoted && iequals(tok_.text, kw); }

  void expect(Tok type, std::string_view what) {
    if (tok_.type != type) fail("expected " + std::string(what) + describe());
    shift();
  }

  std::string describe() const {
    if (tok_.type == Tok::kEnd) return " but reached end of input";
    return " but found '" + tok_.text + "'";
  }

  void parse_graph() {
    if (is_keyword("strict")) shift();
    if (is_keyword("graph")) fail("undirected graphs are not supported; use digraph");
    if (!is_keyword("digraph")) fail("expected 'digraph'" + describe());
    shift();
    if (tok_.type == Tok::kId) shift();
    expect(Tok::kLBrace, "'{'");
    while (tok_.type != Tok::kRBrace) {
      if (tok_.type == Tok::kEnd) fail("missing closing '}'");
      parse_statement();
      while (tok_.type == Tok::kSemi || tok_.type == Tok::kComma) shift();
    }
    // Anything after the closing brace is ignored.
  }

  void parse_statement() {
    if (tok_.type == Tok::kLBrace || is_keyword("subgraph")) fail("subgraphs and clusters are not supported");
    if (is_keyword("graph") || is_keyword("node") || is_keyword("edge")) {
      shift();
      parse_attr_lists();
      return;
    }
    if (tok_.type != Tok::kId) fail("expected a statement" + describe());

    Token first = tok_;
    shift();
    if (tok_.type == Tok::kEq) {  // graph attribute `rankdir=LR`
      shift();
      if (tok_.type != Tok::kId) fail("expected attribute value" + describe());
      shift();
      return;
    }
    if (tok_.type == Tok::kColon) fail("node ports are not supported");
    if (tok_.type == Tok::kDash2) fail("undirected edge '--' in a digraph");

    if (tok_.type == Tok::kArrow) {
      std::vector<Token> chain{first};
      while (tok_.type == Tok::kArrow) {
        shift();
        if (tok_.type == Tok::kLBrace || is_keyword("subgraph")) fail("subgraphs and clusters are not supported");
        if (tok_.type != Tok::kId) fail("expected node id after '->'" + describe());
        chain.push_back(tok_);
        shift();
        if (tok_.type == Tok::kColon) fail("node ports are not supported");
      }
      Attrs attrs = parse_attr_lists();
      for (std::size_t i = 0; i + 1 < chain.size(); ++i) add_edge(chain[i], chain[i + 1], attrs);
      return;
    }

    Attrs attrs = parse_attr_lists();
    declare_node(first, attr(attrs, "label"));
  }

  Attrs parse_attr_lists() {
    Attrs attrs;
    while (tok_.type == Tok::kLBracket) {
      shift();
      while (tok_.type != Tok::kRBracket) {
        if (tok_.type != Tok::kId) fail("expected attribute name" + describe());
        std::string key = tok_.text;
        shift();
        std::string value = "true";
        if (tok_.type == Tok::kEq) {
          shift();
          if (tok_.type != Tok::kId) fail("expected attribute value" + describe());
          value = tok_.text;
          shift();
        }
        attrs.emplace_back(std::move(key), std::move(value));
        while (tok_.type == Tok::kSemi || tok_.type == Tok::kComma) shift();
      }
      shift();
    }
    return attrs;
  }

  void declare_node(const Token& id, std::optional<std::string> label) {
    auto it = slot_of_.find(id.text);
    if (it == slot_of_.end()) {
      slot_of_.emplace(id.text, nodes_.size());
      nodes_.push_back({id.text, std::move(label)});
      return;
    }
    NodeSlot& slot = nodes_[it->second];
    if (!label) return;
    if (slot.label && *slot.label != *label) {
      diags_.push_back({DiagnosticCode::kDupNode, Severity::kError,
                        "node '" + id.text + "' redeclared with a conflicting label",
                        "line " + std::to_string(id.line) + ":" + std::to_string(id.col)});
      return;
    }
    slot.label = std::move(label);
  }

  void add_edge(const Token& src, const Token& dst, const Attrs& attrs) {
    std::optional<std::string> raw = attr(attrs, "label");
    if (!raw) raw = attr(attrs, "type");
    std::optional<EdgeKind> kind = raw ? parse_edge_kind(trim(*raw)) : std::nullopt;
    if (!kind) {
      diags_.push_back({DiagnosticCode::kBadEdgeKind, Severity::kError,
                        raw ? "unknown edge kind '" + *raw + "'" : "edge has no kind (label or type attribute)",
                        "edge " + src.text + "->" + dst.text + " (line " + std::to_string(src.line) + ":" +
                            std::to_string(src.col) + ")"});
      return;
    }
    edges_.push_back({src.text, dst.text, *kind});
  }

  Lexer lexer_;
  Token tok_;
  std::vector<NodeSlot> nodes_;
  std::map<std::string, std::size_t, std::less<>> slot_of_;
  std::vector<GraphEdge> edges_;
  std::vector<Diagnostic> diags_;
};

}  // namespace

std::string strip_dot_wrapper(std::string_view text) {
  std::string_view body = text;
  // Prefer the first fenced block that holds a graph.
  for (std::size_t open = text.find("```"); open != std::string_view::npos;) {
    std::size_t content = text.find('\n', open);
    if (content == std::string_view::npos) break;
    ++content;
    std::size_t close = text.find("```", content);
    std::string_view block = text.substr(content, close == std::string_view::npos ? std::string_view::npos
                                                                                    : close - content);
    if (find_graph_header(block)) {
      body = block;
      break;
    }
    if (close == std::string_view::npos) break;
    open = text.find("```", close + 3);
  }
  auto start = find_graph_header(body);
  if (!start) return std::string(text);
  std::size_t end = matching_brace_end(body, *start);
  return std::string(body.substr(*start, end - *start));
}

DotParseResult parse_dot(std::string_view text) {
  const std::string source = strip_dot_wrapper(text);
  try {
    return Parser(source).run();
  } catch (const SyntaxError& e) {
    DotParseResult result;
    result.diagnostics.push_back({DiagnosticCode::kParse, Severity::kError, e.message,
                                  "line " + std::to_string(e.line) + ":" + std::to_string(e.col)});
    return result;
  }
}

}  // namespace lector
