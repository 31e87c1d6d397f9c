#pragma once

#include <cctype>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "astlab/element.hpp"
#include "astlab/model.hpp"

namespace astlab {

/// 1-based position of a token in the source text.
struct SourceSpan {
  std::size_t line = 1;
  std::size_t column = 1;
  std::size_t length = 1;
};

struct Diagnostic {
  enum class Category { Lexical, Syntax, UnresolvedReference, Invariant };
  Category category;
  SourceSpan span;
  std::string message;
};

inline const char* to_string(Diagnostic::Category c) {
  switch (c) {
    case Diagnostic::Category::Lexical: return "lexical error";
    case Diagnostic::Category::Syntax: return "syntax error";
    case Diagnostic::Category::UnresolvedReference:
      return "unresolved reference";
    case Diagnostic::Category::Invariant: return "invariant violation";
  }
  return "?";
}

struct ParseResult {
  Model model;
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return diagnostics.empty(); }
};

namespace dsl {

inline const std::set<std::string>& keywords() {
  static const std::set<std::string> kw{
      "set",       "system", "learning", "transfer", "multitask",
      "meta",      "parallel", "cascade", "homo",    "check"};
  return kw;
}

struct Token {
  enum class Kind {
    Ident,
    Integer,
    LBrace,
    RBrace,
    LParen,
    RParen,
    Equals,
    Comma,
    Colon,
    Arrow,
    End,
    Error
  };
  Kind kind = Kind::End;
  std::string text;
  SourceSpan span;
};

class Lexer {
 public:
  Lexer(std::string_view src, std::vector<Diagnostic>& diags)
      : src_(src), diags_(diags) {
    advance();
  }

  const Token& peek() const { return current_; }

  Token take() {
    Token t = current_;
    advance();
    return t;
  }

 private:
  void advance() {
    skip_blank();
    current_ = Token{};
    current_.span = SourceSpan{line_, col_, 1};
    if (pos_ >= src_.size()) {
      current_.kind = Token::Kind::End;
      return;
    }
    const char c = src_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
              src_[pos_] == '_'))
        bump();
      current_.kind = Token::Kind::Ident;
      current_.text = std::string(src_.substr(start, pos_ - start));
      current_.span.length = pos_ - start;
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < src_.size() &&
             std::isdigit(static_cast<unsigned char>(src_[pos_])))
        bump();
      current_.kind = Token::Kind::Integer;
      current_.text = std::string(src_.substr(start, pos_ - start));
      current_.span.length = pos_ - start;
      return;
    }
    switch (c) {
      case '{': single(Token::Kind::LBrace); return;
      case '}': single(Token::Kind::RBrace); return;
      case '(': single(Token::Kind::LParen); return;
      case ')': single(Token::Kind::RParen); return;
      case '=': single(Token::Kind::Equals); return;
      case ',': single(Token::Kind::Comma); return;
      case ':': single(Token::Kind::Colon); return;
      case '-':
        if (pos_ + 1 < src_.size() && src_[pos_ + 1] == '>') {
          bump();
          bump();
          current_.kind = Token::Kind::Arrow;
          current_.text = "->";
          current_.span.length = 2;
          return;
        }
        [[fallthrough]];
      default:
        diags_.push_back({Diagnostic::Category::Lexical,
                          SourceSpan{line_, col_, 1},
                          std::string("unexpected character '") + c + "'"});
        bump();
        current_.kind = Token::Kind::Error;
        current_.text = std::string(1, c);
        return;
    }
  }

  void single(Token::Kind k) {
    current_.kind = k;
    current_.text = std::string(1, src_[pos_]);
    bump();
  }

  void skip_blank() {
    for (;;) {
      while (pos_ < src_.size() &&
             (src_[pos_] == ' ' || src_[pos_] == '\t' || src_[pos_] == '\r' ||
              src_[pos_] == '\n'))
        bump();
      if (pos_ < src_.size() && src_[pos_] == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') bump();
        continue;
      }
      return;
    }
  }

  void bump() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  std::string_view src_;
  std::vector<Diagnostic>& diags_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1, col_ = 1;
  Token current_;
};

class Parser {
 public:
  Parser(std::string_view src, Limits limits)
      : lex_(src, result_.diagnostics) {
    result_.model.limits = limits;
  }

  ParseResult run() {
    while (lex_.peek().kind != Token::Kind::End) {
      const Token& t = lex_.peek();
      if (t.kind == Token::Kind::Ident && keywords().count(t.text)) {
        parse_statement();
      } else {
        error(Diagnostic::Category::Syntax, t.span,
              "expected a declaration keyword, got '" + t.text + "'");
        recover();
      }
    }
    return std::move(result_);
  }

 private:
  void parse_statement() {
    Token kw = lex_.take();
    if (kw.text == "set") {
      parse_set();
    } else if (kw.text == "system") {
      parse_system();
    } else if (kw.text == "learning") {
      parse_block(kw.text, {"algorithm", "data", "params", "hypotheses",
                            "input", "output"});
    } else if (kw.text == "transfer") {
      parse_block(kw.text,
                  {"source", "target", "knowledge", "algorithm",
                   "hypotheses"});
    } else if (kw.text == "multitask") {
      parse_block(kw.text, {"tasks", "algorithm"});
    } else if (kw.text == "meta") {
      parse_block(kw.text, {"algorithm", "hypotheses", "object"});
    } else if (kw.text == "parallel") {
      parse_parallel();
    } else if (kw.text == "cascade") {
      parse_cascade();
    } else if (kw.text == "homo") {
      parse_homo();
    } else if (kw.text == "check") {
      parse_check();
    }
  }

  // --- building blocks ----------------------------------------------------

  std::optional<Token> expect(Token::Kind k, const std::string& what) {
    const Token& t = lex_.peek();
    if (t.kind != k) {
      error(Diagnostic::Category::Syntax, t.span,
            "expected " + what + ", got '" +
                (t.kind == Token::Kind::End ? "end of input" : t.text) + "'");
      return std::nullopt;
    }
    return lex_.take();
  }

  std::optional<Token> expect_name() {
    auto t = expect(Token::Kind::Ident, "a name");
    if (t && keywords().count(t->text)) {
      error(Diagnostic::Category::Syntax, t->span,
            "'" + t->text + "' is a reserved keyword");
      return std::nullopt;
    }
    return t;
  }

  bool declare(const Token& name) {
    if (result_.model.knows(name.text)) {
      error(Diagnostic::Category::Invariant, name.span,
            "duplicate name: " + name.text);
      return false;
    }
    return true;
  }

  /// element := IDENT | '(' element (',' element)+ ')'
  std::optional<Element> parse_element(std::size_t depth = 1) {
    const Token& t = lex_.peek();
    if (t.kind == Token::Kind::Ident) {
      if (keywords().count(t.text)) {
        error(Diagnostic::Category::Syntax, t.span,
              "'" + t.text + "' is a reserved keyword");
        return std::nullopt;
      }
      return Element::atom(lex_.take().text);
    }
    if (t.kind == Token::Kind::LParen) {
      if (depth > result_.model.limits.max_element_depth) {
        error(Diagnostic::Category::Invariant, t.span,
              "element nesting exceeds the depth limit");
        return std::nullopt;
      }
      lex_.take();
      std::vector<Element> parts;
      for (;;) {
        auto e = parse_element(depth + 1);
        if (!e) return std::nullopt;
        parts.push_back(std::move(*e));
        const Token& n = lex_.peek();
        if (n.kind == Token::Kind::Comma) {
          lex_.take();
          continue;
        }
        break;
      }
      auto close = expect(Token::Kind::RParen, "')'");
      if (!close) return std::nullopt;
      if (parts.size() < 2) {
        error(Diagnostic::Category::Invariant, close->span,
              "tuples need at least two components");
        return std::nullopt;
      }
      return Element::tuple(std::move(parts));
    }
    error(Diagnostic::Category::Syntax, t.span,
          "expected an element, got '" + t.text + "'");
    return std::nullopt;
  }

  // --- statements ----------------------------------------------------------

  void parse_set() {
    auto name = expect_name();
    if (!name || !expect(Token::Kind::Equals, "'='") ||
        !expect(Token::Kind::LBrace, "'{'")) {
      recover();
      return;
    }
    ElementSet members;
    if (lex_.peek().kind != Token::Kind::RBrace) {
      for (;;) {
        auto e = parse_element();
        if (!e) {
          recover();
          return;
        }
        members.insert(std::move(*e));
        if (lex_.peek().kind == Token::Kind::Comma) {
          lex_.take();
          continue;
        }
        break;
      }
    }
    auto close = expect(Token::Kind::RBrace, "'}'");
    if (!close) {
      recover();
      return;
    }
    if (members.empty()) {
      error(Diagnostic::Category::Invariant, name->span,
            "set " + name->text + " is empty; component sets are non-empty");
      return;
    }
    if (members.size() > result_.model.limits.max_set_size) {
      error(Diagnostic::Category::Invariant, name->span,
            "set " + name->text + " exceeds the size cap of " +
                std::to_string(result_.model.limits.max_set_size));
      return;
    }
    if (!declare(*name)) return;
    result_.model.sets.emplace(name->text,
                               ComponentSet(name->text, std::move(members)));
  }

  void parse_system() {
    auto name = expect_name();
    if (!name || !expect(Token::Kind::Colon, "':'")) {
      recover();
      return;
    }
    std::vector<Token> input_names, output_names;
    if (!parse_name_list(input_names)) {
      recover();
      return;
    }
    bool has_io = false;
    if (lex_.peek().kind == Token::Kind::Arrow) {
      lex_.take();
      has_io = true;
      if (!parse_name_list(output_names)) {
        recover();
        return;
      }
    }
    if (!expect(Token::Kind::Equals, "'='") ||
        !expect(Token::Kind::LBrace, "'{'")) {
      recover();
      return;
    }

    // Resolve the component references.
    std::vector<ComponentSet> comps;
    bool resolved = true;
    auto resolve = [&](const Token& t) {
      auto it = result_.model.sets.find(t.text);
      if (it == result_.model.sets.end()) {
        error(Diagnostic::Category::UnresolvedReference, t.span,
              "set " + t.text + " is not declared");
        resolved = false;
        return;
      }
      comps.push_back(it->second);
    };
    for (const Token& t : input_names) resolve(t);
    for (const Token& t : output_names) resolve(t);

    // Rows.
    std::vector<Row> rows;
    std::vector<SourceSpan> row_spans;
    if (lex_.peek().kind != Token::Kind::RBrace) {
      for (;;) {
        auto open = expect(Token::Kind::LParen, "'(' starting a tuple");
        if (!open) {
          recover();
          return;
        }
        Row row;
        if (lex_.peek().kind != Token::Kind::RParen) {
          for (;;) {
            auto e = parse_element();
            if (!e) {
              recover();
              return;
            }
            row.push_back(std::move(*e));
            if (lex_.peek().kind == Token::Kind::Comma) {
              lex_.take();
              continue;
            }
            break;
          }
        }
        if (!expect(Token::Kind::RParen, "')'")) {
          recover();
          return;
        }
        rows.push_back(std::move(row));
        row_spans.push_back(open->span);
        if (lex_.peek().kind == Token::Kind::Comma) {
          lex_.take();
          continue;
        }
        break;
      }
    }
    if (!expect(Token::Kind::RBrace, "'}'")) {
      recover();
      return;
    }
    if (!resolved || !declare(*name)) return;

    const std::size_t arity = comps.size();
    bool rows_ok = true;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].size() != arity) {
        error(Diagnostic::Category::Invariant, row_spans[r],
              "tuple arity " + std::to_string(rows[r].size()) +
                  " does not match the " + std::to_string(arity) +
                  " declared components");
        rows_ok = false;
        continue;
      }
      for (std::size_t k = 0; k < arity; ++k)
        if (!comps[k].contains(rows[r][k])) {
          error(Diagnostic::Category::Invariant, row_spans[r],
                rows[r][k].text() + " is not a member of " + comps[k].name());
          rows_ok = false;
        }
    }
    if (rows.size() > result_.model.limits.max_relation_size) {
      error(Diagnostic::Category::Invariant, name->span,
            "relation exceeds the size cap of " +
                std::to_string(result_.model.limits.max_relation_size));
      rows_ok = false;
    }
    if (!rows_ok) return;

    std::optional<IoPartition> io;
    if (has_io) {
      IoPartition p;
      for (std::size_t k = 0; k < input_names.size(); ++k) p.inputs.push_back(k);
      for (std::size_t k = input_names.size(); k < arity; ++k)
        p.outputs.push_back(k);
      io = std::move(p);
    }
    result_.model.systems.emplace(
        name->text,
        StoredSystem{AbstractSystem(name->text, std::move(comps),
                                    Relation(std::move(rows))),
                     std::move(io), true});
  }

  bool parse_name_list(std::vector<Token>& out) {
    for (;;) {
      auto t = expect_name();
      if (!t) return false;
      out.push_back(std::move(*t));
      if (lex_.peek().kind == Token::Kind::Comma) {
        lex_.take();
        continue;
      }
      return true;
    }
  }

  /// Braced key = value blocks shared by the four learning structures.
  void parse_block(const std::string& kind,
                   const std::vector<std::string>& expected_keys) {
    auto name = expect_name();
    if (!name || !expect(Token::Kind::LBrace, "'{'")) {
      recover();
      return;
    }
    std::map<std::string, Token> single;
    std::map<std::string, std::vector<Token>> lists;
    while (lex_.peek().kind == Token::Kind::Ident) {
      Token key = lex_.take();
      bool known = false;
      for (const std::string& k : expected_keys) known |= (k == key.text);
      if (!known) {
        error(Diagnostic::Category::Syntax, key.span,
              "unknown key '" + key.text + "' in a " + kind + " block");
        recover();
        return;
      }
      if (!expect(Token::Kind::Equals, "'='")) {
        recover();
        return;
      }
      std::vector<Token> values;
      if (!parse_name_list(values)) {
        recover();
        return;
      }
      if (single.count(key.text) || lists.count(key.text)) {
        error(Diagnostic::Category::Invariant, key.span,
              "duplicate key '" + key.text + "'");
        return;
      }
      if (key.text == "tasks")
        lists.emplace(key.text, std::move(values));
      else if (values.size() == 1)
        single.emplace(key.text, values.front());
      else {
        error(Diagnostic::Category::Syntax, key.span,
              "key '" + key.text + "' takes a single name");
        return;
      }
    }
    if (!expect(Token::Kind::RBrace, "'}'")) {
      recover();
      return;
    }
    for (const std::string& k : expected_keys)
      if (!single.count(k) && !lists.count(k)) {
        error(Diagnostic::Category::Syntax, name->span,
              kind + " block " + name->text + " is missing key '" + k + "'");
        return;
      }

    // Kind-aware reference resolution.
    auto want_set = [&](const Token& t) { return resolve_set(t); };
    auto want_system = [&](const Token& t) { return resolve_system(t); };
    auto want_learning = [&](const Token& t) { return resolve_learning(t); };

    bool ok = true;
    if (kind == "learning") {
      ok &= want_system(single.at("algorithm"));
      ok &= want_system(single.at("hypotheses"));
      ok &= want_set(single.at("data"));
      ok &= want_set(single.at("params"));
      ok &= want_set(single.at("input"));
      ok &= want_set(single.at("output"));
      if (!ok || !declare(*name)) return;
      result_.model.learnings.emplace(
          name->text,
          LearningDecl{single.at("algorithm").text, single.at("data").text,
                       single.at("params").text,
                       single.at("hypotheses").text, single.at("input").text,
                       single.at("output").text});
    } else if (kind == "transfer") {
      ok &= want_learning(single.at("source"));
      ok &= want_learning(single.at("target"));
      ok &= want_set(single.at("knowledge"));
      ok &= want_system(single.at("algorithm"));
      ok &= want_system(single.at("hypotheses"));
      if (!ok || !declare(*name)) return;
      result_.model.transfers.emplace(
          name->text,
          TransferDecl{single.at("source").text, single.at("target").text,
                       single.at("knowledge").text,
                       single.at("algorithm").text,
                       single.at("hypotheses").text});
    } else if (kind == "multitask") {
      MultitaskDecl decl;
      for (const Token& t : lists.at("tasks")) {
        ok &= want_learning(t);
        decl.tasks.push_back(t.text);
      }
      if (decl.tasks.size() < 2) {
        error(Diagnostic::Category::Invariant, name->span,
              "multitask needs at least two tasks");
        return;
      }
      ok &= want_system(single.at("algorithm"));
      decl.algorithm = single.at("algorithm").text;
      if (!ok || !declare(*name)) return;
      result_.model.multitasks.emplace(name->text, std::move(decl));
    } else {  // meta
      ok &= want_system(single.at("algorithm"));
      ok &= want_system(single.at("hypotheses"));
      ok &= want_learning(single.at("object"));
      if (!ok || !declare(*name)) return;
      result_.model.metas.emplace(
          name->text,
          MetaDecl{single.at("algorithm").text, single.at("hypotheses").text,
                   single.at("object").text});
    }
  }

  void parse_parallel() {
    auto name = expect_name();
    if (!name || !expect(Token::Kind::Equals, "'='")) {
      recover();
      return;
    }
    std::vector<Token> operands;
    if (!parse_name_list(operands)) {
      recover();
      return;
    }
    if (operands.size() != 2) {
      error(Diagnostic::Category::Syntax, name->span,
            "parallel takes exactly two operands");
      return;
    }
    if (!resolve_system(operands[0]) || !resolve_system(operands[1]) ||
        !declare(*name))
      return;
    try {
      InputOutputSystem composed = parallel_connect(
          result_.model.system_named(operands[0].text).as_io(),
          result_.model.system_named(operands[1].text).as_io(), name->text,
          result_.model.limits);
      IoPartition io{composed.input_positions(), composed.output_positions()};
      result_.model.systems.emplace(
          name->text,
          StoredSystem{composed.base(), std::move(io), false});
      result_.model.directives.push_back(
          {Directive::Kind::Parallel, name->text,
           {operands[0].text, operands[1].text}});
    } catch (const std::exception& e) {
      error(Diagnostic::Category::Invariant, name->span, e.what());
    }
  }

  void parse_cascade() {
    auto name = expect_name();
    if (!name || !expect(Token::Kind::Equals, "'='")) {
      recover();
      return;
    }
    std::vector<Token> operands;
    if (!parse_name_list(operands)) {
      recover();
      return;
    }
    if (operands.size() != 2) {
      error(Diagnostic::Category::Syntax, name->span,
            "cascade takes exactly two operands");
      return;
    }
    auto z_left = parse_keyword_int("zleft");
    auto z_right = parse_keyword_int("zright");
    if (!z_left || !z_right) {
      recover();
      return;
    }
    if (!resolve_system(operands[0]) || !resolve_system(operands[1]) ||
        !declare(*name))
      return;
    try {
      InputOutputSystem composed = cascade_connect(
          result_.model.system_named(operands[0].text).as_io(),
          result_.model.system_named(operands[1].text).as_io(),
          CascadeBinding{*z_left, *z_right}, name->text,
          result_.model.limits);
      IoPartition io{composed.input_positions(), composed.output_positions()};
      result_.model.systems.emplace(
          name->text,
          StoredSystem{composed.base(), std::move(io), false});
      Directive d{Directive::Kind::Cascade, name->text,
                  {operands[0].text, operands[1].text}};
      d.z_left = *z_left;
      d.z_right = *z_right;
      result_.model.directives.push_back(std::move(d));
    } catch (const std::exception& e) {
      error(Diagnostic::Category::Invariant, name->span, e.what());
    }
  }

  std::optional<std::size_t> to_index(const Token& t) {
    if (t.text.size() > 6) {
      error(Diagnostic::Category::Syntax, t.span, "position index too large");
      return std::nullopt;
    }
    return static_cast<std::size_t>(std::stoull(t.text));
  }

  std::optional<std::size_t> parse_keyword_int(const std::string& kw) {
    const Token& t = lex_.peek();
    if (t.kind != Token::Kind::Ident || t.text != kw) {
      error(Diagnostic::Category::Syntax, t.span, "expected '" + kw + "'");
      return std::nullopt;
    }
    lex_.take();
    auto n = expect(Token::Kind::Integer, "a position index");
    if (!n) return std::nullopt;
    return to_index(*n);
  }

  void parse_homo() {
    auto name = expect_name();
    if (!name || !expect(Token::Kind::Colon, "':'")) {
      recover();
      return;
    }
    auto from = expect_name();
    if (!from || !expect(Token::Kind::Arrow, "'->'")) {
      recover();
      return;
    }
    auto to = expect_name();
    if (!to || !expect(Token::Kind::LBrace, "'{'")) {
      recover();
      return;
    }
    HomoDecl decl;
    decl.from = from->text;
    decl.to = to->text;
    while (lex_.peek().kind == Token::Kind::Ident &&
           lex_.peek().text == "map") {
      lex_.take();
      auto pos = expect(Token::Kind::Integer, "a component position");
      if (!pos || !expect(Token::Kind::LBrace, "'{'")) {
        recover();
        return;
      }
      ElementMap entries;
      if (lex_.peek().kind != Token::Kind::RBrace) {
        for (;;) {
          auto lhs = parse_element();
          if (!lhs || !expect(Token::Kind::Arrow, "'->'")) {
            recover();
            return;
          }
          auto rhs = parse_element();
          if (!rhs) {
            recover();
            return;
          }
          entries.set(std::move(*lhs), std::move(*rhs));
          if (lex_.peek().kind == Token::Kind::Comma) {
            lex_.take();
            continue;
          }
          break;
        }
      }
      if (!expect(Token::Kind::RBrace, "'}'")) {
        recover();
        return;
      }
      auto index = to_index(*pos);
      if (!index) {
        recover();
        return;
      }
      if (decl.maps.count(*index)) {
        error(Diagnostic::Category::Invariant, pos->span,
              "duplicate map for position " + pos->text);
        return;
      }
      decl.maps[*index] = std::move(entries);
    }
    if (!expect(Token::Kind::RBrace, "'}'")) {
      recover();
      return;
    }
    if (!resolve_system(*from) || !resolve_system(*to) || !declare(*name))
      return;
    const std::size_t arity =
        result_.model.system_named(from->text).base.arity();
    for (const auto& [pos, map] : decl.maps)
      if (pos >= arity) {
        error(Diagnostic::Category::Invariant, name->span,
              "map position " + std::to_string(pos) + " is out of range for " +
                  from->text);
        return;
      }
    result_.model.homos.emplace(name->text, std::move(decl));
    result_.model.directives.push_back(
        {Directive::Kind::Homo, name->text, {from->text, to->text}});
  }

  void parse_check() {
    auto name = expect_name();
    if (!name) {
      recover();
      return;
    }
    if (!result_.model.knows(name->text)) {
      error(Diagnostic::Category::UnresolvedReference, name->span,
            name->text + " is not declared");
      return;
    }
    result_.model.directives.push_back(
        {Directive::Kind::Check, name->text, {}});
  }

  // --- reference resolution -------------------------------------------------

  bool resolve_set(const Token& t) {
    if (result_.model.sets.count(t.text)) return true;
    error(Diagnostic::Category::UnresolvedReference, t.span,
          "set " + t.text + " is not declared");
    return false;
  }

  bool resolve_system(const Token& t) {
    if (result_.model.systems.count(t.text)) return true;
    error(Diagnostic::Category::UnresolvedReference, t.span,
          "system " + t.text + " is not declared");
    return false;
  }

  bool resolve_learning(const Token& t) {
    if (result_.model.learnings.count(t.text)) return true;
    error(Diagnostic::Category::UnresolvedReference, t.span,
          "learning system " + t.text + " is not declared");
    return false;
  }

  // --- error plumbing -------------------------------------------------------

  void error(Diagnostic::Category cat, SourceSpan span, std::string message) {
    result_.diagnostics.push_back({cat, span, std::move(message)});
  }

  /// Skip to the next top-level keyword.
  void recover() {
    while (lex_.peek().kind != Token::Kind::End) {
      const Token& t = lex_.peek();
      if (t.kind == Token::Kind::Ident && keywords().count(t.text)) return;
      lex_.take();
    }
  }

  ParseResult result_;
  Lexer lex_;
};

}  // namespace dsl

/// Parses a model from text. Diagnostics carry 1-based source spans; a
/// non-empty diagnostics list means the model is partial.
inline ParseResult parse_model(std::string_view text,
                               Limits limits = Limits::defaults()) {
  return dsl::Parser(text, limits).run();
}

}  // namespace astlab
