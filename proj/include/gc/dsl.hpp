#pragma once

// Textual frontend (.gc files): basic type declarations, function
// signatures, base and composite components, an entry point. Runtime forms
// (binder queues, in-transit protocol heads) are expressible so that
// mid-execution configurations can be written down as fixtures.

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "gc/extraction.hpp"
#include "gc/model.hpp"

namespace gc {

struct Diagnostic {
  enum class Kind { Parse, Resolve, Validation };

  Kind kind = Kind::Parse;
  int line = 0;
  int col = 0;
  std::string message;
};

inline std::string to_string(const Diagnostic& d) {
  const char* k = d.kind == Diagnostic::Kind::Parse
                      ? "parse"
                      : d.kind == Diagnostic::Kind::Resolve ? "resolve" : "validation";
  return std::string(k) + " error at " + std::to_string(d.line) + ":" + std::to_string(d.col) +
         ": " + d.message;
}

// ---------------------------------------------------------------------------
// Program structure: declarations in source order plus the resolved
// component for each name.

struct BaseDecl {
  std::string name;
  BaseComponent body;
};

struct CompositeDecl {
  std::string name;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  ProtocolPtr protocol;
  std::vector<std::pair<std::string, std::string>> role_names;  // role -> component name
  std::vector<DistributionBinder> binders;
  std::string interfacing;
  std::vector<Forwarder> forwarders;
};

struct ComponentDecl {
  std::variant<BaseDecl, CompositeDecl> node;

  const std::string& name() const {
    return std::holds_alternative<BaseDecl>(node) ? std::get<BaseDecl>(node).name
                                                  : std::get<CompositeDecl>(node).name;
  }
};

struct SourceProgram {
  std::vector<std::string> basic_types;
  std::vector<FunctionSig> fn_sigs;
  std::vector<ComponentDecl> components;
  std::string entry;

  std::map<std::string, ComponentPtr> resolved;
  GammaEnv gamma;

  SigTable sig_table() const {
    SigTable t;
    for (const auto& s : fn_sigs) t.emplace(s.name, s);
    return t;
  }

  ComponentPtr entry_component() const {
    auto it = resolved.find(entry);
    return it == resolved.end() ? nullptr : it->second;
  }
};

struct ParseResult {
  std::optional<SourceProgram> program;
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return program.has_value() && diagnostics.empty(); }
};

// ---------------------------------------------------------------------------
// Lexer

namespace dsl_detail {

enum class Tok {
  Ident,
  Number,
  KwType, KwFn, KwBase, KwComposite, KwIn, KwOut, KwBind, KwQueue,
  KwProtocol, KwRoles, KwBinders, KwInterface, KwEntry, KwRec, KwEnd, KwTransit,
  LParen, RParen, LBrace, RBrace, LBracket, RBracket,
  Comma, Colon, Semi, Dot, Arrow, LeftArrow, Eq,
  Eof,
};

inline const char* tok_name(Tok t) {
  switch (t) {
    case Tok::Ident: return "identifier";
    case Tok::Number: return "number";
    case Tok::KwType: return "'type'";
    case Tok::KwFn: return "'fn'";
    case Tok::KwBase: return "'base'";
    case Tok::KwComposite: return "'composite'";
    case Tok::KwIn: return "'in'";
    case Tok::KwOut: return "'out'";
    case Tok::KwBind: return "'bind'";
    case Tok::KwQueue: return "'queue'";
    case Tok::KwProtocol: return "'protocol'";
    case Tok::KwRoles: return "'roles'";
    case Tok::KwBinders: return "'binders'";
    case Tok::KwInterface: return "'interface'";
    case Tok::KwEntry: return "'entry'";
    case Tok::KwRec: return "'rec'";
    case Tok::KwEnd: return "'end'";
    case Tok::KwTransit: return "'transit'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::LBracket: return "'['";
    case Tok::RBracket: return "']'";
    case Tok::Comma: return "','";
    case Tok::Colon: return "':'";
    case Tok::Semi: return "';'";
    case Tok::Dot: return "'.'";
    case Tok::Arrow: return "'->'";
    case Tok::LeftArrow: return "'<-'";
    case Tok::Eq: return "'='";
    case Tok::Eof: return "end of input";
  }
  return "?";
}

struct Token {
  Tok kind = Tok::Eof;
  std::string text;
  int line = 1;
  int col = 1;
};

inline std::vector<Token> lex(const std::string& src, std::vector<Diagnostic>& diags) {
  static const std::map<std::string, Tok> keywords = {
      {"type", Tok::KwType},           {"fn", Tok::KwFn},
      {"base", Tok::KwBase},           {"composite", Tok::KwComposite},
      {"in", Tok::KwIn},               {"out", Tok::KwOut},
      {"bind", Tok::KwBind},           {"queue", Tok::KwQueue},
      {"protocol", Tok::KwProtocol},   {"roles", Tok::KwRoles},
      {"binders", Tok::KwBinders},     {"interface", Tok::KwInterface},
      {"entry", Tok::KwEntry},         {"rec", Tok::KwRec},
      {"end", Tok::KwEnd},             {"transit", Tok::KwTransit},
  };

  std::vector<Token> out;
  int line = 1, col = 1;
  size_t i = 0;
  auto advance = [&](size_t n) {
    for (size_t k = 0; k < n; ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  auto is_ident_start = [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
  };
  auto is_ident_cont = [&](char c) {
    return is_ident_start(c) || (c >= '0' && c <= '9') || c == '\'';
  };

  while (i < src.size()) {
    char c = src[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance(1);
      continue;
    }
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    int tl = line, tc = col;
    if (is_ident_start(c)) {
      size_t start = i;
      while (i < src.size() && is_ident_cont(src[i])) advance(1);
      std::string text = src.substr(start, i - start);
      auto kw = keywords.find(text);
      out.push_back({kw == keywords.end() ? Tok::Ident : kw->second, text, tl, tc});
      continue;
    }
    if (c >= '0' && c <= '9') {
      size_t start = i;
      while (i < src.size() && src[i] >= '0' && src[i] <= '9') advance(1);
      out.push_back({Tok::Number, src.substr(start, i - start), tl, tc});
      continue;
    }
    if (c == '-' && i + 1 < src.size() && src[i + 1] == '>') {
      advance(2);
      out.push_back({Tok::Arrow, "->", tl, tc});
      continue;
    }
    if (c == '<' && i + 1 < src.size() && src[i + 1] == '-') {
      advance(2);
      out.push_back({Tok::LeftArrow, "<-", tl, tc});
      continue;
    }
    Tok kind;
    switch (c) {
      case '(': kind = Tok::LParen; break;
      case ')': kind = Tok::RParen; break;
      case '{': kind = Tok::LBrace; break;
      case '}': kind = Tok::RBrace; break;
      case '[': kind = Tok::LBracket; break;
      case ']': kind = Tok::RBracket; break;
      case ',': kind = Tok::Comma; break;
      case ':': kind = Tok::Colon; break;
      case ';': kind = Tok::Semi; break;
      case '.': kind = Tok::Dot; break;
      case '=': kind = Tok::Eq; break;
      default:
        diags.push_back({Diagnostic::Kind::Parse, tl, tc,
                         std::string("unexpected character '") + c + "'"});
        advance(1);
        continue;
    }
    advance(1);
    out.push_back({kind, std::string(1, c), tl, tc});
  }
  out.push_back({Tok::Eof, "", line, col});
  return out;
}

// Untyped value tree; basic types are attached during resolution from the
// context the value appears in.
struct RawValue {
  std::string lexeme;
  bool application = false;
  std::vector<RawValue> args;
  int line = 0, col = 0;
};

struct RawStoreEntry {
  std::string port;
  RawValue value;
};

struct RawBinder {
  std::string out;
  std::string fn;
  std::vector<std::string> params;
  std::vector<std::vector<RawStoreEntry>> queue;
  int line = 0, col = 0;
};

struct RawProto;
using RawProtoPtr = std::shared_ptr<RawProto>;

struct RawProto {
  GlobalProtocol::Form form = GlobalProtocol::Form::End;
  std::string sender, label, var;
  std::vector<std::string> receivers;
  std::optional<RawValue> value;
  RawProtoPtr cont;
  int line = 0, col = 0;
};

struct RawBase {
  std::string name;
  std::vector<std::string> inputs, outputs;
  std::vector<RawBinder> binders;
};

struct RawComposite {
  std::string name;
  std::vector<std::string> inputs, outputs;
  RawProtoPtr protocol;
  std::vector<std::pair<std::string, std::string>> role_names;
  std::vector<DistributionBinder> binders;
  std::string interfacing;
  std::vector<std::pair<std::string, std::string>> forwarders;  // lhs <- rhs, as written
  int line = 0, col = 0;
};

struct RawProgram {
  std::vector<std::string> basic_types;
  std::vector<FunctionSig> fn_sigs;  // param/ret type names as BasicType{name}
  std::vector<std::variant<RawBase, RawComposite>> components;
  std::string entry;
};

// ---------------------------------------------------------------------------
// Parser

class Parser {
 public:
  Parser(std::vector<Token> toks, std::vector<Diagnostic>& diags)
      : toks_(std::move(toks)), diags_(diags) {}

  std::optional<RawProgram> parse_program() {
    RawProgram p;
    bool have_entry = false;
    if (peek().kind == Tok::Eof) {
      fail("expected declaration");
      return std::nullopt;
    }
    while (peek().kind != Tok::Eof) {
      switch (peek().kind) {
        case Tok::KwType: {
          next();
          auto n = expect_ident("basic type name");
          if (!n) return std::nullopt;
          p.basic_types.push_back(*n);
          break;
        }
        case Tok::KwFn: {
          auto sig = parse_fnsig();
          if (!sig) return std::nullopt;
          p.fn_sigs.push_back(*sig);
          break;
        }
        case Tok::KwBase: {
          auto b = parse_base();
          if (!b) return std::nullopt;
          p.components.push_back(*b);
          break;
        }
        case Tok::KwComposite: {
          auto c = parse_composite();
          if (!c) return std::nullopt;
          p.components.push_back(*c);
          break;
        }
        case Tok::KwEntry: {
          next();
          auto n = expect_ident("entry component name");
          if (!n) return std::nullopt;
          p.entry = *n;
          have_entry = true;
          break;
        }
        default:
          fail("expected declaration ('type', 'fn', 'base', 'composite' or 'entry')");
          return std::nullopt;
      }
    }
    if (!have_entry) {
      fail("expected 'entry' declaration");
      return std::nullopt;
    }
    return p;
  }

 private:
  const Token& peek(size_t ahead = 0) const {
    size_t i = std::min(pos_ + ahead, toks_.size() - 1);
    return toks_[i];
  }
  Token next() { return toks_[std::min(pos_++, toks_.size() - 1)]; }

  void fail(const std::string& msg) {
    const Token& t = peek();
    std::string got = t.kind == Tok::Eof ? "end of input" : "'" + t.text + "'";
    diags_.push_back(
        {Diagnostic::Kind::Parse, t.line, t.col, msg + ", got " + got});
  }

  bool expect(Tok k) {
    if (peek().kind == k) {
      next();
      return true;
    }
    fail(std::string("expected ") + tok_name(k));
    return false;
  }

  std::optional<std::string> expect_ident(const std::string& what) {
    if (peek().kind == Tok::Ident) return next().text;
    fail("expected " + what);
    return std::nullopt;
  }

  std::optional<FunctionSig> parse_fnsig() {
    next();  // fn
    auto name = expect_ident("function name");
    if (!name || !expect(Tok::LParen)) return std::nullopt;
    FunctionSig sig;
    sig.name = *name;
    if (peek().kind != Tok::RParen) {
      while (true) {
        auto t = expect_ident("parameter type");
        if (!t) return std::nullopt;
        sig.params.push_back(BasicType{*t});
        if (peek().kind == Tok::Comma) {
          next();
          continue;
        }
        break;
      }
    }
    if (!expect(Tok::RParen) || !expect(Tok::Arrow)) return std::nullopt;
    auto ret = expect_ident("return type");
    if (!ret) return std::nullopt;
    sig.ret = BasicType{*ret};
    return sig;
  }

  std::optional<std::vector<std::string>> parse_portlist() {
    std::vector<std::string> out;
    while (peek().kind == Tok::Ident) {
      out.push_back(next().text);
      if (peek().kind == Tok::Comma)
        next();
      else
        break;
    }
    return out;
  }

  std::optional<RawValue> parse_value() {
    RawValue v;
    v.line = peek().line;
    v.col = peek().col;
    if (peek().kind == Tok::Number) {
      v.lexeme = next().text;
      return v;
    }
    auto n = expect_ident("value");
    if (!n) return std::nullopt;
    v.lexeme = *n;
    if (peek().kind == Tok::LParen) {
      next();
      v.application = true;
      if (peek().kind != Tok::RParen) {
        while (true) {
          auto a = parse_value();
          if (!a) return std::nullopt;
          v.args.push_back(*a);
          if (peek().kind == Tok::Comma) {
            next();
            continue;
          }
          break;
        }
      }
      if (!expect(Tok::RParen)) return std::nullopt;
    }
    return v;
  }

  std::optional<RawBinder> parse_binder() {
    RawBinder b;
    b.line = peek().line;
    b.col = peek().col;
    next();  // bind
    auto out = expect_ident("output port");
    if (!out || !expect(Tok::Eq)) return std::nullopt;
    b.out = *out;
    auto fn = expect_ident("function name");
    if (!fn || !expect(Tok::LParen)) return std::nullopt;
    b.fn = *fn;
    if (peek().kind != Tok::RParen) {
      while (true) {
        auto p = expect_ident("input port");
        if (!p) return std::nullopt;
        b.params.push_back(*p);
        if (peek().kind == Tok::Comma) {
          next();
          continue;
        }
        break;
      }
    }
    if (!expect(Tok::RParen)) return std::nullopt;
    if (peek().kind == Tok::KwQueue) {
      next();
      while (peek().kind == Tok::LBrace) {
        next();
        std::vector<RawStoreEntry> store;
        if (peek().kind != Tok::RBrace) {
          while (true) {
            auto port = expect_ident("input port");
            if (!port || !expect(Tok::Arrow)) return std::nullopt;
            auto v = parse_value();
            if (!v) return std::nullopt;
            store.push_back({*port, *v});
            if (peek().kind == Tok::Comma) {
              next();
              continue;
            }
            break;
          }
        }
        if (!expect(Tok::RBrace)) return std::nullopt;
        b.queue.push_back(std::move(store));
      }
    }
    return b;
  }

  std::optional<std::variant<RawBase, RawComposite>> parse_base() {
    next();  // base
    RawBase b;
    auto name = expect_ident("component name");
    if (!name || !expect(Tok::LBrace) || !expect(Tok::KwIn)) return std::nullopt;
    b.name = *name;
    auto ins = parse_portlist();
    if (!ins || !expect(Tok::KwOut)) return std::nullopt;
    b.inputs = *ins;
    auto outs = parse_portlist();
    if (!outs) return std::nullopt;
    b.outputs = *outs;
    while (peek().kind == Tok::KwBind) {
      auto lb = parse_binder();
      if (!lb) return std::nullopt;
      b.binders.push_back(*lb);
    }
    if (!expect(Tok::RBrace)) return std::nullopt;
    return std::variant<RawBase, RawComposite>{std::move(b)};
  }

  RawProtoPtr parse_proto() {
    auto node = std::make_shared<RawProto>();
    node->line = peek().line;
    node->col = peek().col;
    switch (peek().kind) {
      case Tok::KwEnd:
        next();
        node->form = GlobalProtocol::Form::End;
        return node;
      case Tok::KwRec: {
        next();
        auto var = expect_ident("recursion variable");
        if (!var || !expect(Tok::Dot)) return nullptr;
        node->form = GlobalProtocol::Form::Rec;
        node->var = *var;
        node->cont = parse_proto();
        return node->cont ? node : nullptr;
      }
      case Tok::KwTransit: {
        next();
        auto sender = expect_ident("sender role");
        if (!sender || !expect(Tok::Arrow) || !expect(Tok::LBrace)) return nullptr;
        node->form = GlobalProtocol::Form::InTransit;
        node->sender = *sender;
        while (peek().kind == Tok::Ident) node->receivers.push_back(next().text);
        if (!expect(Tok::RBrace) || !expect(Tok::Colon)) return nullptr;
        auto label = expect_ident("message label");
        if (!label || !expect(Tok::LParen)) return nullptr;
        node->label = *label;
        auto v = parse_value();
        if (!v || !expect(Tok::RParen) || !expect(Tok::Semi)) return nullptr;
        node->value = *v;
        node->cont = parse_proto();
        return node->cont ? node : nullptr;
      }
      case Tok::Ident: {
        if (peek(1).kind != Tok::Arrow) {
          node->form = GlobalProtocol::Form::Var;
          node->var = next().text;
          return node;
        }
        node->form = GlobalProtocol::Form::Comm;
        node->sender = next().text;
        next();  // ->
        while (true) {
          auto r = expect_ident("receiver role");
          if (!r) return nullptr;
          node->receivers.push_back(*r);
          if (peek().kind == Tok::Comma) {
            next();
            continue;
          }
          break;
        }
        if (!expect(Tok::Colon)) return nullptr;
        auto label = expect_ident("message label");
        if (!label || !expect(Tok::Semi)) return nullptr;
        node->label = *label;
        node->cont = parse_proto();
        return node->cont ? node : nullptr;
      }
      default:
        fail("expected protocol");
        return nullptr;
    }
  }

  std::optional<std::variant<RawBase, RawComposite>> parse_composite() {
    next();  // composite
    RawComposite c;
    c.line = peek().line;
    c.col = peek().col;
    auto name = expect_ident("component name");
    if (!name || !expect(Tok::LBrace) || !expect(Tok::KwIn)) return std::nullopt;
    c.name = *name;
    auto ins = parse_portlist();
    if (!ins || !expect(Tok::KwOut)) return std::nullopt;
    c.inputs = *ins;
    auto outs = parse_portlist();
    if (!outs || !expect(Tok::KwProtocol)) return std::nullopt;
    c.outputs = *outs;
    c.protocol = parse_proto();
    if (!c.protocol || !expect(Tok::KwRoles)) return std::nullopt;
    while (peek().kind == Tok::Ident) {
      std::string role = next().text;
      if (!expect(Tok::Eq)) return std::nullopt;
      auto comp = expect_ident("component name");
      if (!comp) return std::nullopt;
      c.role_names.push_back({role, *comp});
    }
    if (c.role_names.empty()) {
      fail("expected at least one role assignment");
      return std::nullopt;
    }
    if (!expect(Tok::KwBinders)) return std::nullopt;
    while (peek().kind == Tok::Ident) {
      DistributionBinder d;
      d.label = next().text;
      if (!expect(Tok::Colon)) return std::nullopt;
      auto rrole = expect_ident("receiver role");
      if (!rrole || !expect(Tok::Dot)) return std::nullopt;
      auto rport = expect_ident("receiver port");
      if (!rport || !expect(Tok::LeftArrow)) return std::nullopt;
      auto srole = expect_ident("sender role");
      if (!srole || !expect(Tok::Dot)) return std::nullopt;
      auto sport = expect_ident("sender port");
      if (!sport) return std::nullopt;
      d.receiver_role = *rrole;
      d.receiver_port = *rport;
      d.sender_role = *srole;
      d.sender_port = *sport;
      c.binders.push_back(std::move(d));
    }
    if (!expect(Tok::KwInterface)) return std::nullopt;
    auto iface = expect_ident("interfacing role");
    if (!iface || !expect(Tok::LBracket)) return std::nullopt;
    c.interfacing = *iface;
    if (peek().kind != Tok::RBracket) {
      while (true) {
        auto lhs = expect_ident("port");
        if (!lhs || !expect(Tok::LeftArrow)) return std::nullopt;
        auto rhs = expect_ident("port");
        if (!rhs) return std::nullopt;
        c.forwarders.push_back({*lhs, *rhs});
        if (peek().kind == Tok::Comma) {
          next();
          continue;
        }
        break;
      }
    }
    if (!expect(Tok::RBracket) || !expect(Tok::RBrace)) return std::nullopt;
    return std::variant<RawBase, RawComposite>{std::move(c)};
  }

  std::vector<Token> toks_;
  size_t pos_ = 0;
  std::vector<Diagnostic>& diags_;
};

// ---------------------------------------------------------------------------
// Resolution: check names, attach basic types to values, build components in
// dependency order so that composites see their children resolved.

struct Resolver {
  const RawProgram& raw;
  std::vector<Diagnostic>& diags;
  SigTable sigs;
  std::set<std::string> type_names;
  std::map<std::string, ComponentPtr> resolved;
  GammaEnv gamma;

  Resolver(const RawProgram& r, std::vector<Diagnostic>& d) : raw(r), diags(d) {}

  void error(int line, int col, const std::string& msg) {
    diags.push_back({Diagnostic::Kind::Resolve, line, col, msg});
  }

  std::optional<Value> type_value(const RawValue& rv, const BasicType& expected) {
    if (rv.application) {
      auto it = sigs.find(rv.lexeme);
      if (it == sigs.end()) {
        error(rv.line, rv.col, "unknown function '" + rv.lexeme + "'");
        return std::nullopt;
      }
      const FunctionSig& sig = it->second;
      if (sig.ret != expected) {
        error(rv.line, rv.col, "value of type " + sig.ret.name + " where " + expected.name +
                                   " is required");
        return std::nullopt;
      }
      if (sig.params.size() != rv.args.size()) {
        error(rv.line, rv.col, "function '" + rv.lexeme + "' applied to " +
                                   std::to_string(rv.args.size()) + " arguments, expects " +
                                   std::to_string(sig.params.size()));
        return std::nullopt;
      }
      std::vector<Value> args;
      for (size_t i = 0; i < rv.args.size(); ++i) {
        auto a = type_value(rv.args[i], sig.params[i]);
        if (!a) return std::nullopt;
        args.push_back(*a);
      }
      return Value::application(rv.lexeme, std::move(args), expected);
    }
    return Value::literal(rv.lexeme, expected);
  }

  std::optional<BaseComponent> resolve_base(const RawBase& rb) {
    BaseComponent b;
    b.inputs = rb.inputs;
    b.outputs = rb.outputs;

    // Port types of a base component follow from the binder functions.
    std::map<std::string, BasicType> port_types;
    auto note_port = [&](const std::string& p, const BasicType& bt, int line, int col) {
      auto [it, fresh] = port_types.insert({p, bt});
      if (!fresh && it->second != bt)
        error(line, col, "port '" + p + "' used both as " + it->second.name + " and " + bt.name);
      return fresh || it->second == bt;
    };

    for (const auto& rbind : rb.binders) {
      auto it = sigs.find(rbind.fn);
      if (it == sigs.end()) {
        error(rbind.line, rbind.col, "unknown function '" + rbind.fn + "'");
        return std::nullopt;
      }
      const FunctionSig& sig = it->second;
      if (sig.params.size() != rbind.params.size()) {
        error(rbind.line, rbind.col,
              "binder for '" + rbind.out + "' applies '" + rbind.fn + "' to " +
                  std::to_string(rbind.params.size()) + " ports, function expects " +
                  std::to_string(sig.params.size()));
        return std::nullopt;
      }
      if (!note_port(rbind.out, sig.ret, rbind.line, rbind.col)) return std::nullopt;
      for (size_t i = 0; i < rbind.params.size(); ++i)
        if (!note_port(rbind.params[i], sig.params[i], rbind.line, rbind.col))
          return std::nullopt;

      LocalBinder lb;
      lb.out = rbind.out;
      lb.fn = rbind.fn;
      lb.params = rbind.params;
      for (const auto& rstore : rbind.queue) {
        Store store;
        for (const auto& entry : rstore) {
          auto pt = port_types.find(entry.port);
          if (pt == port_types.end()) {
            error(rbind.line, rbind.col,
                  "queue entry for '" + entry.port + "' which is not a parameter");
            return std::nullopt;
          }
          auto v = type_value(entry.value, pt->second);
          if (!v) return std::nullopt;
          store.emplace(entry.port, *v);
        }
        lb.queue.push_back(std::move(store));
      }
      b.binders.push_back(std::move(lb));
    }
    return b;
  }

  ProtocolPtr resolve_proto(const RawProtoPtr& rp,
                            const std::map<std::string, BasicType>& label_types) {
    if (!rp) return nullptr;
    switch (rp->form) {
      case GlobalProtocol::Form::Comm: {
        auto cont = resolve_proto(rp->cont, label_types);
        if (!cont) return nullptr;
        return GlobalProtocol::comm(rp->sender, rp->label, rp->receivers, cont);
      }
      case GlobalProtocol::Form::InTransit: {
        auto cont = resolve_proto(rp->cont, label_types);
        if (!cont) return nullptr;
        auto lt = label_types.find(rp->label);
        if (lt == label_types.end()) {
          error(rp->line, rp->col, "no distribution binder types label '" + rp->label + "'");
          return nullptr;
        }
        auto v = type_value(*rp->value, lt->second);
        if (!v) return nullptr;
        return GlobalProtocol::in_transit(rp->sender, rp->label, *v, rp->receivers, cont);
      }
      case GlobalProtocol::Form::Rec: {
        auto body = resolve_proto(rp->cont, label_types);
        if (!body) return nullptr;
        return GlobalProtocol::rec(rp->var, body);
      }
      case GlobalProtocol::Form::Var:
        return GlobalProtocol::recvar(rp->var);
      case GlobalProtocol::Form::End:
        return GlobalProtocol::end();
    }
    return nullptr;
  }

  std::optional<CompositeComponent> resolve_composite(const RawComposite& rc) {
    CompositeComponent c;
    c.inputs = rc.inputs;
    c.outputs = rc.outputs;
    c.interfacing_role = rc.interfacing;
    c.binders = rc.binders;

    for (const auto& [role, comp_name] : rc.role_names) {
      auto it = resolved.find(comp_name);
      if (it == resolved.end()) {
        error(rc.line, rc.col, "unknown component '" + comp_name + "' for role '" + role + "'");
        return std::nullopt;
      }
      c.roles.push_back({role, it->second});
    }

    // Forwarder direction: the side naming a composite port is the outer one.
    std::set<std::string> outer_in(rc.inputs.begin(), rc.inputs.end());
    std::set<std::string> outer_out(rc.outputs.begin(), rc.outputs.end());
    for (const auto& [lhs, rhs] : rc.forwarders) {
      if (outer_out.count(lhs))
        c.forwarders.push_back({Forwarder::Kind::Output, rhs, lhs});
      else if (outer_in.count(rhs))
        c.forwarders.push_back({Forwarder::Kind::Input, lhs, rhs});
      else {
        error(rc.line, rc.col,
              "forwarder '" + lhs + " <- " + rhs + "' names no port of the composite");
        return std::nullopt;
      }
    }

    // Label types from the sender/receiver port types of the subcomponents.
    std::map<std::string, BasicType> label_types;
    for (const auto& d : c.binders) {
      std::optional<BasicType> bt = gamma.port_type(d.sender_port);
      if (!bt) bt = gamma.port_type(d.receiver_port);
      if (bt) label_types.emplace(d.label, *bt);
    }

    c.protocol = resolve_proto(rc.protocol, label_types);
    if (!c.protocol) return std::nullopt;
    return c;
  }

  std::optional<SourceProgram> run() {
    SourceProgram p;
    p.basic_types = raw.basic_types;
    p.entry = raw.entry;
    for (const auto& t : raw.basic_types) {
      if (!type_names.insert(t).second)
        error(1, 1, "duplicate basic type '" + t + "'");
    }
    for (const auto& sig : raw.fn_sigs) {
      for (const auto& bt : sig.params)
        if (!type_names.count(bt.name)) error(1, 1, "unknown type '" + bt.name + "'");
      if (!type_names.count(sig.ret.name)) error(1, 1, "unknown type '" + sig.ret.name + "'");
      if (!sigs.emplace(sig.name, sig).second)
        error(1, 1, "duplicate function '" + sig.name + "'");
      p.fn_sigs.push_back(sig);
    }
    if (!diags.empty()) return std::nullopt;

    // Components may reference later declarations; resolve children first.
    std::map<std::string, const std::variant<RawBase, RawComposite>*> by_name;
    for (const auto& comp : raw.components) {
      const std::string& n = std::holds_alternative<RawBase>(comp)
                                 ? std::get<RawBase>(comp).name
                                 : std::get<RawComposite>(comp).name;
      if (!by_name.emplace(n, &comp).second) error(1, 1, "duplicate component '" + n + "'");
    }
    if (!diags.empty()) return std::nullopt;

    // Port types accumulate into the resolver's gamma as components resolve;
    // totality is only demanded later, at extraction time, since a port may
    // get its type from an enclosing composite's distribution binders.
    std::set<std::string> visiting;
    std::function<bool(const std::string&, int, int)> resolve_name =
        [&](const std::string& name, int line, int col) -> bool {
      if (resolved.count(name)) return true;
      auto it = by_name.find(name);
      if (it == by_name.end()) {
        error(line, col, "unknown component '" + name + "'");
        return false;
      }
      if (!visiting.insert(name).second) {
        error(line, col, "component '" + name + "' is part of a reference cycle");
        return false;
      }
      bool ok = false;
      ComponentPtr comp;
      if (std::holds_alternative<RawBase>(*it->second)) {
        auto b = resolve_base(std::get<RawBase>(*it->second));
        if (b) comp = make_component(std::move(*b));
      } else {
        const RawComposite& rc = std::get<RawComposite>(*it->second);
        bool children_ok = true;
        for (const auto& [role, comp_name] : rc.role_names) {
          (void)role;
          children_ok &= resolve_name(comp_name, rc.line, rc.col);
        }
        if (children_ok) {
          auto c = resolve_composite(rc);
          if (c) comp = make_component(std::move(*c));
        }
      }
      if (comp) {
        gamma.fn_types = sigs;
        if (auto e = detail::infer_gamma(*comp, gamma)) {
          error(line, col, to_string(*e));
        } else {
          resolved.emplace(name, std::move(comp));
          ok = true;
        }
      }
      visiting.erase(name);
      return ok;
    };

    for (const auto& comp : raw.components) {
      const std::string& n = std::holds_alternative<RawBase>(comp)
                                 ? std::get<RawBase>(comp).name
                                 : std::get<RawComposite>(comp).name;
      if (!resolve_name(n, 1, 1)) return std::nullopt;
    }
    if (!resolved.count(raw.entry)) {
      error(1, 1, "unknown entry component '" + raw.entry + "'");
      return std::nullopt;
    }

    for (const auto& comp : raw.components) {
      ComponentDecl decl;
      if (std::holds_alternative<RawBase>(comp)) {
        const RawBase& rb = std::get<RawBase>(comp);
        decl.node = BaseDecl{rb.name, resolved.at(rb.name)->base()};
      } else {
        const RawComposite& rc = std::get<RawComposite>(comp);
        const CompositeComponent& cc = resolved.at(rc.name)->composite();
        decl.node = CompositeDecl{rc.name,       cc.inputs,    cc.outputs,
                                  cc.protocol,   rc.role_names, cc.binders,
                                  cc.interfacing_role, cc.forwarders};
      }
      p.components.push_back(std::move(decl));
    }

    p.resolved = resolved;
    gamma.fn_types = sigs;
    p.gamma = gamma;
    return p;
  }
};

}  // namespace dsl_detail

// ---------------------------------------------------------------------------
// parse: total on every input; either a resolved, validated program or
// diagnostics with positions.

inline ParseResult parse(const std::string& source) {
  ParseResult result;
  auto tokens = dsl_detail::lex(source, result.diagnostics);
  if (!result.diagnostics.empty()) return result;

  dsl_detail::Parser parser(std::move(tokens), result.diagnostics);
  auto raw = parser.parse_program();
  if (!raw) return result;

  dsl_detail::Resolver resolver(*raw, result.diagnostics);
  auto program = resolver.run();
  if (!program) return result;

  auto entry = program->entry_component();
  for (const auto& e : validate_source(*entry, program->sig_table()))
    result.diagnostics.push_back({Diagnostic::Kind::Validation, 0, 0, to_string(e)});
  result.program = std::move(program);
  return result;
}

// ---------------------------------------------------------------------------
// Printer. parse(print(p)) is structurally equal to p.

namespace dsl_detail {

inline void print_proto(const ProtocolPtr& g, std::string& out) { out += to_string(g); }

inline void print_base(const BaseDecl& d, std::string& out) {
  out += "base " + d.name + " {\n  in ";
  for (size_t i = 0; i < d.body.inputs.size(); ++i) out += (i ? ", " : "") + d.body.inputs[i];
  out += "\n  out ";
  for (size_t i = 0; i < d.body.outputs.size(); ++i) out += (i ? ", " : "") + d.body.outputs[i];
  out += "\n";
  for (const auto& lb : d.body.binders) {
    out += "  bind " + lb.out + " = " + lb.fn + "(";
    for (size_t i = 0; i < lb.params.size(); ++i) out += (i ? ", " : "") + lb.params[i];
    out += ")";
    if (!lb.queue.empty()) {
      out += " queue";
      for (const auto& store : lb.queue) {
        out += " { ";
        bool first = true;
        for (const auto& [port, v] : store) {
          if (!first) out += ", ";
          first = false;
          out += port + " -> " + to_string(v);
        }
        out += store.empty() ? "}" : " }";
      }
    }
    out += "\n";
  }
  out += "}\n";
}

inline void print_composite(const CompositeDecl& d, std::string& out) {
  out += "composite " + d.name + " {\n  in ";
  for (size_t i = 0; i < d.inputs.size(); ++i) out += (i ? ", " : "") + d.inputs[i];
  out += "\n  out ";
  for (size_t i = 0; i < d.outputs.size(); ++i) out += (i ? ", " : "") + d.outputs[i];
  out += "\n  protocol ";
  print_proto(d.protocol, out);
  out += "\n  roles";
  for (const auto& [role, comp] : d.role_names) out += " " + role + " = " + comp;
  out += "\n  binders";
  for (size_t i = 0; i < d.binders.size(); ++i) {
    const auto& b = d.binders[i];
    out += (i ? "\n          " : " ") + b.label + " : " + b.receiver_role + "." +
           b.receiver_port + " <- " + b.sender_role + "." + b.sender_port;
  }
  out += "\n  interface " + d.interfacing + " [ ";
  for (size_t i = 0; i < d.forwarders.size(); ++i) {
    const auto& f = d.forwarders[i];
    if (i) out += ", ";
    if (f.kind == Forwarder::Kind::Input)
      out += f.inner + " <- " + f.outer;
    else
      out += f.outer + " <- " + f.inner;
  }
  out += " ]\n}\n";
}

}  // namespace dsl_detail

inline std::string print(const SourceProgram& p) {
  std::string out;
  for (const auto& t : p.basic_types) out += "type " + t + "\n";
  if (!p.basic_types.empty()) out += "\n";
  for (const auto& sig : p.fn_sigs) {
    out += "fn " + sig.name + "(";
    for (size_t i = 0; i < sig.params.size(); ++i)
      out += (i ? ", " : "") + sig.params[i].name;
    out += ") -> " + sig.ret.name + "\n";
  }
  if (!p.fn_sigs.empty()) out += "\n";
  for (const auto& decl : p.components) {
    if (std::holds_alternative<BaseDecl>(decl.node))
      dsl_detail::print_base(std::get<BaseDecl>(decl.node), out);
    else
      dsl_detail::print_composite(std::get<CompositeDecl>(decl.node), out);
    out += "\n";
  }
  out += "entry " + p.entry + "\n";
  return out;
}

// Structural equality of programs, independent of layout.
inline bool program_equal(const SourceProgram& a, const SourceProgram& b) {
  if (a.basic_types != b.basic_types || a.entry != b.entry) return false;
  if (a.fn_sigs.size() != b.fn_sigs.size()) return false;
  for (size_t i = 0; i < a.fn_sigs.size(); ++i)
    if (!(a.fn_sigs[i] == b.fn_sigs[i])) return false;
  if (a.components.size() != b.components.size()) return false;
  for (size_t i = 0; i < a.components.size(); ++i) {
    if (a.components[i].name() != b.components[i].name()) return false;
    const auto& ca = a.resolved.at(a.components[i].name());
    const auto& cb = b.resolved.at(b.components[i].name());
    if (to_term_string(*ca) != to_term_string(*cb)) return false;
  }
  return true;
}

}  // namespace gc
