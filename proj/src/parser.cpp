#include "symsynth/parser.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace symsynth {

ParseError::ParseError(SourceSpan span, const std::string& message)
    : std::runtime_error(span.file + ":" + std::to_string(span.line) + ":" + std::to_string(span.column) + ": " +
                         message),
      span_(std::move(span)),
      message_(message) {}

namespace {

const std::set<std::string, std::less<>> kKeywords = {
    "controllable", "uncontrollable", "input", "bool",    "int",      "enum",    "plant",
    "requirement",  "supervisor",     "disc",  "alphabet", "location", "initial", "marked",
    "when",         "edge",           "do",    "goto",    "invariant", "needs",  "disables",
    "true",         "false",          "not",   "and",     "or",       "mod"};

enum class Tok { ident, number, punct, end };

struct Token {
  Tok kind = Tok::end;
  std::string text;
  int line = 1;
  int column = 1;
};

std::vector<Token> tokenize(std::string_view src, const std::string& file) {
  std::vector<Token> out;
  int line = 1;
  int col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  while (i < src.size()) {
    const char c = src[i];
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance(1);
      continue;
    }
    Token t;
    t.line = line;
    t.column = col;
    std::size_t j = i;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      t.kind = Tok::ident;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      t.kind = Tok::number;
    } else {
      static const char* two[] = {":=", "!=", "<=", ">=", ".."};
      t.kind = Tok::punct;
      j = i + 1;
      for (const char* p : two)
        if (src.substr(i, 2) == p) j = i + 2;
      if (j == i + 1 && std::string_view(";,:{}[]().=<>+-").find(c) == std::string_view::npos)
        throw ParseError({file, line, col, 1}, std::string("unexpected character '") + c + "'");
    }
    t.text = std::string(src.substr(i, j - i));
    advance(j - i);
    out.push_back(std::move(t));
  }
  Token end;
  end.line = line;
  end.column = col;
  out.push_back(end);
  return out;
}

class Parser {
 public:
  Parser(std::vector<Token> tokens, std::string file) : toks_(std::move(tokens)), file_(std::move(file)) {}

  Specification run() {
    while (!at_end()) declaration();
    resolve_names();
    return std::move(spec_);
  }

 private:
  // -- token helpers --------------------------------------------------------

  const Token& peek(std::size_t ahead = 0) const { return toks_[std::min(pos_ + ahead, toks_.size() - 1)]; }
  bool at_end() const { return peek().kind == Tok::end; }

  bool is(std::string_view text, std::size_t ahead = 0) const {
    const Token& t = peek(ahead);
    return t.kind != Tok::end && t.kind != Tok::number && t.text == text;
  }

  bool accept(std::string_view text) {
    if (!is(text)) return false;
    ++pos_;
    return true;
  }

  [[noreturn]] void fail(const Token& t, const std::string& message) const {
    const int len = t.kind == Tok::end ? 0 : static_cast<int>(t.text.size());
    throw ParseError({file_, t.line, t.column, len}, message);
  }

  std::string describe(const Token& t) const { return t.kind == Tok::end ? "end of input" : "'" + t.text + "'"; }

  void expect(std::string_view text) {
    if (!accept(text)) fail(peek(), "expected '" + std::string(text) + "', found " + describe(peek()));
  }

  std::string identifier() {
    const Token& t = peek();
    if (t.kind != Tok::ident || kKeywords.contains(t.text))
      fail(t, "expected identifier, found " + describe(t));
    ++pos_;
    return t.text;
  }

  int number() {
    const Token& t = peek();
    if (t.kind != Tok::number) fail(t, "expected number, found " + describe(t));
    int v = 0;
    auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (ec != std::errc()) fail(t, "number out of range");
    ++pos_;
    return v;
  }

  std::vector<std::string> identifier_list() {
    std::vector<std::string> names{identifier()};
    while (accept(",")) names.push_back(identifier());
    return names;
  }

  // -- declarations ---------------------------------------------------------

  void declaration() {
    const Token& t = peek();
    if (is("controllable") || is("uncontrollable")) {
      const auto ctl = is("controllable") ? Controllability::controllable : Controllability::uncontrollable;
      ++pos_;
      const Token& at = peek();
      for (auto& name : identifier_list()) {
        if (spec_.find_event(name)) fail(at, "duplicate event '" + name + "'");
        spec_.events.push_back(Event{name, ctl});
      }
      expect(";");
    } else if (accept("input")) {
      VarDomain d = type_name();
      const Token& at = peek();
      std::string name = identifier();
      declare_variable(at, name);
      spec_.inputs.push_back(Variable{name, d, VarKind::input, {}});
      expect(";");
    } else if ((is("plant") || is("requirement") || is("supervisor")) && is("invariant", 1)) {
      invariant();
    } else if (is("plant") || is("requirement") || is("supervisor")) {
      automaton();
    } else if (accept("initial")) {
      spec_.initial_predicates.push_back(expr());
      expect(";");
    } else if (accept("marked")) {
      spec_.marker_predicates.push_back(expr());
      expect(";");
    } else {
      fail(t, "unexpected " + describe(t) + " at top level");
    }
  }

  void declare_variable(const Token& at, const std::string& name) {
    if (!var_names_.insert(name).second) fail(at, "duplicate variable '" + name + "'");
  }

  VarDomain type_name() {
    const Token& t = peek();
    if (accept("bool")) return VarDomain::boolean();
    if (accept("int")) {
      expect("[");
      int lo = number();
      expect("..");
      int hi = number();
      expect("]");
      if (lo > hi) fail(t, "empty integer range");
      return VarDomain::integer(lo, hi);
    }
    if (accept("enum")) {
      expect("{");
      const Token& at = peek();
      auto lits = identifier_list();
      expect("}");
      std::set<std::string> seen(lits.begin(), lits.end());
      if (seen.size() != lits.size()) fail(at, "duplicate enumeration literal");
      return VarDomain::enumeration(std::move(lits));
    }
    fail(t, "expected type, found " + describe(t));
  }

  int literal_value(const VarDomain& d) {
    const Token& t = peek();
    switch (d.kind) {
      case VarDomain::Kind::boolean:
        if (accept("true")) return 1;
        if (accept("false")) return 0;
        fail(t, "expected boolean literal");
      case VarDomain::Kind::integer: return number();
      case VarDomain::Kind::enumeration: {
        std::string name = identifier();
        auto it = std::find(d.literals.begin(), d.literals.end(), name);
        if (it == d.literals.end()) fail(t, "unknown enumeration literal '" + name + "'");
        return static_cast<int>(it - d.literals.begin());
      }
    }
    fail(t, "bad literal");
  }

  void automaton() {
    Automaton aut;
    if (accept("plant")) aut.kind = AutomatonKind::plant;
    else if (accept("requirement")) aut.kind = AutomatonKind::requirement;
    else {
      expect("supervisor");
      aut.kind = AutomatonKind::supervisor;
    }
    const Token& name_tok = peek();
    aut.name = identifier();
    if (spec_.find_automaton(aut.name)) fail(name_tok, "duplicate automaton '" + aut.name + "'");
    expect("{");

    struct PendingTarget {
      std::size_t loc, edge;
      Token at;
      std::string name;
    };
    std::vector<PendingTarget> pending;
    while (!accept("}")) {
      if (at_end()) fail(peek(), "expected '}', found end of input");
      if (accept("disc")) {
        Variable v;
        v.domain = type_name();
        const Token& at = peek();
        v.name = identifier();
        declare_variable(at, v.name);
        if (accept("=")) {
          v.initial_values.push_back(literal_value(v.domain));
          while (accept(",")) v.initial_values.push_back(literal_value(v.domain));
        }
        expect(";");
        aut.variables.push_back(std::move(v));
      } else if (accept("alphabet")) {
        if (aut.alphabet) fail(peek(), "duplicate alphabet declaration");
        aut.alphabet = is(";") ? std::vector<std::string>{} : identifier_list();
        expect(";");
      } else if (accept("location")) {
        Location loc;
        const Token& at = peek();
        loc.name = identifier();
        for (const auto& other : aut.locations)
          if (other.name == loc.name) fail(at, "duplicate location '" + loc.name + "'");
        expect(":");
        if (accept("initial")) {
          loc.initial = accept("when") ? expr() : Expr::boolean(true);
          expect(";");
        }
        if (accept("marked")) {
          loc.marked = accept("when") ? expr() : Expr::boolean(true);
          expect(";");
        }
        const std::size_t self = aut.locations.size();
        while (accept("edge")) {
          Edge e;
          e.events = identifier_list();
          if (accept("when")) e.guard = expr();
          if (accept("do")) {
            do {
              Assignment a;
              a.variable = identifier();
              expect(":=");
              a.value = expr();
              e.updates.push_back(std::move(a));
            } while (accept(","));
          }
          e.target = self;
          if (accept("goto")) {
            const Token& tt = peek();
            pending.push_back({self, loc.edges.size(), tt, identifier()});
          }
          expect(";");
          loc.edges.push_back(std::move(e));
        }
        aut.locations.push_back(std::move(loc));
      } else {
        fail(peek(), "unexpected " + describe(peek()) + " in automaton");
      }
    }
    for (const auto& p : pending) {
      auto it = std::find_if(aut.locations.begin(), aut.locations.end(),
                             [&](const Location& l) { return l.name == p.name; });
      if (it == aut.locations.end()) fail(p.at, "unknown location '" + p.name + "'");
      aut.locations[p.loc].edges[p.edge].target = static_cast<std::size_t>(it - aut.locations.begin());
    }
    spec_.automata.push_back(std::move(aut));
  }

  void invariant() {
    Invariant inv;
    if (accept("plant")) inv.side = InvariantSide::plant;
    else if (accept("requirement")) inv.side = InvariantSide::requirement;
    else {
      expect("supervisor");
      inv.side = InvariantSide::supervisor;
    }
    expect("invariant");
    if (peek().kind == Tok::ident && !kKeywords.contains(peek().text) && is("needs", 1)) {
      inv.kind = InvariantKind::needs;
      inv.event = identifier();
      expect("needs");
      inv.predicate = expr();
    } else {
      inv.predicate = expr();
      if (accept("disables")) {
        inv.kind = InvariantKind::disables;
        inv.event = identifier();
      }
    }
    expect(";");
    spec_.invariants.push_back(std::move(inv));
  }

  // -- expressions ----------------------------------------------------------
  // or < and < comparison (non-associative) < + - < mod < unary

  Expr expr() { return or_expr(); }

  Expr or_expr() {
    Expr lhs = and_expr();
    while (accept("or")) lhs = Expr::binary(ExprKind::or_, std::move(lhs), and_expr());
    return lhs;
  }

  Expr and_expr() {
    Expr lhs = cmp_expr();
    while (accept("and")) lhs = Expr::binary(ExprKind::and_, std::move(lhs), cmp_expr());
    return lhs;
  }

  Expr cmp_expr() {
    Expr lhs = add_expr();
    static const std::pair<const char*, ExprKind> ops[] = {{"=", ExprKind::eq},  {"!=", ExprKind::ne},
                                                            {"<", ExprKind::lt},  {"<=", ExprKind::le},
                                                            {">", ExprKind::gt},  {">=", ExprKind::ge}};
    for (const auto& [text, kind] : ops) {
      if (accept(text)) {
        Expr rhs = add_expr();
        for (const auto& [t2, k2] : ops)
          if (is(t2)) fail(peek(), "comparison operators do not associate; add parentheses");
        return Expr::binary(kind, std::move(lhs), std::move(rhs));
      }
    }
    return lhs;
  }

  Expr add_expr() {
    Expr lhs = mod_expr();
    for (;;) {
      if (accept("+")) lhs = Expr::binary(ExprKind::add, std::move(lhs), mod_expr());
      else if (accept("-")) lhs = Expr::binary(ExprKind::sub, std::move(lhs), mod_expr());
      else return lhs;
    }
  }

  Expr mod_expr() {
    Expr lhs = unary_expr();
    while (accept("mod")) lhs = Expr::binary(ExprKind::mod, std::move(lhs), unary_expr());
    return lhs;
  }

  Expr unary_expr() {
    if (accept("not")) return Expr::unary(ExprKind::not_, unary_expr());
    if (accept("-")) return Expr::unary(ExprKind::neg, unary_expr());
    return primary();
  }

  Expr primary() {
    const Token& t = peek();
    if (t.kind == Tok::number) return Expr::integer(number());
    if (accept("true")) return Expr::boolean(true);
    if (accept("false")) return Expr::boolean(false);
    if (accept("(")) {
      Expr e = expr();
      expect(")");
      return e;
    }
    if (t.kind == Tok::ident && !kKeywords.contains(t.text)) {
      std::string name = identifier();
      if (accept(".")) return Expr::loc(std::move(name), identifier());
      return Expr::var(std::move(name));
    }
    fail(t, "expected expression, found " + describe(t));
  }

  // -- name resolution ------------------------------------------------------
  // Bare identifiers that are not variables are enumeration literals; their
  // value comes from the enumeration they are compared with or assigned to,
  // or from the unique enumeration that declares them.

  const VarDomain* enum_domain_of(const Expr& e) const {
    if (e.kind != ExprKind::var_ref) return nullptr;
    const Variable* v = spec_.find_variable(e.name);
    return v && v->domain.kind == VarDomain::Kind::enumeration ? &v->domain : nullptr;
  }

  int literal_index(const std::string& name, const VarDomain* hint) const {
    auto index_in = [&](const VarDomain& d) {
      auto it = std::find(d.literals.begin(), d.literals.end(), name);
      return it == d.literals.end() ? -1 : static_cast<int>(it - d.literals.begin());
    };
    if (hint && index_in(*hint) >= 0) return index_in(*hint);
    int found = -1;
    auto consider = [&](const Variable& v) {
      if (v.domain.kind != VarDomain::Kind::enumeration) return true;
      int idx = index_in(v.domain);
      if (idx < 0) return true;
      if (found >= 0 && found != idx) return false;
      found = idx;
      return true;
    };
    for (const auto& v : spec_.inputs)
      if (!consider(v)) return -1;
    for (const auto& a : spec_.automata)
      for (const auto& v : a.variables)
        if (!consider(v)) return -1;
    return found;
  }

  void resolve(Expr& e, const VarDomain* hint) {
    if (e.kind == ExprKind::var_ref) {
      if (!var_names_.contains(e.name)) e = Expr::enum_lit(e.name, literal_index(e.name, hint));
      return;
    }
    if ((e.kind == ExprKind::eq || e.kind == ExprKind::ne) && e.args.size() == 2) {
      const VarDomain* lh = enum_domain_of(e.args[1]);
      const VarDomain* rh = enum_domain_of(e.args[0]);
      resolve(e.args[0], lh);
      resolve(e.args[1], rh);
      return;
    }
    for (auto& a : e.args) resolve(a, nullptr);
  }

  void resolve_names() {
    for (auto& a : spec_.automata) {
      for (auto& loc : a.locations) {
        if (loc.initial) resolve(*loc.initial, nullptr);
        if (loc.marked) resolve(*loc.marked, nullptr);
        for (auto& e : loc.edges) {
          resolve(e.guard, nullptr);
          for (auto& u : e.updates) {
            const Variable* v = spec_.find_variable(u.variable);
            resolve(u.value, v && v->domain.kind == VarDomain::Kind::enumeration ? &v->domain : nullptr);
          }
        }
      }
    }
    for (auto& inv : spec_.invariants) resolve(inv.predicate, nullptr);
    for (auto& p : spec_.initial_predicates) resolve(p, nullptr);
    for (auto& p : spec_.marker_predicates) resolve(p, nullptr);
  }

  std::vector<Token> toks_;
  std::string file_;
  std::size_t pos_ = 0;
  Specification spec_;
  std::set<std::string, std::less<>> var_names_;
};

// -- writer -----------------------------------------------------------------

int precedence(ExprKind k) {
  switch (k) {
    case ExprKind::or_: return 1;
    case ExprKind::and_: return 2;
    case ExprKind::eq:
    case ExprKind::ne:
    case ExprKind::lt:
    case ExprKind::le:
    case ExprKind::gt:
    case ExprKind::ge: return 3;
    case ExprKind::add:
    case ExprKind::sub: return 4;
    case ExprKind::mod: return 5;
    case ExprKind::not_:
    case ExprKind::neg: return 6;
    default: return 7;
  }
}

void write_expr(std::ostream& os, const Expr& e) {
  auto child = [&](const Expr& c, bool parens) {
    if (parens) os << '(';
    write_expr(os, c);
    if (parens) os << ')';
  };
  switch (e.kind) {
    case ExprKind::int_lit: os << e.value; return;
    case ExprKind::bool_lit: os << (e.value ? "true" : "false"); return;
    case ExprKind::var_ref:
    case ExprKind::enum_lit: os << e.name; return;
    case ExprKind::loc_ref: os << e.name << '.' << e.location; return;
    case ExprKind::not_:
      os << "not ";
      child(e.args[0], precedence(e.args[0].kind) < 6);
      return;
    case ExprKind::neg:
      os << '-';
      child(e.args[0], precedence(e.args[0].kind) < 7);
      return;
    default: break;
  }
  const int p = precedence(e.kind);
  const bool cmp = p == 3;
  child(e.args[0], cmp ? precedence(e.args[0].kind) <= p : precedence(e.args[0].kind) < p);
  os << ' ' << operator_symbol(e.kind) << ' ';
  child(e.args[1], precedence(e.args[1].kind) <= p);
}

std::string type_text(const VarDomain& d) {
  switch (d.kind) {
    case VarDomain::Kind::boolean: return "bool";
    case VarDomain::Kind::integer: return "int[" + std::to_string(d.lo) + ".." + std::to_string(d.hi) + "]";
    case VarDomain::Kind::enumeration: {
      std::string s = "enum{";
      for (std::size_t i = 0; i < d.literals.size(); ++i) s += (i ? ", " : "") + d.literals[i];
      return s + "}";
    }
  }
  return {};
}

std::string value_text(const VarDomain& d, int v) {
  switch (d.kind) {
    case VarDomain::Kind::boolean: return v ? "true" : "false";
    case VarDomain::Kind::integer: return std::to_string(v);
    case VarDomain::Kind::enumeration:
      return v >= 0 && v < static_cast<int>(d.literals.size()) ? d.literals[v] : std::to_string(v);
  }
  return {};
}

const char* kind_keyword(AutomatonKind k) {
  switch (k) {
    case AutomatonKind::plant: return "plant";
    case AutomatonKind::requirement: return "requirement";
    case AutomatonKind::supervisor: return "supervisor";
  }
  return "";
}

const char* side_keyword(InvariantSide s) {
  switch (s) {
    case InvariantSide::plant: return "plant";
    case InvariantSide::requirement: return "requirement";
    case InvariantSide::supervisor: return "supervisor";
  }
  return "";
}

}  // namespace

Specification parse(std::string_view text, std::string_view file) {
  std::string name(file);
  return Parser(tokenize(text, name), name).run();
}

Specification parse_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError({path, 1, 1, 0}, "cannot open file");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path);
}

std::string unparse_expr(const Expr& expr) {
  std::ostringstream os;
  write_expr(os, expr);
  return os.str();
}

std::string unparse(const Specification& spec) {
  std::ostringstream os;
  for (const auto& e : spec.events)
    os << (e.controllable() ? "controllable " : "uncontrollable ") << e.name << ";\n";
  for (const auto& v : spec.inputs) os << "input " << type_text(v.domain) << ' ' << v.name << ";\n";

  for (const auto& a : spec.automata) {
    if (os.tellp() > 0) os << '\n';
    os << kind_keyword(a.kind) << ' ' << a.name << " {\n";
    for (const auto& v : a.variables) {
      os << "  disc " << type_text(v.domain) << ' ' << v.name;
      for (std::size_t i = 0; i < v.initial_values.size(); ++i)
        os << (i ? ", " : " = ") << value_text(v.domain, v.initial_values[i]);
      os << ";\n";
    }
    if (a.alphabet) {
      os << "  alphabet";
      for (std::size_t i = 0; i < a.alphabet->size(); ++i) os << (i ? ", " : " ") << (*a.alphabet)[i];
      os << ";\n";
    }
    for (std::size_t li = 0; li < a.locations.size(); ++li) {
      const auto& loc = a.locations[li];
      os << "  location " << loc.name << ":\n";
      auto flag = [&](const char* kw, const std::optional<Expr>& p) {
        if (!p) return;
        os << "    " << kw;
        if (!p->is_true()) os << " when " << unparse_expr(*p);
        os << ";\n";
      };
      flag("initial", loc.initial);
      flag("marked", loc.marked);
      for (const auto& e : loc.edges) {
        os << "    edge";
        for (std::size_t i = 0; i < e.events.size(); ++i) os << (i ? ", " : " ") << e.events[i];
        if (!e.guard.is_true()) os << " when " << unparse_expr(e.guard);
        for (std::size_t i = 0; i < e.updates.size(); ++i)
          os << (i ? ", " : " do ") << e.updates[i].variable << " := " << unparse_expr(e.updates[i].value);
        if (e.target != li && e.target < a.locations.size()) os << " goto " << a.locations[e.target].name;
        os << ";\n";
      }
    }
    os << "}\n";
  }

  if (!spec.invariants.empty() && os.tellp() > 0) os << '\n';
  for (const auto& inv : spec.invariants) {
    os << side_keyword(inv.side) << " invariant ";
    switch (inv.kind) {
      case InvariantKind::state: os << unparse_expr(inv.predicate); break;
      case InvariantKind::needs: os << inv.event << " needs " << unparse_expr(inv.predicate); break;
      case InvariantKind::disables: os << unparse_expr(inv.predicate) << " disables " << inv.event; break;
    }
    os << ";\n";
  }
  if ((!spec.initial_predicates.empty() || !spec.marker_predicates.empty()) && os.tellp() > 0) os << '\n';
  for (const auto& p : spec.initial_predicates) os << "initial " << unparse_expr(p) << ";\n";
  for (const auto& p : spec.marker_predicates) os << "marked " << unparse_expr(p) << ";\n";
  return os.str();
}

}  // namespace symsynth
