#include "hopsi/parser.hpp"

#include <cctype>
#include <map>

namespace hopsi {

namespace {

struct ParseFail {
  ParseError error;
};

// Shared cursor with line/column tracking and label-stable name interning.
struct Cursor {
  std::string_view text;
  size_t pos = 0;
  NameSupply supply;
  std::map<std::string, Name, std::less<>> names;

  [[noreturn]] void fail(const std::string& message) {
    ParseError e;
    e.line = 1;
    e.column = 1;
    for (size_t i = 0; i < pos && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++e.line;
        e.column = 1;
      } else {
        ++e.column;
      }
    }
    e.message = message;
    throw ParseFail{std::move(e)};
  }

  void skip_ws() {
    while (pos < text.size()) {
      char c = text[pos];
      if (c == '#') {  // comment to end of line
        while (pos < text.size() && text[pos] != '\n') ++pos;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos;
      } else {
        break;
      }
    }
  }

  bool eof() {
    skip_ws();
    return pos >= text.size();
  }

  char peek() {
    skip_ws();
    return pos < text.size() ? text[pos] : '\0';
  }

  bool lookahead(std::string_view token) {
    skip_ws();
    return text.substr(pos, token.size()) == token;
  }

  bool try_eat(std::string_view token) {
    skip_ws();
    if (text.substr(pos, token.size()) != token) return false;
    pos += token.size();
    return true;
  }

  void expect(std::string_view token) {
    if (!try_eat(token)) fail("expected '" + std::string(token) + "'");
  }

  bool ident_ahead() {
    skip_ws();
    return pos < text.size() &&
           (std::isalpha(static_cast<unsigned char>(text[pos])) ||
            text[pos] == '_');
  }

  std::string ident() {
    skip_ws();
    if (!ident_ahead()) fail("expected an identifier");
    size_t start = pos;
    while (pos < text.size() &&
           (std::isalnum(static_cast<unsigned char>(text[pos])) ||
            text[pos] == '_'))
      ++pos;
    return std::string(text.substr(start, pos - start));
  }

  size_t number() {
    skip_ws();
    if (pos >= text.size() || !std::isdigit(static_cast<unsigned char>(text[pos])))
      fail("expected a number");
    size_t value = 0;
    while (pos < text.size() &&
           std::isdigit(static_cast<unsigned char>(text[pos]))) {
      value = value * 10 + static_cast<size_t>(text[pos] - '0');
      ++pos;
    }
    return value;
  }

  Name name_for(const std::string& label) {
    auto it = names.find(label);
    if (it != names.end()) return it->second;
    Name n = supply.fresh(label);
    // Keep the user's spelling for printing.
    n = Name(n.id(), std::make_shared<const std::string>(label));
    names.emplace(label, n);
    return n;
  }
};

// --- generic surface (simplified higher-order pi) ------------------------------

struct HopiParser {
  Cursor& cur;

  Type type() {
    if (cur.try_eat("ch(")) {
      Type inner = type();
      cur.expect(")");
      return hopi::Ty::ch(std::move(inner));
    }
    if (cur.try_eat("drop(")) {
      TypeEnv env = type_env();
      cur.expect(")");
      return hopi::Ty::drop(std::move(env));
    }
    cur.fail("expected a type");
  }

  TypeEnv type_env() {
    cur.expect("[");
    TypeEnv env;
    if (!cur.lookahead("]")) {
      do {
        std::string label = cur.ident();
        cur.expect(":");
        Type t = type();
        auto next = env.extend(cur.name_for(label), t);
        if (!next) cur.fail("duplicate binding for " + label);
        env = *next;
      } while (cur.try_eat(","));
    }
    cur.expect("]");
    return env;
  }

  Term term() {
    if (cur.try_eat("{")) {
      Process p = process();
      cur.expect("}");
      return hopi::proc_term(std::move(p));
    }
    return hopi::name_term(cur.name_for(cur.ident()));
  }

  Condition condition() {
    if (cur.try_eat("top")) return hopi::Cond::top();
    if (cur.lookahead("{")) {
      cur.expect("{");
      Process l = process();
      cur.expect("}");
      cur.expect("<=");
      cur.expect("{");
      Process r = process();
      cur.expect("}");
      return hopi::Cond::handle(std::move(l), std::move(r));
    }
    Term l = term();
    cur.expect("<->");
    Term r = term();
    return hopi::Cond::chan_eq(std::move(l), std::move(r));
  }

  Assertion assertion() {
    cur.expect("{");
    std::vector<hopi::Assert::Entry> entries;
    if (!cur.lookahead("}")) {
      do {
        cur.expect("{");
        Process p = process();
        cur.expect("}");
        cur.expect(":");
        entries.emplace_back(std::move(p), type());
      } while (cur.try_eat(","));
    }
    cur.expect("}");
    return hopi::assertion(std::move(entries));
  }

  Process atom() {
    if (cur.try_eat("0")) return Process::nil();
    if (cur.try_eat("'")) {
      Term subject = term();
      cur.expect("<");
      Term object = term();
      cur.expect(">");
      cur.expect(".");
      return Process::output(std::move(subject), std::move(object), atom());
    }
    if (cur.try_eat("run")) return Process::run(term());
    if (cur.try_eat("case")) {
      std::vector<std::pair<Condition, Process>> branches;
      do {
        Condition c = condition();
        cur.expect(":");
        branches.emplace_back(std::move(c), atom());
      } while (cur.try_eat("[]"));
      return Process::choice(std::move(branches));
    }
    if (cur.try_eat("(new")) {
      std::string label = cur.ident();
      cur.expect(":");
      Type t = type();
      cur.expect(")");
      return Process::restrict(cur.name_for(label), std::move(t), atom());
    }
    if (cur.try_eat("!")) return Process::repl(atom());
    if (cur.try_eat("(|")) {
      Assertion a = assertion();
      cur.expect("|)");
      return Process::assert_(std::move(a));
    }
    if (cur.try_eat("(")) {
      Process p = process();
      cur.expect(")");
      return p;
    }
    // Input: term ( \ binders ) pattern . cont
    Term subject = term();
    cur.expect("(\\");
    std::vector<std::pair<Name, Type>> binders;
    do {
      std::string label = cur.ident();
      cur.expect(":");
      binders.emplace_back(cur.name_for(label), type());
    } while (cur.try_eat(","));
    cur.expect(")");
    Term pattern = term();
    cur.expect(".");
    return Process::input(std::move(subject), std::move(binders),
                          std::move(pattern), atom());
  }

  Process process() {
    Process p = atom();
    while (cur.try_eat("|")) p = Process::par(std::move(p), atom());
    return p;
  }
};

// --- direct hopi2 surface -------------------------------------------------------

struct Hopi2Parser {
  Cursor& cur;
  hopi2::LevelEnv* env;

  bool upper_ahead() {
    cur.skip_ws();
    return cur.pos < cur.text.size() &&
           std::isupper(static_cast<unsigned char>(cur.text[cur.pos]));
  }

  hopi2::Hopi2Ptr atom() {
    if (cur.try_eat("0")) return hopi2::h2_nil();
    if (cur.try_eat("(new")) {
      std::string label = cur.ident();
      cur.expect(":");
      cur.expect("ch^");
      size_t k = cur.number();
      cur.expect(")");
      Name ch = cur.name_for(label);
      return hopi2::h2_new(ch, k, atom());
    }
    if (cur.try_eat("(")) {
      hopi2::Hopi2Ptr p = process();
      cur.expect(")");
      return p;
    }
    bool is_var = upper_ahead();
    std::string label = cur.ident();
    Name n = cur.name_for(label);
    if (is_var) return hopi2::h2_var(n);
    if (cur.try_eat("(")) {
      std::string var = cur.ident();
      cur.expect(")");
      cur.expect(".");
      return hopi2::h2_in(n, cur.name_for(var), atom());
    }
    cur.expect("<");
    hopi2::Hopi2Ptr payload = process();
    cur.expect(">");
    cur.expect(".");
    return hopi2::h2_out(n, std::move(payload), atom());
  }

  hopi2::Hopi2Ptr process() {
    hopi2::Hopi2Ptr p = atom();
    while (cur.try_eat("|")) p = hopi2::h2_par(std::move(p), atom());
    return p;
  }
};

// --- rho surface ------------------------------------------------------------------

struct RhoParser {
  Cursor& cur;
  bool typed;
  bool saw_annotation = false;

  Type type() {
    cur.expect("<");
    if (cur.try_eat("B")) {
      cur.expect(",");
      TypeEnv env = type_env();
      cur.expect(">");
      return rho::RTy::base(std::move(env));
    }
    Type carried = type();
    cur.expect(",");
    TypeEnv env = type_env();
    cur.expect(">");
    return rho::RTy::pair(std::move(carried), std::move(env));
  }

  TypeEnv type_env() {
    cur.expect("[");
    TypeEnv env;
    if (!cur.lookahead("]")) {
      do {
        std::string label = cur.ident();
        cur.expect(":");
        Type t = type();
        auto next = env.extend(cur.name_for(label), t);
        if (!next) cur.fail("duplicate binding for " + label);
        env = *next;
      } while (cur.try_eat(","));
    }
    cur.expect("]");
    return env;
  }

  rho::RhoName name() {
    cur.expect("@");
    if (cur.try_eat("0")) return rho::quote(rho::r_nil());
    if (cur.try_eat("*")) return rho::quote(rho::r_drop(name()));
    cur.expect("(");
    rho::RhoPtr p = process();
    cur.expect(")");
    return rho::quote(std::move(p));
  }

  rho::RhoPtr atom() {
    if (cur.try_eat("0")) return rho::r_nil();
    if (cur.try_eat("*")) return rho::r_drop(name());
    if (cur.try_eat("(")) {
      rho::RhoPtr p = process();
      cur.expect(")");
      return p;
    }
    rho::RhoName subject = name();
    if (cur.try_eat("!(")) {
      rho::RhoPtr payload = process();
      if (typed && cur.try_eat(":")) {
        saw_annotation = true;
        type();  // recorded by the typed pass below
      }
      cur.expect(")");
      return rho::r_lift(std::move(subject), std::move(payload));
    }
    cur.expect("?(");
    rho::RhoName binder = name();
    if (typed && cur.try_eat(":")) {
      saw_annotation = true;
      type();
    }
    cur.expect(")");
    cur.expect(".");
    return rho::r_input(std::move(subject), std::move(binder), atom());
  }

  rho::RhoPtr process() {
    rho::RhoPtr p = atom();
    while (cur.try_eat("|")) p = rho::r_par(std::move(p), atom());
    return p;
  }

  // Typed pass: parses the same grammar keeping the annotations.
  rho::TypedRhoPtr typed_atom() {
    if (cur.try_eat("0")) return rho::t_nil();
    if (cur.try_eat("*")) return rho::t_drop(name());
    if (cur.try_eat("(")) {
      rho::TypedRhoPtr p = typed_process();
      cur.expect(")");
      return p;
    }
    rho::RhoName subject = name();
    if (cur.try_eat("!(")) {
      rho::TypedRhoPtr payload = typed_process();
      Type payload_type = rho::RTy::base(TypeEnv());
      if (cur.try_eat(":")) payload_type = type();
      cur.expect(")");
      return rho::t_lift(std::move(subject), std::move(payload),
                         std::move(payload_type));
    }
    cur.expect("?(");
    rho::RhoName binder = name();
    Type binder_type = rho::RTy::base(TypeEnv());
    if (cur.try_eat(":")) binder_type = type();
    cur.expect(")");
    cur.expect(".");
    return rho::t_input(std::move(subject), std::move(binder),
                        std::move(binder_type), typed_atom());
  }

  rho::TypedRhoPtr typed_process() {
    rho::TypedRhoPtr p = typed_atom();
    while (cur.try_eat("|")) p = rho::t_par(std::move(p), typed_atom());
    return p;
  }
};

}  // namespace

std::variant<GenericSource, ParseError> parse_hopi(std::string_view text) {
  Cursor cur{text};
  HopiParser parser{cur};
  try {
    GenericSource out;
    out.ambient = hopi::unit();
    while (true) {
      if (cur.try_eat("name")) {
        std::string label = cur.ident();
        cur.expect(":");
        Type t = parser.type();
        auto next = out.env.extend(cur.name_for(label), t);
        if (!next) cur.fail("duplicate declaration of " + label);
        out.env = *next;
        continue;
      }
      if (cur.try_eat("assert")) {
        out.ambient = parser.assertion();
        continue;
      }
      break;
    }
    out.process = parser.process();
    if (!cur.eof()) cur.fail("trailing input after the process body");
    return out;
  } catch (const ParseFail& f) {
    return f.error;
  }
}

std::variant<Hopi2Source, ParseError> parse_hopi2(std::string_view text) {
  Cursor cur{text};
  Hopi2Source out;
  Hopi2Parser parser{cur, &out.env};
  try {
    while (true) {
      if (cur.try_eat("name")) {
        std::string label = cur.ident();
        cur.expect(":");
        cur.expect("ch^");
        out.env.bind_channel(cur.name_for(label), cur.number());
        continue;
      }
      if (cur.try_eat("level")) {
        out.level = cur.number();
        out.has_level = true;
        continue;
      }
      break;
    }
    out.process = parser.process();
    if (!cur.eof()) cur.fail("trailing input after the process body");
    return out;
  } catch (const ParseFail& f) {
    return f.error;
  }
}

std::variant<RhoSource, ParseError> parse_rho(std::string_view text,
                                              bool typed) {
  RhoSource out;
  out.is_typed = typed;
  try {
    {
      Cursor cur{text};
      RhoParser parser{cur, typed, false};
      while (cur.try_eat("name")) {
        rho::RhoName n = parser.name();
        cur.expect(":");
        out.table.emplace_back(std::move(n), parser.type());
      }
      out.process = parser.process();
      if (!cur.eof()) cur.fail("trailing input after the process body");
    }
    if (typed) {
      Cursor cur{text};
      RhoParser parser{cur, typed, false};
      while (cur.try_eat("name")) {
        parser.name();
        cur.expect(":");
        parser.type();
      }
      out.typed = parser.typed_process();
    }
    return out;
  } catch (const ParseFail& f) {
    return f.error;
  }
}

}  // namespace hopsi
