#include "plansafe/parser.hpp"

#include <cctype>
#include <vector>

#include "plansafe/error.hpp"

namespace plansafe::ltl {

namespace {

enum class Tok {
  True,
  False,
  Ident,
  Not,
  And,
  Or,
  Implies,
  Next,
  Globally,
  Finally,
  Until,
  LParen,
  RParen,
  End,
};

struct Token {
  Tok kind;
  std::string text;
  std::size_t pos;
};

std::vector<Token> tokenize(const std::string& text) {
  std::vector<Token> out;
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    std::size_t start = i;
    if (c == '(') {
      out.push_back({Tok::LParen, "(", start});
      ++i;
    } else if (c == ')') {
      out.push_back({Tok::RParen, ")", start});
      ++i;
    } else if (c == '!') {
      out.push_back({Tok::Not, "!", start});
      ++i;
    } else if (c == '&') {
      out.push_back({Tok::And, "&", start});
      ++i;
    } else if (c == '|') {
      out.push_back({Tok::Or, "|", start});
      ++i;
    } else if (c == '-') {
      if (i + 1 >= n || text[i + 1] != '>')
        throw ParseError("expected '->'", start);
      out.push_back({Tok::Implies, "->", start});
      i += 2;
    } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < n && (std::isalnum(static_cast<unsigned char>(text[j])) ||
                       text[j] == '_'))
        ++j;
      std::string word = text.substr(i, j - i);
      Tok kind = Tok::Ident;
      if (word == "true") kind = Tok::True;
      else if (word == "false") kind = Tok::False;
      else if (word == "X") kind = Tok::Next;
      else if (word == "G") kind = Tok::Globally;
      else if (word == "F") kind = Tok::Finally;
      else if (word == "U") kind = Tok::Until;
      out.push_back({kind, std::move(word), start});
      i = j;
    } else {
      throw ParseError(std::string("unknown token '") + c + "'", start);
    }
  }
  out.push_back({Tok::End, "", n});
  return out;
}

class InfixParser {
 public:
  explicit InfixParser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  Formula parse() {
    Formula f = parse_implies();
    expect(Tok::End, "trailing input after formula");
    return f;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  Token take() { return toks_[pos_++]; }

  void expect(Tok kind, const char* msg) {
    if (peek().kind != kind) throw ParseError(msg, peek().pos);
    ++pos_;
  }

  Formula parse_implies() {  // right-assoc, loosest
    Formula lhs = parse_or();
    if (peek().kind == Tok::Implies) {
      take();
      return Formula::make_implies(std::move(lhs), parse_implies());
    }
    return lhs;
  }

  Formula parse_or() {  // left-assoc
    Formula f = parse_and();
    while (peek().kind == Tok::Or) {
      take();
      f = Formula::make_or(std::move(f), parse_and());
    }
    return f;
  }

  Formula parse_and() {  // left-assoc
    Formula f = parse_until();
    while (peek().kind == Tok::And) {
      take();
      f = Formula::make_and(std::move(f), parse_until());
    }
    return f;
  }

  Formula parse_until() {  // right-assoc
    Formula lhs = parse_unary();
    if (peek().kind == Tok::Until) {
      take();
      return Formula::make_until(std::move(lhs), parse_until());
    }
    return lhs;
  }

  Formula parse_unary() {
    switch (peek().kind) {
      case Tok::Not:
        take();
        return Formula::make_not(parse_unary());
      case Tok::Next:
        take();
        return Formula::make_next(parse_unary());
      case Tok::Globally:
        take();
        return Formula::make_globally(parse_unary());
      case Tok::Finally:
        take();
        return Formula::make_finally(parse_unary());
      default:
        return parse_primary();
    }
  }

  Formula parse_primary() {
    Token t = take();
    switch (t.kind) {
      case Tok::True:
        return Formula::make_true();
      case Tok::False:
        return Formula::make_false();
      case Tok::Ident:
        return Formula::make_atom(std::move(t.text));
      case Tok::LParen: {
        Formula f = parse_implies();
        if (peek().kind != Tok::RParen)
          throw ParseError("unbalanced parentheses: expected ')'", peek().pos);
        take();
        return f;
      }
      case Tok::RParen:
        throw ParseError("unbalanced parentheses: unexpected ')'", t.pos);
      case Tok::End:
        throw ParseError("dangling operator: formula ended early", t.pos);
      default:
        throw ParseError("unexpected operator '" + t.text + "'", t.pos);
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

class PrefixParser {
 public:
  explicit PrefixParser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  Formula parse() {
    Formula f = parse_one();
    if (peek().kind != Tok::End)
      throw ParseError("extra operands after complete formula", peek().pos);
    return f;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  Token take() { return toks_[pos_++]; }

  Formula parse_one() {
    Token t = take();
    switch (t.kind) {
      case Tok::True:
        return Formula::make_true();
      case Tok::False:
        return Formula::make_false();
      case Tok::Ident:
        return Formula::make_atom(std::move(t.text));
      case Tok::Not:
        return Formula::make_not(operand(t));
      case Tok::Next:
        return Formula::make_next(operand(t));
      case Tok::Globally:
        return Formula::make_globally(operand(t));
      case Tok::Finally:
        return Formula::make_finally(operand(t));
      case Tok::And: {
        Formula l = operand(t);
        return Formula::make_and(std::move(l), operand(t));
      }
      case Tok::Or: {
        Formula l = operand(t);
        return Formula::make_or(std::move(l), operand(t));
      }
      case Tok::Implies: {
        Formula l = operand(t);
        return Formula::make_implies(std::move(l), operand(t));
      }
      case Tok::Until: {
        Formula l = operand(t);
        return Formula::make_until(std::move(l), operand(t));
      }
      case Tok::End:
        throw ParseError("too few operands: formula ended early", t.pos);
      default:
        throw ParseError("unexpected token '" + t.text + "' in prefix formula",
                         t.pos);
    }
  }

  Formula operand(const Token& op) {
    if (peek().kind == Tok::End)
      throw ParseError("too few operands for '" + op.text + "'", peek().pos);
    return parse_one();
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

// Binding strength used by the minimal-parenthesis renderer.
int precedence(Op op) {
  switch (op) {
    case Op::Implies: return 0;
    case Op::Or: return 1;
    case Op::And: return 2;
    case Op::Until: return 3;
    default: return 4;  // unary and leaves
  }
}

// parent_prec is the loosest precedence the current position admits without
// parentheses; a node binding looser than that gets wrapped.
void render_infix_rec(const Formula& f, int parent_prec, std::string& out) {
  switch (f.op()) {
    case Op::True:
      out += "true";
      return;
    case Op::False:
      out += "false";
      return;
    case Op::Atom:
      out += f.atom_name();
      return;
    case Op::Not:
    case Op::Next:
    case Op::Globally:
    case Op::Finally: {
      out += op_name(f.op());
      const Formula& c = f.child();
      if (precedence(c.op()) < 4) {
        out += "(";
        render_infix_rec(c, 0, out);
        out += ")";
      } else {
        out += " ";
        render_infix_rec(c, 4, out);
      }
      return;
    }
    default: {
      int prec = precedence(f.op());
      bool rassoc = (f.op() == Op::Implies || f.op() == Op::Until);
      bool need = prec < parent_prec;
      if (need) out += "(";
      render_infix_rec(f.left(), prec + (rassoc ? 1 : 0), out);
      out += " ";
      out += op_name(f.op());
      out += " ";
      render_infix_rec(f.right(), prec + (rassoc ? 0 : 1), out);
      if (need) out += ")";
      return;
    }
  }
}

void render_prefix_rec(const Formula& f, std::string& out) {
  if (!out.empty()) out += " ";
  switch (f.op()) {
    case Op::True:
      out += "true";
      return;
    case Op::False:
      out += "false";
      return;
    case Op::Atom:
      out += f.atom_name();
      return;
    default:
      out += op_name(f.op());
      if (op_is_unary(f.op())) {
        render_prefix_rec(f.child(), out);
      } else {
        render_prefix_rec(f.left(), out);
        render_prefix_rec(f.right(), out);
      }
      return;
  }
}

}  // namespace

Formula parse_infix(const std::string& text) {
  return InfixParser(tokenize(text)).parse();
}

Formula parse_prefix(const std::string& text) {
  return PrefixParser(tokenize(text)).parse();
}

Formula parse_formula(const std::string& text) {
  try {
    return parse_infix(text);
  } catch (const ParseError&) {
    return parse_prefix(text);
  }
}

std::string render_infix(const Formula& f) {
  std::string out;
  render_infix_rec(f, 0, out);
  return out;
}

std::string render_prefix(const Formula& f) {
  std::string out;
  render_prefix_rec(f, out);
  return out;
}

}  // namespace plansafe::ltl
