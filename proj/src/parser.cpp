#include "mln/parser.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <sstream>

namespace mln {
namespace {

struct Token {
  enum class Type {
    Ident,    // letter or '_' start, or digit start with a word tail
    Number,
    LParen,
    RParen,
    Comma,
    Bang,
    Caret,
    Arrow,
    Period,
    Star,
    Equals,
    LBrace,
    RBrace,
    End
  };
  Type type = Type::End;
  std::string text;
  double value = 0.0;
  int line = 0;
  int col = 0;
};

bool isWordChar(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}
bool isLowerStart(const std::string& s) {
  return !s.empty() && std::islower(static_cast<unsigned char>(s[0]));
}

class LineLexer {
 public:
  LineLexer(const std::string& line, int lineNo) : s_(line), lineNo_(lineNo) {
    next();
  }

  const Token& peek() const { return tok_; }
  Token take() {
    Token t = tok_;
    next();
    return t;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg, lineNo_, tok_.col);
  }

 private:
  void next() {
    while (pos_ < s_.size() &&
           (s_[pos_] == ' ' || s_[pos_] == '\t' || s_[pos_] == '\r'))
      ++pos_;
    tok_ = Token{};
    tok_.line = lineNo_;
    tok_.col = static_cast<int>(pos_) + 1;
    if (pos_ >= s_.size() ||
        (s_[pos_] == '/' && pos_ + 1 < s_.size() && s_[pos_ + 1] == '/')) {
      tok_.type = Token::Type::End;
      return;
    }
    char c = s_[pos_];
    switch (c) {
      case '(': single(Token::Type::LParen); return;
      case ')': single(Token::Type::RParen); return;
      case ',': single(Token::Type::Comma); return;
      case '!': single(Token::Type::Bang); return;
      case '^': single(Token::Type::Caret); return;
      case '*': single(Token::Type::Star); return;
      case '{': single(Token::Type::LBrace); return;
      case '}': single(Token::Type::RBrace); return;
      case '.': single(Token::Type::Period); return;
      case '=':
        if (pos_ + 1 < s_.size() && s_[pos_ + 1] == '>') {
          tok_.type = Token::Type::Arrow;
          tok_.text = "=>";
          pos_ += 2;
        } else {
          single(Token::Type::Equals);
        }
        return;
      default: break;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t start = pos_;
      while (pos_ < s_.size() && isWordChar(s_[pos_])) ++pos_;
      tok_.type = Token::Type::Ident;
      tok_.text = s_.substr(start, pos_ - start);
      return;
    }
    bool sign = (c == '-' || c == '+');
    bool signedNumber =
        sign && pos_ + 1 < s_.size() &&
        (std::isdigit(static_cast<unsigned char>(s_[pos_ + 1])) ||
         s_[pos_ + 1] == '.');
    if (std::isdigit(static_cast<unsigned char>(c)) || signedNumber ||
        (c == '.' && pos_ + 1 < s_.size() &&
         std::isdigit(static_cast<unsigned char>(s_[pos_ + 1])))) {
      size_t start = pos_;
      if (sign) ++pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
        ++pos_;
      bool numeric = true;
      if (pos_ < s_.size() && s_[pos_] == '.' && pos_ + 1 < s_.size() &&
          std::isdigit(static_cast<unsigned char>(s_[pos_ + 1]))) {
        ++pos_;
        while (pos_ < s_.size() &&
               std::isdigit(static_cast<unsigned char>(s_[pos_])))
          ++pos_;
      }
      if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
        size_t save = pos_;
        ++pos_;
        if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
        if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
          while (pos_ < s_.size() &&
                 std::isdigit(static_cast<unsigned char>(s_[pos_])))
            ++pos_;
        } else {
          pos_ = save;  // "e" belongs to a word tail, not an exponent
          numeric = false;
        }
      }
      // A word tail (letters, '_') turns the token into a constant symbol.
      if (pos_ < s_.size() && isWordChar(s_[pos_])) {
        while (pos_ < s_.size() && isWordChar(s_[pos_])) ++pos_;
        numeric = false;
      }
      tok_.text = s_.substr(start, pos_ - start);
      if (numeric && !sign) {
        // Could still be a pure integer used as a constant symbol; the
        // parser decides from context. Keep both representations.
        tok_.type = Token::Type::Number;
        tok_.value = std::strtod(tok_.text.c_str(), nullptr);
      } else if (numeric) {
        tok_.type = Token::Type::Number;
        tok_.value = std::strtod(tok_.text.c_str(), nullptr);
      } else {
        tok_.type = Token::Type::Ident;
      }
      return;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", lineNo_,
                     static_cast<int>(pos_) + 1);
  }

  void single(Token::Type t) {
    tok_.type = t;
    tok_.text = s_.substr(pos_, 1);
    ++pos_;
  }

  const std::string& s_;
  size_t pos_ = 0;
  int lineNo_;
  Token tok_;
};

struct LineSplitter {
  explicit LineSplitter(const std::string& text) : text_(text) {}
  bool next(std::string& line, int& lineNo) {
    if (pos_ >= text_.size()) return false;
    size_t end = text_.find('\n', pos_);
    if (end == std::string::npos) end = text_.size();
    line = text_.substr(pos_, end - pos_);
    lineNo = ++count_;
    pos_ = end + 1;
    return true;
  }
  const std::string& text_;
  size_t pos_ = 0;
  int count_ = 0;
};

class RuleParser {
 public:
  RuleParser(LineLexer& lex, const KnowledgeBase& kb, int lineNo)
      : lex_(lex), kb_(kb), lineNo_(lineNo) {}

  RuleAst parseFormula() { return parseImplication(); }

  Atom parseAtom() {
    Token name = expect(Token::Type::Ident, "predicate name");
    int pred = kb_.predicateId(name.text);
    if (pred < 0)
      throw ParseError("undeclared predicate '" + name.text + "'", lineNo_,
                       name.col);
    const PredicateSchema& schema = kb_.schema(pred);
    expect(Token::Type::LParen, "'('");
    Atom atom;
    atom.predicate = pred;
    std::vector<Token> argTokens;
    while (true) {
      Token arg = lex_.take();
      if (arg.type != Token::Type::Ident && arg.type != Token::Type::Number)
        throw ParseError("expected term", lineNo_, arg.col);
      argTokens.push_back(arg);
      Token sep = lex_.take();
      if (sep.type == Token::Type::RParen) break;
      if (sep.type != Token::Type::Comma)
        throw ParseError("expected ',' or ')'", lineNo_, sep.col);
    }
    if (static_cast<int>(argTokens.size()) != schema.arity())
      throw ParseError("arity mismatch for '" + schema.name + "': expected " +
                           std::to_string(schema.arity()) + " arguments, got " +
                           std::to_string(argTokens.size()),
                       lineNo_, name.col);
    for (int i = 0; i < schema.arity(); ++i) {
      const Token& arg = argTokens[i];
      const std::string& domain = schema.argDomains[i];
      if (arg.type == Token::Type::Ident && isLowerStart(arg.text)) {
        auto it = variableDomains.find(arg.text);
        if (it != variableDomains.end() && it->second != domain)
          throw ParseError("variable '" + arg.text + "' used with domain '" +
                               domain + "' but earlier with '" + it->second +
                               "'",
                           lineNo_, arg.col);
        variableDomains.emplace(arg.text, domain);
        atom.args.push_back(Term::variable(arg.text, domain));
      } else {
        atom.args.push_back(Term::constant(arg.text, domain));
      }
    }
    return atom;
  }

  std::map<std::string, std::string> variableDomains;

 private:
  RuleAst parseImplication() {
    RuleAst lhs = parseDisjunction();
    if (lex_.peek().type == Token::Type::Arrow) {
      lex_.take();
      RuleAst rhs = parseDisjunction();
      return RuleAst::implies(std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  RuleAst parseDisjunction() {
    RuleAst lhs = parseConjunction();
    while (lex_.peek().type == Token::Type::Ident && lex_.peek().text == "v") {
      lex_.take();
      RuleAst rhs = parseConjunction();
      lhs = RuleAst::disj(std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  RuleAst parseConjunction() {
    RuleAst lhs = parseUnary();
    while (lex_.peek().type == Token::Type::Caret) {
      lex_.take();
      RuleAst rhs = parseUnary();
      lhs = RuleAst::conj(std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  RuleAst parseUnary() {
    if (lex_.peek().type == Token::Type::Bang) {
      lex_.take();
      return RuleAst::negate(parseUnary());
    }
    if (lex_.peek().type == Token::Type::LParen) {
      lex_.take();
      RuleAst inner = parseImplication();
      expect(Token::Type::RParen, "')'");
      return inner;
    }
    return RuleAst::leaf(parseAtom());
  }

  Token expect(Token::Type t, const std::string& what) {
    Token tok = lex_.take();
    if (tok.type != t)
      throw ParseError("expected " + what, lineNo_, tok.col);
    return tok;
  }

  LineLexer& lex_;
  const KnowledgeBase& kb_;
  int lineNo_;
};

std::string trimmed(const std::string& line) {
  size_t comment = line.find("//");
  std::string body =
      comment == std::string::npos ? line : line.substr(0, comment);
  size_t a = body.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = body.find_last_not_of(" \t\r");
  return body.substr(a, b - a + 1);
}

// Declaration lines: "[*]name(domain, domain)". Only applicable when the
// name is not yet a declared predicate and every argument is a lowercase
// identifier.
bool tryParseDeclaration(const std::string& line, int lineNo,
                         KnowledgeBase& kb) {
  LineLexer lex(line, lineNo);
  bool closedWorld = false;
  if (lex.peek().type == Token::Type::Star) {
    lex.take();
    closedWorld = true;
  }
  if (lex.peek().type != Token::Type::Ident) return false;
  Token name = lex.take();
  if (!closedWorld && kb.predicateId(name.text) >= 0) return false;
  if (lex.peek().type != Token::Type::LParen) return false;
  lex.take();
  std::vector<std::string> domains;
  while (true) {
    Token arg = lex.take();
    if (arg.type != Token::Type::Ident || !isLowerStart(arg.text)) return false;
    domains.push_back(arg.text);
    Token sep = lex.take();
    if (sep.type == Token::Type::RParen) break;
    if (sep.type != Token::Type::Comma) return false;
  }
  if (lex.peek().type != Token::Type::End) return false;
  if (kb.predicateId(name.text) >= 0)
    throw ParseError("duplicate predicate declaration '" + name.text + "'",
                     lineNo, name.col);
  kb.declarePredicate({name.text, std::move(domains), closedWorld});
  return true;
}

bool tryParseDomainEnum(const std::string& line, int lineNo,
                        KnowledgeBase& kb) {
  LineLexer lex(line, lineNo);
  if (lex.peek().type != Token::Type::Ident) return false;
  Token name = lex.take();
  if (lex.peek().type != Token::Type::Equals) return false;
  lex.take();
  if (!isLowerStart(name.text))
    throw ParseError("domain name must start lowercase", lineNo, name.col);
  Token brace = lex.take();
  if (brace.type != Token::Type::LBrace)
    throw ParseError("expected '{'", lineNo, brace.col);
  if (lex.peek().type == Token::Type::RBrace) {
    lex.take();
    return true;
  }
  while (true) {
    Token c = lex.take();
    if (c.type != Token::Type::Ident && c.type != Token::Type::Number)
      throw ParseError("expected constant", lineNo, c.col);
    if (c.type == Token::Type::Ident && isLowerStart(c.text))
      throw ParseError("constants must start with an uppercase letter or digit",
                       lineNo, c.col);
    kb.enumeratedDomains().addConstant(name.text, c.text);
    Token sep = lex.take();
    if (sep.type == Token::Type::RBrace) break;
    if (sep.type != Token::Type::Comma)
      throw ParseError("expected ',' or '}'", lineNo, sep.col);
  }
  Token end = lex.take();
  if (end.type != Token::Type::End)
    throw ParseError("trailing tokens after domain enumeration", lineNo,
                     end.col);
  return true;
}

void parseRuleLine(const std::string& line, int lineNo, KnowledgeBase& kb) {
  LineLexer lex(line, lineNo);
  bool weighted = false;
  double weight = 0.0;
  if (lex.peek().type == Token::Type::Number) {
    Token w = lex.take();
    weighted = true;
    weight = w.value;
  }
  std::vector<std::string> existVars;
  if (lex.peek().type == Token::Type::Ident && lex.peek().text == "EXIST") {
    lex.take();
    while (true) {
      Token v = lex.take();
      if (v.type != Token::Type::Ident || !isLowerStart(v.text))
        throw ParseError("expected variable after EXIST", lineNo, v.col);
      existVars.push_back(v.text);
      if (lex.peek().type == Token::Type::Comma)
        lex.take();
      else
        break;
    }
  }
  RuleParser parser(lex, kb, lineNo);
  RuleAst body = parser.parseFormula();
  bool hard = false;
  if (lex.peek().type == Token::Type::Period) {
    lex.take();
    hard = true;
  }
  Token end = lex.take();
  if (end.type != Token::Type::End)
    throw ParseError("trailing tokens after rule", lineNo, end.col);
  if (weighted && hard)
    throw ParseError("rule cannot carry both a weight and a hard-rule period",
                     lineNo, 1);
  if (!weighted && !hard)
    throw ParseError("rule needs a leading weight or a trailing period",
                     lineNo, 1);
  for (const std::string& v : existVars)
    if (!parser.variableDomains.count(v))
      throw ParseError("existential variable '" + v + "' not used in formula",
                       lineNo, 1);

  std::string source = trimmed(line);
  for (Formula& f : clausify(body, weight, hard, existVars, source))
    kb.addFormula(std::move(f));
}

}  // namespace

KnowledgeBase parseKb(const std::string& text) {
  KnowledgeBase kb;
  LineSplitter lines(text);
  std::string line;
  int lineNo = 0;
  while (lines.next(line, lineNo)) {
    std::string body = trimmed(line);
    if (body.empty()) continue;
    if (tryParseDomainEnum(body, lineNo, kb)) continue;
    if (tryParseDeclaration(body, lineNo, kb)) continue;
    parseRuleLine(body, lineNo, kb);
  }
  return kb;
}

EvidenceSet parseEvidence(const std::string& text, const KnowledgeBase& kb) {
  EvidenceSet out;
  LineSplitter lines(text);
  std::string line;
  int lineNo = 0;
  while (lines.next(line, lineNo)) {
    std::string body = trimmed(line);
    if (body.empty()) continue;
    LineLexer lex(body, lineNo);
    bool negatedHard = false;
    bool soft = false;
    double p = 0.0;
    if (lex.peek().type == Token::Type::Bang) {
      lex.take();
      negatedHard = true;
    } else if (lex.peek().type == Token::Type::Number) {
      Token w = lex.take();
      soft = true;
      p = w.value;
      if (!(p > 0.0 && p < 1.0))
        throw ParseError("probability out of range (0,1): " + w.text, lineNo,
                         w.col);
    }
    RuleParser parser(lex, kb, lineNo);
    Atom atom = parser.parseAtom();
    Token end = lex.take();
    if (end.type != Token::Type::End)
      throw ParseError("trailing tokens after evidence atom", lineNo, end.col);
    if (!atom.ground())
      throw ParseError("evidence atom must be ground (lowercase arguments are "
                       "variables)",
                       lineNo, 1);
    if (soft)
      out.push_back(EvidenceRecord::soft(std::move(atom), p));
    else
      out.push_back(EvidenceRecord::hard(std::move(atom), !negatedHard));
  }
  return out;
}

QuerySpec parseQuery(const std::string& text, const KnowledgeBase& kb) {
  QuerySpec spec;
  LineSplitter lines(text);
  std::string line;
  int lineNo = 0;
  while (lines.next(line, lineNo)) {
    std::string body = trimmed(line);
    if (body.empty()) continue;
    LineLexer lex(body, lineNo);
    Token name = lex.take();
    if (name.type != Token::Type::Ident)
      throw ParseError("expected predicate name", lineNo, name.col);
    int pred = kb.predicateId(name.text);
    if (pred < 0)
      throw ParseError("undeclared predicate '" + name.text + "'", lineNo,
                       name.col);
    if (lex.peek().type == Token::Type::End) {
      spec.addPredicate(pred);
      continue;
    }
    LineLexer fresh(body, lineNo);
    RuleParser parser(fresh, kb, lineNo);
    Atom atom = parser.parseAtom();
    Token end = fresh.take();
    if (end.type != Token::Type::End)
      throw ParseError("trailing tokens after query atom", lineNo, end.col);
    spec.atoms.push_back(std::move(atom));
  }
  return spec;
}

std::string prettyPrint(const KnowledgeBase& kb) {
  std::ostringstream os;
  os << "// knowledge base: " << kb.schemas().size() << " predicates, "
     << kb.formulas().size() << " formulas\n";
  const Domains& enums = kb.enumeratedDomains();
  for (const std::string& domain : enums.domainNames()) {
    os << domain << " = { ";
    const auto& cs = enums.constants(domain);
    for (size_t i = 0; i < cs.size(); ++i) {
      if (i) os << ", ";
      os << cs[i];
    }
    os << " }\n";
  }
  for (const PredicateSchema& s : kb.schemas()) {
    if (s.closedWorld) os << '*';
    os << s.name << '(';
    for (size_t i = 0; i < s.argDomains.size(); ++i) {
      if (i) os << ", ";
      os << s.argDomains[i];
    }
    os << ")\n";
  }
  os.precision(17);
  for (const Formula& f : kb.formulas()) {
    if (f.hard)
      os << toString(f, kb) << ".\n";
    else
      os << f.weight << ' ' << toString(f, kb) << '\n';
  }
  return os.str();
}

bool structurallyEqual(const KnowledgeBase& a, const KnowledgeBase& b,
                       double weightTol) {
  if (a.schemas().size() != b.schemas().size()) return false;
  for (size_t i = 0; i < a.schemas().size(); ++i) {
    const auto& sa = a.schemas()[i];
    const auto& sb = b.schemas()[i];
    if (sa.name != sb.name || sa.argDomains != sb.argDomains ||
        sa.closedWorld != sb.closedWorld)
      return false;
  }
  const Domains& da = a.enumeratedDomains();
  const Domains& db = b.enumeratedDomains();
  if (da.domainNames() != db.domainNames()) return false;
  for (const std::string& d : da.domainNames())
    if (da.constants(d) != db.constants(d)) return false;
  if (a.formulas().size() != b.formulas().size()) return false;
  for (size_t i = 0; i < a.formulas().size(); ++i) {
    const Formula& fa = a.formulas()[i];
    const Formula& fb = b.formulas()[i];
    if (fa.hard != fb.hard || fa.literals != fb.literals ||
        fa.existentialVars != fb.existentialVars)
      return false;
    if (std::abs(fa.weight - fb.weight) > weightTol) return false;
  }
  return true;
}

void applyWeightsFile(KnowledgeBase& kb, const std::string& text) {
  LineSplitter lines(text);
  std::string line;
  int lineNo = 0;
  while (lines.next(line, lineNo)) {
    std::string body = trimmed(line);
    if (body.empty()) continue;
    std::istringstream is(body);
    size_t index = 0;
    std::string weightTok;
    if (!(is >> index >> weightTok))
      throw ParseError("expected '<index> <weight> [source]'", lineNo, 1);
    if (index >= kb.formulas().size())
      throw ParseError("formula index " + std::to_string(index) +
                           " out of range",
                       lineNo, 1);
    if (weightTok == "HARD") continue;
    char* endp = nullptr;
    double weight = std::strtod(weightTok.c_str(), &endp);
    if (endp == weightTok.c_str() || *endp != '\0')
      throw ParseError("bad weight '" + weightTok + "'", lineNo, 1);
    if (!kb.formulas()[index].hard) kb.formulas()[index].weight = weight;
  }
}

std::string weightsToText(const KnowledgeBase& kb) {
  std::ostringstream os;
  os.precision(17);
  for (size_t i = 0; i < kb.formulas().size(); ++i) {
    const Formula& f = kb.formulas()[i];
    os << i << '\t';
    if (f.hard)
      os << "HARD";
    else
      os << f.weight;
    os << '\t' << f.sourceText << '\n';
  }
  return os.str();
}

}  // namespace mln
