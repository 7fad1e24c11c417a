/* Copyright 2026 The gyp Authors. Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License. You may obtain a copy at
 * http://www.apache.org/licenses/LICENSE-2.0. Distributed on an "AS IS" BASIS, WITHOUT WARRANTIES
 * OR CONDITIONS OF ANY KIND, either express or implied. */

#include "gyp/kgraph/datalog.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <limits>
#include <sstream>

#include "gyp/common/error.hpp"

namespace gyp {

namespace {

constexpr std::uint32_t kUnbound = std::numeric_limits<std::uint32_t>::max();

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

// ---------------------------------------------------------------- parsing

struct Token {
  enum class Kind { Word, String, LParen, RParen, Comma, Period, Implies, Query, End };
  Kind kind;
  std::string text;
  std::size_t pos;  // 1-based
};

bool word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '/'; }

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  auto err = [&](std::size_t at, const std::string& msg) {
    fail(ErrorCode::SyntaxError, "position " + std::to_string(at + 1) + ": " + msg);
  };
  while (i < s.size()) {
    char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (c == '%') {
      while (i < s.size() && s[i] != '\n') ++i;
    } else if (c == '(') {
      out.push_back({Token::Kind::LParen, "(", i + 1});
      ++i;
    } else if (c == ')') {
      out.push_back({Token::Kind::RParen, ")", i + 1});
      ++i;
    } else if (c == ',') {
      out.push_back({Token::Kind::Comma, ",", i + 1});
      ++i;
    } else if (c == '.') {
      out.push_back({Token::Kind::Period, ".", i + 1});
      ++i;
    } else if (c == ':' && i + 1 < s.size() && s[i + 1] == '-') {
      out.push_back({Token::Kind::Implies, ":-", i + 1});
      i += 2;
    } else if (c == '?' && i + 1 < s.size() && s[i + 1] == '-') {
      out.push_back({Token::Kind::Query, "?-", i + 1});
      i += 2;
    } else if (c == '"' || c == '\'') {
      std::size_t start = i++;
      std::string text;
      while (i < s.size() && s[i] != c) {
        if (s[i] == '\\' && i + 1 < s.size()) ++i;
        text += s[i++];
      }
      if (i >= s.size()) err(start, "unterminated string");
      ++i;
      out.push_back({Token::Kind::String, text, start + 1});
    } else if (word_char(c)) {
      std::size_t start = i;
      while (i < s.size()) {
        if (word_char(s[i])) {
          ++i;
        } else if ((s[i] == ':' || s[i] == '.') && i + 1 < s.size() &&
                   std::isalnum(static_cast<unsigned char>(s[i + 1])) && i > start) {
          ++i;
        } else {
          break;
        }
      }
      out.push_back({Token::Kind::Word, std::string(s.substr(start, i - start)), start + 1});
    } else {
      err(i, std::string("unexpected character '") + c + "'");
    }
  }
  out.push_back({Token::Kind::End, "", s.size() + 1});
  return out;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : tokens_(tokenize(text)) {}

  bool at(Token::Kind k) const { return tokens_[pos_].kind == k; }
  const Token& peek() const { return tokens_[pos_]; }

  const Token& expect(Token::Kind k, const char* what) {
    if (!at(k)) error(std::string("expected ") + what);
    return tokens_[pos_++];
  }

  [[noreturn]] void error(const std::string& msg) const {
    const Token& t = tokens_[pos_];
    std::string found = t.kind == Token::Kind::End ? "end of input" : "'" + t.text + "'";
    fail(ErrorCode::SyntaxError, "position " + std::to_string(t.pos) + ": " + msg + ", found " + found);
  }

  Term term() {
    if (at(Token::Kind::String)) return Term::constant(tokens_[pos_++].text);
    const Token& w = expect(Token::Kind::Word, "a term");
    if ((w.text == "concat" || w.text == "ig:concat") && at(Token::Kind::LParen)) {
      ++pos_;
      Term a = term();
      expect(Token::Kind::Comma, "','");
      Term b = term();
      expect(Token::Kind::RParen, "')'");
      return Term::concat(std::move(a), std::move(b));
    }
    char c = w.text[0];
    if (std::isupper(static_cast<unsigned char>(c)) || c == '_') return Term::variable(w.text);
    return Term::constant(w.text);
  }

  Atom atom() {
    Atom a;
    a.predicate = expect(Token::Kind::Word, "a predicate").text;
    if (!at(Token::Kind::LParen)) return a;
    ++pos_;
    if (!at(Token::Kind::RParen)) {
      a.terms.push_back(term());
      while (at(Token::Kind::Comma)) {
        ++pos_;
        a.terms.push_back(term());
      }
    }
    expect(Token::Kind::RParen, "')'");
    return a;
  }

  std::vector<Atom> atoms() {
    std::vector<Atom> out{atom()};
    while (at(Token::Kind::Comma)) {
      ++pos_;
      out.push_back(atom());
    }
    return out;
  }

  Program program() {
    Program p;
    while (!at(Token::Kind::End)) {
      Atom head = atom();
      if (at(Token::Kind::Implies)) {
        ++pos_;
        Rule r{std::move(head), atoms()};
        expect(Token::Kind::Period, "'.'");
        check_safety(r);
        p.rules.push_back(std::move(r));
      } else {
        expect(Token::Kind::Period, "'.' or ':-'");
        for (const auto& t : head.terms) {
          if (t.kind != Term::Kind::Constant) fail(ErrorCode::UnsafeRule, "fact " + head.str() + " is not ground");
        }
        p.facts.push_back(std::move(head));
      }
    }
    return p;
  }

  std::vector<Atom> query() {
    if (at(Token::Kind::Query)) ++pos_;
    auto out = atoms();
    if (at(Token::Kind::Period)) ++pos_;
    expect(Token::Kind::End, "end of query");
    return out;
  }

 private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

void collect_vars(const Term& t, std::set<std::string>& out) {
  if (t.kind == Term::Kind::Variable && !t.is_anonymous()) out.insert(t.text);
  for (const auto& a : t.args) collect_vars(a, out);
}

// ------------------------------------------------------------- evaluation

// Term compiled against a rule's variable table.
struct CTerm {
  Term::Kind kind;
  std::uint32_t value = 0;  // constant id or variable slot
  std::vector<CTerm> args;
};

struct CAtom {
  std::string predicate;
  std::vector<CTerm> terms;
};

struct CRule {
  CAtom head;
  std::vector<CAtom> body;
  std::size_t slots = 0;
};

CTerm compile_term(const Term& t, FactBase& fb, std::map<std::string, std::uint32_t>& vars, std::size_t& anon) {
  CTerm c{t.kind, 0, {}};
  switch (t.kind) {
    case Term::Kind::Constant: c.value = fb.intern(t.text); break;
    case Term::Kind::Variable: {
      std::string name = t.is_anonymous() ? "_#" + std::to_string(anon++) : t.text;
      auto [it, _] = vars.emplace(name, static_cast<std::uint32_t>(vars.size()));
      c.value = it->second;
      break;
    }
    case Term::Kind::Concat:
      for (const auto& a : t.args) c.args.push_back(compile_term(a, fb, vars, anon));
      break;
  }
  return c;
}

CAtom compile_atom(const Atom& a, FactBase& fb, std::map<std::string, std::uint32_t>& vars, std::size_t& anon) {
  CAtom c{a.predicate, {}};
  for (const auto& t : a.terms) c.terms.push_back(compile_term(t, fb, vars, anon));
  return c;
}

using Binding = std::vector<std::uint32_t>;

// Enumerates bindings satisfying body atoms [i, n). `source(i)` selects the
// relation each atom reads.
void join(const std::vector<CAtom>& body, std::size_t i, Binding& b,
          const std::function<const FactBase::Relation*(std::size_t)>& source,
          const std::function<void(const Binding&)>& emit) {
  if (i == body.size()) {
    emit(b);
    return;
  }
  const CAtom& atom = body[i];
  const FactBase::Relation* rel = source(i);
  if (!rel || rel->tuples.empty()) return;

  const std::vector<std::size_t>* candidates = nullptr;
  for (std::size_t col = 0; col < atom.terms.size(); ++col) {
    const CTerm& t = atom.terms[col];
    std::uint32_t v = kUnbound;
    if (t.kind == Term::Kind::Constant) v = t.value;
    if (t.kind == Term::Kind::Variable) v = b[t.value];
    if (v == kUnbound) continue;
    auto it = rel->by_column[col].find(v);
    if (it == rel->by_column[col].end()) return;
    candidates = &it->second;
    break;
  }

  auto visit = [&](const Tuple& tuple) {
    std::vector<std::uint32_t> newly;
    bool ok = true;
    for (std::size_t col = 0; col < atom.terms.size() && ok; ++col) {
      const CTerm& t = atom.terms[col];
      if (t.kind == Term::Kind::Constant) {
        ok = tuple[col] == t.value;
      } else if (b[t.value] == kUnbound) {
        b[t.value] = tuple[col];
        newly.push_back(t.value);
      } else {
        ok = b[t.value] == tuple[col];
      }
    }
    if (ok) join(body, i + 1, b, source, emit);
    for (auto slot : newly) b[slot] = kUnbound;
  };

  if (candidates) {
    for (auto idx : *candidates) visit(rel->tuples[idx]);
  } else {
    for (const auto& t : rel->tuples) visit(t);
  }
}

std::uint32_t head_value(const CTerm& t, const Binding& b, FactBase& fb) {
  switch (t.kind) {
    case Term::Kind::Constant: return t.value;
    case Term::Kind::Variable: return b[t.value];
    case Term::Kind::Concat: {
      std::string s = fb.text(head_value(t.args[0], b, fb));
      s += fb.text(head_value(t.args[1], b, fb));
      return fb.intern(s);
    }
  }
  return kUnbound;
}

std::vector<CRule> prepare(FactBase& fb, const std::vector<Rule>& rules) {
  for (const auto& r : rules) {
    check_safety(r);
    fb.declare(r.head.predicate, r.head.terms.size());
  }
  std::vector<CRule> out;
  for (const auto& r : rules) {
    for (const auto& a : r.body) {
      if (!fb.declared(a.predicate)) fail(ErrorCode::UnknownPredicate, a.predicate + " in rule " + r.str());
      fb.declare(a.predicate, a.terms.size());
    }
    std::map<std::string, std::uint32_t> vars;
    std::size_t anon = 0;
    CRule c;
    for (const auto& a : r.body) c.body.push_back(compile_atom(a, fb, vars, anon));
    c.head = compile_atom(r.head, fb, vars, anon);
    c.slots = vars.size();
    out.push_back(std::move(c));
  }
  return out;
}

using Pending = std::map<std::string, std::set<Tuple>>;

void fire(const CRule& rule, FactBase& fb, const std::function<const FactBase::Relation*(std::size_t)>& source,
          Pending& pending) {
  Binding b(rule.slots, kUnbound);
  const FactBase::Relation* target = fb.relation(rule.head.predicate);
  join(rule.body, 0, b, source, [&](const Binding& bound) {
    Tuple t;
    t.reserve(rule.head.terms.size());
    for (const auto& term : rule.head.terms) t.push_back(head_value(term, bound, fb));
    if (!target->index.count(t)) pending[rule.head.predicate].insert(std::move(t));
  });
}

void make_relation(FactBase::Relation& r, std::size_t arity, const std::set<Tuple>& tuples) {
  r.arity = arity;
  r.by_column.assign(arity, {});
  for (const auto& t : tuples) {
    r.index.insert(t);
    for (std::size_t c = 0; c < arity; ++c) r.by_column[c][t[c]].push_back(r.tuples.size());
    r.tuples.push_back(t);
    r.derived.push_back(true);
  }
}

}  // namespace

// ------------------------------------------------------------------ terms

std::string Term::str() const {
  switch (kind) {
    case Kind::Constant: return quote(text);
    case Kind::Variable: return text;
    case Kind::Concat: return "concat(" + args[0].str() + ", " + args[1].str() + ")";
  }
  return "";
}

std::string Atom::str() const {
  std::string out = predicate + "(";
  for (std::size_t i = 0; i < terms.size(); ++i) out += (i ? ", " : "") + terms[i].str();
  return out + ")";
}

std::string Rule::str() const {
  std::string out = head.str() + " :- ";
  for (std::size_t i = 0; i < body.size(); ++i) out += (i ? ", " : "") + body[i].str();
  return out + ".";
}

Program parse_program(std::string_view text) { return Parser(text).program(); }

std::vector<Atom> parse_query(std::string_view text) { return Parser(text).query(); }

void check_safety(const Rule& rule) {
  if (rule.body.empty()) fail(ErrorCode::UnsafeRule, "rule " + rule.head.predicate + " has an empty body");
  std::set<std::string> body_vars;
  for (const auto& a : rule.body) {
    for (const auto& t : a.terms) {
      if (t.kind == Term::Kind::Concat) fail(ErrorCode::UnsafeRule, "concat in rule body: " + rule.str());
      collect_vars(t, body_vars);
    }
  }
  for (const auto& t : rule.head.terms) {
    if (t.is_anonymous()) fail(ErrorCode::UnsafeRule, "_ in head of " + rule.str());
    std::set<std::string> head_vars;
    collect_vars(t, head_vars);
    for (const auto& v : head_vars) {
      if (!body_vars.count(v)) fail(ErrorCode::UnsafeRule, v + " in " + rule.str());
    }
  }
}

// -------------------------------------------------------------- fact base

FactBase::FactBase() : strings_(std::make_shared<Strings>()) {}

void FactBase::declare(const std::string& predicate, std::size_t arity) {
  auto it = relations_.find(predicate);
  if (it != relations_.end()) {
    if (it->second.arity != arity) {
      fail(ErrorCode::ArityMismatch, predicate + " has arity " + std::to_string(it->second.arity) + ", used with " +
                                         std::to_string(arity));
    }
    return;
  }
  Relation& r = relations_[predicate];
  r.arity = arity;
  r.by_column.resize(arity);
}

std::size_t FactBase::arity(const std::string& predicate) const {
  auto it = relations_.find(predicate);
  if (it == relations_.end()) fail(ErrorCode::UnknownPredicate, predicate);
  return it->second.arity;
}

std::uint32_t FactBase::intern(const std::string& s) {
  auto it = strings_->ids.find(s);
  if (it != strings_->ids.end()) return it->second;
  auto id = static_cast<std::uint32_t>(strings_->names.size());
  strings_->names.push_back(s);
  strings_->ids.emplace(s, id);
  return id;
}

std::optional<std::uint32_t> FactBase::lookup(const std::string& s) const {
  auto it = strings_->ids.find(s);
  if (it == strings_->ids.end()) return std::nullopt;
  return it->second;
}

const FactBase::Relation* FactBase::relation(const std::string& predicate) const {
  auto it = relations_.find(predicate);
  return it == relations_.end() ? nullptr : &it->second;
}

FactBase::Relation* FactBase::relation(const std::string& predicate) {
  auto it = relations_.find(predicate);
  return it == relations_.end() ? nullptr : &it->second;
}

bool FactBase::insert(const std::string& predicate, const Tuple& t, bool derived) {
  declare(predicate, t.size());
  Relation& r = relations_[predicate];
  if (!r.index.insert(t).second) return false;
  for (std::size_t c = 0; c < t.size(); ++c) r.by_column[c][t[c]].push_back(r.tuples.size());
  r.tuples.push_back(t);
  r.derived.push_back(derived);
  return true;
}

bool FactBase::add(const std::string& predicate, const std::vector<std::string>& args) {
  Tuple t;
  for (const auto& a : args) t.push_back(intern(a));
  return insert(predicate, t, false);
}

bool FactBase::contains(const std::string& predicate, const std::vector<std::string>& args) const {
  const Relation* r = relation(predicate);
  if (!r || r->arity != args.size()) return false;
  Tuple t;
  for (const auto& a : args) {
    auto id = lookup(a);
    if (!id) return false;
    t.push_back(*id);
  }
  return r->index.count(t) > 0;
}

bool FactBase::is_derived(const std::string& predicate, const std::vector<std::string>& args) const {
  const Relation* r = relation(predicate);
  if (!r) return false;
  for (std::size_t i = 0; i < r->tuples.size(); ++i) {
    bool match = true;
    for (std::size_t c = 0; c < args.size() && match; ++c) match = text(r->tuples[i][c]) == args[c];
    if (match) return r->derived[i];
  }
  return false;
}

std::vector<std::vector<std::string>> FactBase::facts(const std::string& predicate) const {
  std::vector<std::vector<std::string>> out;
  const Relation* r = relation(predicate);
  if (!r) return out;
  for (const auto& t : r->tuples) {
    std::vector<std::string> row;
    for (auto id : t) row.push_back(text(id));
    out.push_back(std::move(row));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::string> FactBase::predicates() const {
  std::vector<std::string> out;
  for (const auto& [p, _] : relations_) out.push_back(p);
  return out;
}

std::size_t FactBase::size() const {
  std::size_t n = 0;
  for (const auto& [_, r] : relations_) n += r.tuples.size();
  return n;
}

std::size_t FactBase::derived_count() const {
  std::size_t n = 0;
  for (const auto& [_, r] : relations_) n += static_cast<std::size_t>(std::count(r.derived.begin(), r.derived.end(), true));
  return n;
}

std::string FactBase::str() const {
  std::ostringstream os;
  for (const auto& [p, r] : relations_) {
    for (const auto& row : facts(p)) {
      os << p << "(";
      for (std::size_t i = 0; i < row.size(); ++i) os << (i ? ", " : "") << quote(row[i]);
      os << ").\n";
    }
  }
  return os.str();
}

// ------------------------------------------------------------- evaluation

FactBase evaluate(const FactBase& base, const std::vector<Rule>& rules, EvalOptions options) {
  FactBase fb = base;
  std::vector<CRule> compiled = prepare(fb, rules);

  // First round reads the full base; later rounds require one atom from the
  // previous round's delta.
  Pending pending;
  for (const auto& rule : compiled) {
    fire(rule, fb, [&](std::size_t i) { return fb.relation(rule.body[i].predicate); }, pending);
  }
  int rounds = 1;
  while (true) {
    std::map<std::string, FactBase::Relation> delta;
    for (auto& [pred, tuples] : pending) {
      std::set<Tuple> fresh;
      for (const auto& t : tuples) {
        if (fb.insert(pred, t, true)) fresh.insert(t);
      }
      if (!fresh.empty()) make_relation(delta[pred], fb.relation(pred)->arity, fresh);
    }
    pending.clear();
    if (delta.empty()) break;
    if (++rounds > options.max_depth) {
      fail(ErrorCode::DepthExceeded, "no fixpoint after " + std::to_string(options.max_depth) + " rounds");
    }
    for (const auto& rule : compiled) {
      for (std::size_t d = 0; d < rule.body.size(); ++d) {
        auto it = delta.find(rule.body[d].predicate);
        if (it == delta.end()) continue;
        const FactBase::Relation* drel = &it->second;
        fire(rule, fb,
             [&](std::size_t i) { return i == d ? drel : fb.relation(rule.body[i].predicate); }, pending);
      }
    }
  }
  return fb;
}

FactBase evaluate_naive(const FactBase& base, const std::vector<Rule>& rules, EvalOptions options) {
  FactBase fb = base;
  std::vector<CRule> compiled = prepare(fb, rules);
  for (int round = 1;; ++round) {
    if (round > options.max_depth + 1) {
      fail(ErrorCode::DepthExceeded, "no fixpoint after " + std::to_string(options.max_depth) + " rounds");
    }
    Pending pending;
    for (const auto& rule : compiled) {
      fire(rule, fb, [&](std::size_t i) { return fb.relation(rule.body[i].predicate); }, pending);
    }
    bool changed = false;
    for (auto& [pred, tuples] : pending) {
      for (const auto& t : tuples) changed |= fb.insert(pred, t, true);
    }
    if (!changed) break;
  }
  return fb;
}

QueryResult query(const FactBase& facts, const std::vector<Atom>& atoms) {
  QueryResult result;
  std::map<std::string, std::uint32_t> vars;
  std::vector<CAtom> body;
  std::size_t anon = 0;
  bool impossible = false;
  for (const auto& a : atoms) {
    const FactBase::Relation* r = facts.relation(a.predicate);
    if (!r) fail(ErrorCode::UnknownPredicate, a.predicate);
    if (r->arity != a.terms.size()) {
      fail(ErrorCode::ArityMismatch, a.predicate + " has arity " + std::to_string(r->arity) + ", queried with " +
                                         std::to_string(a.terms.size()));
    }
    CAtom c{a.predicate, {}};
    for (const auto& t : a.terms) {
      if (t.kind == Term::Kind::Concat) fail(ErrorCode::SyntaxError, "concat is not allowed in queries");
      if (t.kind == Term::Kind::Constant) {
        auto id = facts.lookup(t.text);
        if (!id) impossible = true;
        c.terms.push_back({Term::Kind::Constant, id.value_or(kUnbound), {}});
        continue;
      }
      std::string name = t.is_anonymous() ? "_#" + std::to_string(anon++) : t.text;
      auto [it, inserted] = vars.emplace(name, static_cast<std::uint32_t>(vars.size()));
      if (inserted && !t.is_anonymous()) result.variables.push_back(name);
      c.terms.push_back({Term::Kind::Variable, it->second, {}});
    }
    body.push_back(std::move(c));
  }
  if (impossible) return result;

  std::vector<std::uint32_t> slots;
  for (const auto& v : result.variables) slots.push_back(vars[v]);
  std::set<std::vector<std::string>> rows;
  Binding b(vars.size(), kUnbound);
  join(body, 0, b, [&](std::size_t i) { return facts.relation(body[i].predicate); },
       [&](const Binding& bound) {
         std::vector<std::string> row;
         for (auto s : slots) row.push_back(facts.text(bound[s]));
         rows.insert(std::move(row));
       });
  result.rows.assign(rows.begin(), rows.end());
  return result;
}

std::string_view default_rules() {
  return R"(is_activity(IDMR) :- model_run(IDMR).
is_activity(IDMT) :- model_training(IDMT).
is_activity(IDTR) :- trans_run(IDTR).

transformation(IDDSI, Name, IDDSO) :- has_input(IDTR, IDDSI),
  uses(IDTR, IDTF), has_name(IDTF, Name), has_output(IDDSO, IDTR),
  dataSet(IDDSO).
transformation(X, ig:concat(W1, ig:concat(" + ", W2)), Z) :-
  transformation(X, W1, Y), transformation(Y, W2, Z).
)";
}

}  // namespace gyp
