/* Copyright 2026 The gyp Authors. Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License. You may obtain a copy at
 * http://www.apache.org/licenses/LICENSE-2.0. Distributed on an "AS IS" BASIS, WITHOUT WARRANTIES
 * OR CONDITIONS OF ANY KIND, either express or implied. */

#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace gyp {

/// Constant, variable, or concat(a, b) builtin (head only).
struct Term {
  enum class Kind { Constant, Variable, Concat };
  Kind kind = Kind::Constant;
  std::string text;
  std::vector<Term> args;  // two operands for Concat

  static Term constant(std::string v) { return {Kind::Constant, std::move(v), {}}; }
  static Term variable(std::string v) { return {Kind::Variable, std::move(v), {}}; }
  static Term concat(Term a, Term b) { return {Kind::Concat, {}, {std::move(a), std::move(b)}}; }

  bool is_anonymous() const { return kind == Kind::Variable && text == "_"; }
  std::string str() const;
};

struct Atom {
  std::string predicate;
  std::vector<Term> terms;
  std::string str() const;
};

struct Rule {
  Atom head;
  std::vector<Atom> body;
  std::string str() const;
};

struct Program {
  std::vector<Rule> rules;
  std::vector<Atom> facts;
};

/// Parses clauses of the form `head :- atom, atom.` and ground facts
/// `pred(a, b).`. `%` starts a comment. Variables begin with an uppercase
/// letter or underscore; constants are quoted strings or bare lowercase
/// words and numbers. `concat` and `ig:concat` are the same builtin.
Program parse_program(std::string_view text);
/// Parses `?- atom, atom.` (the `?-` prefix and final period are optional).
std::vector<Atom> parse_query(std::string_view text);

/// Throws UnsafeRule when a head variable is absent from the body, or when a
/// body atom uses concat.
void check_safety(const Rule& rule);

using Tuple = std::vector<std::uint32_t>;

/// Set of ground atoms over interned constants.
class FactBase {
 public:
  FactBase();

  /// Fixes the arity of `predicate`; throws ArityMismatch on conflict.
  void declare(const std::string& predicate, std::size_t arity);
  bool declared(const std::string& predicate) const { return relations_.count(predicate) > 0; }
  std::size_t arity(const std::string& predicate) const;

  /// Inserts a ground fact; returns false if already present.
  bool add(const std::string& predicate, const std::vector<std::string>& args);
  bool contains(const std::string& predicate, const std::vector<std::string>& args) const;

  /// Facts of `predicate` sorted lexicographically.
  std::vector<std::vector<std::string>> facts(const std::string& predicate) const;
  std::vector<std::string> predicates() const;
  std::size_t size() const;
  /// Number of facts added by rule evaluation.
  std::size_t derived_count() const;
  bool is_derived(const std::string& predicate, const std::vector<std::string>& args) const;

  /// Text form: one `pred("a", "b").` per line, sorted.
  std::string str() const;

  struct Relation {
    std::size_t arity = 0;
    std::vector<Tuple> tuples;
    std::vector<bool> derived;
    std::set<Tuple> index;
    // column → value → positions in `tuples`
    std::vector<std::unordered_map<std::uint32_t, std::vector<std::size_t>>> by_column;
  };

  std::uint32_t intern(const std::string& s);
  std::optional<std::uint32_t> lookup(const std::string& s) const;
  const std::string& text(std::uint32_t id) const { return strings_->names[id]; }

  const Relation* relation(const std::string& predicate) const;
  Relation* relation(const std::string& predicate);
  bool insert(const std::string& predicate, const Tuple& t, bool derived);

 private:
  struct Strings {
    std::vector<std::string> names;
    std::unordered_map<std::string, std::uint32_t> ids;
  };
  std::shared_ptr<Strings> strings_;
  std::map<std::string, Relation> relations_;
};

struct EvalOptions {
  /// Maximum number of semi-naive rounds before DepthExceeded.
  int max_depth = 64;
};

/// Least fixpoint of `rules` over `base` by semi-naive evaluation.
/// Throws UnsafeRule, UnknownPredicate, ArityMismatch, DepthExceeded.
FactBase evaluate(const FactBase& base, const std::vector<Rule>& rules, EvalOptions options = {});

/// Reference implementation: naive iteration to a fixpoint.
FactBase evaluate_naive(const FactBase& base, const std::vector<Rule>& rules, EvalOptions options = {});

struct QueryResult {
  /// Named variables in order of first appearance.
  std::vector<std::string> variables;
  /// Distinct bindings sorted lexicographically.
  std::vector<std::vector<std::string>> rows;
};

/// Throws UnknownPredicate for predicates absent from the fact base.
QueryResult query(const FactBase& facts, const std::vector<Atom>& atoms);

/// Rules generalizing runs into activities and deriving the transitive
/// closure of dataset transformations with " + "-joined labels.
std::string_view default_rules();

}  // namespace gyp
