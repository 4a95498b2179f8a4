#ifndef FOPFORGE_FOLOGIC_HPP
#define FOPFORGE_FOLOGIC_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "fopforge/structures.hpp"

namespace fopforge {

// ---------------------------------------------------------------------------
// Terms and formulas
//
// Formula text grammar (fixed):
//   formula := "true" | "false" | atom | "!" formula
//            | formula "&" formula | formula "|" formula
//            | "E" IDENT "." formula | "A" IDENT "." formula
//            | "(" formula ")"
//   atom    := IDENT "(" term ("," term)* ")"
//            | term "=" term | term "<=" term | term "<" term
//            | term "=" NUMBER
//   term    := IDENT | "0" | "1" | "max"
//
// "&" binds tighter than "|"; "!" tighter than both; a quantifier's scope
// extends as far right as possible. Built-in predicate IDENTs: SUC, PLUS,
// TIMES. "term = NUMBER" with NUMBER >= 2 is sugar for the successor chain
// (E _n1)(SUC(1,_n1) & ... & SUC(_nK, term)); identifiers starting with "_n"
// are reserved for that expansion.
// ---------------------------------------------------------------------------

struct Term {
    enum class Kind { Var, Zero, One, Max };
    Kind kind = Kind::Var;
    std::string name;  // set for Var only

    bool operator==(const Term&) const = default;
};

Term t_var(std::string name);
Term t_zero();
Term t_one();
Term t_max();

class Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

class Formula {
public:
    enum class Kind { True, False, InputAtom, NumericAtom, Not, And, Or, Exists, ForAll };

    Kind kind;
    std::string rel;          // InputAtom
    NumPred pred{};           // NumericAtom
    std::vector<Term> terms;  // both atom kinds
    FormulaPtr lhs, rhs;      // Not (lhs only), And, Or
    std::string var;          // quantifiers
    FormulaPtr body;          // quantifiers

    explicit Formula(Kind k) : kind(k) {}
};

FormulaPtr mk_true();
FormulaPtr mk_false();
FormulaPtr mk_input(std::string rel, std::vector<Term> terms);
FormulaPtr mk_num(NumPred pred, std::vector<Term> terms);
FormulaPtr mk_not(FormulaPtr f);
FormulaPtr mk_and(FormulaPtr a, FormulaPtr b);
FormulaPtr mk_or(FormulaPtr a, FormulaPtr b);
FormulaPtr mk_exists(std::string var, FormulaPtr body);
FormulaPtr mk_forall(std::string var, FormulaPtr body);

bool formula_equal(const FormulaPtr& a, const FormulaPtr& b);

// Parses `text` against the grammar above and validates input atoms against
// `vocab` (known relation, matching arity). Also rejects quantifier
// shadowing and reserved "_n" identifiers.
FormulaPtr parse_formula(std::string_view text, const Vocabulary& vocab);

// Canonical text form; parse(print(f)) reproduces f node for node, and
// successor chains produced by the numeric-literal sugar print back as
// "term=N".
std::string print_formula(const FormulaPtr& f);

// Free variables, sorted by name.
std::set<std::string> free_vars(const FormulaPtr& f);

// Variable environment for evaluation. Lookup is by scan from the back, so
// inner bindings shadow outer ones.
using Env = std::vector<std::pair<std::string_view, Elem>>;

// Tarskian truth value of f over s under env; quantifiers range over
// {0..s.size-1}. Throws EvalError on unbound variables.
bool eval(const FormulaPtr& f, const Structure& s, Env& env);
bool eval(const FormulaPtr& f, const Structure& s);  // sentences

// True iff no input relation symbol occurs anywhere in f.
bool is_numeric(const FormulaPtr& f);

// ---------------------------------------------------------------------------
// Projection form: alpha0-disjuncts plus (numeric guard, input literal) pairs
// ---------------------------------------------------------------------------

struct InputLiteral {
    bool positive = true;
    std::string rel;
    std::vector<Term> terms;
};

struct GuardedDisjunct {
    FormulaPtr alpha;  // numeric guard (conjunction of the remaining conjuncts)
    InputLiteral literal;
};

struct ProjectionForm {
    std::vector<FormulaPtr> alpha0;          // purely numeric disjuncts
    std::vector<GuardedDisjunct> guarded;    // guard /\ literal disjuncts

    // All guards in a fixed order: alpha0 entries first, then guarded alphas.
    std::vector<FormulaPtr> all_guards() const;
};

// Decomposes a top-level disjunction into projection form. Throws
// NotProjectiveError if some disjunct contains two input atoms, an input
// atom under a quantifier or disjunction, or a non-literal use of an input
// relation.
ProjectionForm classify_projection(const FormulaPtr& f);

struct ExclusionResult {
    enum class Status { Ok, Counterexample, Undecided };
    Status status = Status::Ok;
    // Set for Counterexample: the satisfying assignment and the two guards.
    std::map<std::string, Elem> assignment;
    int guard_i = -1;
    int guard_j = -1;
    std::uint64_t assignments_checked = 0;

    bool ok() const { return status == Status::Ok; }
};

inline constexpr std::uint64_t kDefaultExclusionBudget = 1ull << 27;

// Semantic pairwise-exclusion check: enumerates every assignment of the
// guards' free variables over {0..m-1} and reports the first assignment (in
// enumeration order) satisfying two distinct guards. If the assignment
// space exceeds `budget`, returns Undecided rather than silently passing.
// `jobs` > 1 splits the assignment space across threads; the reported
// counterexample is still the first one.
ExclusionResult check_mutual_exclusion(const ProjectionForm& p, Elem m,
                                       std::uint64_t budget = kDefaultExclusionBudget,
                                       int jobs = 1);

}  // namespace fopforge

#endif
