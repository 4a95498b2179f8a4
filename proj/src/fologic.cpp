#include "fopforge/fologic.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <functional>
#include <future>

namespace fopforge {

Term t_var(std::string name) { return Term{Term::Kind::Var, std::move(name)}; }
Term t_zero() { return Term{Term::Kind::Zero, {}}; }
Term t_one() { return Term{Term::Kind::One, {}}; }
Term t_max() { return Term{Term::Kind::Max, {}}; }

namespace {

std::shared_ptr<Formula> node(Formula::Kind k) { return std::make_shared<Formula>(k); }

std::string term_text(const Term& t) {
    switch (t.kind) {
        case Term::Kind::Var: return t.name;
        case Term::Kind::Zero: return "0";
        case Term::Kind::One: return "1";
        case Term::Kind::Max: return "max";
    }
    return "?";
}

}  // namespace

FormulaPtr mk_true() { return node(Formula::Kind::True); }
FormulaPtr mk_false() { return node(Formula::Kind::False); }

FormulaPtr mk_input(std::string rel, std::vector<Term> terms) {
    auto f = node(Formula::Kind::InputAtom);
    f->rel = std::move(rel);
    f->terms = std::move(terms);
    return f;
}

FormulaPtr mk_num(NumPred pred, std::vector<Term> terms) {
    if ((int)terms.size() != num_pred_arity(pred))
        throw DomainError(std::string("numeric atom arity mismatch for ") + num_pred_name(pred));
    auto f = node(Formula::Kind::NumericAtom);
    f->pred = pred;
    f->terms = std::move(terms);
    return f;
}

FormulaPtr mk_not(FormulaPtr f) {
    auto n = node(Formula::Kind::Not);
    n->lhs = std::move(f);
    return n;
}

FormulaPtr mk_and(FormulaPtr a, FormulaPtr b) {
    auto n = node(Formula::Kind::And);
    n->lhs = std::move(a);
    n->rhs = std::move(b);
    return n;
}

FormulaPtr mk_or(FormulaPtr a, FormulaPtr b) {
    auto n = node(Formula::Kind::Or);
    n->lhs = std::move(a);
    n->rhs = std::move(b);
    return n;
}

FormulaPtr mk_exists(std::string var, FormulaPtr body) {
    auto n = node(Formula::Kind::Exists);
    n->var = std::move(var);
    n->body = std::move(body);
    return n;
}

FormulaPtr mk_forall(std::string var, FormulaPtr body) {
    auto n = node(Formula::Kind::ForAll);
    n->var = std::move(var);
    n->body = std::move(body);
    return n;
}

bool formula_equal(const FormulaPtr& a, const FormulaPtr& b) {
    if (a == b) return true;
    if (!a || !b || a->kind != b->kind) return false;
    switch (a->kind) {
        case Formula::Kind::True:
        case Formula::Kind::False:
            return true;
        case Formula::Kind::InputAtom:
            return a->rel == b->rel && a->terms == b->terms;
        case Formula::Kind::NumericAtom:
            return a->pred == b->pred && a->terms == b->terms;
        case Formula::Kind::Not:
            return formula_equal(a->lhs, b->lhs);
        case Formula::Kind::And:
        case Formula::Kind::Or:
            return formula_equal(a->lhs, b->lhs) && formula_equal(a->rhs, b->rhs);
        case Formula::Kind::Exists:
        case Formula::Kind::ForAll:
            return a->var == b->var && formula_equal(a->body, b->body);
    }
    return false;
}

// ---------------------------------------------------------------------------
// Lexer / parser
// ---------------------------------------------------------------------------

namespace {

struct Token {
    enum class Kind { Ident, Number, LParen, RParen, Comma, Eq, Le, Lt, Bang, Amp, Pipe, Dot, End };
    Kind kind = Kind::End;
    std::string_view text;
    long long number = 0;
    std::size_t pos = 0;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    Token peek() {
        if (!cached_) {
            cached_ = lex();
        }
        return *cached_;
    }

    Token next() {
        Token t = peek();
        cached_.reset();
        return t;
    }

    struct State {
        std::size_t pos;
    };
    State save() const { return {cached_ ? cached_->pos : pos_}; }
    void restore(State s) {
        pos_ = s.pos;
        cached_.reset();
    }

private:
    Token lex() {
        while (pos_ < src_.size() && std::isspace((unsigned char)src_[pos_])) ++pos_;
        Token t;
        t.pos = pos_;
        if (pos_ >= src_.size()) {
            t.kind = Token::Kind::End;
            return t;
        }
        char c = src_[pos_];
        auto single = [&](Token::Kind k) {
            t.kind = k;
            t.text = src_.substr(pos_, 1);
            ++pos_;
            return t;
        };
        switch (c) {
            case '(': return single(Token::Kind::LParen);
            case ')': return single(Token::Kind::RParen);
            case ',': return single(Token::Kind::Comma);
            case '=': return single(Token::Kind::Eq);
            case '!': return single(Token::Kind::Bang);
            case '&': return single(Token::Kind::Amp);
            case '|': return single(Token::Kind::Pipe);
            case '.': return single(Token::Kind::Dot);
            case '<':
                if (pos_ + 1 < src_.size() && src_[pos_ + 1] == '=') {
                    t.kind = Token::Kind::Le;
                    t.text = src_.substr(pos_, 2);
                    pos_ += 2;
                } else {
                    t.kind = Token::Kind::Lt;
                    t.text = src_.substr(pos_, 1);
                    ++pos_;
                }
                return t;
            default: break;
        }
        if (std::isdigit((unsigned char)c)) {
            std::size_t start = pos_;
            while (pos_ < src_.size() && std::isdigit((unsigned char)src_[pos_])) ++pos_;
            t.kind = Token::Kind::Number;
            t.text = src_.substr(start, pos_ - start);
            if (t.text.size() > 6) throw ParseError("numeral too large", start);
            t.number = std::stoll(std::string(t.text));
            return t;
        }
        if (std::isalpha((unsigned char)c) || c == '_') {
            std::size_t start = pos_;
            while (pos_ < src_.size() &&
                   (std::isalnum((unsigned char)src_[pos_]) || src_[pos_] == '_'))
                ++pos_;
            t.kind = Token::Kind::Ident;
            t.text = src_.substr(start, pos_ - start);
            return t;
        }
        throw ParseError(std::string("unexpected character '") + c + "'", pos_);
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    std::optional<Token> cached_;
};

constexpr long long kMaxNumeral = 4096;

class Parser {
public:
    Parser(std::string_view text, const Vocabulary& vocab) : lex_(text), vocab_(vocab) {}

    FormulaPtr run() {
        FormulaPtr f = parse_or();
        Token t = lex_.peek();
        if (t.kind != Token::Kind::End) throw ParseError("trailing input", t.pos);
        return f;
    }

private:
    FormulaPtr parse_or() {
        FormulaPtr f = parse_and();
        while (lex_.peek().kind == Token::Kind::Pipe) {
            lex_.next();
            f = mk_or(std::move(f), parse_and());
        }
        return f;
    }

    FormulaPtr parse_and() {
        FormulaPtr f = parse_unary();
        while (lex_.peek().kind == Token::Kind::Amp) {
            lex_.next();
            f = mk_and(std::move(f), parse_unary());
        }
        return f;
    }

    FormulaPtr parse_unary() {
        Token t = lex_.peek();
        if (t.kind == Token::Kind::Bang) {
            lex_.next();
            return mk_not(parse_unary());
        }
        if (t.kind == Token::Kind::LParen) {
            lex_.next();
            FormulaPtr f = parse_or();
            expect(Token::Kind::RParen, "expected ')'");
            return f;
        }
        if (t.kind == Token::Kind::Ident && (t.text == "E" || t.text == "A")) {
            // Quantifier if followed by IDENT "."; otherwise fall through and
            // treat the E/A as an ordinary identifier.
            auto mark = lex_.save();
            lex_.next();
            Token v = lex_.peek();
            if (v.kind == Token::Kind::Ident) {
                lex_.next();
                if (lex_.peek().kind == Token::Kind::Dot) {
                    lex_.next();
                    std::string var = check_var_name(v);
                    if (std::count(bound_.begin(), bound_.end(), var))
                        throw ParseError("quantifier shadows variable " + var, v.pos);
                    bound_.push_back(var);
                    FormulaPtr body = parse_or();
                    bound_.pop_back();
                    return t.text == "E" ? mk_exists(var, std::move(body))
                                         : mk_forall(var, std::move(body));
                }
            }
            lex_.restore(mark);
        }
        if (t.kind == Token::Kind::Ident && t.text == "true") {
            lex_.next();
            return mk_true();
        }
        if (t.kind == Token::Kind::Ident && t.text == "false") {
            lex_.next();
            return mk_false();
        }
        return parse_atom();
    }

    FormulaPtr parse_atom() {
        Token t = lex_.peek();
        if (t.kind == Token::Kind::Ident) {
            auto mark = lex_.save();
            lex_.next();
            if (lex_.peek().kind == Token::Kind::LParen) {
                lex_.next();
                std::vector<Term> terms;
                terms.push_back(parse_term());
                while (lex_.peek().kind == Token::Kind::Comma) {
                    lex_.next();
                    terms.push_back(parse_term());
                }
                expect(Token::Kind::RParen, "expected ')'");
                NumPred pred;
                if (lookup_num_pred(t.text, pred)) {
                    if ((int)terms.size() != num_pred_arity(pred))
                        throw ParseError("arity mismatch for " + std::string(t.text), t.pos);
                    return mk_num(pred, std::move(terms));
                }
                int arity = vocab_.arity_of(t.text);
                if (arity < 0) throw ParseError("unknown relation " + std::string(t.text), t.pos);
                if (arity != (int)terms.size())
                    throw ParseError("arity mismatch for relation " + std::string(t.text), t.pos);
                return mk_input(std::string(t.text), std::move(terms));
            }
            lex_.restore(mark);
        }
        // term (= | <= | <) ...
        Term lhs = parse_term();
        Token op = lex_.next();
        switch (op.kind) {
            case Token::Kind::Eq: {
                Token rhs = lex_.peek();
                if (rhs.kind == Token::Kind::Number) {
                    lex_.next();
                    return expand_numeral(lhs, rhs.number, rhs.pos);
                }
                return mk_num(NumPred::Eq, {lhs, parse_term()});
            }
            case Token::Kind::Le:
                return mk_num(NumPred::Le, {lhs, parse_term()});
            case Token::Kind::Lt:
                return mk_num(NumPred::Lt, {lhs, parse_term()});
            default:
                throw ParseError("expected '=', '<=' or '<'", op.pos);
        }
    }

    Term parse_term() {
        Token t = lex_.next();
        if (t.kind == Token::Kind::Number) {
            if (t.number == 0) return t_zero();
            if (t.number == 1) return t_one();
            throw ParseError("number literal only allowed on the right of '='", t.pos);
        }
        if (t.kind != Token::Kind::Ident) throw ParseError("expected term", t.pos);
        if (t.text == "max") return t_max();
        return t_var(check_var_name(t));
    }

    std::string check_var_name(const Token& t) {
        std::string name(t.text);
        if (name.rfind("_n", 0) == 0)
            throw ParseError("identifiers starting with _n are reserved", t.pos);
        if (name == "max" || name == "true" || name == "false" || name == "SUC" ||
            name == "PLUS" || name == "TIMES")
            throw ParseError("reserved word used as variable: " + name, t.pos);
        return name;
    }

    // term = N for N >= 2 expands to a successor chain. Each existential
    // wraps only its own link, E _n1 . SUC(1,_n1) & (E _n2 . SUC(_n1,_n2) &
    // ...), so evaluation walks the chain instead of the quantifier product.
    FormulaPtr expand_numeral(const Term& target, long long n, std::size_t pos) {
        if (n < 0 || n > kMaxNumeral) throw ParseError("numeral out of range", pos);
        if (n == 0) return mk_num(NumPred::Eq, {target, t_zero()});
        if (n == 1) return mk_num(NumPred::Eq, {target, t_one()});
        if (n == 2) return mk_num(NumPred::Suc, {t_one(), target});
        int k = (int)n - 2;
        std::vector<Term> chain;
        for (int i = 1; i <= k; ++i) chain.push_back(t_var("_n" + std::to_string(i)));
        FormulaPtr f = mk_num(NumPred::Suc, {chain[k - 1], target});
        for (int i = k - 1; i >= 0; --i) {
            Term prev = i == 0 ? t_one() : chain[i - 1];
            f = mk_exists(chain[i].name,
                          mk_and(mk_num(NumPred::Suc, {prev, chain[i]}), std::move(f)));
        }
        return f;
    }

    void expect(Token::Kind k, const char* msg) {
        Token t = lex_.next();
        if (t.kind != k) throw ParseError(msg, t.pos);
    }

    Lexer lex_;
    const Vocabulary& vocab_;
    std::vector<std::string> bound_;
};

}  // namespace

FormulaPtr parse_formula(std::string_view text, const Vocabulary& vocab) {
    return Parser(text, vocab).run();
}

// ---------------------------------------------------------------------------
// Printer
// ---------------------------------------------------------------------------

namespace {

// Recognizes the canonical successor-chain expansion and recovers (term, N).
std::optional<std::pair<Term, long long>> match_numeral(const FormulaPtr& f) {
    auto is_suc = [](const FormulaPtr& g) {
        return g->kind == Formula::Kind::NumericAtom && g->pred == NumPred::Suc;
    };
    auto is_chain_var = [](const Term& t) {
        return t.kind == Term::Kind::Var && t.name.rfind("_n", 0) == 0;
    };
    if (is_suc(f) && f->terms[0] == t_one()) {
        if (is_chain_var(f->terms[1])) return std::nullopt;
        return std::make_pair(f->terms[1], 2ll);
    }
    // E _n1 . SUC(prev,_n1) & (E _n2 . SUC(_n1,_n2) & ... & SUC(_nK, target))
    if (f->kind != Formula::Kind::Exists) return std::nullopt;
    Term prev = t_one();
    FormulaPtr cur = f;
    long long links = 0;
    while (cur->kind == Formula::Kind::Exists) {
        if (cur->var != "_n" + std::to_string(links + 1)) return std::nullopt;
        if (cur->body->kind != Formula::Kind::And) return std::nullopt;
        const FormulaPtr& link = cur->body->lhs;
        if (!is_suc(link) || !(link->terms[0] == prev) ||
            !(link->terms[1] == t_var(cur->var)))
            return std::nullopt;
        prev = t_var(cur->var);
        cur = cur->body->rhs;
        ++links;
    }
    if (!is_suc(cur) || !(cur->terms[0] == prev)) return std::nullopt;
    Term target = cur->terms[1];
    if (is_chain_var(target)) return std::nullopt;
    return std::make_pair(target, links + 2);
}

std::string print_top(const FormulaPtr& f);

bool is_atom_like(const FormulaPtr& f) {
    return f->kind == Formula::Kind::True || f->kind == Formula::Kind::False ||
           f->kind == Formula::Kind::InputAtom || f->kind == Formula::Kind::NumericAtom ||
           match_numeral(f).has_value();
}

void flatten_left(const FormulaPtr& f, Formula::Kind k, std::vector<FormulaPtr>& out) {
    // Only the left spine: right-nested nodes keep their parentheses so the
    // printed text reparses to an identical tree.
    if (f->kind == k) {
        flatten_left(f->lhs, k, out);
        out.push_back(f->rhs);
    } else {
        out.push_back(f);
    }
}

std::string print_operand(const FormulaPtr& f, bool allow_not) {
    if (is_atom_like(f)) return print_top(f);
    if (allow_not && f->kind == Formula::Kind::Not) return print_top(f);
    return "(" + print_top(f) + ")";
}

std::string print_atom(const FormulaPtr& f) {
    if (auto sugar = match_numeral(f))
        return term_text(sugar->first) + "=" + std::to_string(sugar->second);
    if (f->kind == Formula::Kind::InputAtom || f->pred == NumPred::Suc ||
        f->pred == NumPred::Plus || f->pred == NumPred::Times) {
        std::string name =
            f->kind == Formula::Kind::InputAtom ? f->rel : num_pred_name(f->pred);
        std::string out = name + "(";
        for (std::size_t i = 0; i < f->terms.size(); ++i) {
            if (i) out += ",";
            out += term_text(f->terms[i]);
        }
        return out + ")";
    }
    return term_text(f->terms[0]) + num_pred_name(f->pred) + term_text(f->terms[1]);
}

std::string print_top(const FormulaPtr& f) {
    if (auto sugar = match_numeral(f))
        return term_text(sugar->first) + "=" + std::to_string(sugar->second);
    switch (f->kind) {
        case Formula::Kind::True: return "true";
        case Formula::Kind::False: return "false";
        case Formula::Kind::InputAtom:
        case Formula::Kind::NumericAtom:
            return print_atom(f);
        case Formula::Kind::Not:
            return "!" + (is_atom_like(f->lhs) ? print_top(f->lhs) : "(" + print_top(f->lhs) + ")");
        case Formula::Kind::And: {
            std::vector<FormulaPtr> parts;
            flatten_left(f, Formula::Kind::And, parts);
            std::string out;
            for (std::size_t i = 0; i < parts.size(); ++i) {
                if (i) out += " & ";
                out += print_operand(parts[i], /*allow_not=*/true);
            }
            return out;
        }
        case Formula::Kind::Or: {
            std::vector<FormulaPtr> parts;
            flatten_left(f, Formula::Kind::Or, parts);
            std::string out;
            for (std::size_t i = 0; i < parts.size(); ++i) {
                if (i) out += " | ";
                out += print_operand(parts[i], /*allow_not=*/false);
            }
            return out;
        }
        case Formula::Kind::Exists:
            return "E " + f->var + " . " + print_top(f->body);
        case Formula::Kind::ForAll:
            return "A " + f->var + " . " + print_top(f->body);
    }
    return "?";
}

}  // namespace

std::string print_formula(const FormulaPtr& f) { return print_top(f); }

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

namespace {

Elem resolve_term(const Term& t, const Env& env, Elem m) {
    switch (t.kind) {
        case Term::Kind::Zero: return 0;
        case Term::Kind::One: return 1;
        case Term::Kind::Max: return m - 1;
        case Term::Kind::Var:
            for (auto it = env.rbegin(); it != env.rend(); ++it)
                if (it->first == t.name) return it->second;
            throw EvalError("unbound variable " + t.name);
    }
    throw EvalError("bad term");
}

}  // namespace

bool eval(const FormulaPtr& f, const Structure& s, Env& env) {
    switch (f->kind) {
        case Formula::Kind::True: return true;
        case Formula::Kind::False: return false;
        case Formula::Kind::InputAtom: {
            Tuple t(f->terms.size());
            for (std::size_t i = 0; i < f->terms.size(); ++i)
                t[i] = resolve_term(f->terms[i], env, s.size);
            return s.holds(f->rel, t);
        }
        case Formula::Kind::NumericAtom: {
            std::array<Elem, 3> args{};
            for (std::size_t i = 0; i < f->terms.size(); ++i)
                args[i] = resolve_term(f->terms[i], env, s.size);
            return eval_numeric(f->pred, std::span<const Elem>(args.data(), f->terms.size()),
                                s.size);
        }
        case Formula::Kind::Not: return !eval(f->lhs, s, env);
        case Formula::Kind::And: return eval(f->lhs, s, env) && eval(f->rhs, s, env);
        case Formula::Kind::Or: return eval(f->lhs, s, env) || eval(f->rhs, s, env);
        case Formula::Kind::Exists: {
            for (Elem v = 0; v < s.size; ++v) {
                env.emplace_back(f->var, v);
                bool r = eval(f->body, s, env);
                env.pop_back();
                if (r) return true;
            }
            return false;
        }
        case Formula::Kind::ForAll: {
            for (Elem v = 0; v < s.size; ++v) {
                env.emplace_back(f->var, v);
                bool r = eval(f->body, s, env);
                env.pop_back();
                if (!r) return false;
            }
            return true;
        }
    }
    throw EvalError("bad formula node");
}

bool eval(const FormulaPtr& f, const Structure& s) {
    Env env;
    return eval(f, s, env);
}

bool is_numeric(const FormulaPtr& f) {
    switch (f->kind) {
        case Formula::Kind::InputAtom: return false;
        case Formula::Kind::True:
        case Formula::Kind::False:
        case Formula::Kind::NumericAtom:
            return true;
        case Formula::Kind::Not: return is_numeric(f->lhs);
        case Formula::Kind::And:
        case Formula::Kind::Or:
            return is_numeric(f->lhs) && is_numeric(f->rhs);
        case Formula::Kind::Exists:
        case Formula::Kind::ForAll:
            return is_numeric(f->body);
    }
    return true;
}

namespace {

void collect_free(const FormulaPtr& f, std::vector<std::string>& bound,
                  std::set<std::string>& out) {
    switch (f->kind) {
        case Formula::Kind::InputAtom:
        case Formula::Kind::NumericAtom:
            for (const auto& t : f->terms)
                if (t.kind == Term::Kind::Var &&
                    !std::count(bound.begin(), bound.end(), t.name))
                    out.insert(t.name);
            break;
        case Formula::Kind::Not:
            collect_free(f->lhs, bound, out);
            break;
        case Formula::Kind::And:
        case Formula::Kind::Or:
            collect_free(f->lhs, bound, out);
            collect_free(f->rhs, bound, out);
            break;
        case Formula::Kind::Exists:
        case Formula::Kind::ForAll:
            bound.push_back(f->var);
            collect_free(f->body, bound, out);
            bound.pop_back();
            break;
        default:
            break;
    }
}

}  // namespace

std::set<std::string> free_vars(const FormulaPtr& f) {
    std::set<std::string> out;
    std::vector<std::string> bound;
    collect_free(f, bound, out);
    return out;
}

// ---------------------------------------------------------------------------
// Projection classification and mutual exclusion
// ---------------------------------------------------------------------------

namespace {

void flatten_all(const FormulaPtr& f, Formula::Kind k, std::vector<FormulaPtr>& out) {
    if (f->kind == k) {
        flatten_all(f->lhs, k, out);
        flatten_all(f->rhs, k, out);
    } else {
        out.push_back(f);
    }
}

}  // namespace

std::vector<FormulaPtr> ProjectionForm::all_guards() const {
    std::vector<FormulaPtr> out = alpha0;
    for (const auto& g : guarded) out.push_back(g.alpha);
    return out;
}

ProjectionForm classify_projection(const FormulaPtr& f) {
    ProjectionForm form;
    std::vector<FormulaPtr> disjuncts;
    flatten_all(f, Formula::Kind::Or, disjuncts);
    for (const auto& d : disjuncts) {
        std::vector<FormulaPtr> conjuncts;
        flatten_all(d, Formula::Kind::And, conjuncts);
        std::vector<InputLiteral> literals;
        std::vector<FormulaPtr> numeric_parts;
        for (const auto& c : conjuncts) {
            if (c->kind == Formula::Kind::InputAtom) {
                literals.push_back({true, c->rel, c->terms});
            } else if (c->kind == Formula::Kind::Not &&
                       c->lhs->kind == Formula::Kind::InputAtom) {
                literals.push_back({false, c->lhs->rel, c->lhs->terms});
            } else if (is_numeric(c)) {
                numeric_parts.push_back(c);
            } else {
                throw NotProjectiveError(
                    "input relation symbol occurs under a quantifier or disjunction",
                    print_formula(c));
            }
        }
        if (literals.size() > 1)
            throw NotProjectiveError("disjunct contains more than one input literal",
                                     print_formula(d));
        if (literals.empty()) {
            form.alpha0.push_back(d);
        } else {
            FormulaPtr alpha;
            for (const auto& c : numeric_parts)
                alpha = alpha ? mk_and(std::move(alpha), c) : c;
            if (!alpha) alpha = mk_true();
            form.guarded.push_back({std::move(alpha), literals[0]});
        }
    }
    return form;
}

namespace {

struct ExclusionScan {
    bool found = false;
    std::uint64_t index = 0;
    int gi = -1, gj = -1;
};

// Exhaustive scan over {0..m-1}^vars in lexicographic order, organized as a
// depth-first walk that checks each guard conjunct as soon as its last
// variable is bound. A subtree is skipped once fewer than two guards are
// still alive there — no assignment below it can satisfy two guards — so
// coverage of the full space is preserved while most of it is never
// visited. The first counterexample found is the lexicographically first
// one, the same answer a flat scan gives.
class ExclusionWalk {
public:
    ExclusionWalk(const std::vector<FormulaPtr>& guards, const std::vector<std::string>& vars,
                  const Structure& dummy)
        : guards_(guards), vars_(vars), dummy_(dummy) {
        buckets_.resize(guards.size());
        for (std::size_t g = 0; g < guards.size(); ++g) {
            buckets_[g].resize(vars.size() + 1);
            std::vector<FormulaPtr> conjuncts;
            flatten_all(guards[g], Formula::Kind::And, conjuncts);
            for (const auto& c : conjuncts) {
                int level = -1;
                for (const auto& fv : free_vars(c)) {
                    auto it = std::find(vars.begin(), vars.end(), fv);
                    if (it != vars.end())
                        level = std::max(level, (int)(it - vars.begin()));
                }
                buckets_[g][(std::size_t)(level + 1)].push_back(c);
            }
        }
    }

    // Scans the subtrees rooted at var0 values [lo, hi).
    ExclusionScan run(Elem lo, Elem hi) {
        env_.clear();
        std::vector<int> alive;
        for (std::size_t g = 0; g < guards_.size(); ++g) {
            bool ok = true;
            for (const auto& c : buckets_[g][0])
                if (!eval(c, dummy_, env_)) {
                    ok = false;
                    break;
                }
            if (ok) alive.push_back((int)g);
        }
        lo_ = lo;
        hi_ = hi;
        result_ = {};
        descend(0, alive);
        return result_;
    }

private:
    void descend(std::size_t depth, const std::vector<int>& alive) {
        if (result_.found || alive.size() < 2) return;
        if (depth == vars_.size()) {
            result_.found = true;
            result_.gi = alive[0];
            result_.gj = alive[1];
            std::uint64_t idx = 0;
            for (const auto& [name, value] : env_) idx = idx * (std::uint64_t)dummy_.size + (std::uint64_t)value;
            result_.index = idx;
            return;
        }
        Elem first = depth == 0 ? lo_ : 0;
        Elem last = depth == 0 ? hi_ : dummy_.size;
        for (Elem v = first; v < last && !result_.found; ++v) {
            env_.emplace_back(vars_[depth], v);
            std::vector<int> next;
            for (int g : alive) {
                bool ok = true;
                for (const auto& c : buckets_[(std::size_t)g][depth + 1])
                    if (!eval(c, dummy_, env_)) {
                        ok = false;
                        break;
                    }
                if (ok) next.push_back(g);
            }
            descend(depth + 1, next);
            env_.pop_back();
        }
    }

    const std::vector<FormulaPtr>& guards_;
    const std::vector<std::string>& vars_;
    const Structure& dummy_;
    std::vector<std::vector<std::vector<FormulaPtr>>> buckets_;  // [guard][level]
    Env env_;
    Elem lo_ = 0, hi_ = 0;
    ExclusionScan result_;
};

}  // namespace

ExclusionResult check_mutual_exclusion(const ProjectionForm& p, Elem m, std::uint64_t budget,
                                       int jobs) {
    ExclusionResult res;
    std::vector<FormulaPtr> guards = p.all_guards();
    std::set<std::string> var_set;
    for (const auto& g : guards)
        for (const auto& v : free_vars(g)) var_set.insert(v);
    std::vector<std::string> vars(var_set.begin(), var_set.end());

    // m^v, saturating against the budget.
    std::uint64_t space = 1;
    for (std::size_t i = 0; i < vars.size(); ++i) {
        if (space > budget / (std::uint64_t)m + 1) {
            space = budget + 1;
            break;
        }
        space *= (std::uint64_t)m;
    }
    if (space > budget) {
        res.status = ExclusionResult::Status::Undecided;
        return res;
    }

    Structure dummy;
    dummy.size = m;
    dummy.base = m;

    int threads = std::max(1, jobs);
    if (vars.empty()) threads = 1;
    threads = (int)std::min<Elem>((Elem)threads, m);
    ExclusionScan best;
    if (threads <= 1) {
        ExclusionWalk walk(guards, vars, dummy);
        best = walk.run(0, vars.empty() ? 0 : m);
    } else {
        // Split the outermost variable's range; each worker's first hit is
        // the first in its slice, so the minimum index is the global first.
        std::vector<std::future<ExclusionScan>> futs;
        Elem chunk = (m + threads - 1) / threads;
        for (int t = 0; t < threads; ++t) {
            Elem lo = (Elem)t * chunk, hi = std::min<Elem>(m, lo + chunk);
            if (lo >= hi) break;
            futs.push_back(std::async(std::launch::async, [&, lo, hi] {
                ExclusionWalk walk(guards, vars, dummy);
                return walk.run(lo, hi);
            }));
        }
        for (auto& f : futs) {
            ExclusionScan r = f.get();
            if (r.found && (!best.found || r.index < best.index)) best = r;
        }
    }

    if (best.found) {
        res.status = ExclusionResult::Status::Counterexample;
        res.guard_i = best.gi;
        res.guard_j = best.gj;
        res.assignments_checked = best.index + 1;
        std::uint64_t r = best.index;
        std::vector<Elem> digits(vars.size(), 0);
        for (std::size_t i = vars.size(); i-- > 0;) {
            digits[i] = (Elem)(r % (std::uint64_t)m);
            r /= (std::uint64_t)m;
        }
        for (std::size_t i = 0; i < vars.size(); ++i) res.assignment[vars[i]] = digits[i];
    } else {
        res.status = ExclusionResult::Status::Ok;
        res.assignments_checked = space;
    }
    return res;
}

}  // namespace fopforge
