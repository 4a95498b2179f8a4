#include "fopforge/problems.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "fopforge/reductions.hpp"

namespace fopforge {

std::vector<std::string> validate_cnf3(const Cnf3Instance& c) {
    std::vector<std::string> out;
    if (c.n < 2) out.push_back("fewer than 2 variables");
    if ((Elem)c.clauses.size() != c.n)
        out.push_back("clause count " + std::to_string(c.clauses.size()) + " != variable count " +
                      std::to_string(c.n));
    for (std::size_t i = 0; i < c.clauses.size(); ++i) {
        const auto& cl = c.clauses[i];
        std::set<Literal> distinct(cl.begin(), cl.end());
        if (cl.size() != 3 || distinct.size() != 3)
            out.push_back("clause " + std::to_string(i) + ": needs exactly 3 distinct literals");
        for (const Literal& l : cl)
            if (l.var < 0 || l.var >= c.n)
                out.push_back("clause " + std::to_string(i) + ": variable index out of range");
    }
    return out;
}

std::vector<Elem> SubsetSumInstance::nonzero_ids() const {
    std::vector<Elem> out;
    for (std::size_t i = 0; i < sizes.size(); ++i)
        if (sizes[i] != 0) out.push_back((Elem)i);
    return out;
}

std::vector<Elem> PartitionInstance::nonzero_ids() const {
    std::vector<Elem> out;
    for (std::size_t i = 0; i < sizes.size(); ++i)
        if (sizes[i] != 0) out.push_back((Elem)i);
    return out;
}

BigNat PartitionInstance::total() const {
    BigNat t = 0;
    for (const auto& s : sizes) t += s;
    return t;
}

Structure encode_3sat(const Cnf3Instance& c) {
    auto violations = validate_cnf3(c);
    if (!violations.empty()) throw DomainError("invalid 3SAT instance: " + violations.front());
    std::set<Tuple> p, n;
    for (std::size_t i = 0; i < c.clauses.size(); ++i)
        for (const Literal& l : c.clauses[i])
            (l.neg ? n : p).insert(Tuple{l.var, (Elem)i});
    return make_structure(Vocabulary{{{"P", 2}, {"N", 2}}, {}}, c.n,
                          {{"P", std::move(p)}, {"N", std::move(n)}});
}

Structure encode_sat_permissive(Elem n, const std::vector<std::vector<Literal>>& clauses) {
    if (n < 2) throw DomainError("universe size must be >= 2");
    if (clauses.empty()) throw DomainError("no clauses");
    if ((Elem)clauses.size() > n) throw DomainError("more clauses than the universe size");
    std::set<Tuple> p, nn;
    for (std::size_t i = 0; i < clauses.size(); ++i) {
        if (clauses[i].empty()) throw DomainError("empty clause " + std::to_string(i));
        for (const Literal& l : clauses[i]) {
            if (l.var < 0 || l.var >= n) throw DomainError("variable index out of range");
            (l.neg ? nn : p).insert(Tuple{l.var, (Elem)i});
        }
    }
    // Pad with x_{n-1} v !x_{n-1} so no clause is empty.
    for (Elem i = (Elem)clauses.size(); i < n; ++i) {
        p.insert(Tuple{n - 1, i});
        nn.insert(Tuple{n - 1, i});
    }
    return make_structure(Vocabulary{{{"P", 2}, {"N", 2}}, {}}, n,
                          {{"P", std::move(p)}, {"N", std::move(nn)}});
}

SubsetSumInstance decode_subsetsum(const Structure& s) {
    SubsetSumInstance inst;
    inst.sizes.assign((std::size_t)s.size, BigNat(0));
    for (const auto& tup : s.relation("W"))
        bit_set(inst.sizes[(std::size_t)tup[0]], (unsigned)(s.size - 1 - tup[1]));
    inst.target = target_of(s);
    return inst;
}

PartitionInstance decode_partition(const Structure& s) {
    PartitionInstance inst;
    inst.sizes.assign((std::size_t)s.size, BigNat(0));
    for (const auto& tup : s.relation("T"))
        bit_set(inst.sizes[(std::size_t)tup[0]], (unsigned)(s.size - 1 - tup[1]));
    return inst;
}

Cnf3Instance parse_dimacs(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    Elem vars = -1;
    long long clause_count = -1;
    std::vector<std::vector<Literal>> clauses;
    std::vector<long long> pending;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::string first;
        if (!(ls >> first)) continue;
        if (first == "c" || first[0] == 'c') continue;
        if (first == "p") {
            std::string fmt;
            if (!(ls >> fmt >> vars >> clause_count) || fmt != "cnf")
                throw DomainError("bad DIMACS header at line " + std::to_string(line_no));
            continue;
        }
        if (vars < 0) throw DomainError("clause before DIMACS header");
        std::istringstream cs(line);
        long long lit;
        while (cs >> lit) {
            if (lit == 0) {
                std::vector<Literal> clause;
                std::set<Literal> distinct;
                for (long long l : pending) {
                    Elem v = (Elem)(l > 0 ? l : -l) - 1;
                    if (v >= vars)
                        throw DomainError("literal exceeds declared variable count in clause " +
                                          std::to_string(clauses.size()));
                    Literal parsed{v, l < 0};
                    clause.push_back(parsed);
                    distinct.insert(parsed);
                }
                if (clause.size() != 3 || distinct.size() != 3)
                    throw DomainError("clause " + std::to_string(clauses.size()) +
                                      ": needs exactly 3 distinct literals");
                std::sort(clause.begin(), clause.end());
                clauses.push_back(std::move(clause));
                pending.clear();
            } else {
                pending.push_back(lit);
            }
        }
    }
    if (!pending.empty()) throw DomainError("unterminated clause at end of input");
    if (vars < 0) throw DomainError("missing DIMACS header");
    if (clause_count != (long long)clauses.size())
        throw DomainError("header clause count " + std::to_string(clause_count) +
                          " != actual " + std::to_string(clauses.size()));
    return normalize_to_square(vars, std::move(clauses));
}

Cnf3Instance normalize_to_square(Elem vars, std::vector<std::vector<Literal>> clauses) {
    if (vars < 2) throw DomainError("cannot normalize: need at least 2 variables");
    Elem n = std::max<Elem>(vars, (Elem)clauses.size());
    while ((Elem)clauses.size() < n)
        clauses.push_back({Literal{0, false}, Literal{0, true}, Literal{1, false}});
    Cnf3Instance c;
    c.n = n;
    c.clauses = std::move(clauses);
    for (auto& cl : c.clauses) std::sort(cl.begin(), cl.end());
    auto violations = validate_cnf3(c);
    if (!violations.empty()) throw DomainError("normalization failed: " + violations.front());
    return c;
}

namespace {

// 3-subsets of the 2n literal codes (code = 2*var + neg), lexicographic.
std::vector<std::vector<Literal>> clause_universe(Elem n) {
    std::vector<std::vector<Literal>> out;
    Elem pool = 2 * n;
    for (Elem a = 0; a < pool; ++a)
        for (Elem b = a + 1; b < pool; ++b)
            for (Elem c = b + 1; c < pool; ++c)
                out.push_back({Literal{a / 2, a % 2 == 1}, Literal{b / 2, b % 2 == 1},
                               Literal{c / 2, c % 2 == 1}});
    return out;
}

void check_enum_n(Elem n) {
    if (n < 2 || n > 3)
        throw DomainError("exhaustive enumeration supports n in {2,3}, got " + std::to_string(n));
}

}  // namespace

std::uint64_t count_3sat(Elem n) {
    check_enum_n(n);
    std::uint64_t c = (std::uint64_t)clause_universe(n).size();
    std::uint64_t total = 1;
    for (Elem i = 0; i < n; ++i) total *= c;
    return total;
}

Cnf3Instance instance_3sat(Elem n, std::uint64_t index) {
    check_enum_n(n);
    auto universe = clause_universe(n);
    std::uint64_t c = (std::uint64_t)universe.size();
    std::uint64_t total = count_3sat(n);
    if (index >= total) throw DomainError("instance index out of range");
    Cnf3Instance inst;
    inst.n = n;
    inst.clauses.resize((std::size_t)n);
    for (Elem i = n; i-- > 0;) {
        inst.clauses[(std::size_t)i] = universe[(std::size_t)(index % c)];
        index /= c;
    }
    return inst;
}

std::vector<Cnf3Instance> enumerate_3sat(Elem n) {
    std::uint64_t total = count_3sat(n);
    std::vector<Cnf3Instance> out;
    out.reserve((std::size_t)total);
    for (std::uint64_t i = 0; i < total; ++i) out.push_back(instance_3sat(n, i));
    return out;
}

ImageFormReport is_rho1_image_form(const Structure& s) {
    ImageFormReport rep;
    auto fail = [&](std::string reason) {
        rep.ok = false;
        rep.reasons.push_back(std::move(reason));
    };

    const std::set<Tuple>* w = nullptr;
    if (s.vocab.arity_of("W") == 2 && s.vocab.arity_of("L") == 1) {
        w = &s.relation("W");
    } else {
        fail("vocabulary is not <W^2, L^1>");
        return rep;
    }

    // (b) size q^4
    Elem q = 0;
    for (Elem c = 2; c * c * c * c <= s.size; ++c)
        if (c * c * c * c == s.size) q = c;
    if (q == 0) {
        fail("(b) size is not q^4 for integer q >= 2");
        return rep;
    }

    std::set<Elem> nonzero_cols, diag_cols;
    std::map<Elem, Elem> col_sum;
    for (const auto& tup : *w) {
        nonzero_cols.insert(tup[1]);
        ++col_sum[tup[1]];
        if (tup[0] == tup[1]) diag_cols.insert(tup[1]);
    }

    // (a) column k nonzero iff W(k,k)
    if (nonzero_cols != diag_cols) fail("(a) nonzero columns do not coincide with W(k,k)");

    // (c) L matches the numeric target pattern for q
    std::set<Elem> expected_l;
    for (Elem j = 0; j < q; ++j) expected_l.insert(rho1_var_col(q, j));
    for (Elem i = 0; i < q; ++i) {
        expected_l.insert(rho1_clause_col(q, i));
        expected_l.insert(rho1_clause_col(q, i) - 1);
    }
    std::set<Elem> actual_l;
    for (const auto& tup : s.relation("L")) actual_l.insert(tup[0]);
    if (actual_l != expected_l) fail("(c) L does not match the target pattern for this size");

    // (d) column sums: 2 at variable columns, 5 at clause columns
    std::set<Elem> var_cols, clause_cols;
    for (Elem j = 0; j < q; ++j) var_cols.insert(rho1_var_col(q, j));
    for (Elem i = 0; i < q; ++i) clause_cols.insert(rho1_clause_col(q, i));
    for (Elem col : var_cols)
        if (col_sum[col] != 2)
            fail("(d) variable column " + std::to_string(col) + " sums to " +
                 std::to_string(col_sum[col]) + ", expected 2");
    for (Elem col : clause_cols)
        if (col_sum[col] != 5)
            fail("(d) clause column " + std::to_string(col) + " sums to " +
                 std::to_string(col_sum[col]) + ", expected 5");
    for (const auto& [col, sum] : col_sum)
        if (!var_cols.count(col) && !clause_cols.count(col) && sum > 0)
            fail("(d) unexpected nonzero column " + std::to_string(col));

    // (e) gaps of >= 3 zero columns between consecutive nonzero columns
    std::vector<Elem> sorted_cols(nonzero_cols.begin(), nonzero_cols.end());
    for (std::size_t i = 1; i < sorted_cols.size(); ++i)
        if (sorted_cols[i] - sorted_cols[i - 1] < 4)
            fail("(e) nonzero columns " + std::to_string(sorted_cols[i - 1]) + " and " +
                 std::to_string(sorted_cols[i]) + " are closer than 4 apart");

    return rep;
}

std::vector<int> digit_profile(const BigNat& value, std::span<const Elem> anchor_cols, Elem m) {
    std::vector<int> out;
    for (Elem col : anchor_cols) {
        unsigned shift = (unsigned)(m - 1 - col);
        BigNat window = (value >> shift) & 0xF;
        out.push_back((int)window.convert_to<unsigned>());
    }
    return out;
}

}  // namespace fopforge
