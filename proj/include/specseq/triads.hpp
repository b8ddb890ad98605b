#pragma once

#include "field.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <string>
#include <vector>

namespace specseq {
namespace triads {

using bigint = boost::multiprecision::cpp_int;

/// Primitive curve on the torus, as an integer homology class.
struct curve {
    bigint p = 0;
    bigint q = 0;
    bool operator==(const curve&) const = default;
    curve operator-() const { return {-p, -q}; }
    friend curve operator+(const curve& a, const curve& b) { return {a.p + b.p, a.q + b.q}; }
    std::string str() const { return "(" + p.str() + "," + q.str() + ")"; }
};

inline bigint intersection(const curve& a, const curve& b) { return a.p * b.q - a.q * b.p; }

/// [q1, q2, ..., qm] = q1 - 1/(q2 - 1/(...)); the convergents follow the
/// plus-sign normalization (q1, -q2, q3, -q4, ...) with seeds A0 = 1,
/// B0 = 0, recursion A_{i+1} = t_{i+1} A_i + A_{i-1} and the determinant
/// identity A_{i-1} B_i - B_{i-1} A_i = (-1)^{i-1}.
struct convergents {
    std::vector<bigint> a; // a[0] = A_0 = 1
    std::vector<bigint> b; // b[0] = B_0 = 0

    std::size_t count() const { return a.size(); }

    bool determinant_identity_holds() const {
        for (std::size_t i = 1; i < a.size(); ++i) {
            bigint det = a[i - 1] * b[i] - b[i - 1] * a[i];
            if (det != ((i - 1) % 2 == 0 ? 1 : -1)) return false;
        }
        return true;
    }
};

struct cf_value {
    bigint num = 0; // A_m
    bigint den = 0; // B_m (zero denotes the infinite framing)
    convergents table;
    /// 1-based positions j >= 2 whose tail [q_j, ..., q_m] evaluates to 0;
    /// at these the classical nested expression passes through infinity
    /// and the value is the projective one.
    std::vector<std::size_t> zero_tails;

    std::string str() const { return den == 0 ? num.str() + "/0" : num.str() + "/" + den.str(); }
};

inline bigint normalized_term(const std::vector<bigint>& terms, std::size_t i) { // 1-based
    bigint t = terms[i - 1];
    return (i % 2 == 0) ? -t : t;
}

/// Evaluates [q1, ..., qm] projectively, so tails passing through zero or
/// infinity are fine (the convergent recursion never reaches 0/0); the
/// positions of zero tails are reported in the result.
inline cf_value eval_cf(const std::vector<bigint>& terms) {
    if (terms.empty()) throw error("empty continued fraction");
    cf_value v;
    // tails evaluated backwards as projective fractions
    {
        bigint num = terms.back(), den = 1;
        for (std::size_t j = terms.size() - 1; j-- > 0;) {
            if (num == 0) v.zero_tails.push_back(j + 2);
            // [q_{j+1}, tail] = q_{j+1} - 1/tail = (q_{j+1} num - den) / num
            bigint nnum = terms[j] * num - den;
            den = num;
            num = nnum;
            if (num == 0 && den == 0) throw error("continued fraction reached 0/0");
        }
    }
    v.table.a = {1};
    v.table.b = {0};
    for (std::size_t i = 1; i <= terms.size(); ++i) {
        bigint t = normalized_term(terms, i);
        bigint prev_a = i >= 2 ? v.table.a[i - 2] : 0;
        bigint prev_b = i >= 2 ? v.table.b[i - 2] : 0;
        if (i == 1) {
            v.table.a.push_back(t); // A_1 = q_1
            v.table.b.push_back(1); // B_1 = 1
        } else {
            v.table.a.push_back(t * v.table.a[i - 1] + prev_a);
            v.table.b.push_back(t * v.table.b[i - 1] + prev_b);
        }
    }
    if (!v.table.determinant_identity_holds())
        throw error("convergent determinant identity failed (internal)");
    v.num = v.table.a.back();
    v.den = v.table.b.back();
    if (v.den < 0) {
        v.num = -v.num;
        v.den = -v.den;
    }
    return v;
}

/// Three oriented torus curves pairwise intersecting in the convention
/// value and summing to zero in homology.
struct framing_triad {
    curve a, b, c;
    bigint convention = 1; // +1 diagrammatic, -1 boundary-oriented

    bool valid() const {
        auto primitive = [](const curve& x) {
            if (x.p == 0 && x.q == 0) return false;
            return boost::multiprecision::gcd(boost::multiprecision::abs(x.p),
                                              boost::multiprecision::abs(x.q)) == 1;
        };
        return primitive(a) && primitive(b) && primitive(c) &&
               intersection(a, b) == convention && intersection(b, c) == convention &&
               intersection(c, a) == convention && (a + b + c == curve{0, 0});
    }
};

/// Two oriented curves with the right intersection number determine the
/// triad: the third curve is -a-b.
inline framing_triad complete_triad(const curve& a, const curve& b, const bigint& convention = 1) {
    framing_triad t;
    t.convention = convention;
    if (intersection(a, b) != convention)
        throw error("completeTriad: intersection number " + intersection(a, b).str() +
                    " differs from the convention value " + convention.str());
    t.a = a;
    t.b = b;
    t.c = -(a + b);
    if (!t.valid()) throw error("completeTriad: curves are not primitive");
    return t;
}

struct triad_from_fraction_result {
    cf_value value;
    framing_triad triad;
    /// the appended chain realizing the successive fillings
    /// (relative Kirby description): original terms then the appended ones
    std::vector<bigint> chain;
};

/// Builds the triad whose first curve is the continued-fraction framing
/// (A_m, B_m), by appending framed unknots to the chain.  The parity of m
/// selects the branch; the appended terms are (p, -1) for even m and
/// (-p, -1, +1) in normalized form for odd m, with the documented
/// orientation flip making the cyclic intersection pattern +1, +1, +1.
inline triad_from_fraction_result triad_from_fraction(const std::vector<bigint>& terms,
                                                      const bigint& p = -1) {
    triad_from_fraction_result out;
    out.value = eval_cf(terms);
    const std::size_t m = terms.size();
    const bigint am = out.value.table.a.back(), bm = out.value.table.b.back();
    const bigint am1 = out.value.table.a[m - 1]; // A_{m-1}, with A_0 = 1
    const bigint bm1 = out.value.table.b[m - 1];

    curve first{am, bm};
    curve second, third;
    out.chain = terms;
    if (m % 2 == 0) {
        // t_{m+1} = q_{m+1} = p, t_{m+2} = -q_{m+2} = +1 with q_{m+2} = -1
        second = {p * am + am1, p * bm + bm1};
        third = -curve{second.p + am, second.q + bm};
        out.chain.push_back(p);
        out.chain.push_back(-1);
    } else {
        // t_{m+1} = -q_{m+1} = -p: append q_{m+1} = p, then -1, +1
        second = {-p * am + am1, -p * bm + bm1};
        third = {-second.p + am, -second.q + bm};
        first = -first;
        out.chain.push_back(p);
        out.chain.push_back(-1);
        out.chain.push_back(-1);
    }
    out.triad.a = first;
    out.triad.b = second;
    out.triad.c = third;
    out.triad.convention = 1;
    if (!out.triad.valid())
        throw error("triadFromFraction: constructed curves fail the triad invariants");
    return out;
}

} // namespace triads
} // namespace specseq
