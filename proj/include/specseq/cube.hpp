#pragma once

#include "reduce.hpp"

#include <array>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace specseq {

/// Codes are words over {a, b, c} (or the {a, b} restriction).  The cyclic
/// successor order is a < b < c < a; betweenness, chains and assembly use
/// the fixed componentwise linearization a < b < c, under which both the
/// full cube and {a,b}^n are complete and every chain is strictly
/// increasing.  Relabelling which framing plays the role of `a` is the
/// caller's responsibility.
namespace cube {

using code = std::string;

enum class alphabet { ab, abc };

inline int letter_ord(char l) {
    switch (l) {
        case 'a': return 0;
        case 'b': return 1;
        case 'c': return 2;
        default: throw error(std::string("invalid code letter '") + l + "'");
    }
}

inline void check_code(const code& c, alphabet al) {
    for (char l : c) {
        int o = letter_ord(l);
        if (al == alphabet::ab && o > 1) throw error("letter 'c' in a two-letter code: " + c);
    }
}

inline int weight(const code& c, const std::array<int, 3>& letter_weight = {0, 1, 2}) {
    int w = 0;
    for (char l : c) w += letter_weight[static_cast<std::size_t>(letter_ord(l))];
    return w;
}

/// One cyclic step a -> b -> c -> a per position; in the {a,b} restriction
/// positions at b have no successor.
inline std::vector<code> immediate_successors(const code& c, alphabet al = alphabet::abc) {
    check_code(c, al);
    std::vector<code> out;
    for (std::size_t p = 0; p < c.size(); ++p) {
        code next = c;
        if (al == alphabet::ab) {
            if (c[p] != 'a') continue;
            next[p] = 'b';
        } else {
            next[p] = c[p] == 'a' ? 'b' : c[p] == 'b' ? 'c' : 'a';
        }
        out.push_back(std::move(next));
    }
    return out;
}

/// True when s is an immediate successor of c in the increasing order
/// (one position advances a -> b or b -> c; no wraparound).
inline bool is_increasing_successor(const code& c, const code& s) {
    if (c.size() != s.size()) return false;
    int changed = 0;
    for (std::size_t p = 0; p < c.size(); ++p) {
        if (c[p] == s[p]) continue;
        if (letter_ord(s[p]) != letter_ord(c[p]) + 1) return false;
        ++changed;
    }
    return changed == 1;
}

/// All chains i = I^0 < I^1 < ... < I^k = j of immediate successors in the
/// componentwise order; empty when j is not reachable.  For i = j the
/// single length-0 chain [i] is returned.
inline std::vector<std::vector<code>> successor_sequences(const code& i, const code& j) {
    if (i.size() != j.size()) throw error("successor_sequences: code lengths differ");
    for (std::size_t p = 0; p < i.size(); ++p)
        if (letter_ord(j[p]) < letter_ord(i[p])) return {};
    std::vector<std::vector<code>> out;
    std::vector<code> chain{i};
    auto recurse = [&](auto&& self, const code& cur) -> void {
        if (cur == j) {
            out.push_back(chain);
            return;
        }
        for (std::size_t p = 0; p < cur.size(); ++p) {
            if (cur[p] == j[p]) continue;
            code next = cur;
            next[p] = static_cast<char>('a' + letter_ord(cur[p]) + 1);
            chain.push_back(next);
            self(self, next);
            chain.pop_back();
        }
    };
    recurse(recurse, i);
    return out;
}

struct code_set {
    std::set<code> codes;
    alphabet al = alphabet::abc;

    static code_set full(std::size_t n, alphabet al) {
        code_set s;
        s.al = al;
        const std::string letters = al == alphabet::ab ? "ab" : "abc";
        code c(n, 'a');
        auto recurse = [&](auto&& self, std::size_t p) -> void {
            if (p == n) {
                s.codes.insert(c);
                return;
            }
            for (char l : letters) {
                c[p] = l;
                self(self, p + 1);
            }
        };
        recurse(recurse, 0);
        return s;
    }
};

struct completeness_witness {
    bool complete = true;
    code i, k, j; // i, j in the set, k between them but missing
};

/// Complete iff for all I <= K <= J (componentwise in a < b < c) with
/// I, J in S, also K in S.
inline completeness_witness is_complete(const code_set& s) {
    completeness_witness w;
    if (s.codes.empty()) return w;
    std::size_t n = s.codes.begin()->size();
    for (const code& c : s.codes)
        if (c.size() != n) throw error("code set mixes lengths");
    for (const code& i : s.codes)
        for (const code& j : s.codes) {
            bool leq = true;
            for (std::size_t p = 0; p < n; ++p)
                if (letter_ord(i[p]) > letter_ord(j[p])) {
                    leq = false;
                    break;
                }
            if (!leq) continue;
            // walk the box between i and j
            code k = i;
            auto recurse = [&](auto&& self, std::size_t p) -> bool {
                if (p == n) {
                    if (!s.codes.count(k)) {
                        w.complete = false;
                        w.i = i;
                        w.k = k;
                        w.j = j;
                        return false;
                    }
                    return true;
                }
                for (int o = letter_ord(i[p]); o <= letter_ord(j[p]); ++o) {
                    k[p] = static_cast<char>('a' + o);
                    if (!self(self, p + 1)) return false;
                }
                k[p] = i[p];
                return true;
            };
            if (!recurse(recurse, 0)) return w;
        }
    return w;
}

/// Vertex complexes indexed by codes plus the per-successor-sequence maps
/// D_{I^0...I^k}.  Sequences of length 0 are the vertex differentials and
/// are stored in the vertices themselves; absent sequences are zero maps.
struct cube_complex {
    std::size_t n = 0;
    alphabet al = alphabet::abc;
    std::map<code, filtered_complex> vertices;
    std::map<std::vector<code>, sparse_matrix> seq_maps;

    void check() const {
        for (const auto& [c, v] : vertices) {
            if (c.size() != n) throw error("vertex code length mismatch: " + c);
            check_code(c, al);
        }
        for (const auto& [seq, m] : seq_maps) {
            if (seq.size() < 2) throw error("successor sequence must contain at least two codes");
            for (std::size_t k = 0; k + 1 < seq.size(); ++k)
                if (!is_increasing_successor(seq[k], seq[k + 1]))
                    throw error("sequence step " + seq[k] + " -> " + seq[k + 1] +
                                " is not an increasing immediate successor");
            auto src = vertices.find(seq.front());
            auto tgt = vertices.find(seq.back());
            if (src == vertices.end() || tgt == vertices.end())
                throw error("sequence endpoints missing vertex complexes");
            if (m.rows() != tgt->second.size() || m.cols() != src->second.size())
                throw error("map for sequence " + seq.front() + ".." + seq.back() +
                            " has mismatched dimensions");
        }
    }
};

struct assembly_options {
    /// Per-letter filtration weights (negated in the assembled complex so
    /// the differential lowers filtration).  The default counts b once and
    /// c twice per component; only the b-count matters on {a,b}^n.
    std::array<int, 3> letter_weight = {0, 1, 2};
    /// Constant added to every assembled degree (the assembled degree of a
    /// generator is its vertex degree + degree_base - weight(code)).
    int degree_base = 0;
};

struct assembly_error : error {
    assembly_error(std::string msg, sparse_matrix defect_,
                   std::vector<std::pair<code, code>> pairs)
        : error(std::move(msg)), defect(std::move(defect_)), code_pairs(std::move(pairs)) {}
    sparse_matrix defect;
    std::vector<std::pair<code, code>> code_pairs;
};

struct assembly_result {
    filtered_complex complex;
    std::vector<code> order;                       // codes in assembled order
    std::map<code, std::pair<index_t, index_t>> span; // code -> (offset, size)

    const code& code_of(index_t gen) const {
        for (std::size_t k = 0; k < order.size(); ++k) {
            auto [off, sz] = span.at(order[k]);
            if (gen >= off && gen < off + sz) return order[k];
        }
        throw error("generator index out of range");
    }
};

/// Flattens the cube over a complete subset S: one generator `code/id` per
/// vertex generator, differential = vertex differentials plus the sum of
/// all supplied successor-sequence maps supported inside S.  D^2 = 0 is
/// checked, never assumed; a nonzero square raises assembly_error with the
/// defect matrix and the offending code pairs.
inline assembly_result assemble(const cube_complex& cc, const code_set& s,
                                const assembly_options& opts = {}) {
    cc.check();
    if (s.codes.empty()) {
        return {filtered_complex::empty(cc.vertices.empty() ? fp_field(2)
                                                            : cc.vertices.begin()->second.field),
                {},
                {}};
    }
    bool full = s.codes.size() ==
                static_cast<std::size_t>(std::pow(s.al == alphabet::ab ? 2.0 : 3.0,
                                                  static_cast<double>(cc.n)));
    if (!full) {
        auto w = is_complete(s);
        if (!w.complete)
            throw error("assemble: code set is not complete; " + w.k + " lies between " + w.i +
                        " and " + w.j);
    }

    assembly_result out{filtered_complex::empty(cc.vertices.begin()->second.field), {}, {}};
    const fp_field field = cc.vertices.begin()->second.field;

    index_t total = 0;
    for (const code& c : s.codes) { // std::set iterates in lexicographic order
        auto it = cc.vertices.find(c);
        if (it == cc.vertices.end()) throw error("assemble: no vertex complex for code " + c);
        out.order.push_back(c);
        out.span[c] = {total, it->second.size()};
        total += it->second.size();
    }

    std::vector<generator> gens;
    gens.reserve(static_cast<std::size_t>(total));
    matrix_builder dm(field, total, total);
    for (const code& c : out.order) {
        const filtered_complex& v = cc.vertices.at(c);
        const int w = weight(c, opts.letter_weight);
        auto [off, sz] = out.span[c];
        for (const auto& g : v.gens) {
            generator ng = g;
            ng.id = c + "/" + g.id;
            ng.degree = g.degree + opts.degree_base - w;
            ng.filtration = g.filtration - w;
            gens.push_back(std::move(ng));
        }
        dm.add_block(off, off, v.d);
    }
    for (const auto& [seq, m] : cc.seq_maps) {
        bool inside = true;
        for (const code& c : seq) inside = inside && s.codes.count(c) > 0;
        if (!inside) continue;
        dm.add_block(out.span[seq.back()].first, out.span[seq.front()].first, m);
    }
    out.complex = filtered_complex{field, std::move(gens), dm.build()};

    sparse_matrix d2 = out.complex.d * out.complex.d;
    if (!d2.is_zero()) {
        std::set<std::pair<code, code>> pairs;
        for (const auto& e : d2.entries())
            pairs.insert({out.code_of(e.col), out.code_of(e.row)});
        throw assembly_error("assemble: D^2 != 0 (supplied maps do not satisfy the cancellation identities)",
                             d2, {pairs.begin(), pairs.end()});
    }
    return out;
}

/// Splits an assembled complex along a code predicate into a subcomplex
/// (codes satisfying `in_sub`) and the quotient, verifying that the
/// differential never leaves the subcomplex.
struct sub_quotient_result {
    filtered_complex sub;
    filtered_complex quotient;
    bool is_subcomplex = false;
};

template <typename Pred>
sub_quotient_result split_sub_quotient(const assembly_result& a, Pred in_sub) {
    std::vector<index_t> sub_idx, quo_idx;
    std::vector<bool> in(static_cast<std::size_t>(a.complex.size()), false);
    for (const code& c : a.order) {
        auto [off, sz] = a.span.at(c);
        bool s = in_sub(c);
        for (index_t k = off; k < off + sz; ++k) {
            (s ? sub_idx : quo_idx).push_back(k);
            in[k] = s;
        }
    }
    bool closed = true;
    for (const auto& e : a.complex.d.entries())
        if (in[e.col] && !in[e.row]) closed = false;

    auto restrict_to = [&](const std::vector<index_t>& idx) {
        std::vector<generator> gens;
        for (index_t k : idx) gens.push_back(a.complex.gens[k]);
        return filtered_complex{a.complex.field, std::move(gens), a.complex.d.select(idx, idx)};
    };
    return {restrict_to(sub_idx), restrict_to(quo_idx), closed};
}

struct cube_pages_result {
    assembly_result assembled;
    pages_result pages;
    bool e1_matches_vertex_homology = false;
    bool d1_supported_on_successors = false;
};

/// Pages of the flattened cube over the full code set, with the extra
/// E^1 checks: page-1 survivors per code match the vertex homology and
/// d_1 is supported only on immediate-successor pairs.
inline cube_pages_result pages_of_cube(const cube_complex& cc, const assembly_options& opts = {},
                                       int max_r = -1) {
    code_set full = code_set::full(cc.n, cc.al);
    cube_pages_result out{assemble(cc, full, opts), {}, false, false};
    pages_options popts;
    popts.max_r = max_r;
    popts.track_witnesses = false;
    out.pages = compute_pages(out.assembled.complex, popts);

    const page_data& e1 = out.pages.pages.size() > 1 ? out.pages.pages[1] : out.pages.pages[0];
    // survivors per (code, degree) against vertex homology
    std::map<code, std::map<int, index_t>> by_code;
    for (const auto& g : e1.survivors) {
        auto slash = g.id.find('/');
        by_code[g.id.substr(0, slash)][g.degree]++;
    }
    bool match = true;
    for (const code& c : out.assembled.order) {
        const filtered_complex& v = cc.vertices.at(c);
        const int w = weight(c, opts.letter_weight);
        std::map<int, index_t> expect;
        for (const auto& [deg, r] : homology_ranks(v)) expect[deg + opts.degree_base - w] = r;
        std::map<int, index_t> got;
        if (auto it = by_code.find(c); it != by_code.end()) got = it->second;
        if (expect != got) match = false;
    }
    out.e1_matches_vertex_homology = match;

    // d1 support: only between immediate-successor code pairs
    bool support_ok = true;
    std::map<std::string, code> code_of_id;
    for (const auto& g : e1.survivors) code_of_id[g.id] = g.id.substr(0, g.id.find('/'));
    for (const auto& e : e1.dr.entries()) {
        const code& from = code_of_id[e1.survivors[e.col].id];
        const code& to = code_of_id[e1.survivors[e.row].id];
        if (!is_increasing_successor(from, to)) support_ok = false;
    }
    out.d1_supported_on_successors = support_ok;
    return out;
}

} // namespace cube
} // namespace specseq
