#pragma once

#include "sparse.hpp"

#include <map>
#include <set>
#include <string>
#include <vector>

namespace specseq {

struct generator {
    std::string id;
    int degree = 0;
    int filtration = 0;
    std::map<std::string, int> extra_gradings;

    bool operator==(const generator&) const = default;
};

/// Finitely generated free filtered chain complex.  Column j of the
/// differential is the boundary of generator j in the generator basis.
struct filtered_complex {
    fp_field field;
    std::vector<generator> gens;
    sparse_matrix d;

    filtered_complex() : field(2) {}

    filtered_complex(fp_field f, std::vector<generator> gs, sparse_matrix diff)
        : field(f), gens(std::move(gs)), d(std::move(diff)) {
        if (d.rows() != size() || d.cols() != size()) throw error("differential shape mismatch");
        if (d.field() != field) throw error("differential field mismatch");
    }

    static filtered_complex empty(fp_field f) { return {f, {}, sparse_matrix(f, 0, 0)}; }

    index_t size() const { return static_cast<index_t>(gens.size()); }

    index_t index_of(const std::string& id) const {
        for (index_t i = 0; i < size(); ++i)
            if (gens[i].id == id) return i;
        throw error("no generator with id '" + id + "'");
    }

    bool operator==(const filtered_complex& o) const {
        return field == o.field && gens == o.gens && d == o.d;
    }
};

struct validation_issue {
    enum kind_t { duplicate_id, degree_step, filtration_step, d_squared } kind;
    std::string detail;
};

struct validation_report {
    std::vector<validation_issue> issues;
    bool ok() const { return issues.empty(); }
    std::string text() const {
        if (ok()) return "pass";
        std::string s;
        for (const auto& i : issues) s += i.detail + "\n";
        return s;
    }
};

/// Violations are reported as data, not thrown.
/// check_degrees=false relaxes the homological-degree invariants; the
/// filtration and d^2 = 0 requirements are always checked.
inline validation_report validate(const filtered_complex& c, bool check_degrees = true) {
    validation_report rep;
    std::set<std::string> seen;
    for (const auto& g : c.gens)
        if (!seen.insert(g.id).second)
            rep.issues.push_back({validation_issue::duplicate_id, "duplicate generator id '" + g.id + "'"});

    for (const auto& e : c.d.entries()) {
        const generator& from = c.gens[e.col];
        const generator& to = c.gens[e.row];
        if (check_degrees && to.degree != from.degree - 1)
            rep.issues.push_back({validation_issue::degree_step,
                                  "<d " + from.id + ", " + to.id + "> nonzero but degree " +
                                      std::to_string(to.degree) + " != " + std::to_string(from.degree) + " - 1"});
        if (to.filtration > from.filtration)
            rep.issues.push_back({validation_issue::filtration_step,
                                  "<d " + from.id + ", " + to.id + "> nonzero but filtration rises " +
                                      std::to_string(from.filtration) + " -> " + std::to_string(to.filtration)});
    }

    sparse_matrix d2 = c.d * c.d;
    if (!d2.is_zero()) {
        auto es = d2.entries();
        rep.issues.push_back({validation_issue::d_squared,
                              "d^2 != 0: " + std::to_string(es.size()) + " nonzero entries, first at <d^2 " +
                                  c.gens[es[0].col].id + ", " + c.gens[es[0].row].id + ">"});
    }
    return rep;
}

inline void require_valid(const filtered_complex& c, bool check_degrees = true) {
    auto rep = validate(c, check_degrees);
    if (!rep.ok()) throw error("invalid complex:\n" + rep.text());
}

/// Ranks of homology per homological degree: dim ker d|_deg - rank d|_{deg+1}.
inline std::map<int, index_t> homology_ranks(const filtered_complex& c) {
    require_valid(c);
    std::map<int, std::vector<index_t>> by_degree;
    for (index_t i = 0; i < c.size(); ++i) by_degree[c.gens[i].degree].push_back(i);

    std::vector<index_t> all_rows(static_cast<std::size_t>(c.size()));
    for (index_t i = 0; i < c.size(); ++i) all_rows[i] = i;

    std::map<int, index_t> rank_of_block; // rank of d restricted to degree-d columns
    for (const auto& [deg, cols] : by_degree) rank_of_block[deg] = rank(c.d.select(all_rows, cols));

    std::map<int, index_t> result;
    for (const auto& [deg, cols] : by_degree) {
        index_t cycles = static_cast<index_t>(cols.size()) - rank_of_block[deg];
        index_t boundaries = 0;
        if (auto it = rank_of_block.find(deg + 1); it != rank_of_block.end()) boundaries = it->second;
        index_t h = cycles - boundaries;
        if (h != 0) result[deg] = h;
    }
    return result;
}

/// Total homology dimension, ignoring the grading (dim - 2 rank d).
inline index_t homology_total(const filtered_complex& c) {
    return c.size() - 2 * rank(c.d);
}

inline int euler_characteristic(const filtered_complex& c) {
    int chi = 0;
    for (const auto& g : c.gens) chi += (g.degree % 2 == 0) ? 1 : -1;
    return chi;
}

namespace detail {
/// Canonical id bijection for dualization: toggles a trailing '*'.
inline std::string dual_id(const std::string& id) {
    if (!id.empty() && id.back() == '*') return id.substr(0, id.size() - 1);
    return id + "*";
}
} // namespace detail

/// The dual complex: same generator set, negated gradings, transposed
/// differential ("reversing the arrows").  An involution up to the
/// canonical bijection x <-> x*.
inline filtered_complex dualize(const filtered_complex& c) {
    std::vector<generator> gens;
    gens.reserve(c.gens.size());
    for (const auto& g : c.gens) {
        generator gd;
        gd.id = detail::dual_id(g.id);
        gd.degree = -g.degree;
        gd.filtration = -g.filtration;
        for (const auto& [k, v] : g.extra_gradings) gd.extra_gradings[k] = -v;
        gens.push_back(std::move(gd));
    }
    return {c.field, std::move(gens), c.d.transpose()};
}

/// Degree shift: generator degrees increase by s, differential unchanged.
inline filtered_complex shift_degrees(const filtered_complex& c, int s) {
    filtered_complex out = c;
    for (auto& g : out.gens) g.degree += s;
    return out;
}

enum class map_convention { chain, anti_chain };

/// Degree-preserving map of filtered complexes.  Over GF(2) the convention
/// flag is moot; at odd p it records whether df = fd or df = -fd.
struct chain_map {
    filtered_complex source;
    filtered_complex target;
    sparse_matrix m;
    int filtration_shift = 0;
    map_convention convention = map_convention::chain;
};

inline validation_report validate(const chain_map& f) {
    validation_report rep;
    if (f.m.rows() != f.target.size() || f.m.cols() != f.source.size()) {
        rep.issues.push_back({validation_issue::d_squared, "chain map shape mismatch"});
        return rep;
    }
    for (const auto& e : f.m.entries()) {
        const generator& from = f.source.gens[e.col];
        const generator& to = f.target.gens[e.row];
        if (to.degree != from.degree)
            rep.issues.push_back({validation_issue::degree_step,
                                  "chain map entry " + from.id + " -> " + to.id + " changes degree"});
        if (to.filtration > from.filtration + f.filtration_shift)
            rep.issues.push_back({validation_issue::filtration_step,
                                  "chain map entry " + from.id + " -> " + to.id + " raises filtration"});
    }
    sparse_matrix lhs = f.target.d * f.m;
    sparse_matrix rhs = f.m * f.source.d;
    sparse_matrix defect =
        f.convention == map_convention::chain ? lhs - rhs : lhs + rhs;
    if (!defect.is_zero())
        rep.issues.push_back({validation_issue::d_squared, "chain map identity fails on " +
                                                               std::to_string(defect.nnz()) + " entries"});
    return rep;
}

inline void require_valid(const chain_map& f) {
    auto rep = validate(f);
    if (!rep.ok()) throw error("invalid chain map:\n" + rep.text());
}

/// Degree +1 map with a filtration order bound.
struct homotopy {
    filtered_complex source;
    filtered_complex target;
    sparse_matrix m;
    int order = 0;
};

inline validation_report validate(const homotopy& h) {
    validation_report rep;
    if (h.m.rows() != h.target.size() || h.m.cols() != h.source.size()) {
        rep.issues.push_back({validation_issue::d_squared, "homotopy shape mismatch"});
        return rep;
    }
    for (const auto& e : h.m.entries()) {
        const generator& from = h.source.gens[e.col];
        const generator& to = h.target.gens[e.row];
        if (to.degree != from.degree + 1)
            rep.issues.push_back({validation_issue::degree_step,
                                  "homotopy entry " + from.id + " -> " + to.id + " is not degree +1"});
        if (to.filtration > from.filtration + h.order)
            rep.issues.push_back({validation_issue::filtration_step,
                                  "homotopy entry " + from.id + " -> " + to.id + " exceeds order " +
                                      std::to_string(h.order)});
    }
    return rep;
}

namespace detail {

/// Cone of a matrix f between two complexes, with explicit degree offsets
/// for the two parts and no validity requirements.  The block differential
/// is [[dA, 0], [f, dB]].  Shared by mapping_cone, keylemma and cube code.
inline filtered_complex cone_from_matrix(const filtered_complex& a, const filtered_complex& b,
                                         const sparse_matrix& f, int a_degree_offset,
                                         const std::string& a_tag, const std::string& b_tag) {
    if (a.field != b.field) throw error("field mismatch in mapping cone");
    std::vector<generator> gens;
    gens.reserve(a.gens.size() + b.gens.size());
    for (const auto& g : a.gens) {
        generator ng = g;
        ng.id = a_tag + g.id;
        ng.degree += a_degree_offset;
        gens.push_back(std::move(ng));
    }
    for (const auto& g : b.gens) {
        generator ng = g;
        ng.id = b_tag + g.id;
        gens.push_back(std::move(ng));
    }
    matrix_builder dm(a.field, a.size() + b.size(), a.size() + b.size());
    dm.add_block(0, 0, a.d);
    dm.add_block(a.size(), 0, f);
    dm.add_block(a.size(), a.size(), b.d);
    return {a.field, std::move(gens), dm.build()};
}

} // namespace detail

/// Mapping cone of f : A -> B together with the short exact sequence
/// B -> MC(f) -> A realized by inclusion and projection.  A-part
/// generators sit one homological degree up, so the block differential
/// still lowers degree; cone filtrations are inherited unchanged.
struct cone_result {
    filtered_complex cone;
    chain_map incl;               // B -> cone, subcomplex inclusion
    chain_map proj;               // cone -> A with degrees shifted up by one
    index_t a_size;               // cone generators [0, a_size) form the A part
};

inline cone_result mapping_cone(const chain_map& f) {
    if (f.filtration_shift != 0) throw error("mapping cone requires a filtration shift of 0");
    require_valid(f);
    const filtered_complex& a = f.source;
    const filtered_complex& b = f.target;
    filtered_complex cone = detail::cone_from_matrix(a, b, f.m, +1, "a/", "b/");

    matrix_builder incl_m(a.field, cone.size(), b.size());
    for (index_t i = 0; i < b.size(); ++i) incl_m.add(a.size() + i, i, std::uint32_t(1));
    chain_map incl{b, cone, incl_m.build(), 0, f.convention};

    filtered_complex a_shifted = shift_degrees(a, +1);
    matrix_builder proj_m(a.field, a.size(), cone.size());
    for (index_t i = 0; i < a.size(); ++i) proj_m.add(i, i, std::uint32_t(1));
    chain_map proj{cone, a_shifted, proj_m.build(), 0, f.convention};

    return {std::move(cone), std::move(incl), std::move(proj), a.size()};
}

struct homotopy_identity_error : error {
    homotopy_identity_error(std::string msg, sparse_matrix d)
        : error(std::move(msg)), defect(std::move(d)) {}
    sparse_matrix defect;
};

/// Iterated mapping cone on A1 + A2 + A3 with differential
/// [[d,0,0],[f1,d,0],[-h,f2,d]].  Requires f2 f1 = dh + hd exactly.
struct iterated_cone_result {
    filtered_complex cone;
    chain_map incl;               // A3 -> cone
    chain_map proj;               // cone -> MC(f1), degree-preserving
    cone_result front;            // MC(f1) with its own exact sequence
};

inline iterated_cone_result iterated_mapping_cone(const chain_map& f1, const chain_map& f2,
                                                  const homotopy& h) {
    require_valid(f1);
    require_valid(f2);
    if (!(f1.target == f2.source)) throw error("iterated cone: f1 target differs from f2 source");
    {
        auto hr = validate(h);
        if (!hr.ok()) throw error("iterated cone: invalid homotopy:\n" + hr.text());
    }
    const filtered_complex& a1 = f1.source;
    const filtered_complex& a2 = f2.source;
    const filtered_complex& a3 = f2.target;
    if (h.m.rows() != a3.size() || h.m.cols() != a1.size())
        throw error("iterated cone: homotopy shape mismatch");

    sparse_matrix defect = f2.m * f1.m - (a3.d * h.m + h.m * a1.d);
    if (!defect.is_zero())
        throw homotopy_identity_error("iterated cone: f2 f1 != dH + Hd", defect);

    const index_t n1 = a1.size(), n2 = a2.size(), n3 = a3.size();
    std::vector<generator> gens;
    gens.reserve(static_cast<std::size_t>(n1 + n2 + n3));
    auto push_part = [&gens](const filtered_complex& c, int offset, const std::string& tag) {
        for (const auto& g : c.gens) {
            generator ng = g;
            ng.id = tag + g.id;
            ng.degree += offset;
            gens.push_back(std::move(ng));
        }
    };
    push_part(a1, 2, "c0/");
    push_part(a2, 1, "c1/");
    push_part(a3, 0, "c2/");

    matrix_builder dm(a1.field, n1 + n2 + n3, n1 + n2 + n3);
    dm.add_block(0, 0, a1.d);
    dm.add_block(n1, 0, f1.m);
    dm.add_block(n1, n1, a2.d);
    dm.add_block(n1 + n2, 0, h.m.negated());
    dm.add_block(n1 + n2, n1, f2.m);
    dm.add_block(n1 + n2, n1 + n2, a3.d);
    filtered_complex cone{a1.field, std::move(gens), dm.build()};

    matrix_builder incl_m(a1.field, cone.size(), n3);
    for (index_t i = 0; i < n3; ++i) incl_m.add(n1 + n2 + i, i, std::uint32_t(1));
    chain_map incl{a3, cone, incl_m.build(), 0, f1.convention};

    cone_result front = mapping_cone(f1);
    matrix_builder proj_m(a1.field, front.cone.size(), cone.size());
    for (index_t i = 0; i < n1 + n2; ++i) proj_m.add(i, i, std::uint32_t(1));
    chain_map proj{cone, front.cone, proj_m.build(), 0, f1.convention};

    return {std::move(cone), std::move(incl), std::move(proj), std::move(front)};
}

/// Block-diagonal direct sum.  Generator ids are namespaced by summand
/// except in the single-summand case, which returns the complex unchanged.
inline filtered_complex direct_sum(const std::vector<filtered_complex>& cs) {
    if (cs.empty()) throw error("direct sum of no complexes (field unknown)");
    if (cs.size() == 1) return cs[0];
    const fp_field f = cs[0].field;
    index_t total = 0;
    for (const auto& c : cs) {
        if (c.field != f) throw error("field mismatch in direct sum");
        total += c.size();
    }
    std::vector<generator> gens;
    gens.reserve(static_cast<std::size_t>(total));
    matrix_builder dm(f, total, total);
    index_t offset = 0;
    for (std::size_t k = 0; k < cs.size(); ++k) {
        const std::string tag = "s" + std::to_string(k) + "/";
        for (const auto& g : cs[k].gens) {
            generator ng = g;
            ng.id = tag + g.id;
            gens.push_back(std::move(ng));
        }
        dm.add_block(offset, offset, cs[k].d);
        offset += cs[k].size();
    }
    return {f, std::move(gens), dm.build()};
}

} // namespace specseq
