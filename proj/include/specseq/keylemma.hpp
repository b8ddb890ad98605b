#pragma once

#include "oracle.hpp"
#include "reduce.hpp"

#include <string>
#include <vector>

namespace specseq {

/// Cyclic (or finite) sequence of complexes A_i with maps f_i : A_i -> A_{i+1}
/// and homotopies H_i : A_i -> A_{i+2} trivializing the composites.
///
/// The maps are stored as raw matrices: under the cyclic identification
/// A_{i+3} = A_i the homotopies cannot carry a consistent absolute degree
/// shift (the worked instances have degree-0 homotopies), so only the
/// algebraic identities and filtration bounds are enforced here, never
/// degree homogeneity.
struct triangle_datum {
    std::vector<filtered_complex> complexes;
    std::vector<sparse_matrix> maps;       // f_i
    std::vector<sparse_matrix> homotopies; // H_i
    bool cyclic = true;

    int window() const { return static_cast<int>(complexes.size()); }

    /// Number of indices i for which hypothesis (1)/(2) data exists.
    int count() const {
        if (cyclic) return window();
        return std::max(0, window() - 3);
    }

    const filtered_complex& A(int i) const { return complexes[wrap(i, window())]; }
    const sparse_matrix& f(int i) const { return maps[wrap(i, static_cast<int>(maps.size()))]; }
    const sparse_matrix& H(int i) const {
        return homotopies[wrap(i, static_cast<int>(homotopies.size()))];
    }

    void check_composable() const {
        if (complexes.empty()) return;
        const fp_field& fld = complexes[0].field;
        for (const auto& c : complexes)
            if (c.field != fld) throw error("triangle datum: mixed fields");
        int nf = cyclic ? window() : window() - 1;
        int nh = cyclic ? window() : window() - 2;
        if (static_cast<int>(maps.size()) != nf)
            throw error("triangle datum: expected " + std::to_string(nf) + " maps");
        if (static_cast<int>(homotopies.size()) != nh)
            throw error("triangle datum: expected " + std::to_string(nh) + " homotopies");
        for (int i = 0; i < nf; ++i)
            if (f(i).rows() != A(i + 1).size() || f(i).cols() != A(i).size())
                throw error("triangle datum: f_" + std::to_string(i + 1) + " shape mismatch");
        for (int i = 0; i < nh; ++i)
            if (H(i).rows() != A(i + 2).size() || H(i).cols() != A(i).size())
                throw error("triangle datum: H_" + std::to_string(i + 1) + " shape mismatch");
    }

  private:
    int wrap(int i, int n) const {
        if (cyclic) return ((i % n) + n) % n;
        if (i < 0 || i >= n) throw error("triangle datum: index out of the finite window");
        return i;
    }
};

namespace detail {

/// rank of the map induced on homology, via explicit cycle bases:
/// rank([f.Z | dB]) - rank(dB), where Z is a kernel basis of dA.
struct induced_homology_rank {
    index_t dim_source = 0;
    index_t dim_target = 0;
    index_t rank = 0;
    bool iso() const { return rank == dim_source && dim_source == dim_target; }
};

inline induced_homology_rank homology_induced(const sparse_matrix& f, const filtered_complex& a,
                                              const filtered_complex& b) {
    induced_homology_rank r;
    r.dim_source = homology_total(a);
    r.dim_target = homology_total(b);
    sparse_matrix z = kernel_basis(a.d);
    r.rank = rank(hconcat(f * z, b.d)) - rank(b.d);
    return r;
}

/// psi_i = -f_{i+2} H_i - H_{i+1} f_i : A_i -> A_{i+3}.
inline sparse_matrix psi(const triangle_datum& t, int i) {
    return (t.f(i + 2) * t.H(i) + t.H(i + 1) * t.f(i)).negated();
}

inline sparse_matrix homotopy_defect(const triangle_datum& t, int i) {
    return t.f(i + 1) * t.f(i) - (t.A(i + 2).d * t.H(i) + t.H(i) * t.A(i).d);
}

/// over GF(2) the two conventions coincide; at odd p a map may satisfy
/// either df = fd or df = -fd, and we accept whichever holds exactly.
inline bool commutes_with_d(const sparse_matrix& m, const filtered_complex& src,
                            const filtered_complex& tgt) {
    sparse_matrix lhs = tgt.d * m;
    sparse_matrix rhs = m * src.d;
    return (lhs - rhs).is_zero() || (lhs + rhs).is_zero();
}

} // namespace detail

struct hypothesis_report {
    struct item {
        int i = 0;
        bool homotopy_identity_ok = false; // (1): f_{i+1} f_i = dH_i + H_i d, exactly
        sparse_matrix defect;
        bool psi_chain_map = false;
        bool psi_quasi_iso = false;        // (2)
        detail::induced_homology_rank psi_rank;
    };
    std::vector<item> items;
    bool ok() const {
        for (const auto& it : items)
            if (!it.homotopy_identity_ok || !it.psi_chain_map || !it.psi_quasi_iso) return false;
        return true;
    }
};

inline hypothesis_report check_hypotheses(const triangle_datum& t) {
    t.check_composable();
    hypothesis_report rep;
    for (int i = 0; i < t.count(); ++i) {
        hypothesis_report::item it;
        it.i = i;
        it.defect = detail::homotopy_defect(t, i);
        it.homotopy_identity_ok = it.defect.is_zero();
        sparse_matrix p = detail::psi(t, i);
        it.psi_chain_map = detail::commutes_with_d(p, t.A(i), t.A(i + 3));
        it.psi_rank = detail::homology_induced(p, t.A(i), t.A(i + 3));
        it.psi_quasi_iso = it.psi_rank.iso();
        rep.items.push_back(std::move(it));
    }
    return rep;
}

struct key_lemma_report {
    struct item {
        int i = 0;
        bool alpha_chain_map = false;
        bool beta_chain_map = false;
        bool alpha_beta_equals_psi = false; // alpha_{i+1} . beta_i = psi_i
        bool x_homotopy_ok = false;         // f_{i+2} alpha_i - psi_i pi = dX + Xd
        bool y_homotopy_ok = false;         // beta_{i+1} f_i - incl psi_i = dY + Yd
        bool alpha_quasi_iso = false;
        bool beta_quasi_iso = false;
        detail::induced_homology_rank alpha_rank; // MC(f_i) -> A_{i+2}
        detail::induced_homology_rank beta_rank;  // A_i -> MC(f_{i+1})
        bool iterated_cone_d2_ok = false;
        index_t iterated_cone_size = 0;
        index_t iterated_cone_homology = 0; // must vanish
    };
    std::vector<item> items;
    bool ok() const {
        for (const auto& it : items)
            if (!(it.alpha_chain_map && it.beta_chain_map && it.alpha_beta_equals_psi &&
                  it.x_homotopy_ok && it.y_homotopy_ok && it.alpha_quasi_iso && it.beta_quasi_iso &&
                  it.iterated_cone_d2_ok && it.iterated_cone_homology == 0))
                return false;
        return true;
    }
};

namespace detail {

/// MC(f_i) with no degree bookkeeping (offset 0), cone filtration inherited.
inline filtered_complex lemma_cone(const triangle_datum& t, int i) {
    return cone_from_matrix(t.A(i), t.A(i + 1), t.f(i), 0, "a/", "b/");
}

/// alpha_i : MC(f_i) -> A_{i+2},  (a_i, a_{i+1}) |-> f_{i+1}(a_{i+1}) - H_i(a_i)
inline sparse_matrix alpha(const triangle_datum& t, int i) {
    const index_t n_a = t.A(i).size(), n_b = t.A(i + 1).size();
    matrix_builder m(t.A(i).field, t.A(i + 2).size(), n_a + n_b);
    m.add_block(0, 0, t.H(i).negated());
    m.add_block(0, n_a, t.f(i + 1));
    return m.build();
}

/// beta_i : A_i -> MC(f_{i+1}),  a_i |-> (f_i(a_i), -H_i(a_i))
inline sparse_matrix beta(const triangle_datum& t, int i) {
    const index_t n_a = t.A(i + 1).size(), n_b = t.A(i + 2).size();
    matrix_builder m(t.A(i).field, n_a + n_b, t.A(i).size());
    m.add_block(0, 0, t.f(i));
    m.add_block(n_a, 0, t.H(i).negated());
    return m.build();
}

/// Iterated mapping cone on A_i + A_{i+1} + A_{i+2}, signs as printed:
/// [[d,0,0],[f_i,d,0],[-H_i,f_{i+1},d]].
inline filtered_complex lemma_iterated_cone(const triangle_datum& t, int i) {
    const filtered_complex &a1 = t.A(i), &a2 = t.A(i + 1), &a3 = t.A(i + 2);
    std::vector<generator> gens;
    auto push = [&gens](const filtered_complex& c, const std::string& tag) {
        for (const auto& g : c.gens) {
            generator ng = g;
            ng.id = tag + g.id;
            gens.push_back(std::move(ng));
        }
    };
    push(a1, "c0/");
    push(a2, "c1/");
    push(a3, "c2/");
    const index_t n1 = a1.size(), n2 = a2.size(), n3 = a3.size();
    matrix_builder dm(a1.field, n1 + n2 + n3, n1 + n2 + n3);
    dm.add_block(0, 0, a1.d);
    dm.add_block(n1, 0, t.f(i));
    dm.add_block(n1, n1, a2.d);
    dm.add_block(n1 + n2, 0, t.H(i).negated());
    dm.add_block(n1 + n2, n1, t.f(i + 1));
    dm.add_block(n1 + n2, n1 + n2, a3.d);
    return {a1.field, std::move(gens), dm.build()};
}

} // namespace detail

/// Verifies the full conclusion of the key lemma on concrete data: the
/// comparison maps alpha/beta are chain maps, compose to psi, are
/// quasi-isomorphisms, satisfy the X/Y homotopy identities exactly, and
/// the iterated mapping cone is acyclic.
inline key_lemma_report verify_key_lemma(const triangle_datum& t) {
    auto hyp = check_hypotheses(t);
    if (!hyp.ok()) throw error("verify_key_lemma: hypotheses fail; run check_hypotheses for the defects");

    key_lemma_report rep;
    for (int i = 0; i < t.count(); ++i) {
        key_lemma_report::item it;
        it.i = i;
        const filtered_complex cone_i = detail::lemma_cone(t, i);
        const filtered_complex cone_i1 = detail::lemma_cone(t, i + 1);
        const sparse_matrix alpha_i = detail::alpha(t, i);
        const sparse_matrix alpha_i1 = detail::alpha(t, i + 1);
        const sparse_matrix beta_i = detail::beta(t, i);
        const sparse_matrix beta_i1 = detail::beta(t, i + 1);
        const sparse_matrix psi_i = detail::psi(t, i);

        it.alpha_chain_map = detail::commutes_with_d(alpha_i, cone_i, t.A(i + 2));
        it.beta_chain_map = detail::commutes_with_d(beta_i, t.A(i), cone_i1);
        it.alpha_beta_equals_psi = (alpha_i1 * beta_i - psi_i).is_zero();

        const fp_field& fld = t.A(i).field;
        const index_t n_a = t.A(i).size(), n_b = t.A(i + 1).size();

        // X : MC(f_i) -> A_{i+3}, (a_i, a_{i+1}) |-> H_{i+1}(a_{i+1})
        matrix_builder xb(fld, t.A(i + 3).size(), n_a + n_b);
        xb.add_block(0, n_a, t.H(i + 1));
        sparse_matrix x = xb.build();
        matrix_builder pb(fld, n_a, n_a + n_b); // projection MC(f_i) -> A_i
        for (index_t k = 0; k < n_a; ++k) pb.add(k, k, std::uint32_t(1));
        sparse_matrix proj = pb.build();
        sparse_matrix x_defect = t.f(i + 2) * alpha_i - psi_i * proj -
                                 (t.A(i + 3).d * x + x * cone_i.d);
        it.x_homotopy_ok = x_defect.is_zero();

        // Y : A_i -> MC(f_{i+2}), a_i |-> (H_i(a_i), 0)
        const filtered_complex cone_i2 = detail::lemma_cone(t, i + 2);
        const index_t m_a = t.A(i + 2).size(), m_b = t.A(i + 3).size();
        matrix_builder yb(fld, m_a + m_b, t.A(i).size());
        yb.add_block(0, 0, t.H(i));
        sparse_matrix y = yb.build();
        matrix_builder ib(fld, m_a + m_b, m_b); // subcomplex inclusion A_{i+3} -> MC(f_{i+2})
        for (index_t k = 0; k < m_b; ++k) ib.add(m_a + k, k, std::uint32_t(1));
        sparse_matrix incl = ib.build();
        sparse_matrix y_defect = beta_i1 * t.f(i) - incl * psi_i -
                                 (cone_i2.d * y + y * t.A(i).d);
        it.y_homotopy_ok = y_defect.is_zero();

        it.alpha_rank = detail::homology_induced(alpha_i, cone_i, t.A(i + 2));
        it.alpha_quasi_iso = it.alpha_rank.iso();
        it.beta_rank = detail::homology_induced(beta_i, t.A(i), cone_i1);
        it.beta_quasi_iso = it.beta_rank.iso();

        filtered_complex big = detail::lemma_iterated_cone(t, i);
        it.iterated_cone_d2_ok = (big.d * big.d).is_zero();
        it.iterated_cone_size = big.size();
        it.iterated_cone_homology = homology_total(big);
        rep.items.push_back(std::move(it));
    }
    return rep;
}

struct filtered_lemma_report {
    struct item {
        int i = 0;
        bool e1_tables_match = false;       // page-1 level tables of MC(f_{i+1}) and A_{i+3}
        bool induced_page_map_full = false; // alpha_{i+1} induces an iso on E^1, level by level
        bool iterated_e1_vanishes = false;  // nine-lemma consequence
    };
    std::vector<item> items;
    bool ok() const {
        for (const auto& it : items)
            if (!(it.e1_tables_match && it.induced_page_map_full && it.iterated_e1_vanishes))
                return false;
        return true;
    }
};

namespace detail {

inline std::map<int, index_t> level_table(const page_data& p) {
    std::map<int, index_t> t;
    for (const auto& g : p.survivors) t[g.filtration]++;
    return t;
}

} // namespace detail

/// The filtered variant: all maps must be filtered of order 0; compares
/// the E^1 pages of MC(f_{i+1}) and A_{i+3} under the map induced by
/// alpha_{i+1}, and checks that the iterated cone's E^1 vanishes level by
/// level.
inline filtered_lemma_report verify_filtered_key_lemma(const triangle_datum& t) {
    t.check_composable();
    auto filtered_order0 = [](const sparse_matrix& m, const filtered_complex& src,
                              const filtered_complex& tgt) {
        for (const auto& e : m.entries())
            if (tgt.gens[e.row].filtration > src.gens[e.col].filtration) return false;
        return true;
    };
    for (int i = 0; i < t.count(); ++i) {
        if (!filtered_order0(t.f(i), t.A(i), t.A(i + 1)))
            throw error("verify_filtered_key_lemma: f_" + std::to_string(i + 1) + " is not filtered");
        if (!filtered_order0(t.H(i), t.A(i), t.A(i + 2)))
            throw error("verify_filtered_key_lemma: H_" + std::to_string(i + 1) + " is not filtered");
    }

    filtered_lemma_report rep;
    for (int i = 0; i < t.count(); ++i) {
        filtered_lemma_report::item it;
        it.i = i;

        filtered_complex cone = detail::lemma_cone(t, i + 1);
        const filtered_complex& target = t.A(i + 3);
        pages_options opts;
        opts.max_r = 1; // an explicit bound reports E^1 even past collapse
        pages_result cone_pages = compute_pages(cone, opts);
        pages_result target_pages = compute_pages(target, opts);
        auto cone_table = detail::level_table(cone_pages.pages[1]);
        auto target_table = detail::level_table(target_pages.pages[1]);
        it.e1_tables_match = cone_table == target_table;

        // induced map on the stage-1 complexes; its drop-0 part per level
        // must have full rank
        const reduction& rc = cone_pages.to_stage[1];
        const reduction& rt = target_pages.to_stage[1];
        sparse_matrix induced = rt.proj * detail::alpha(t, i + 1) * rc.incl;
        bool full = it.e1_tables_match;
        if (full) {
            for (const auto& [level, dim] : cone_table) {
                std::vector<index_t> src_idx, tgt_idx;
                for (index_t k = 0; k < rc.after.size(); ++k)
                    if (rc.after.gens[k].filtration == level) src_idx.push_back(k);
                for (index_t k = 0; k < rt.after.size(); ++k)
                    if (rt.after.gens[k].filtration == level) tgt_idx.push_back(k);
                sparse_matrix block = induced.select(tgt_idx, src_idx);
                if (rank(block) != dim) {
                    full = false;
                    break;
                }
            }
        }
        it.induced_page_map_full = full;

        filtered_complex big = detail::lemma_iterated_cone(t, i);
        pages_options big_opts;
        big_opts.max_r = 1;
        big_opts.track_witnesses = false;
        pages_result big_pages = compute_pages(big, big_opts);
        it.iterated_e1_vanishes = big_pages.pages[1].survivors.empty();
        rep.items.push_back(std::move(it));
    }
    return rep;
}

} // namespace specseq
