#pragma once

#include "keylemma.hpp"

#include <random>

namespace specseq {

/// Seeded construction of random-but-legal filtered complexes, chain maps
/// and key-lemma triangle data.  Every construction here is correct by
/// construction (d^2 = 0 via cones, chain identities via kernel sampling),
/// so property harnesses never need to repair sampled data.
namespace gen {

using rng_t = std::mt19937_64;

inline index_t pick(rng_t& rng, index_t lo, index_t hi) { // inclusive
    return lo + static_cast<index_t>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

inline filtered_complex zero_complex(fp_field f, index_t n, int deg_lo, int deg_hi, int filt_span,
                                     rng_t& rng, const std::string& prefix = "g") {
    std::vector<generator> gens;
    for (index_t i = 0; i < n; ++i) {
        generator g;
        g.id = prefix + std::to_string(i);
        g.degree = pick(rng, deg_lo, deg_hi);
        g.filtration = pick(rng, 0, filt_span);
        gens.push_back(std::move(g));
    }
    return {f, std::move(gens), sparse_matrix(f, n, n)};
}

namespace detail {

inline void relabel(filtered_complex& c, const std::string& prefix = "g") {
    for (index_t i = 0; i < c.size(); ++i) c.gens[i].id = prefix + std::to_string(i);
}

} // namespace detail

/// Random filtered complex built by iterated cones of maps into cycle
/// spaces: start from a zero-differential complex and repeatedly attach
/// generators whose boundaries are random homogeneous cycles of legal
/// filtration.  d^2 = 0 and filtration monotonicity hold by construction.
inline filtered_complex random_complex(fp_field f, index_t max_gens, int filt_span, rng_t& rng) {
    index_t seed_n = std::min<index_t>(max_gens, pick(rng, 2, 5));
    filtered_complex c = zero_complex(f, seed_n, 0, 2, filt_span, rng);
    std::uniform_int_distribution<std::uint32_t> unit(1, f.characteristic() - 1);

    while (c.size() < max_gens) {
        index_t batch = std::min<index_t>(max_gens - c.size(), pick(rng, 1, 4));
        // cycles of c per degree
        std::map<int, std::vector<index_t>> by_degree;
        for (index_t i = 0; i < c.size(); ++i) by_degree[c.gens[i].degree].push_back(i);
        std::vector<index_t> all_rows(static_cast<std::size_t>(c.size()));
        for (index_t i = 0; i < c.size(); ++i) all_rows[i] = i;

        std::vector<generator> gens = c.gens;
        matrix_builder dm(f, c.size() + batch, c.size() + batch);
        dm.add_block(0, 0, c.d);
        for (index_t b = 0; b < batch; ++b) {
            generator g;
            g.id = "n" + std::to_string(c.size() + b);
            index_t col = c.size() + b;
            // pick a degree with cycles and attach a random cycle boundary,
            // or add a free generator
            auto it = by_degree.begin();
            std::advance(it, pick(rng, 0, static_cast<index_t>(by_degree.size()) - 1));
            const auto& idx = it->second;
            sparse_matrix block = c.d.select(all_rows, idx);
            sparse_matrix cycles = kernel_basis(block);
            bool attach = cycles.cols() > 0 && (rng() % 4) != 0;
            if (!attach) {
                g.degree = pick(rng, 0, 2);
                g.filtration = pick(rng, 0, filt_span);
                gens.push_back(std::move(g));
                continue;
            }
            // boundary = sum of random multiples of cycle basis vectors
            std::map<index_t, std::int64_t> bd;
            for (index_t k = 0; k < cycles.cols(); ++k) {
                if (rng() % 2) continue;
                std::uint32_t coef = unit(rng);
                for (const auto& [r, v] : cycles.column(k))
                    bd[idx[r]] += static_cast<std::int64_t>(f.mul(v, coef));
            }
            int max_filt = 0;
            bool nonzero = false;
            for (const auto& [r, v] : bd) {
                if (f.reduce(v) == 0) continue;
                nonzero = true;
                max_filt = std::max(max_filt, c.gens[r].filtration);
            }
            g.degree = it->first + 1;
            g.filtration = nonzero ? std::min(filt_span, max_filt + static_cast<int>(rng() % 3))
                                   : pick(rng, 0, filt_span);
            for (const auto& [r, v] : bd) dm.add(r, col, v);
            gens.push_back(std::move(g));
        }
        c = filtered_complex{f, std::move(gens), dm.build()};
    }
    detail::relabel(c);
    return c;
}

/// Basis of the space of maps src -> tgt with prescribed degree shift and
/// filtration order that (anti-)commute with the differentials.  Columns
/// of `solutions` are coordinates over `support`.
struct map_space {
    std::vector<std::pair<index_t, index_t>> support; // (target row, source col)
    sparse_matrix solutions;

    sparse_matrix materialize(const fp_field& f, index_t rows, index_t cols,
                              const std::vector<std::uint32_t>& combo) const {
        matrix_builder m(f, rows, cols);
        for (index_t k = 0; k < solutions.cols(); ++k) {
            if (combo[k] == 0) continue;
            for (const auto& [u, v] : solutions.column(k))
                m.add(support[u].first, support[u].second, f.mul(v, combo[k]));
        }
        return m.build();
    }
};

inline map_space solve_map_space(const filtered_complex& src, const filtered_complex& tgt,
                                 int degree_shift, int filt_shift, bool anti,
                                 bool ignore_degrees = false) {
    const fp_field& f = src.field;
    map_space sp;
    std::map<std::pair<index_t, index_t>, index_t> unknown_of;
    for (index_t r = 0; r < tgt.size(); ++r)
        for (index_t c = 0; c < src.size(); ++c) {
            if (!ignore_degrees && tgt.gens[r].degree != src.gens[c].degree + degree_shift) continue;
            if (tgt.gens[r].filtration > src.gens[c].filtration + filt_shift) continue;
            unknown_of[{r, c}] = static_cast<index_t>(sp.support.size());
            sp.support.push_back({r, c});
        }
    // constraint (dT F +/- F dS)[i][j] = 0
    std::map<std::pair<index_t, index_t>, index_t> eq_of;
    std::vector<sparse_matrix::entry> entries;
    auto eq_index = [&](index_t i, index_t j) {
        auto [it, fresh] = eq_of.try_emplace({i, j}, static_cast<index_t>(eq_of.size()));
        return it->second;
    };
    for (const auto& [pos, u] : unknown_of) {
        auto [r, c] = pos;
        // dT * F contributes dT[i][r] * x at equation (i, c)
        for (const auto& e : tgt.d.column(r))
            entries.push_back({eq_index(e.first, c), u, e.second});
        // F * dS contributes x * dS[c][j] at equation (r, j); dS[c][j] is
        // the coefficient of generator c in the boundary of generator j
        for (index_t j = 0; j < src.size(); ++j) {
            std::uint32_t v = 0;
            for (const auto& [row, vv] : src.d.column(j))
                if (row == c) {
                    v = vv;
                    break;
                }
            if (v == 0) continue;
            std::uint32_t signed_v = anti ? v : f.neg(v);
            entries.push_back({eq_index(r, j), u, signed_v});
        }
    }
    sparse_matrix constraints = sparse_matrix::from_entries(
        f, static_cast<index_t>(eq_of.size()), static_cast<index_t>(sp.support.size()), entries);
    sp.solutions = kernel_basis(constraints);
    return sp;
}

/// Random filtered chain map src -> tgt (degree preserving, order 0,
/// commuting with the differentials).  Retries a few times to avoid the
/// zero map when the solution space allows it.
inline chain_map random_chain_map(const filtered_complex& src, const filtered_complex& tgt,
                                  rng_t& rng) {
    map_space sp = solve_map_space(src, tgt, 0, 0, /*anti=*/false);
    std::uniform_int_distribution<std::uint32_t> val(0, src.field.characteristic() - 1);
    sparse_matrix best(src.field, tgt.size(), src.size());
    for (int attempt = 0; attempt < 4; ++attempt) {
        std::vector<std::uint32_t> combo(static_cast<std::size_t>(sp.solutions.cols()));
        for (auto& x : combo) x = val(rng);
        best = sp.materialize(src.field, tgt.size(), src.size(), combo);
        if (!best.is_zero()) break;
    }
    return {src, tgt, std::move(best), 0, map_convention::chain};
}

/// Random chain automorphism of c: identity plus dM + Md for a random
/// degree +1 map M dropping filtration by at least one level.  The
/// perturbation is nilpotent, so the map is invertible, filtered of
/// order 0 and commutes with d.
inline sparse_matrix random_chain_automorphism(const filtered_complex& c, rng_t& rng) {
    const fp_field& f = c.field;
    std::uniform_int_distribution<std::uint32_t> val(0, f.characteristic() - 1);
    matrix_builder mb(f, c.size(), c.size());
    for (index_t r = 0; r < c.size(); ++r)
        for (index_t col = 0; col < c.size(); ++col)
            if (c.gens[r].degree == c.gens[col].degree + 1 &&
                c.gens[r].filtration <= c.gens[col].filtration - 1 && (rng() % 3 == 0))
                mb.add(r, col, val(rng));
    sparse_matrix m = mb.build();
    sparse_matrix n = c.d * m + m * c.d;
    return sparse_matrix::identity(f, c.size()) + n;
}

inline sparse_matrix invert_unipotent(const sparse_matrix& g) {
    // g = 1 + n with n nilpotent: inverse = 1 - n + n^2 - ...
    const fp_field& f = g.field();
    sparse_matrix id = sparse_matrix::identity(f, g.rows());
    sparse_matrix n = g - id;
    sparse_matrix acc = id;
    sparse_matrix power = id;
    std::uint32_t sign = f.neg(1);
    for (index_t k = 1; k <= g.rows(); ++k) {
        power = power * n;
        if (power.is_zero()) break;
        acc = acc + power.scaled(sign);
        sign = f.neg(sign);
    }
    return acc;
}

/// Period-3 triangle datum modelled on the split exact triangle
/// P -> P + Q -> Q, twisted by random chain automorphisms and optionally
/// by a perturbation of H_2 that can break hypothesis (2) (never (1)).
inline triangle_datum random_triangle(fp_field f, rng_t& rng, index_t max_gens = 10,
                                      int filt_span = 2, bool perturb = false) {
    if (f.characteristic() != 2)
        throw error("the triangle generator's split model needs GF(2); odd p requires the "
                    "anti-chain sign pattern");
    filtered_complex p = random_complex(f, std::max<index_t>(2, max_gens / 2), filt_span, rng);
    filtered_complex q = random_complex(f, std::max<index_t>(2, max_gens / 2), filt_span, rng);
    detail::relabel(p, "p");
    detail::relabel(q, "q");
    filtered_complex pq = direct_sum({p, q});
    const index_t np = p.size(), nq = q.size();

    matrix_builder f1b(f, np + nq, np); // inclusion P -> P + Q
    for (index_t i = 0; i < np; ++i) f1b.add(i, i, std::uint32_t(1));
    matrix_builder f2b(f, nq, np + nq); // projection P + Q -> Q
    for (index_t i = 0; i < nq; ++i) f2b.add(i, np + i, std::uint32_t(1));
    matrix_builder h2b(f, np, np + nq); // projection P + Q -> P
    for (index_t i = 0; i < np; ++i) h2b.add(i, i, std::uint32_t(1));
    matrix_builder h3b(f, np + nq, nq); // inclusion Q -> P + Q
    for (index_t i = 0; i < nq; ++i) h3b.add(np + i, i, std::uint32_t(1));

    sparse_matrix f1 = f1b.build(), f2 = f2b.build(), f3(f, np, nq);
    sparse_matrix h1(f, nq, np), h2 = h2b.build(), h3 = h3b.build();

    sparse_matrix g1 = random_chain_automorphism(p, rng);
    sparse_matrix g2 = random_chain_automorphism(pq, rng);
    sparse_matrix g3 = random_chain_automorphism(q, rng);
    sparse_matrix g1i = invert_unipotent(g1), g2i = invert_unipotent(g2), g3i = invert_unipotent(g3);

    triangle_datum t;
    t.cyclic = true;
    t.complexes = {p, pq, q};
    t.maps = {g2 * f1 * g1i, g3 * f2 * g2i, g1 * f3 * g3i};
    t.homotopies = {g3 * h1 * g1i, g1 * h2 * g2i, g2 * h3 * g3i};

    if (perturb) {
        // add a d-commuting map to H_2; hypothesis (1) survives, (2) may not
        map_space sp = solve_map_space(pq, p, 0, 0, /*anti=*/false, /*ignore_degrees=*/true);
        std::uniform_int_distribution<std::uint32_t> val(0, f.characteristic() - 1);
        std::vector<std::uint32_t> combo(static_cast<std::size_t>(sp.solutions.cols()));
        for (auto& x : combo) x = val(rng);
        t.homotopies[1] = t.homotopies[1] + sp.materialize(f, np, np + nq, combo);
    }
    return t;
}

} // namespace gen
} // namespace specseq
