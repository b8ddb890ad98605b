#pragma once

#include "reduce.hpp"

#include <set>

namespace specseq {

/// From-the-definition spectral sequence dimensions, used only to
/// cross-validate compute_pages.  Works directly with the subspaces
///   Z^r_p = { x in F_p : dx in F_{p-r} },
///   E^r_p = Z^r_p / (Z^{r-1}_{p-1} + d Z^{r-1}_{p+r-1}),
/// computed per homological degree by plain kernel/rank linear algebra on
/// the original differential; no cancellation machinery is involved.
/// Indexing matches the staged algorithm: E^0 is the associated graded.
class page_oracle {
  public:
    explicit page_oracle(const filtered_complex& c) : c_(c) {
        require_valid(c, /*check_degrees=*/false);
        for (const auto& g : c.gens) {
            degrees_.insert(g.degree);
            levels_.insert(g.filtration);
        }
        all_rows_.resize(static_cast<std::size_t>(c.size()));
        for (index_t i = 0; i < c.size(); ++i) all_rows_[i] = i;
    }

    /// Dimension table for pages 0..max_r.
    rank_table table(int max_r) const {
        rank_table t;
        for (int r = 0; r <= max_r; ++r)
            for (int p : levels_)
                for (int d : degrees_) {
                    index_t dim = page_dim(r, p, d);
                    if (dim != 0) t[{r, d, p}] = dim;
                }
        return t;
    }

    /// dim E^r at filtration level p and degree d.
    index_t page_dim(int r, int p, int d) const {
        sparse_matrix z = cycle_space(r, p, d);
        sparse_matrix denom = hconcat(cycle_space(r - 1, p - 1, d),
                                      c_.d * cycle_space(r - 1, p + r - 1, d + 1));
        return z.cols() - rank(denom);
    }

  private:
    /// Basis (as columns over the generator basis) of
    /// Z^r_p[d] = { x in F_p of degree d : dx in F_{p-r} }.
    /// For r < 0 this is all of F_p[d].
    sparse_matrix cycle_space(int r, int p, int d) const {
        std::vector<index_t> span;
        for (index_t i = 0; i < c_.size(); ++i)
            if (c_.gens[i].degree == d && c_.gens[i].filtration <= p) span.push_back(i);
        matrix_builder sb(c_.field, c_.size(), static_cast<index_t>(span.size()));
        for (std::size_t k = 0; k < span.size(); ++k)
            sb.add(span[k], static_cast<index_t>(k), std::uint32_t(1));
        sparse_matrix s = sb.build();
        if (r < 0) return s;

        // rows of d.S that must vanish: degree d-1 generators above level p-r
        std::vector<index_t> forbidden;
        for (index_t i = 0; i < c_.size(); ++i)
            if (c_.gens[i].filtration > p - r) forbidden.push_back(i);
        std::vector<index_t> span_cols(static_cast<std::size_t>(s.cols()));
        for (index_t k = 0; k < s.cols(); ++k) span_cols[k] = k;
        sparse_matrix constrained = (c_.d * s).select(forbidden, span_cols);
        return s * kernel_basis(constrained);
    }

    const filtered_complex& c_;
    std::set<int> degrees_;
    std::set<int> levels_;
    std::vector<index_t> all_rows_;
};

inline rank_table oracle_pages(const filtered_complex& c, int max_r) {
    return page_oracle(c).table(max_r);
}

} // namespace specseq
