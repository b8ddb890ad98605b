#pragma once

#include "complex.hpp"

#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

namespace specseq {

struct cancellation {
    std::string id_i; // the generator whose boundary contains the pair partner
    std::string id_j;
    int length = 0;   // filtration drop of the cancelled coefficient
};

/// Witnessed homotopy equivalence produced by cancellation:
///   proj . incl = Id on `after`,  incl . proj - Id = dH + Hd on `before`.
struct reduction {
    filtered_complex before;
    filtered_complex after;
    sparse_matrix proj; // after.size() x before.size()
    sparse_matrix incl; // before.size() x after.size()
    sparse_matrix htpy; // before.size() x before.size(), degree +1
    std::vector<cancellation> cancelled;

    int max_length() const {
        int m = 0;
        for (const auto& c : cancelled) m = std::max(m, c.length);
        return m;
    }
};

/// One page of the spectral sequence in the convention E^r = (C_r, d_r):
/// survivors are the generators of the stage-r complex and dr is the part
/// of its differential dropping filtration by exactly r.
struct page_data {
    int r = 0;
    std::vector<generator> survivors;
    sparse_matrix dr;
};

/// (r, degree, filtration level) -> dimension; zero entries omitted.
using rank_table = std::map<std::tuple<int, int, int>, index_t>;

inline rank_table survivors_table(const std::vector<page_data>& pages) {
    rank_table t;
    for (const auto& p : pages)
        for (const auto& g : p.survivors) t[{p.r, g.degree, g.filtration}]++;
    return t;
}

namespace detail {

inline int drop(const filtered_complex& c, index_t from, index_t to) {
    return c.gens[from].filtration - c.gens[to].filtration;
}

/// Mutable cancellation state.  The differential is kept as column maps
/// plus row occupancy sets over the original index space; the homotopy
/// equivalence with the original complex is accumulated alongside.
class reducer {
  public:
    explicit reducer(const filtered_complex& c, bool track_witnesses = true)
        : c_(c), field_(c.field), track_(track_witnesses),
          col_(static_cast<std::size_t>(c.size())), row_(static_cast<std::size_t>(c.size())),
          alive_(static_cast<std::size_t>(c.size()), true),
          proj_row_(static_cast<std::size_t>(c.size())),
          incl_col_(static_cast<std::size_t>(c.size())) {
        for (const auto& e : c.d.entries()) {
            col_[e.col][e.row] = e.coeff;
            row_[e.row].insert(e.col);
        }
        if (track_) {
            for (index_t i = 0; i < c.size(); ++i) {
                proj_row_[i][i] = 1;
                incl_col_[i][i] = 1;
            }
        }
    }

    bool alive(index_t i) const { return alive_[i]; }

    index_t alive_count() const {
        index_t n = 0;
        for (bool a : alive_)
            if (a) ++n;
        return n;
    }

    const std::map<index_t, std::uint32_t>& column(index_t i) const { return col_[i]; }

    std::optional<std::uint32_t> coeff(index_t i, index_t j) const {
        auto it = col_[i].find(j);
        if (it == col_[i].end()) return std::nullopt;
        return it->second;
    }

    bool differential_is_zero() const {
        for (index_t i = 0; i < c_.size(); ++i)
            if (alive_[i] && !col_[i].empty()) return false;
        return true;
    }

    int min_drop() const {
        int m = std::numeric_limits<int>::max();
        for (index_t i = 0; i < c_.size(); ++i) {
            if (!alive_[i]) continue;
            for (const auto& [r, v] : col_[i]) m = std::min(m, drop(c_, i, r));
        }
        return m;
    }

    /// The filtered-lemma legality conditions for cancelling (i, j).
    /// Returns an empty string when legal, otherwise which condition fails.
    std::string legality(index_t i, index_t j) const {
        if (!alive_[i] || !alive_[j]) return "generator already cancelled";
        auto lam = coeff(i, j);
        if (!lam) return "pairing <d x_i, x_j> is zero";
        if (c_.gens[i].filtration == c_.gens[j].filtration) return "";
        for (const auto& [l, v] : col_[i])
            if (c_.gens[l].filtration > c_.gens[j].filtration)
                return "condition 1: <d x_i> contains " + c_.gens[l].id + " above the level of " +
                       c_.gens[j].id;
        for (index_t k : row_[j])
            if (c_.gens[k].filtration < c_.gens[i].filtration)
                return "condition 2: " + c_.gens[k].id + " hits " + c_.gens[j].id +
                       " from below the level of " + c_.gens[i].id;
        return "";
    }

    /// Cancels the pair (i, j) with <d x_i, x_j> invertible; updates the
    /// differential by <d' x_k, x_l> = a_lk - a_jk a_li / lambda and folds
    /// the elementary proj/incl/htpy into the running composites.
    void cancel(index_t i, index_t j) {
        std::string why = legality(i, j);
        if (!why.empty()) throw error("illegal cancellation (" + c_.gens[i].id + ", " + c_.gens[j].id + "): " + why);
        const std::uint32_t lambda = col_[i].at(j);
        const std::uint32_t lambda_inv = field_.inv(lambda);

        cancelled_.push_back({c_.gens[i].id, c_.gens[j].id, drop(c_, i, j)});

        const std::map<index_t, std::uint32_t> di = col_[i]; // boundary of x_i
        std::vector<std::pair<index_t, std::uint32_t>> hitters; // k != i with <d x_k, x_j> != 0
        for (index_t k : row_[j])
            if (k != i) hitters.push_back({k, col_[k].at(j)});

        if (track_) {
            // H += incl_col(i) . (-1/lambda) . proj_row(j), an outer product
            // over the original basis.
            const std::uint32_t scale = field_.neg(lambda_inv);
            for (const auto& [out, vi] : incl_col_[i])
                for (const auto& [in, vj] : proj_row_[j]) {
                    std::uint32_t add = field_.mul(field_.mul(vi, vj), scale);
                    auto& slot = htpy_[{out, in}];
                    slot = field_.add(slot, add);
                    if (slot == 0) htpy_.erase({out, in});
                }
            // proj: row_l -= (a_l / lambda) row_j for each l in d x_i
            for (const auto& [l, a_l] : di) {
                if (l == j) continue;
                const std::uint32_t factor = field_.mul(a_l, lambda_inv);
                axpy_neg(proj_row_[l], proj_row_[j], factor);
            }
            // incl: col_k -= (b_k / lambda) col_i for each k hitting x_j
            for (const auto& [k, b_k] : hitters) {
                const std::uint32_t factor = field_.mul(b_k, lambda_inv);
                axpy_neg(incl_col_[k], incl_col_[i], factor);
            }
            proj_row_[i].clear();
            proj_row_[j].clear();
            incl_col_[i].clear();
            incl_col_[j].clear();
        }

        // differential update
        for (const auto& [k, b_k] : hitters) {
            const std::uint32_t factor = field_.mul(b_k, lambda_inv);
            for (const auto& [l, a_l] : di) {
                if (l == j) continue;
                std::uint32_t delta = field_.neg(field_.mul(factor, a_l));
                auto it = col_[k].find(l);
                std::uint32_t nv = field_.add(it == col_[k].end() ? 0 : it->second, delta);
                if (nv == 0) {
                    if (it != col_[k].end()) {
                        col_[k].erase(it);
                        row_[l].erase(k);
                    }
                } else {
                    col_[k][l] = nv;
                    row_[l].insert(k);
                }
            }
        }
        // remove the cancelled generators from the differential
        for (const auto& [l, v] : col_[i]) row_[l].erase(i);
        col_[i].clear();
        for (index_t k : std::set<index_t>(row_[j])) {
            col_[k].erase(j);
            row_[j].erase(k);
        }
        for (index_t k : std::set<index_t>(row_[i])) {
            col_[k].erase(i);
            row_[i].erase(k);
        }
        alive_[i] = alive_[j] = false;
    }

    filtered_complex current_complex() const {
        std::vector<index_t> keep;
        for (index_t i = 0; i < c_.size(); ++i)
            if (alive_[i]) keep.push_back(i);
        std::vector<index_t> pos(static_cast<std::size_t>(c_.size()), -1);
        for (std::size_t k = 0; k < keep.size(); ++k) pos[keep[k]] = static_cast<index_t>(k);
        std::vector<generator> gens;
        gens.reserve(keep.size());
        for (index_t i : keep) gens.push_back(c_.gens[i]);
        matrix_builder dm(field_, static_cast<index_t>(keep.size()), static_cast<index_t>(keep.size()));
        for (index_t i : keep)
            for (const auto& [r, v] : col_[i]) dm.add(pos[r], pos[i], v);
        return {field_, std::move(gens), dm.build()};
    }

    /// Part of the current differential dropping filtration by exactly r,
    /// over the surviving basis.
    sparse_matrix current_dr(int r) const {
        std::vector<index_t> keep;
        for (index_t i = 0; i < c_.size(); ++i)
            if (alive_[i]) keep.push_back(i);
        std::vector<index_t> pos(static_cast<std::size_t>(c_.size()), -1);
        for (std::size_t k = 0; k < keep.size(); ++k) pos[keep[k]] = static_cast<index_t>(k);
        matrix_builder dm(field_, static_cast<index_t>(keep.size()), static_cast<index_t>(keep.size()));
        for (index_t i : keep)
            for (const auto& [row, v] : col_[i])
                if (drop(c_, i, row) == r) dm.add(pos[row], pos[i], v);
        return dm.build();
    }

    reduction snapshot() const {
        if (!track_) throw error("reducer built without witness tracking");
        filtered_complex after = current_complex();
        std::vector<index_t> keep;
        for (index_t i = 0; i < c_.size(); ++i)
            if (alive_[i]) keep.push_back(i);

        matrix_builder pm(field_, after.size(), c_.size());
        for (std::size_t k = 0; k < keep.size(); ++k)
            for (const auto& [in, v] : proj_row_[keep[k]]) pm.add(static_cast<index_t>(k), in, v);

        matrix_builder im(field_, c_.size(), after.size());
        for (std::size_t k = 0; k < keep.size(); ++k)
            for (const auto& [out, v] : incl_col_[keep[k]]) im.add(out, static_cast<index_t>(k), v);

        matrix_builder hm(field_, c_.size(), c_.size());
        for (const auto& [rc, v] : htpy_) hm.add(rc.first, rc.second, v);

        return {c_, std::move(after), pm.build(), im.build(), hm.build(), cancelled_};
    }

    const std::vector<cancellation>& cancelled() const { return cancelled_; }

  private:
    // dst -= factor * src  (maps over the original index space)
    void axpy_neg(std::map<index_t, std::uint32_t>& dst,
                  const std::map<index_t, std::uint32_t>& src, std::uint32_t factor) {
        if (factor == 0) return;
        for (const auto& [k, v] : src) {
            std::uint32_t delta = field_.neg(field_.mul(factor, v));
            auto it = dst.find(k);
            std::uint32_t nv = field_.add(it == dst.end() ? 0 : it->second, delta);
            if (nv == 0) {
                if (it != dst.end()) dst.erase(it);
            } else {
                dst[k] = nv;
            }
        }
    }

    const filtered_complex& c_;
    fp_field field_;
    bool track_;
    std::vector<std::map<index_t, std::uint32_t>> col_;
    std::vector<std::set<index_t>> row_;
    std::vector<bool> alive_;
    std::vector<std::map<index_t, std::uint32_t>> proj_row_; // rows of proj, by original index
    std::vector<std::map<index_t, std::uint32_t>> incl_col_; // cols of incl, by original index
    std::map<std::pair<index_t, index_t>, std::uint32_t> htpy_;
    std::vector<cancellation> cancelled_;
};

/// Cancels drop-`len` pairs until none remain, scanning generators in
/// `order` and taking the first legal pair each time.  Returns the pairs
/// cancelled during this stage (by original index).
inline std::vector<std::pair<index_t, index_t>> run_stage(reducer& red, const filtered_complex& c,
                                                          int len, const std::vector<index_t>& order) {
    std::vector<index_t> position(static_cast<std::size_t>(c.size()), 0);
    for (std::size_t k = 0; k < order.size(); ++k) position[order[k]] = static_cast<index_t>(k);
    std::vector<std::pair<index_t, index_t>> pairs;
    for (;;) {
        index_t pick_i = -1, pick_j = -1;
        for (index_t i : order) {
            if (!red.alive(i)) continue;
            index_t best = -1;
            for (const auto& [r, v] : red.column(i)) {
                if (drop(c, i, r) != len) continue;
                if (best < 0 || position[r] < position[best]) best = r;
            }
            if (best >= 0) {
                pick_i = i;
                pick_j = best;
                break;
            }
        }
        if (pick_i < 0) break;
        red.cancel(pick_i, pick_j);
        pairs.push_back({pick_i, pick_j});
    }
    return pairs;
}

} // namespace detail

/// Cancel one generator pair (x_i, x_j) with <d x_i, x_j> != 0, checking
/// the filtered-lemma legality conditions, and return the witnessed
/// homotopy equivalence.
inline reduction cancel_pair(const filtered_complex& c, const std::string& id_i,
                             const std::string& id_j) {
    require_valid(c, /*check_degrees=*/false);
    detail::reducer red(c);
    index_t i = c.index_of(id_i), j = c.index_of(id_j);
    std::string why = red.legality(i, j);
    if (!why.empty()) throw error("cancelPair(" + id_i + ", " + id_j + "): " + why);
    red.cancel(i, j);
    return red.snapshot();
}

/// Run one stage of the cancellation algorithm: remove every differential
/// component of filtration drop exactly `len`.  Requires that no shorter
/// components remain.
inline reduction reduce_stage(const filtered_complex& c, int len) {
    require_valid(c, /*check_degrees=*/false);
    detail::reducer red(c);
    int m = red.min_drop();
    if (m < len && m != std::numeric_limits<int>::max())
        throw error("reduceStage(" + std::to_string(len) + "): differential still has drop-" +
                    std::to_string(m) + " components");
    std::vector<index_t> order(static_cast<std::size_t>(c.size()));
    for (index_t i = 0; i < c.size(); ++i) order[i] = i;
    detail::run_stage(red, c, len, order);
    return red.snapshot();
}

struct pages_options {
    /// Stop after this page; negative means run until the differential
    /// vanishes ("collapse").
    int max_r = -1;
    bool track_witnesses = true;
    /// Scan order over the generators (a permutation of original indices);
    /// empty means stored order.
    std::vector<index_t> order;
    /// When nonempty, replay exactly these cancellations per stage instead
    /// of scanning (used by the duality pairing).
    std::vector<std::vector<std::pair<index_t, index_t>>> replay;
};

struct pages_result {
    std::vector<page_data> pages;
    /// to_stage[i] is the witnessed reduction from the input complex to
    /// C_i; to_stage[0] is the identity reduction.  Empty when witness
    /// tracking is off.
    std::vector<reduction> to_stage;
    /// Pairs cancelled during stage r, by original generator index.
    std::vector<std::vector<std::pair<index_t, index_t>>> stage_pairs;

    rank_table table() const { return survivors_table(pages); }
};

/// The staged cancellation algorithm: for r = 0, 1, 2, ... report
/// E^r = (C_r, d_r) and then cancel every drop-r component to form
/// C_{r+1}.  Stops once the full differential vanishes (all later pages
/// equal the survivor set) or after max_r pages.
inline pages_result compute_pages(const filtered_complex& c, const pages_options& opts = {}) {
    require_valid(c, /*check_degrees=*/false);
    detail::reducer red(c, opts.track_witnesses);
    std::vector<index_t> order = opts.order;
    if (order.empty()) {
        order.resize(static_cast<std::size_t>(c.size()));
        for (index_t i = 0; i < c.size(); ++i) order[i] = i;
    }

    pages_result out;
    if (opts.track_witnesses) out.to_stage.push_back(red.snapshot());
    for (int r = 0;; ++r) {
        filtered_complex cur = red.current_complex();
        out.pages.push_back({r, cur.gens, red.current_dr(r)});
        // with an explicit page bound, stable pages keep being reported
        if (opts.max_r < 0 && red.differential_is_zero()) break;
        if (opts.max_r >= 0 && r >= opts.max_r) break;
        std::vector<std::pair<index_t, index_t>> pairs;
        if (!opts.replay.empty()) {
            if (static_cast<std::size_t>(r) >= opts.replay.size()) break;
            for (auto [i, j] : opts.replay[r]) {
                red.cancel(i, j);
                pairs.push_back({i, j});
            }
        } else {
            pairs = detail::run_stage(red, c, r, order);
        }
        out.stage_pairs.push_back(std::move(pairs));
        if (opts.track_witnesses) out.to_stage.push_back(red.snapshot());
    }
    return out;
}

/// The induced filtered chain map between stage-r complexes,
/// f_r = proj_D . f . incl_C.
inline chain_map induced_map(const chain_map& f, const pages_result& red_source,
                             const pages_result& red_target, int stage) {
    if (stage < 0 || static_cast<std::size_t>(stage) >= red_source.to_stage.size() ||
        static_cast<std::size_t>(stage) >= red_target.to_stage.size())
        throw error("induced_map: stage " + std::to_string(stage) + " not present in both reductions");
    const reduction& rs = red_source.to_stage[static_cast<std::size_t>(stage)];
    const reduction& rt = red_target.to_stage[static_cast<std::size_t>(stage)];
    if (!(rs.before == f.source) || !(rt.before == f.target))
        throw error("induced_map: reductions do not start at the map's endpoints");
    return {rs.after, rt.after, rt.proj * f.m * rs.incl, f.filtration_shift, f.convention};
}

/// Mirrored-cancellation duality pairing report.  Cancelling (x_i, x_j) in
/// C corresponds to cancelling (x_j*, x_i*) in C*; at every stage the
/// surviving generator sets coincide and d_r on the dual side is the
/// transpose of d_r, which is exactly <d_r x, y*> = <x, d_r* y*>.
struct pairing_report {
    struct page_entry {
        int r = 0;
        bool survivors_mirror = false; // same surviving index sets on both sides
        bool adjoint_ok = false;       // dual d_r equals the transpose of d_r
    };
    std::vector<page_entry> pages;
    bool ok() const {
        if (pages.empty()) return false;
        for (const auto& p : pages)
            if (!p.survivors_mirror || !p.adjoint_ok) return false;
        return true;
    }
};

inline pairing_report page_pairing(const filtered_complex& c, int max_r = -1) {
    pages_options opts;
    opts.max_r = max_r;
    opts.track_witnesses = false;
    pages_result primal = compute_pages(c, opts);

    pages_options dual_opts;
    dual_opts.max_r = max_r;
    dual_opts.track_witnesses = false;
    for (const auto& stage : primal.stage_pairs) {
        std::vector<std::pair<index_t, index_t>> mirrored;
        for (auto [i, j] : stage) mirrored.push_back({j, i});
        dual_opts.replay.push_back(std::move(mirrored));
    }
    pages_result dual = compute_pages(dualize(c), dual_opts);

    pairing_report rep;
    std::size_t n = std::min(primal.pages.size(), dual.pages.size());
    for (std::size_t k = 0; k < n; ++k) {
        pairing_report::page_entry e;
        e.r = primal.pages[k].r;
        const auto& ps = primal.pages[k].survivors;
        const auto& ds = dual.pages[k].survivors;
        e.survivors_mirror = ps.size() == ds.size();
        if (e.survivors_mirror)
            for (std::size_t g = 0; g < ps.size(); ++g)
                if (detail::dual_id(ps[g].id) != ds[g].id) {
                    e.survivors_mirror = false;
                    break;
                }
        e.adjoint_ok = dual.pages[k].dr == primal.pages[k].dr.transpose();
        rep.pages.push_back(e);
    }
    if (primal.pages.size() != dual.pages.size()) rep.pages.clear();
    return rep;
}

} // namespace specseq
