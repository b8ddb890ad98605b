#pragma once

#include "cube.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cstdint>
#include <map>
#include <numeric>
#include <string>
#include <thread>
#include <vector>

namespace specseq {
namespace kh {

/// Planar-diagram presentation of a link: one 4-tuple of arc labels per
/// crossing, listed from the incoming under-strand counter-clockwise.
/// The empty diagram is the crossingless unknot (one marked circle).
struct pd_code {
    struct crossing {
        std::array<int, 4> arcs{};
        int sign = 0; // +1 / -1 when supplied, 0 when unknown
    };
    std::vector<crossing> crossings;

    std::size_t size() const { return crossings.size(); }

    bool has_signs() const {
        for (const auto& c : crossings)
            if (c.sign == 0) return false;
        return !crossings.empty();
    }

    int negative_crossings() const {
        int n = 0;
        for (const auto& c : crossings)
            if (c.sign < 0) ++n;
        return n;
    }
    int positive_crossings() const {
        int n = 0;
        for (const auto& c : crossings)
            if (c.sign > 0) ++n;
        return n;
    }

    std::vector<int> arc_labels() const {
        std::vector<int> arcs;
        for (const auto& c : crossings)
            for (int a : c.arcs) arcs.push_back(a);
        std::sort(arcs.begin(), arcs.end());
        arcs.erase(std::unique(arcs.begin(), arcs.end()), arcs.end());
        return arcs;
    }

    void check() const {
        std::map<int, int> count;
        for (const auto& c : crossings)
            for (int a : c.arcs) {
                if (a <= 0) throw error("arc labels must be positive integers");
                count[a]++;
            }
        for (const auto& [a, n] : count)
            if (n != 2)
                throw error("arc " + std::to_string(a) + " occurs " + std::to_string(n) +
                            " times (each arc must occur exactly twice)");
        if (crossings.empty()) return;
        // connectivity of the 4-valent graph: crossings sharing an arc
        std::map<int, std::vector<std::size_t>> by_arc;
        for (std::size_t i = 0; i < crossings.size(); ++i)
            for (int a : crossings[i].arcs) by_arc[a].push_back(i);
        std::vector<bool> seen(crossings.size(), false);
        std::vector<std::size_t> stack{0};
        seen[0] = true;
        while (!stack.empty()) {
            std::size_t i = stack.back();
            stack.pop_back();
            for (int a : crossings[i].arcs)
                for (std::size_t j : by_arc[a])
                    if (!seen[j]) {
                        seen[j] = true;
                        stack.push_back(j);
                    }
        }
        for (bool s : seen)
            if (!s) throw error("split diagram: the 4-valent graph is disconnected");
    }
};

/// Compact text form: PD[X(1,4,2,5), X(3,6,4,1), X(5,2,6,3)]
inline pd_code parse_pd_text(const std::string& text) {
    pd_code pd;
    std::size_t pos = 0;
    auto skip_ws = [&] {
        while (pos < text.size() && (std::isspace(static_cast<unsigned char>(text[pos])) != 0)) ++pos;
    };
    auto expect = [&](char c) {
        skip_ws();
        if (pos >= text.size() || text[pos] != c)
            throw error(std::string("PD parse error: expected '") + c + "' at offset " +
                        std::to_string(pos));
        ++pos;
    };
    skip_ws();
    if (text.compare(pos, 2, "PD") != 0) throw error("PD parse error: missing PD[...] wrapper");
    pos += 2;
    expect('[');
    skip_ws();
    if (pos < text.size() && text[pos] == ']') return pd; // empty diagram
    for (;;) {
        skip_ws();
        if (text[pos] != 'X') throw error("PD parse error: expected X(...)");
        ++pos;
        expect('(');
        pd_code::crossing cr;
        for (int k = 0; k < 4; ++k) {
            skip_ws();
            std::size_t end = pos;
            while (end < text.size() && std::isdigit(static_cast<unsigned char>(text[end])) != 0) ++end;
            if (end == pos) throw error("PD parse error: expected arc label");
            cr.arcs[static_cast<std::size_t>(k)] = std::stoi(text.substr(pos, end - pos));
            pos = end;
            if (k < 3) expect(',');
        }
        expect(')');
        pd.crossings.push_back(cr);
        skip_ws();
        if (pos < text.size() && text[pos] == ',') {
            ++pos;
            continue;
        }
        break;
    }
    expect(']');
    return pd;
}

/// Circles of the complete smoothing given by a code over {a, b}:
/// a joins (arcs[0], arcs[3]) and (arcs[1], arcs[2]);
/// b joins (arcs[0], arcs[1]) and (arcs[2], arcs[3]).
/// Circles are sorted arc lists ordered by least arc label.
struct resolution {
    cube::code vertex;
    std::vector<std::vector<int>> circles;
};

inline resolution resolve(const pd_code& pd, const cube::code& vertex) {
    pd.check();
    if (vertex.size() != pd.size()) throw error("resolution code length != crossing count");
    cube::check_code(vertex, cube::alphabet::ab);
    resolution res;
    res.vertex = vertex;
    if (pd.crossings.empty()) {
        res.circles.push_back({}); // the marked unknot circle carries no arc
        return res;
    }
    std::map<int, int> parent;
    auto find = [&](int a) {
        int root = a;
        while (parent[root] != root) root = parent[root];
        while (parent[a] != root) {
            int next = parent[a];
            parent[a] = root;
            a = next;
        }
        return root;
    };
    for (int a : pd.arc_labels()) parent[a] = a;
    auto unite = [&](int a, int b) { parent[find(a)] = find(b); };
    for (std::size_t i = 0; i < pd.size(); ++i) {
        const auto& arcs = pd.crossings[i].arcs;
        if (vertex[i] == 'a') {
            unite(arcs[0], arcs[3]);
            unite(arcs[1], arcs[2]);
        } else {
            unite(arcs[0], arcs[1]);
            unite(arcs[2], arcs[3]);
        }
    }
    std::map<int, std::vector<int>> classes;
    for (int a : pd.arc_labels()) classes[find(a)].push_back(a);
    for (auto& [root, arcs] : classes) {
        std::sort(arcs.begin(), arcs.end());
        res.circles.push_back(arcs);
    }
    std::sort(res.circles.begin(), res.circles.end(),
              [](const auto& x, const auto& y) { return x.front() < y.front(); });
    return res;
}

/// Link determinant |V_L(-1)| by the Kauffman bracket state sum evaluated
/// at A^2 = i: the loop value -A^2 - A^-2 vanishes there, so only
/// single-circle states contribute and the writhe normalization has unit
/// modulus.  Completely independent of the cube machinery.
inline long long determinant(const pd_code& pd) {
    pd.check();
    const std::size_t n = pd.size();
    if (n == 0) return 1;
    if (n > 24) throw error("determinant oracle limited to 24 crossings");
    // accumulate sum of A^(sigma mod 8) over single-circle states
    std::array<long long, 8> coeff{};
    cube::code vertex(n, 'a');
    for (std::uint64_t state = 0; state < (std::uint64_t(1) << n); ++state) {
        int ones = 0;
        for (std::size_t k = 0; k < n; ++k) {
            bool one = (state >> k) & 1;
            vertex[k] = one ? 'b' : 'a';
            if (one) ++ones;
        }
        resolution res = resolve(pd, vertex);
        if (res.circles.size() != 1) continue;
        int sigma = static_cast<int>(n) - 2 * ones; // #a - #b
        coeff[static_cast<std::size_t>(((sigma % 8) + 8) % 8)] += 1;
    }
    // reduce powers of A with A^2 = i, A^4 = -1: z = g0 + g1 A, and one of
    // g0, g1 vanishes because all exponents share the parity of n
    long long re = coeff[0] - coeff[4];
    long long im = coeff[2] - coeff[6];
    long long re_odd = coeff[1] - coeff[5];
    long long im_odd = coeff[3] - coeff[7];
    if (n % 2 == 0) {
        if (re_odd != 0 || im_odd != 0) throw error("determinant: mixed exponent parity");
        if (re != 0 && im != 0) throw error("determinant: bracket value not a Gaussian unit multiple");
        return std::abs(re) + std::abs(im);
    }
    if (re != 0 || im != 0) throw error("determinant: mixed exponent parity");
    if (re_odd != 0 && im_odd != 0) throw error("determinant: bracket value not a Gaussian unit multiple");
    return std::abs(re_odd) + std::abs(im_odd);
}

namespace detail {

/// generators of a vertex are maps circles -> {1, x} encoded as bitmasks
/// (bit set = label x); quantum grading (#1 - #x) + weight is baked in,
/// plus the orientation shift when crossing signs are known.
inline filtered_complex vertex_complex(const fp_field& field, const resolution& res, int weight,
                                       int quantum_shift, bool reduced, int basepoint_circle) {
    const int nc = static_cast<int>(res.circles.size());
    std::vector<generator> gens;
    for (std::uint32_t mask = 0; mask < (std::uint32_t(1) << nc); ++mask) {
        if (reduced && ((mask >> basepoint_circle) & 1) == 0) continue;
        generator g;
        g.id = "v" + std::to_string(mask);
        g.degree = 0;
        g.filtration = 0;
        int xs = 0;
        for (int k = 0; k < nc; ++k) xs += (mask >> k) & 1;
        g.extra_gradings["quantum"] = (nc - 2 * xs) + weight + quantum_shift;
        gens.push_back(std::move(g));
    }
    index_t n = static_cast<index_t>(gens.size());
    return {field, std::move(gens), sparse_matrix(field, n, n)};
}

struct circle_match {
    // indices of the target circles of each source circle under a merge,
    // or the pair produced by a split
    std::vector<int> source_to_target; // -1 for the circles being rewired
    bool merge = false;
    int src_a = -1, src_b = -1, tgt = -1;  // merge: (src_a, src_b) -> tgt
    int src = -1, tgt_a = -1, tgt_b = -1;  // split: src -> (tgt_a, tgt_b)
};

inline circle_match match_circles(const resolution& from, const resolution& to) {
    circle_match m;
    m.source_to_target.assign(from.circles.size(), -1);
    std::map<std::vector<int>, int> to_index;
    for (std::size_t k = 0; k < to.circles.size(); ++k) to_index[to.circles[k]] = static_cast<int>(k);
    std::vector<int> unmatched_from, unmatched_to(to.circles.size());
    std::iota(unmatched_to.begin(), unmatched_to.end(), 0);
    for (std::size_t k = 0; k < from.circles.size(); ++k) {
        auto it = to_index.find(from.circles[k]);
        if (it != to_index.end()) {
            m.source_to_target[k] = it->second;
            unmatched_to.erase(std::find(unmatched_to.begin(), unmatched_to.end(), it->second));
        } else {
            unmatched_from.push_back(static_cast<int>(k));
        }
    }
    if (from.circles.size() == to.circles.size() + 1) {
        m.merge = true;
        if (unmatched_from.size() != 2 || unmatched_to.size() != 1)
            throw error("khovanov edge: merge circle matching failed");
        m.src_a = unmatched_from[0];
        m.src_b = unmatched_from[1];
        m.tgt = unmatched_to[0];
    } else if (from.circles.size() + 1 == to.circles.size()) {
        m.merge = false;
        if (unmatched_from.size() != 1 || unmatched_to.size() != 2)
            throw error("khovanov edge: split circle matching failed");
        m.src = unmatched_from[0];
        m.tgt_a = unmatched_to[0];
        m.tgt_b = unmatched_to[1];
    } else {
        throw error("khovanov edge: circle count must change by one");
    }
    return m;
}

/// merge: 1.1 -> 1, 1.x = x.1 -> x, x.x -> 0;  split: 1 -> 1x + x1, x -> xx.
inline sparse_matrix edge_map(const fp_field& field, const resolution& from, const resolution& to,
                              bool reduced, int bp_from, int bp_to) {
    circle_match m = match_circles(from, to);
    const int nf = static_cast<int>(from.circles.size());
    const int nt = static_cast<int>(to.circles.size());

    auto row_index = [&](std::uint32_t mask) -> index_t {
        // position of a target mask among that vertex's generators: with
        // the basepoint bit forced on, delete that bit and read the rest
        if (!reduced) return static_cast<index_t>(mask);
        if (((mask >> bp_to) & 1) == 0) return -1;
        std::uint32_t low = mask & ((std::uint32_t(1) << bp_to) - 1);
        std::uint32_t high = mask >> (bp_to + 1);
        return static_cast<index_t>(low | (high << bp_to));
    };

    std::vector<sparse_matrix::entry> entries;
    index_t col = 0;
    for (std::uint32_t mask = 0; mask < (std::uint32_t(1) << nf); ++mask) {
        if (reduced && ((mask >> bp_from) & 1) == 0) continue;
        auto common_bits = [&](std::uint32_t out_bits) {
            for (int k = 0; k < nf; ++k) {
                int t = m.source_to_target[static_cast<std::size_t>(k)];
                if (t >= 0 && ((mask >> k) & 1)) out_bits |= std::uint32_t(1) << t;
            }
            return out_bits;
        };
        if (m.merge) {
            bool xa = (mask >> m.src_a) & 1, xb = (mask >> m.src_b) & 1;
            if (xa && xb) {
                ++col;
                continue; // x.x -> 0
            }
            std::uint32_t out = common_bits((xa || xb) ? (std::uint32_t(1) << m.tgt) : 0);
            index_t r = row_index(out);
            if (r >= 0) entries.push_back({r, col, 1});
        } else {
            bool xs = (mask >> m.src) & 1;
            if (xs) {
                std::uint32_t out = common_bits((std::uint32_t(1) << m.tgt_a) |
                                                (std::uint32_t(1) << m.tgt_b));
                index_t r = row_index(out);
                if (r >= 0) entries.push_back({r, col, 1});
            } else {
                for (int which : {m.tgt_a, m.tgt_b}) {
                    std::uint32_t out = common_bits(std::uint32_t(1) << which);
                    index_t r = row_index(out);
                    if (r >= 0) entries.push_back({r, col, 1});
                }
            }
        }
        ++col;
    }
    index_t rows = reduced ? (index_t(1) << (nt - 1)) : (index_t(1) << nt);
    index_t cols = reduced ? (index_t(1) << (nf - 1)) : (index_t(1) << nf);
    return sparse_matrix::from_entries(field, rows, cols, entries);
}

inline int circle_containing(const resolution& res, int arc) {
    for (std::size_t k = 0; k < res.circles.size(); ++k)
        if (std::binary_search(res.circles[k].begin(), res.circles[k].end(), arc))
            return static_cast<int>(k);
    throw error("basepoint arc " + std::to_string(arc) + " not found in the diagram");
}

template <typename Fn>
void parallel_for(std::size_t count, unsigned jobs, Fn&& fn) {
    if (jobs <= 1 || count < 2) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    jobs = std::min<unsigned>(jobs, static_cast<unsigned>(count));
    std::vector<std::thread> workers;
    std::atomic<std::size_t> next{0};
    for (unsigned w = 0; w < jobs; ++w)
        workers.emplace_back([&] {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= count) return;
                fn(i);
            }
        });
    for (auto& t : workers) t.join();
}

} // namespace detail

struct build_result {
    cube::cube_complex cube_data;
    cube::assembly_result assembled;
    int n_plus = 0;
    int n_minus = 0;
    bool gradings_shifted = false; // false when crossing signs were absent
    bool reduced = false;
};

/// GF(2) Khovanov cube of a PD diagram: vertex spaces are the free
/// GF(2)[x]/(x^2) tensor factors per circle (the reduced variant keeps the
/// basepoint factor at x), edge maps are the merge/split maps, and the
/// assembled complex is filtered by the negated number of 1-smoothings.
inline build_result build_complex(const pd_code& pd, bool reduced = false, int basepoint_arc = 0,
                                  unsigned jobs = 1) {
    pd.check();
    const fp_field field(2);
    const std::size_t n = pd.size();
    if (n > 16) throw error("khovanov cube limited to 16 crossings");
    if (reduced && n > 0 && basepoint_arc <= 0)
        throw error("reduced complex requires a basepoint arc");

    build_result out;
    out.reduced = reduced;
    out.n_plus = pd.positive_crossings();
    out.n_minus = pd.negative_crossings();
    out.gradings_shifted = pd.has_signs() || n == 0;
    const int quantum_shift = out.gradings_shifted ? out.n_plus - 2 * out.n_minus : 0;

    out.cube_data.n = n;
    out.cube_data.al = cube::alphabet::ab;

    cube::code_set full = cube::code_set::full(n, cube::alphabet::ab);
    std::vector<cube::code> codes(full.codes.begin(), full.codes.end());
    std::vector<resolution> res(codes.size());
    detail::parallel_for(codes.size(), jobs,
                         [&](std::size_t k) { res[k] = resolve(pd, codes[k]); });
    std::map<cube::code, std::size_t> res_index;
    for (std::size_t k = 0; k < codes.size(); ++k) res_index[codes[k]] = k;

    for (std::size_t k = 0; k < codes.size(); ++k) {
        int bp = reduced && n > 0 ? detail::circle_containing(res[k], basepoint_arc) : 0;
        if (reduced && n == 0) bp = 0;
        out.cube_data.vertices.emplace(
            codes[k], detail::vertex_complex(field, res[k], cube::weight(codes[k]), quantum_shift,
                                             reduced, bp));
    }
    for (const auto& c : codes) {
        for (const auto& succ : cube::immediate_successors(c, cube::alphabet::ab)) {
            const resolution& rf = res[res_index[c]];
            const resolution& rt = res[res_index[succ]];
            int bpf = reduced && n > 0 ? detail::circle_containing(rf, basepoint_arc) : 0;
            int bpt = reduced && n > 0 ? detail::circle_containing(rt, basepoint_arc) : 0;
            out.cube_data.seq_maps.emplace(std::vector<cube::code>{c, succ},
                                           detail::edge_map(field, rf, rt, reduced, bpf, bpt));
        }
    }

    cube::assembly_options opts;
    opts.letter_weight = {0, 1, 0};
    opts.degree_base = out.gradings_shifted ? out.n_minus : 0;
    out.assembled = cube::assemble(out.cube_data, full, opts);
    return out;
}

/// Homology ranks per (homological degree, quantum grading).  The
/// differential preserves the quantum grading, so the assembled complex
/// splits into one summand per quantum value.
inline std::map<std::pair<int, int>, index_t> bigraded_ranks(const filtered_complex& c) {
    std::map<int, std::vector<index_t>> by_quantum;
    for (index_t i = 0; i < c.size(); ++i)
        by_quantum[c.gens[i].extra_gradings.at("quantum")].push_back(i);
    std::map<std::pair<int, int>, index_t> out;
    for (const auto& [q, idx] : by_quantum) {
        std::vector<generator> gens;
        for (index_t i : idx) gens.push_back(c.gens[i]);
        filtered_complex sub{c.field, std::move(gens), c.d.select(idx, idx)};
        for (const auto& [deg, r] : homology_ranks(sub)) out[{deg, q}] = r;
    }
    return out;
}

/// Braid-word closure as a PD code; positive k means the strands at
/// positions k, k+1 cross with the left strand passing under.  Strands are
/// 1-based; every strand must be involved in at least one crossing.
inline pd_code pd_from_braid(int strands, const std::vector<int>& word) {
    if (strands < 2) throw error("braid needs at least two strands");
    pd_code pd;
    int fresh = strands;
    std::vector<int> cur(static_cast<std::size_t>(strands));
    std::iota(cur.begin(), cur.end(), 1);
    std::vector<bool> used(static_cast<std::size_t>(strands), false);
    for (int letter : word) {
        int k = std::abs(letter) - 1;
        if (letter == 0 || k + 1 >= strands) throw error("braid letter out of range");
        used[static_cast<std::size_t>(k)] = used[static_cast<std::size_t>(k) + 1] = true;
        int left = cur[static_cast<std::size_t>(k)], right = cur[static_cast<std::size_t>(k) + 1];
        int out_left = ++fresh, out_right = ++fresh;
        pd_code::crossing cr;
        if (letter > 0) {
            // under-strand: bottom-left -> top-right
            cr.arcs = {left, right, out_right, out_left};
            cr.sign = +1;
        } else {
            // under-strand: bottom-right -> top-left
            cr.arcs = {right, out_right, out_left, left};
            cr.sign = -1;
        }
        pd.crossings.push_back(cr);
        cur[static_cast<std::size_t>(k)] = out_left;
        cur[static_cast<std::size_t>(k) + 1] = out_right;
    }
    for (bool u : used)
        if (!u) throw error("braid closure with an uncrossed strand is a split diagram");
    // close up: identify the outgoing arc of each strand with its start
    std::map<int, int> relabel;
    for (int s = 0; s < strands; ++s) relabel[cur[static_cast<std::size_t>(s)]] = s + 1;
    for (auto& c : pd.crossings)
        for (int& a : c.arcs)
            if (auto it = relabel.find(a); it != relabel.end()) a = it->second;
    return pd;
}

} // namespace kh
} // namespace specseq
