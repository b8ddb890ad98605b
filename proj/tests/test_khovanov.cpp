#include "specseq/khovanov.hpp"

#include <catch_amalgamated.hpp>

#include <random>

using namespace specseq;
using namespace specseq::kh;

namespace {

pd_code trefoil() {
    pd_code pd;
    pd.crossings = {{{1, 4, 2, 5}, 0}, {{3, 6, 4, 1}, 0}, {{5, 2, 6, 3}, 0}};
    return pd;
}

pd_code hopf() {
    pd_code pd;
    pd.crossings = {{{1, 3, 2, 4}, 0}, {{3, 1, 4, 2}, 0}};
    return pd;
}

pd_code figure_eight() {
    pd_code pd;
    pd.crossings = {{{4, 2, 5, 1}, 0}, {{8, 6, 1, 5}, 0}, {{6, 3, 7, 4}, 0}, {{2, 7, 3, 8}, 0}};
    return pd;
}

index_t reduced_rank(const pd_code& pd, int basepoint = 1) {
    auto built = build_complex(pd, /*reduced=*/true, pd.size() ? basepoint : 0);
    return homology_total(built.assembled.complex);
}

index_t unreduced_rank(const pd_code& pd) {
    auto built = build_complex(pd, /*reduced=*/false);
    return homology_total(built.assembled.complex);
}

} // namespace

TEST_CASE("pd validation") {
    pd_code bad;
    bad.crossings = {{{1, 2, 3, 4}, 0}};
    CHECK_THROWS_WITH(bad.check(), Catch::Matchers::ContainsSubstring("occurs 1"));

    // two disjoint kinks form a split diagram
    pd_code split;
    split.crossings = {{{1, 1, 2, 2}, 0}, {{3, 3, 4, 4}, 0}};
    CHECK_THROWS_WITH(split.check(), Catch::Matchers::ContainsSubstring("split"));

    CHECK_NOTHROW(trefoil().check());
    CHECK_NOTHROW(hopf().check());
}

TEST_CASE("resolutions count circles correctly") {
    // empty diagram: the marked unknot circle
    pd_code unknot;
    CHECK(resolve(unknot, "").circles.size() == 1);

    CHECK(resolve(trefoil(), "aaa").circles.size() == 2);
    CHECK(resolve(hopf(), "bb").circles.size() == 2);
    CHECK(resolve(figure_eight(), "aaaa").circles.size() == 3);

    // circles ordered by least arc label and sorted inside
    auto r = resolve(trefoil(), "aaa");
    CHECK(r.circles[0].front() == 1);
    CHECK(std::is_sorted(r.circles[0].begin(), r.circles[0].end()));
}

TEST_CASE("determinant oracle on the corpus") {
    pd_code unknot;
    CHECK(determinant(unknot) == 1);
    CHECK(determinant(hopf()) == 2);
    CHECK(determinant(trefoil()) == 3);
    CHECK(determinant(figure_eight()) == 5);

    // one-crossing kink diagrams of the unknot
    pd_code kink;
    kink.crossings = {{{1, 1, 2, 2}, 0}};
    CHECK(determinant(kink) == 1);
}

TEST_CASE("braid closures match the explicit diagrams") {
    auto tre = pd_from_braid(2, {1, 1, 1});
    CHECK(determinant(tre) == 3);
    auto hop = pd_from_braid(2, {1, 1});
    CHECK(determinant(hop) == 2);
    auto cinq = pd_from_braid(2, {1, 1, 1, 1, 1}); // 5_1
    CHECK(determinant(cinq) == 5);
    CHECK_THROWS_WITH(pd_from_braid(3, {1, 1}), Catch::Matchers::ContainsSubstring("split"));
}

TEST_CASE("unknot ranks") {
    pd_code unknot;
    CHECK(unreduced_rank(unknot) == 2);
    CHECK(reduced_rank(unknot) == 1);
}

TEST_CASE("unknot with a kink still has reduced rank 1") {
    pd_code kink;
    kink.crossings = {{{1, 1, 2, 2}, 0}};
    CHECK(reduced_rank(kink) == 1);
    CHECK(unreduced_rank(kink) == 2);
}

TEST_CASE("reduced GF(2) ranks equal the determinant on the alternating corpus") {
    CHECK(reduced_rank(hopf()) == determinant(hopf()));
    CHECK(reduced_rank(trefoil()) == determinant(trefoil()));
    CHECK(reduced_rank(figure_eight()) == determinant(figure_eight()));
}

TEST_CASE("unreduced rank is twice the reduced rank") {
    for (const pd_code& pd : {hopf(), trefoil(), figure_eight()})
        CHECK(unreduced_rank(pd) == 2 * reduced_rank(pd));
}

TEST_CASE("reduced vertices have half the unreduced rank") {
    auto red = build_complex(trefoil(), true, 1);
    auto unred = build_complex(trefoil(), false);
    for (const auto& [c, v] : red.cube_data.vertices)
        CHECK(2 * v.size() == unred.cube_data.vertices.at(c).size());
}

TEST_CASE("quantum grading is preserved by the assembled differential") {
    for (bool reduced : {false, true}) {
        auto built = build_complex(figure_eight(), reduced, 1);
        const auto& c = built.assembled.complex;
        for (const auto& e : c.d.entries())
            CHECK(c.gens[e.row].extra_gradings.at("quantum") ==
                  c.gens[e.col].extra_gradings.at("quantum"));
    }
}

TEST_CASE("pages collapse at E^2 with vertex groups on E^1") {
    for (const pd_code& pd : {hopf(), trefoil()}) {
        auto built = build_complex(pd, true, 1);
        cube::assembly_options opts;
        opts.letter_weight = {0, 1, 0};
        auto pages = cube::pages_of_cube(built.cube_data, opts);
        CHECK(pages.e1_matches_vertex_homology);
        CHECK(pages.d1_supported_on_successors);
        // only drop-1 components exist, so the sequence collapses at r = 2
        CHECK(pages.pages.pages.back().r <= 2);
        std::map<int, index_t> final_ranks;
        for (const auto& g : pages.pages.pages.back().survivors) final_ranks[g.degree]++;
        std::erase_if(final_ranks, [](const auto& kv) { return kv.second == 0; });
        CHECK(final_ranks == homology_ranks(built.assembled.complex));
    }
}

TEST_CASE("crossing signs shift the homological grading") {
    // right-handed trefoil braid: three positive crossings, n- = 0
    auto pd = pd_from_braid(2, {1, 1, 1});
    auto built = build_complex(pd, true, pd.crossings[0].arcs[0]);
    CHECK(built.gradings_shifted);
    CHECK(built.n_plus == 3);
    CHECK(built.n_minus == 0);
    // unsigned diagrams are flagged unshifted
    auto plain = build_complex(trefoil(), true, 1);
    CHECK_FALSE(plain.gradings_shifted);
}

TEST_CASE("signed mirror braids shift gradings oppositely") {
    auto left = pd_from_braid(2, {-1, -1, -1});
    auto built = build_complex(left, true, left.crossings[0].arcs[0]);
    CHECK(built.n_minus == 3);
    CHECK(homology_total(built.assembled.complex) == 3);
    // engine degree = n_minus - weight: all degrees lie in [n_minus - n, n_minus]
    for (const auto& g : built.assembled.complex.gens) {
        CHECK(g.degree >= 0);
        CHECK(g.degree <= 3);
    }
}

TEST_CASE("reduced complex requires a basepoint present in the diagram") {
    CHECK_THROWS_WITH(build_complex(trefoil(), true, 99),
                      Catch::Matchers::ContainsSubstring("basepoint"));
    CHECK_THROWS_WITH(build_complex(trefoil(), true, 0),
                      Catch::Matchers::ContainsSubstring("basepoint"));
}

TEST_CASE("PD text form parses") {
    auto pd = parse_pd_text("PD[X(1,4,2,5), X(3,6,4,1), X(5,2,6,3)]");
    REQUIRE(pd.size() == 3);
    CHECK(pd.crossings[0].arcs == std::array<int, 4>{1, 4, 2, 5});
    CHECK(determinant(pd) == 3);
    CHECK(parse_pd_text("PD[]").size() == 0);
    CHECK_THROWS_AS(parse_pd_text("PD[X(1,2)]"), error);
}

TEST_CASE("parallel resolution matches the sequential path") {
    auto seq = build_complex(figure_eight(), true, 1, 1);
    auto par = build_complex(figure_eight(), true, 1, 4);
    CHECK(seq.assembled.complex == par.assembled.complex);
}

TEST_CASE("random braid closures build valid cubes") {
    std::mt19937_64 rng(20250809);
    int built_count = 0;
    while (built_count < 25) {
        int strands = 2 + static_cast<int>(rng() % 2);
        int len = 4 + static_cast<int>(rng() % 5);
        std::vector<int> word;
        for (int i = 0; i < len; ++i) {
            int k = 1 + static_cast<int>(rng() % (strands - 1));
            word.push_back(rng() % 2 ? k : -k);
        }
        pd_code pd;
        try {
            pd = pd_from_braid(strands, word);
        } catch (const error&) {
            continue; // an uncrossed strand; resample
        }
        ++built_count;
        int bp = pd.crossings[0].arcs[0];
        // D^2 = 0 is checked inside assemble; reaching here means it holds
        auto red = build_complex(pd, true, bp);
        auto unred = build_complex(pd, false);
        CHECK(unreduced_rank(pd) == 2 * homology_total(red.assembled.complex));
        for (const auto& e : unred.assembled.complex.d.entries())
            CHECK(unred.assembled.complex.gens[e.row].extra_gradings.at("quantum") ==
                  unred.assembled.complex.gens[e.col].extra_gradings.at("quantum"));
        CHECK(homology_total(red.assembled.complex) >= kh::determinant(pd));
    }
}

TEST_CASE("bigraded ranks refine the total rank") {
    for (bool reduced : {true, false}) {
        auto built = build_complex(trefoil(), reduced, 1);
        auto table = bigraded_ranks(built.assembled.complex);
        index_t total = 0;
        for (const auto& [key, r] : table) total += r;
        CHECK(total == homology_total(built.assembled.complex));
    }
    // signed right-handed trefoil: reduced Khovanov homology is supported
    // in conventional gradings i = 0, 2, 3 (engine degree = -i)
    auto pd = pd_from_braid(2, {1, 1, 1});
    auto built = build_complex(pd, true, pd.crossings[0].arcs[0]);
    auto table = bigraded_ranks(built.assembled.complex);
    std::set<int> degrees;
    for (const auto& [key, r] : table) degrees.insert(key.first);
    CHECK(degrees == std::set<int>{-3, -2, 0});
}
