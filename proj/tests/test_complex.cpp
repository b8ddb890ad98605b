#include "specseq/complex.hpp"
#include "specseq/generators.hpp"

#include <catch_amalgamated.hpp>

using namespace specseq;

namespace {

filtered_complex make(fp_field f, std::vector<generator> gens,
                      std::vector<sparse_matrix::entry> es) {
    index_t n = static_cast<index_t>(gens.size());
    return {f, std::move(gens), sparse_matrix::from_entries(f, n, n, es)};
}

const fp_field f2(2);

} // namespace

TEST_CASE("validate accepts a lone generator") {
    auto c = make(f2, {{"x", 0, 0, {}}}, {});
    CHECK(validate(c).ok());
}

TEST_CASE("validate flags a filtration violation") {
    // d x = y with filtration(y) > filtration(x)
    auto c = make(f2, {{"x", 1, 0, {}}, {"y", 0, 3, {}}}, {{1, 0, 1}});
    auto rep = validate(c);
    REQUIRE_FALSE(rep.ok());
    CHECK(rep.issues[0].kind == validation_issue::filtration_step);
}

TEST_CASE("validate flags d^2 != 0") {
    auto c = make(f2, {{"x", 2, 0, {}}, {"y", 1, 0, {}}, {"z", 0, 0, {}}},
                  {{1, 0, 1}, {2, 1, 1}}); // dx = y, dy = z
    auto rep = validate(c);
    REQUIRE_FALSE(rep.ok());
    bool found = false;
    for (const auto& i : rep.issues) found = found || i.kind == validation_issue::d_squared;
    CHECK(found);
}

TEST_CASE("validate flags duplicate ids and degree steps") {
    auto dup = make(f2, {{"x", 0, 0, {}}, {"x", 1, 0, {}}}, {});
    CHECK_FALSE(validate(dup).ok());
    auto bad_deg = make(f2, {{"x", 5, 0, {}}, {"y", 0, 0, {}}}, {{1, 0, 1}});
    auto rep = validate(bad_deg);
    REQUIRE_FALSE(rep.ok());
    CHECK(rep.issues[0].kind == validation_issue::degree_step);
}

TEST_CASE("homology of a zero differential counts generators per degree") {
    auto c = make(f2, {{"a", 1, 0, {}}, {"b", 1, 0, {}}, {"v", 0, 0, {}}}, {});
    auto h = homology_ranks(c);
    CHECK(h[1] == 2);
    CHECK(h[0] == 1);
}

TEST_CASE("homology of an acyclic cone vanishes") {
    auto c = make(f2, {{"x", 1, 0, {}}, {"y", 0, 0, {}}}, {{1, 0, 1}});
    CHECK(homology_ranks(c).empty());
    CHECK(homology_total(c) == 0);
}

TEST_CASE("homology of the circle complex") {
    // a, b in degree 1; v, w in degree 0; da = db = v + w
    auto c = make(f2,
                  {{"a", 1, 0, {}}, {"b", 1, 0, {}}, {"v", 0, 0, {}}, {"w", 0, 0, {}}},
                  {{2, 0, 1}, {3, 0, 1}, {2, 1, 1}, {3, 1, 1}});
    auto h = homology_ranks(c);
    CHECK(h[1] == 1);
    CHECK(h[0] == 1);
}

TEST_CASE("dualize negates gradings and transposes the differential") {
    auto c = make(f2, {{"x", 1, 2, {{"quantum", 3}}}, {"y", 0, 0, {}}}, {{1, 0, 1}});
    auto dual = dualize(c);
    CHECK(dual.gens[0].id == "x*");
    CHECK(dual.gens[0].degree == -1);
    CHECK(dual.gens[0].filtration == -2);
    CHECK(dual.gens[0].extra_gradings.at("quantum") == -3);
    // dx = y becomes d* y* = x*
    CHECK(dual.d.at(0, 1) == 1);
    CHECK(validate(dual).ok());
    CHECK(dualize(dual) == c);
}

TEST_CASE("dual pairing identity and rank mirroring on random complexes") {
    gen::rng_t rng(42);
    for (int trial = 0; trial < 25; ++trial) {
        auto c = gen::random_complex(f2, 14, 3, rng);
        auto dual = dualize(c);
        // <d x_j, x_i*> = <x_j, d* x_i*> : transpose identity
        CHECK(dual.d == c.d.transpose());
        auto h = homology_ranks(c);
        auto hd = homology_ranks(dual);
        for (const auto& [deg, r] : h) CHECK(hd[-deg] == r);
        for (const auto& [deg, r] : hd) CHECK(h[-deg] == r);
    }
}

TEST_CASE("cone of the identity is acyclic") {
    auto a = make(f2, {{"x", 0, 0, {}}}, {});
    chain_map id{a, a, sparse_matrix::identity(f2, 1), 0};
    auto cone = mapping_cone(id);
    CHECK(cone.cone.size() == 2);
    CHECK(homology_ranks(cone.cone).empty());
    CHECK(validate(cone.cone).ok());
}

TEST_CASE("cone of the zero map has homology in adjacent degrees") {
    auto a = make(f2, {{"x", 0, 0, {}}}, {});
    auto b = make(f2, {{"y", 0, 0, {}}}, {});
    chain_map zero{a, b, sparse_matrix(f2, 1, 1), 0};
    auto cone = mapping_cone(zero);
    auto h = homology_ranks(cone.cone);
    CHECK(h[1] == 1);
    CHECK(h[0] == 1);
}

TEST_CASE("cone exact sequence maps are chain maps and the connecting map is f") {
    gen::rng_t rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        auto a = gen::random_complex(f2, 10, 2, rng);
        auto b = gen::random_complex(f2, 10, 2, rng);
        auto f = gen::random_chain_map(a, b, rng);
        REQUIRE(validate(f).ok());
        auto cone = mapping_cone(f);
        CHECK(validate(cone.cone).ok());
        CHECK(validate(cone.incl).ok());
        CHECK(validate(cone.proj).ok());

        // Euler characteristic of the cone is chi(B) - chi(A)
        CHECK(euler_characteristic(cone.cone) ==
              euler_characteristic(b) - euler_characteristic(a));

        // rank bookkeeping for the long exact sequence: with f_* the map
        // induced on homology, dim H_d(MC) = coker(f_*)_d + ker(f_*)_{d-1}
        auto ha = homology_ranks(a);
        auto hb = homology_ranks(b);
        auto hc = homology_ranks(cone.cone);
        std::set<int> degs;
        for (const auto& [d, r] : ha) degs.insert(d);
        for (const auto& [d, r] : hb) degs.insert(d);
        std::map<int, index_t> frank;
        {
            // per-degree rank of induced map: restrict to degree blocks
            for (int d : degs) {
                std::vector<index_t> acols, brows;
                for (index_t i = 0; i < a.size(); ++i)
                    if (a.gens[i].degree == d) acols.push_back(i);
                std::vector<index_t> arows(static_cast<std::size_t>(a.size()));
                for (index_t i = 0; i < a.size(); ++i) arows[i] = i;
                std::vector<index_t> ball(static_cast<std::size_t>(b.size()));
                for (index_t i = 0; i < b.size(); ++i) ball[i] = i;
                // cycles of a in degree d
                sparse_matrix za = kernel_basis(a.d.select(arows, acols));
                matrix_builder lift(f2, a.size(), za.cols());
                for (index_t k = 0; k < za.cols(); ++k)
                    for (const auto& [r, v] : za.column(k)) lift.add(acols[r], k, v);
                sparse_matrix zfull = lift.build();
                frank[d] = rank(hconcat(f.m * zfull, b.d)) - rank(b.d);
            }
        }
        for (int d : degs) {
            index_t expect = (hb.count(d) ? hb[d] : 0) - frank[d] +
                             (ha.count(d - 1) ? ha[d - 1] : 0) - frank[d - 1];
            index_t actual = hc.count(d) ? hc[d] : 0;
            CHECK(actual == expect);
        }
    }
}

TEST_CASE("MC(F*) equals MC(F)* on differentials after the block swap") {
    gen::rng_t rng(99);
    for (int trial = 0; trial < 20; ++trial) {
        auto a = gen::random_complex(f2, 9, 2, rng);
        auto b = gen::random_complex(f2, 9, 2, rng);
        auto f = gen::random_chain_map(a, b, rng);
        auto cone = mapping_cone(f);
        auto dual_of_cone = dualize(cone.cone);

        chain_map f_star{dualize(b), dualize(a), f.m.transpose(), 0};
        REQUIRE(validate(f_star).ok());
        auto cone_of_dual = mapping_cone(f_star);

        // canonical bijection swaps the blocks: (A*, B*) -> (B*, A*)
        index_t na = a.size(), nb = b.size();
        std::vector<index_t> perm; // positions in dual_of_cone listed in cone_of_dual order
        for (index_t i = 0; i < nb; ++i) perm.push_back(na + i);
        for (index_t i = 0; i < na; ++i) perm.push_back(i);
        matrix_builder pm(f2, na + nb, na + nb);
        for (index_t i = 0; i < na + nb; ++i) pm.add(i, perm[i], std::uint32_t(1));
        sparse_matrix p = pm.build();
        CHECK(p * dual_of_cone.d * p.transpose() == cone_of_dual.cone.d);

        // gradings agree up to the overall degree shift by one
        for (index_t i = 0; i < na + nb; ++i) {
            CHECK(cone_of_dual.cone.gens[i].degree == dual_of_cone.gens[perm[i]].degree + 1);
            CHECK(cone_of_dual.cone.gens[i].filtration == dual_of_cone.gens[perm[i]].filtration);
        }
    }
}

TEST_CASE("iterated cone of zero data is the zero complex") {
    auto z = filtered_complex::empty(f2);
    chain_map f1{z, z, sparse_matrix(f2, 0, 0), 0};
    homotopy h{z, z, sparse_matrix(f2, 0, 0), 0};
    auto res = iterated_mapping_cone(f1, f1, h);
    CHECK(res.cone.size() == 0);
}

TEST_CASE("iterated cone of the period-3 instance is acyclic") {
    auto a1 = make(f2, {{"x", 0, 0, {}}}, {});
    auto a2 = make(f2, {{"u", 0, 0, {}}, {"v", 0, 0, {}}}, {});
    auto a3 = make(f2, {{"w", 0, 0, {}}}, {});
    matrix_builder f1m(f2, 2, 1);
    f1m.add(0, 0, std::uint32_t(1)); // x -> u
    matrix_builder f2m(f2, 1, 2);
    f2m.add(0, 1, std::uint32_t(1)); // v -> w
    chain_map map1{a1, a2, f1m.build(), 0};
    chain_map map2{a2, a3, f2m.build(), 0};
    homotopy h{a1, a3, sparse_matrix(f2, 1, 1), 0};
    auto res = iterated_mapping_cone(map1, map2, h);
    CHECK(res.cone.size() == 4);
    CHECK(rank(res.cone.d) == 2);
    CHECK(homology_total(res.cone) == 0);
    CHECK(homology_ranks(res.cone).empty());
}

TEST_CASE("iterated cone with f1 = id, f2 = 0 has the homology of A3") {
    gen::rng_t rng(11);
    auto a = gen::random_complex(f2, 8, 2, rng);
    auto a3 = gen::random_complex(f2, 6, 2, rng);
    chain_map map1{a, a, sparse_matrix::identity(f2, a.size()), 0};
    chain_map map2{a, a3, sparse_matrix(f2, a3.size(), a.size()), 0};
    homotopy h{a, a3, sparse_matrix(f2, a3.size(), a.size()), 0};
    auto res = iterated_mapping_cone(map1, map2, h);
    CHECK(homology_total(res.cone) == homology_total(a3));
}

TEST_CASE("iterated cone rejects a failing homotopy identity with a defect") {
    auto a = make(f2, {{"x", 0, 0, {}}}, {});
    chain_map id{a, a, sparse_matrix::identity(f2, 1), 0};
    homotopy h{a, a, sparse_matrix(f2, 1, 1), 0};
    // f2 f1 = id but dH + Hd = 0
    try {
        iterated_mapping_cone(id, id, h);
        FAIL("expected homotopy_identity_error");
    } catch (const homotopy_identity_error& e) {
        CHECK(e.defect.at(0, 0) == 1);
    }
}

TEST_CASE("direct sum of one complex is the complex itself") {
    gen::rng_t rng(3);
    auto c = gen::random_complex(f2, 7, 2, rng);
    CHECK(direct_sum({c}) == c);
}

TEST_CASE("direct sum is additive on homology and filtration multisets") {
    gen::rng_t rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        auto a = gen::random_complex(f2, 8, 3, rng);
        auto b = gen::random_complex(f2, 6, 3, rng);
        auto s = direct_sum({a, b});
        CHECK(validate(s).ok());
        auto ha = homology_ranks(a), hb = homology_ranks(b), hs = homology_ranks(s);
        std::map<int, index_t> expect = ha;
        for (const auto& [d, r] : hb) expect[d] += r;
        std::erase_if(expect, [](const auto& kv) { return kv.second == 0; });
        CHECK(hs == expect);

        std::multiset<int> filts, expect_filts;
        for (const auto& g : s.gens) filts.insert(g.filtration);
        for (const auto& g : a.gens) expect_filts.insert(g.filtration);
        for (const auto& g : b.gens) expect_filts.insert(g.filtration);
        CHECK(filts == expect_filts);
    }
}

TEST_CASE("direct sum rejects mixed fields") {
    auto a = make(f2, {{"x", 0, 0, {}}}, {});
    auto b = make(fp_field(3), {{"y", 0, 0, {}}}, {});
    CHECK_THROWS_AS(direct_sum({a, b}), error);
}

TEST_CASE("GF(3) cone blocks use the anti-chain convention") {
    // one generator in degree 1 mapping to one in degree 0
    fp_field f3(3);
    auto a = make(f3, {{"x", 1, 0, {}}, {"y", 0, 0, {}}}, {{1, 0, 1}});
    // anti-chain self-map: over GF(3), f with df = -fd
    matrix_builder fm(f3, 2, 2);
    fm.add(0, 0, std::uint32_t(1));
    fm.add(1, 1, std::uint32_t(2)); // x -> x, y -> 2y: d f(x) = 2y = -y, f d(x) = 2y
    chain_map f{a, a, fm.build(), 0, map_convention::anti_chain};
    REQUIRE(validate(f).ok());
    auto cone = mapping_cone(f);
    CHECK(validate(cone.cone, /*check_degrees=*/true).ok());
    CHECK((cone.cone.d * cone.cone.d).is_zero());
}
