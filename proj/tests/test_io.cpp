#include "specseq/generators.hpp"
#include "specseq/io.hpp"

#include <catch_amalgamated.hpp>

using namespace specseq;

namespace {
const fp_field f2(2);
}

TEST_CASE("complex documents round-trip to identical complexes") {
    gen::rng_t rng(1);
    for (int trial = 0; trial < 20; ++trial) {
        auto c = gen::random_complex(fp_field(trial % 2 ? 2 : 3), 12, 3, rng);
        if (trial == 0) c.gens[0].extra_gradings["quantum"] = -4;
        auto j = io::emit_complex(c);
        auto back = io::parse_complex(j);
        CHECK(back == c);
        // and through a serialized string
        CHECK(io::parse_complex(io::json::parse(j.dump())) == c);
    }
}

TEST_CASE("unknown fields are rejected") {
    auto j = io::json::parse(R"({"field": 2, "generators": [], "differential": [], "extra": 1})");
    CHECK_THROWS_WITH(io::parse_complex(j), Catch::Matchers::ContainsSubstring("unknown field"));

    auto g = io::json::parse(
        R"({"field": 2, "generators": [{"id": "x", "degree": 0, "filtration": 0, "spin": 1}],
            "differential": []})");
    CHECK_THROWS_WITH(io::parse_complex(g), Catch::Matchers::ContainsSubstring("spin"));
}

TEST_CASE("coefficients outside 1..p-1 are rejected") {
    auto j = io::json::parse(
        R"({"field": 3,
            "generators": [{"id": "x", "degree": 1, "filtration": 0},
                           {"id": "y", "degree": 0, "filtration": 0}],
            "differential": [{"from": "x", "to": "y", "coeff": 3}]})");
    CHECK_THROWS_WITH(io::parse_complex(j), Catch::Matchers::ContainsSubstring("1..p-1"));
    auto z = io::json::parse(
        R"({"field": 3,
            "generators": [{"id": "x", "degree": 1, "filtration": 0},
                           {"id": "y", "degree": 0, "filtration": 0}],
            "differential": [{"from": "x", "to": "y", "coeff": 0}]})");
    CHECK_THROWS_AS(io::parse_complex(z), io::parse_error);
}

TEST_CASE("chain map documents parse with conventions") {
    auto j = io::json::parse(R"({
        "field": 2,
        "source": {"field": 2, "generators": [{"id": "x", "degree": 0, "filtration": 0}],
                   "differential": []},
        "target": {"field": 2, "generators": [{"id": "y", "degree": 0, "filtration": 0}],
                   "differential": []},
        "entries": [{"from": "x", "to": "y", "coeff": 1}],
        "convention": "chain"
    })");
    auto f = io::parse_chain_map(j);
    CHECK(validate(f).ok());
    CHECK(f.m.at(0, 0) == 1);
    j["convention"] = "sideways";
    CHECK_THROWS_AS(io::parse_chain_map(j), io::parse_error);
}

TEST_CASE("triangle bundles parse and verify") {
    auto j = io::load_json("samples/period3-bundle.json");
    auto t = io::parse_triangle(j);
    CHECK(t.cyclic);
    CHECK(check_hypotheses(t).ok());
    CHECK(verify_key_lemma(t).ok());
}

TEST_CASE("cube documents parse and assemble") {
    auto cc = io::parse_cube(io::load_json("samples/square-cube.json"));
    cube::code_set s = cube::code_set::full(2, cube::alphabet::ab);
    auto res = cube::assemble(cc, s);
    CHECK(res.complex.size() == 4);
    CHECK((res.complex.d * res.complex.d).is_zero());
}

TEST_CASE("PD files parse in both forms") {
    auto pd1 = io::parse_pd(io::load_json("samples/trefoil.json"));
    CHECK(pd1.size() == 3);
    CHECK(kh::determinant(pd1) == 3);
    auto pd2 = io::parse_pd(io::load_json("samples/trefoil.pd"));
    CHECK(pd2.size() == 3);
    CHECK(pd2.crossings[0].arcs == pd1.crossings[0].arcs);

    auto bad = io::json::parse(R"([{"arcs": [1, 2, 3], "sign": 1}])");
    CHECK_THROWS_AS(io::parse_pd(bad), io::parse_error);
    auto bad_sign = io::json::parse(R"([{"arcs": [1, 1, 2, 2], "sign": 4}])");
    CHECK_THROWS_AS(io::parse_pd(bad_sign), io::parse_error);
}

TEST_CASE("page reports and rank tables") {
    auto c = io::parse_complex(io::load_json("samples/staircase.json"));
    auto res = compute_pages(c);
    auto j = io::emit_pages(res.pages);
    REQUIRE(j.size() == 3);
    CHECK(j[0]["r"] == 0);
    CHECK(j[0]["survivors"].size() == 3);
    CHECK(j[1]["dr"].size() == 1);
    CHECK(j[1]["dr"][0]["from"] == "a");
    CHECK(j[1]["dr"][0]["to"] == "b");

    std::string tsv = io::rank_table_tsv(res.table());
    CHECK(tsv.find("r\tdegree\tfiltration_level\trank") == 0);
    CHECK(tsv.find("2\t0\t0\t1") != std::string::npos);
}

TEST_CASE("emitted differentials serialize column-major by generator order") {
    gen::rng_t rng(9);
    auto c = gen::random_complex(f2, 10, 3, rng);
    auto j = io::emit_complex(c);
    index_t last_col = -1, last_row = -1;
    for (const auto& ej : j["differential"]) {
        index_t col = c.index_of(ej["from"].get<std::string>());
        index_t row = c.index_of(ej["to"].get<std::string>());
        bool ordered = col > last_col || (col == last_col && row > last_row);
        CHECK(ordered);
        last_col = col;
        last_row = row;
    }
}
