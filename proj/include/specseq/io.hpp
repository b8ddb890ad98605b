#pragma once

#include "cube.hpp"
#include "keylemma.hpp"
#include "khovanov.hpp"
#include "reduce.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <string>

namespace specseq {
namespace io {

using nlohmann::json;

struct parse_error : error {
    using error::error;
};

inline void reject_unknown_fields(const json& j, std::initializer_list<const char*> allowed,
                                  const std::string& where) {
    if (!j.is_object()) throw parse_error(where + ": expected a JSON object");
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || key == a;
        if (!ok) throw parse_error(where + ": unknown field '" + key + "'");
    }
}

inline json require(const json& j, const char* field, const std::string& where) {
    if (!j.contains(field)) throw parse_error(where + ": missing field '" + field + "'");
    return j.at(field);
}

// ---- complex documents ----------------------------------------------------

inline filtered_complex parse_complex(const json& j, const std::string& where = "complex") {
    reject_unknown_fields(j, {"field", "generators", "differential", "id"}, where);
    fp_field field(require(j, "field", where).get<std::uint32_t>());

    std::vector<generator> gens;
    std::map<std::string, index_t> index_of;
    for (const auto& gj : require(j, "generators", where)) {
        reject_unknown_fields(gj, {"id", "degree", "filtration", "gradings"}, where + ".generators");
        generator g;
        g.id = require(gj, "id", where).get<std::string>();
        g.degree = require(gj, "degree", where).get<int>();
        g.filtration = require(gj, "filtration", where).get<int>();
        if (gj.contains("gradings"))
            for (const auto& [k, v] : gj.at("gradings").items())
                g.extra_gradings[k] = v.get<int>();
        if (index_of.count(g.id)) throw parse_error(where + ": duplicate generator id " + g.id);
        index_of[g.id] = static_cast<index_t>(gens.size());
        gens.push_back(std::move(g));
    }

    index_t n = static_cast<index_t>(gens.size());
    std::vector<sparse_matrix::entry> entries;
    for (const auto& ej : require(j, "differential", where)) {
        reject_unknown_fields(ej, {"from", "to", "coeff"}, where + ".differential");
        std::string from = require(ej, "from", where).get<std::string>();
        std::string to = require(ej, "to", where).get<std::string>();
        std::int64_t coeff = require(ej, "coeff", where).get<std::int64_t>();
        if (!index_of.count(from) || !index_of.count(to))
            throw parse_error(where + ": differential references unknown generator");
        if (coeff < 1 || coeff >= field.characteristic())
            throw parse_error(where + ": coeff must lie in 1..p-1");
        entries.push_back({index_of[to], index_of[from], static_cast<std::uint32_t>(coeff)});
    }
    return {field, std::move(gens), sparse_matrix::from_entries(field, n, n, entries)};
}

inline json emit_complex(const filtered_complex& c) {
    json j;
    j["field"] = c.field.characteristic();
    j["generators"] = json::array();
    for (const auto& g : c.gens) {
        json gj{{"id", g.id}, {"degree", g.degree}, {"filtration", g.filtration}};
        if (!g.extra_gradings.empty()) {
            json gr = json::object();
            for (const auto& [k, v] : g.extra_gradings) gr[k] = v;
            gj["gradings"] = gr;
        }
        j["generators"].push_back(gj);
    }
    j["differential"] = json::array();
    for (const auto& e : c.d.entries()) // entries() is column-major
        j["differential"].push_back(
            {{"from", c.gens[e.col].id}, {"to", c.gens[e.row].id}, {"coeff", e.coeff}});
    return j;
}

// ---- matrix entry lists against explicit generator bases -------------------

inline sparse_matrix parse_entries(const json& arr, const filtered_complex& source,
                                   const filtered_complex& target, const fp_field& field,
                                   const std::string& where) {
    std::map<std::string, index_t> src, tgt;
    for (index_t i = 0; i < source.size(); ++i) src[source.gens[i].id] = i;
    for (index_t i = 0; i < target.size(); ++i) tgt[target.gens[i].id] = i;
    std::vector<sparse_matrix::entry> entries;
    for (const auto& ej : arr) {
        reject_unknown_fields(ej, {"from", "to", "coeff"}, where);
        std::string from = require(ej, "from", where).get<std::string>();
        std::string to = require(ej, "to", where).get<std::string>();
        std::int64_t coeff = require(ej, "coeff", where).get<std::int64_t>();
        if (!src.count(from)) throw parse_error(where + ": unknown source generator " + from);
        if (!tgt.count(to)) throw parse_error(where + ": unknown target generator " + to);
        if (coeff < 1 || coeff >= field.characteristic())
            throw parse_error(where + ": coeff must lie in 1..p-1");
        entries.push_back({tgt[to], src[from], static_cast<std::uint32_t>(coeff)});
    }
    return sparse_matrix::from_entries(field, target.size(), source.size(), entries);
}

/// {"field": p, "source": {...}, "target": {...}, "entries": [...],
///  "convention"?: "chain" | "anti-chain", "filtration_shift"?: s}
inline chain_map parse_chain_map(const json& j, const std::string& where = "map") {
    reject_unknown_fields(j, {"field", "source", "target", "entries", "convention",
                              "filtration_shift"},
                          where);
    fp_field field(require(j, "field", where).get<std::uint32_t>());
    filtered_complex source = parse_complex(require(j, "source", where), where + ".source");
    filtered_complex target = parse_complex(require(j, "target", where), where + ".target");
    if (source.field != field || target.field != field)
        throw parse_error(where + ": complexes disagree with the map's field");
    chain_map f{std::move(source), std::move(target),
                sparse_matrix(field, 0, 0), 0, map_convention::chain};
    f.m = parse_entries(require(j, "entries", where), f.source, f.target, field, where + ".entries");
    if (j.contains("filtration_shift")) f.filtration_shift = j.at("filtration_shift").get<int>();
    if (j.contains("convention")) {
        std::string conv = j.at("convention").get<std::string>();
        if (conv == "chain")
            f.convention = map_convention::chain;
        else if (conv == "anti-chain")
            f.convention = map_convention::anti_chain;
        else
            throw parse_error(where + ": convention must be 'chain' or 'anti-chain'");
    }
    return f;
}

// ---- key lemma bundles ------------------------------------------------------

/// {"complexes": [complex docs with "id"], "maps": [{"source","target","entries"}],
///  "homotopies": [...], "cyclic": bool}
inline triangle_datum parse_triangle(const json& j) {
    reject_unknown_fields(j, {"complexes", "maps", "homotopies", "cyclic"}, "bundle");
    triangle_datum t;
    std::map<std::string, std::size_t> index_of;
    for (const auto& cj : require(j, "complexes", "bundle")) {
        std::string id = require(cj, "id", "bundle.complexes").get<std::string>();
        if (index_of.count(id)) throw parse_error("bundle: duplicate complex id " + id);
        index_of[id] = t.complexes.size();
        t.complexes.push_back(parse_complex(cj, "bundle.complexes[" + id + "]"));
    }
    if (j.contains("cyclic")) t.cyclic = j.at("cyclic").get<bool>();
    auto parse_map_list = [&](const json& arr, const char* what) {
        std::vector<sparse_matrix> out;
        for (const auto& mj : arr) {
            reject_unknown_fields(mj, {"source", "target", "entries"}, std::string("bundle.") + what);
            std::string src = require(mj, "source", what).get<std::string>();
            std::string tgt = require(mj, "target", what).get<std::string>();
            if (!index_of.count(src) || !index_of.count(tgt))
                throw parse_error(std::string("bundle.") + what + ": unknown complex id");
            const filtered_complex& s = t.complexes[index_of[src]];
            const filtered_complex& g = t.complexes[index_of[tgt]];
            out.push_back(parse_entries(require(mj, "entries", what), s, g, s.field,
                                        std::string("bundle.") + what));
        }
        return out;
    };
    t.maps = parse_map_list(require(j, "maps", "bundle"), "maps");
    t.homotopies = parse_map_list(require(j, "homotopies", "bundle"), "homotopies");
    return t;
}

// ---- cube documents ---------------------------------------------------------

/// {"n": n, "alphabet": "ab"|"abc", "vertices": {code: complex doc},
///  "maps": [{"sequence": [codes], "entries": [...]}]}
inline cube::cube_complex parse_cube(const json& j) {
    reject_unknown_fields(j, {"n", "alphabet", "vertices", "maps"}, "cube");
    cube::cube_complex cc;
    cc.n = require(j, "n", "cube").get<std::size_t>();
    std::string al = require(j, "alphabet", "cube").get<std::string>();
    if (al == "ab")
        cc.al = cube::alphabet::ab;
    else if (al == "abc")
        cc.al = cube::alphabet::abc;
    else
        throw parse_error("cube: alphabet must be 'ab' or 'abc'");
    const json vertices = require(j, "vertices", "cube");
    for (const auto& [code_str, cj] : vertices.items())
        cc.vertices.emplace(code_str, parse_complex(cj, "cube.vertices[" + code_str + "]"));
    if (j.contains("maps"))
        for (const auto& mj : j.at("maps")) {
            reject_unknown_fields(mj, {"sequence", "entries"}, "cube.maps");
            std::vector<cube::code> seq;
            for (const auto& s : require(mj, "sequence", "cube.maps")) seq.push_back(s.get<std::string>());
            if (seq.size() < 2) throw parse_error("cube.maps: sequence needs at least two codes");
            auto src = cc.vertices.find(seq.front());
            auto tgt = cc.vertices.find(seq.back());
            if (src == cc.vertices.end() || tgt == cc.vertices.end())
                throw parse_error("cube.maps: sequence endpoints lack vertex complexes");
            cc.seq_maps.emplace(seq,
                                parse_entries(require(mj, "entries", "cube.maps"), src->second,
                                              tgt->second, src->second.field, "cube.maps.entries"));
        }
    return cc;
}

// ---- planar diagrams --------------------------------------------------------

/// JSON array of {"arcs": [i,j,k,l], "sign"?: 1|-1}, or the compact text
/// form PD[X(...), ...].
inline kh::pd_code parse_pd(const json& j) {
    kh::pd_code pd;
    if (j.is_string()) return kh::parse_pd_text(j.get<std::string>());
    if (!j.is_array()) throw parse_error("pd: expected an array of crossings or a PD[...] string");
    for (const auto& cj : j) {
        reject_unknown_fields(cj, {"arcs", "sign"}, "pd");
        kh::pd_code::crossing cr;
        auto arcs = require(cj, "arcs", "pd");
        if (!arcs.is_array() || arcs.size() != 4) throw parse_error("pd: arcs must have 4 labels");
        for (std::size_t k = 0; k < 4; ++k) cr.arcs[k] = arcs[k].get<int>();
        if (cj.contains("sign")) {
            cr.sign = cj.at("sign").get<int>();
            if (cr.sign != 1 && cr.sign != -1) throw parse_error("pd: sign must be +1 or -1");
        }
        pd.crossings.push_back(cr);
    }
    return pd;
}

// ---- page reports -----------------------------------------------------------

inline json emit_pages(const std::vector<page_data>& pages) {
    json arr = json::array();
    for (const auto& p : pages) {
        json pj;
        pj["r"] = p.r;
        pj["survivors"] = json::array();
        for (const auto& g : p.survivors)
            pj["survivors"].push_back(
                {{"id", g.id}, {"degree", g.degree}, {"filtration", g.filtration}});
        pj["dr"] = json::array();
        for (const auto& e : p.dr.entries())
            pj["dr"].push_back({{"from", p.survivors[e.col].id},
                                {"to", p.survivors[e.row].id},
                                {"coeff", e.coeff}});
        arr.push_back(pj);
    }
    return arr;
}

/// TSV rows: r <tab> degree <tab> filtration_level <tab> rank
inline std::string rank_table_tsv(const rank_table& t) {
    std::ostringstream out;
    out << "r\tdegree\tfiltration_level\trank\n";
    for (const auto& [key, v] : t) {
        auto [r, deg, lev] = key;
        out << r << '\t' << deg << '\t' << lev << '\t' << v << '\n';
    }
    return out.str();
}

// ---- files ------------------------------------------------------------------

inline json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open " + path);
    // the compact PD text form is accepted verbatim
    std::stringstream buf;
    buf << in.rdbuf();
    std::string text = buf.str();
    std::size_t first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text.compare(first, 3, "PD[") == 0) return json(text);
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw parse_error(path + ": " + e.what());
    }
}

inline void save_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw error("cannot write " + path);
    out << text;
}

} // namespace io
} // namespace specseq
