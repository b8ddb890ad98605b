// Batch front end: one verb per invocation, JSON in, JSON/TSV out.
// Exit codes: 0 success, 1 parse/usage error, 2 invariant violation.

#include "specseq/generators.hpp"
#include "specseq/io.hpp"
#include "specseq/oracle.hpp"
#include "specseq/triads.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

using namespace specseq;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_parse = 1;
constexpr int exit_invariant = 2;

unsigned default_jobs() {
    if (const char* env = std::getenv("SPECSEQ_JOBS")) {
        int v = std::atoi(env);
        if (v > 0) return static_cast<unsigned>(v);
    }
    return 1;
}

int parse_max_r(const std::string& s) {
    if (s == "collapse") return -1;
    try {
        std::size_t used = 0;
        int r = std::stoi(s, &used);
        if (used != s.size() || r < 0) throw std::invalid_argument(s);
        return r;
    } catch (const std::exception&) {
        throw io::parse_error("--max-r expects a page number or 'collapse', got '" + s + "'");
    }
}

void write_or_print(const std::string& path, const std::string& text) {
    if (path.empty())
        std::cout << text;
    else
        io::save_text(path, text);
}

int cmd_validate(const std::string& input) {
    auto c = io::parse_complex(io::load_json(input));
    auto rep = validate(c);
    std::cout << rep.text() << "\n";
    return rep.ok() ? exit_ok : exit_invariant;
}

int cmd_homology(const std::string& input) {
    auto c = io::parse_complex(io::load_json(input));
    for (const auto& [deg, r] : homology_ranks(c))
        std::cout << "degree " << deg << ": rank " << r << "\n";
    std::cout << "total rank: " << homology_total(c) << "\n";
    return exit_ok;
}

int cmd_pages(const std::string& input, const std::string& max_r, bool oracle,
              const std::string& json_out, const std::string& tsv_out) {
    auto c = io::parse_complex(io::load_json(input));
    pages_options opts;
    opts.max_r = parse_max_r(max_r);
    auto res = compute_pages(c, opts);
    auto table = res.table();
    write_or_print(tsv_out, io::rank_table_tsv(table));
    if (!json_out.empty()) io::save_text(json_out, io::emit_pages(res.pages).dump(2));
    if (oracle) {
        auto expect = oracle_pages(c, res.pages.back().r);
        bool match = table == expect;
        std::cout << "oracle match: " << (match ? "yes" : "NO") << "\n";
        if (!match) return exit_invariant;
    }
    return exit_ok;
}

int cmd_reduce(const std::string& input, const std::string& max_r, const std::string& out) {
    auto c = io::parse_complex(io::load_json(input));
    pages_options opts;
    opts.max_r = parse_max_r(max_r);
    auto res = compute_pages(c, opts);
    const reduction& final = res.to_stage.back();
    bool ok = (final.proj * final.incl ==
               sparse_matrix::identity(c.field, final.after.size())) &&
              (final.incl * final.proj - sparse_matrix::identity(c.field, c.size()) ==
               c.d * final.htpy + final.htpy * c.d);
    std::cout << "cancelled pairs: " << final.cancelled.size() << "\n";
    std::cout << "survivors: " << final.after.size() << "\n";
    std::cout << "witness identities: " << (ok ? "verified" : "FAILED") << "\n";
    write_or_print(out, io::emit_complex(final.after).dump(2) + "\n");
    return ok ? exit_ok : exit_invariant;
}

int cmd_cone(const std::string& input, const std::string& out) {
    auto f = io::parse_chain_map(io::load_json(input));
    auto cone = mapping_cone(f);
    write_or_print(out, io::emit_complex(cone.cone).dump(2) + "\n");
    return exit_ok;
}

int cmd_dual(const std::string& input, const std::string& out) {
    auto c = io::parse_complex(io::load_json(input));
    write_or_print(out, io::emit_complex(dualize(c)).dump(2) + "\n");
    return exit_ok;
}

int cmd_pair(const std::string& input, const std::string& max_r) {
    auto c = io::parse_complex(io::load_json(input));
    auto rep = page_pairing(c, parse_max_r(max_r));
    for (const auto& p : rep.pages)
        std::cout << "page " << p.r << ": survivors "
                  << (p.survivors_mirror ? "mirror" : "DIFFER") << ", adjoint "
                  << (p.adjoint_ok ? "ok" : "FAILED") << "\n";
    std::cout << "pairing: " << (rep.ok() ? "perfect" : "FAILED") << "\n";
    return rep.ok() ? exit_ok : exit_invariant;
}

int cmd_cube(const std::string& input, bool pages, const std::string& out) {
    auto cc = io::parse_cube(io::load_json(input));
    cube::code_set s;
    s.al = cc.al;
    for (const auto& [code, v] : cc.vertices) s.codes.insert(code);
    try {
        auto res = cube::assemble(cc, s);
        std::cout << "assembled " << res.complex.size() << " generators over "
                  << res.order.size() << " codes; D^2 = 0\n";
        if (pages) {
            pages_options popts;
            popts.track_witnesses = false;
            auto pr = compute_pages(res.complex, popts);
            std::cout << io::rank_table_tsv(pr.table());
        }
        write_or_print(out, io::emit_complex(res.complex).dump(2) + "\n");
    } catch (const cube::assembly_error& e) {
        std::cout << "D^2 != 0; offending code pairs:\n";
        for (const auto& [from, to] : e.code_pairs) std::cout << "  " << from << " -> " << to << "\n";
        std::cout << "defect entries: " << e.defect.nnz() << "\n";
        return exit_invariant;
    }
    return exit_ok;
}

int cmd_khovanov(const std::string& input, bool reduced, int basepoint, unsigned jobs,
                 const std::string& out) {
    auto pd = io::parse_pd(io::load_json(input));
    auto built = kh::build_complex(pd, reduced, basepoint, jobs);
    index_t total = homology_total(built.assembled.complex);
    long long det = kh::determinant(pd);
    std::cout << "crossings: " << pd.size() << "\n";
    std::cout << "generators: " << built.assembled.complex.size() << "\n";
    if (!built.gradings_shifted)
        std::cout << "note: no crossing signs supplied; homological gradings unshifted\n";
    std::cout << "total " << (reduced ? "reduced" : "unreduced") << " rank: " << total << "\n";
    std::cout << "det oracle: " << det << "\n";
    long long compare = reduced ? total : total / 2;
    std::cout << "match: " << (compare == det ? "yes" : "no") << "\n";
    std::cout << "degree\tquantum\trank\n";
    for (const auto& [key, r] : kh::bigraded_ranks(built.assembled.complex))
        std::cout << key.first << '\t' << key.second << '\t' << r << '\n';
    if (!out.empty()) io::save_text(out, io::emit_complex(built.assembled.complex).dump(2) + "\n");
    return exit_ok;
}

int cmd_triad(const std::string& cf_text, long long p_append) {
    std::vector<triads::bigint> terms;
    std::stringstream ss(cf_text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        terms.push_back(triads::bigint(item));
    }
    if (terms.empty()) {
        std::cerr << "triad: empty continued fraction\n";
        return exit_parse;
    }
    auto r = triads::triad_from_fraction(terms, triads::bigint(p_append));
    std::cout << "value: " << r.value.str() << "\n";
    std::cout << "convergents:";
    for (std::size_t i = 0; i < r.value.table.count(); ++i)
        std::cout << " " << r.value.table.a[i].str() << "/" << r.value.table.b[i].str();
    std::cout << "\n";
    if (!r.value.zero_tails.empty()) {
        std::cout << "zero tails at terms:";
        for (auto j : r.value.zero_tails) std::cout << " " << j;
        std::cout << " (projective evaluation)\n";
    }
    std::cout << "triad: " << r.triad.a.str() << " " << r.triad.b.str() << " " << r.triad.c.str()
              << "\n";
    std::cout << "chain:";
    for (const auto& q : r.chain) std::cout << " " << q.str();
    std::cout << "\n";
    return exit_ok;
}

int cmd_keylemma(const std::string& input, bool filtered, int random_count, std::uint64_t seed,
                 bool perturb) {
    int failures = 0;
    auto run_one = [&](const triangle_datum& t, const std::string& label) {
        auto hyp = check_hypotheses(t);
        std::cout << label << ": hypothesis (1) " << (hyp.ok() ? "" : "or (2) ")
                  << (hyp.ok() ? "and (2) hold" : "fails") << "\n";
        for (const auto& it : hyp.items) {
            if (!it.homotopy_identity_ok)
                std::cout << "  i=" << it.i + 1 << ": homotopy identity defect with "
                          << it.defect.nnz() << " entries\n";
            if (!it.psi_quasi_iso)
                std::cout << "  i=" << it.i + 1 << ": psi rank " << it.psi_rank.rank << " vs H("
                          << it.psi_rank.dim_source << ") -> H(" << it.psi_rank.dim_target
                          << ")\n";
        }
        if (!hyp.ok()) {
            ++failures;
            return;
        }
        auto rep = verify_key_lemma(t);
        std::cout << label << ": key lemma " << (rep.ok() ? "verified" : "FAILED") << "\n";
        for (const auto& it : rep.items)
            std::cout << "  i=" << it.i + 1 << ": alpha rank " << it.alpha_rank.rank << "/"
                      << it.alpha_rank.dim_target << ", iterated cone homology "
                      << it.iterated_cone_homology << "\n";
        if (!rep.ok()) ++failures;
        if (filtered) {
            auto frep = verify_filtered_key_lemma(t);
            std::cout << label << ": filtered variant " << (frep.ok() ? "verified" : "FAILED")
                      << "\n";
            if (!frep.ok()) ++failures;
        }
    };

    if (random_count > 0) {
        gen::rng_t rng(seed);
        int discarded = 0;
        for (int k = 0; k < random_count; ++k) {
            auto t = gen::random_triangle(fp_field(2), rng, 10, 2, perturb);
            if (perturb && !check_hypotheses(t).ok()) {
                ++discarded;
                continue;
            }
            run_one(t, "instance " + std::to_string(k));
        }
        if (perturb)
            std::cout << "discarded " << discarded << " of " << random_count
                      << " perturbed instances (hypothesis 2)\n";
    } else {
        run_one(io::parse_triangle(io::load_json(input)), input);
    }
    return failures == 0 ? exit_ok : exit_invariant;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"finite-field filtered chain complexes: spectral sequence pages by "
                 "cancellation, mapping-cone lemma checks, cube assembly, Khovanov cubes, "
                 "framing triads"};
    app.require_subcommand(1);

    std::string input, out, json_out, tsv_out, max_r = "collapse", cf_text;
    bool oracle = false, pages = false, reduced = false, filtered = false, perturb = false;
    int basepoint = 0;
    long long p_append = -1;
    int random_count = 0;
    std::uint64_t seed = 0;
    unsigned jobs = default_jobs();

    auto* v_validate = app.add_subcommand("validate", "check the complex invariants");
    v_validate->add_option("input", input)->required();

    auto* v_homology = app.add_subcommand("homology", "homology ranks per degree");
    v_homology->add_option("input", input)->required();

    auto* v_pages = app.add_subcommand("pages", "spectral sequence pages by cancellation");
    v_pages->add_option("input", input)->required();
    v_pages->add_option("--max-r", max_r, "last page, or 'collapse'");
    v_pages->add_flag("--oracle", oracle, "cross-check against the subspace oracle");
    v_pages->add_option("--json", json_out, "write the page report JSON here");
    v_pages->add_option("--tsv", tsv_out, "write the rank table TSV here");

    auto* v_reduce = app.add_subcommand("reduce", "cancel pairs and emit the reduced complex");
    v_reduce->add_option("input", input)->required();
    v_reduce->add_option("--max-r", max_r, "stop after this stage, or 'collapse'");
    v_reduce->add_option("--out", out, "write the reduced complex here");

    auto* v_cone = app.add_subcommand("cone", "mapping cone of a chain map document");
    v_cone->add_option("input", input)->required();
    v_cone->add_option("--out", out);

    auto* v_dual = app.add_subcommand("dual", "dual complex");
    v_dual->add_option("input", input)->required();
    v_dual->add_option("--out", out);

    auto* v_pair = app.add_subcommand("pair", "duality pairing of the pages");
    v_pair->add_option("input", input)->required();
    v_pair->add_option("--max-r", max_r);

    auto* v_cube = app.add_subcommand("cube", "assemble a cube document");
    v_cube->add_option("input", input)->required();
    v_cube->add_flag("--pages", pages, "also print the page rank table");
    v_cube->add_option("--out", out);

    auto* v_kh = app.add_subcommand("khovanov", "GF(2) Khovanov cube of a PD diagram");
    v_kh->add_option("input", input)->required();
    v_kh->add_flag("--reduced", reduced);
    v_kh->add_option("--basepoint", basepoint, "basepoint arc label (required with --reduced)");
    v_kh->add_option("--jobs", jobs, "worker threads for the resolutions");
    v_kh->add_option("--out", out, "write the assembled complex here");

    auto* v_triad = app.add_subcommand("triad", "framing triad from a continued fraction");
    v_triad->add_option("--cf", cf_text, "comma-separated terms, e.g. 1,-2")->required();
    v_triad->add_option("-p,--append", p_append, "framing of the first appended unknot");

    auto* v_kl = app.add_subcommand("keylemma", "verify the mapping-cone lemma on a bundle");
    v_kl->add_option("input", input);
    v_kl->add_flag("--filtered", filtered, "also verify the filtered variant");
    v_kl->add_option("--random", random_count, "verify this many generated instances instead");
    v_kl->add_option("--seed", seed, "seed for --random");
    v_kl->add_flag("--perturb", perturb, "perturb generated homotopies (exercises discards)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (v_validate->parsed()) return cmd_validate(input);
        if (v_homology->parsed()) return cmd_homology(input);
        if (v_pages->parsed()) return cmd_pages(input, max_r, oracle, json_out, tsv_out);
        if (v_reduce->parsed()) return cmd_reduce(input, max_r, out);
        if (v_cone->parsed()) return cmd_cone(input, out);
        if (v_dual->parsed()) return cmd_dual(input, out);
        if (v_pair->parsed()) return cmd_pair(input, max_r);
        if (v_cube->parsed()) return cmd_cube(input, pages, out);
        if (v_kh->parsed()) return cmd_khovanov(input, reduced, basepoint, jobs, out);
        if (v_triad->parsed()) return cmd_triad(cf_text, p_append);
        if (v_kl->parsed()) {
            if (input.empty() && random_count == 0) {
                std::cerr << "keylemma: provide a bundle file or --random N\n";
                return exit_parse;
            }
            return cmd_keylemma(input, filtered, random_count, seed, perturb);
        }
    } catch (const io::parse_error& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return exit_parse;
    } catch (const cube::assembly_error& e) {
        std::cerr << "invariant violation: " << e.what() << "\n";
        return exit_invariant;
    } catch (const error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_invariant;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_parse;
    }
    return exit_parse;
}
