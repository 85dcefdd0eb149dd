#include "starklab/cli.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <functional>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "starklab/generate.hpp"
#include "starklab/io.hpp"
#include "starklab/oracle.hpp"
#include "starklab/stark_systems.hpp"

namespace starklab {

namespace {

struct Outcome {
    int code = kExitPass;
    json report = json::object();
    std::optional<std::string> violation;  // what failed, when code == kExitViolation
};

using Handler = std::function<Outcome(const InstanceFile&)>;

struct Common {
    std::vector<std::string> files;
    int jobs = 1;
    std::string dump_dir = "counterexamples";
};

const char* status_of(int code) {
    switch (code) {
        case kExitPass: return "ok";
        case kExitViolation: return "violation";
        case kExitInput: return "input-error";
        default: return "insufficient-precision";
    }
}

json ideal_json(const Ideal& I) { return rows_json(I.generators()); }

json lattice_json(const FractionalLattice& L) {
    return {{"offset", L.offset()}, {"precision", L.precision()}, {"exponent", L.exponent()}, {"normal_form", L.normal_form()}};
}

int worst(int a, int b) {
    auto rank = [](int c) { return c == kExitInput ? 3 : c == kExitViolation ? 2 : c == kExitPrecision ? 1 : 0; };
    return rank(a) >= rank(b) ? a : b;
}

Outcome run_one(const std::string& command, const std::string& path, const std::vector<std::string>& kinds, const Handler& h,
                const std::string& dump_dir) {
    Outcome o;
    InstanceFile f;
    try {
        f = load_file(path);
        if (std::find(kinds.begin(), kinds.end(), f.kind) == kinds.end())
            throw InputError("command '" + command + "' does not accept kind '" + f.kind + "'");
        o = h(f);
    } catch (const InsufficientPrecision& e) {
        o.code = kExitPrecision;
        o.report["detail"] = e.what();
        o.report["required_h"] = e.required_h;
    } catch (const std::invalid_argument& e) {
        o.code = kExitInput;
        o.report["error"] = e.what();
    } catch (const std::exception& e) {
        o.code = kExitInput;
        o.report["error"] = std::string("rejected: ") + e.what();
    }
    o.report["input"] = std::filesystem::path(path).filename().string();
    if (o.code == kExitViolation) {
        std::filesystem::create_directories(dump_dir);
        auto out = std::filesystem::path(dump_dir) / (command + "-" + std::filesystem::path(path).stem().string() + ".json");
        InstanceFile cx = f;
        cx.note = "counterexample: " + command + ": " + o.violation.value_or("property violated");
        save_file(out.string(), cx);
        o.report["counterexample"] = out.string();
    }
    return o;
}

int run_files(const std::string& command, const std::string& anchor, const Common& c, const std::vector<std::string>& kinds,
              const Handler& h, std::ostream& out) {
    std::vector<std::string> files = c.files;
    std::sort(files.begin(), files.end());
    std::vector<Outcome> res(files.size());
    std::atomic<size_t> next{0};
    auto worker = [&] {
        for (size_t i; (i = next++) < files.size();) res[i] = run_one(command, files[i], kinds, h, c.dump_dir);
    };
    const int n = std::max(1, std::min<int>(c.jobs, static_cast<int>(files.size())));
    std::vector<std::thread> pool;
    for (int t = 1; t < n; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    int code = kExitPass;
    json all = json::array();
    for (auto& o : res) {
        o.report["command"] = command;
        o.report["anchor"] = anchor;
        o.report["status"] = status_of(o.code);
        code = worst(code, o.code);
        all.push_back(o.report);
    }
    out << (all.size() == 1 ? all[0] : all).dump(2) << "\n";
    return code;
}

int emit(const std::string& command, const std::string& anchor, Outcome o, std::ostream& out) {
    o.report["command"] = command;
    o.report["anchor"] = anchor;
    o.report["status"] = status_of(o.code);
    out << o.report.dump(2) << "\n";
    return o.code;
}

void add_common(CLI::App* app, Common& c) {
    app->add_option("files", c.files, "instance files")->required();
    app->add_option("--jobs", c.jobs, "parallel workers")->check(CLI::PositiveNumber);
    app->add_option("--dump-dir", c.dump_dir, "directory for counterexample files");
}

PlaceMask parse_mask(const SelmerInstance& inst, const std::string& labels) {
    PlaceMask m = 0;
    std::stringstream ss(labels);
    for (std::string lab; std::getline(ss, lab, ',');) {
        if (lab.empty()) continue;
        bool found = false;
        for (size_t v = 0; v < inst.places.size(); ++v)
            if (inst.places[v].aux && inst.places[v].label == lab) {
                m |= PlaceMask(1) << v;
                found = true;
            }
        if (!found) throw InputError("no auxiliary place labelled '" + lab + "'");
    }
    return m;
}

SelmerInstance selmer_of(const InstanceFile& f) {
    return f.kind == "stark" ? stark_from_json(f.payload).inst : selmer_from_json(f.payload);
}

std::string tag_or_default(const SelmerInstance& inst, const std::string& tag) {
    auto tags = inst.tags();
    if (tag.empty()) {
        if (tags.empty()) throw InputError("instance has no local conditions");
        return tags[0];
    }
    if (std::find(tags.begin(), tags.end(), tag) == tags.end()) throw InputError("unknown structure tag '" + tag + "'");
    return tag;
}

StarkTask stark_of(const InstanceFile& f, const std::string& tag) {
    if (f.kind == "stark") return stark_from_json(f.payload);
    StarkTask t;
    t.inst = selmer_from_json(f.payload);
    t.tag = tag_or_default(t.inst, tag);
    t.r = core_rank(t.inst, t.tag).chi;
    t.depth = t.inst.depth;
    return t;
}

Vec parse_vec(const std::string& s) {
    try {
        return json::parse(s).get<Vec>();
    } catch (const json::exception&) {
        throw InputError("element must be a JSON array of integers");
    }
}

Rational parse_rational(const json& j) {
    try {
        if (j.is_number_integer()) return Rational(j.get<long long>());
        const std::string s = j.get<std::string>();
        const auto slash = s.find('/');
        if (slash == std::string::npos) return Rational(std::stoll(s));
        return Rational(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
    } catch (const std::exception&) {
        throw InputError("rational entries are integers or \"a/b\" strings");
    }
}

json ratpoly_json(const RatPoly& P) {
    json a = json::array();
    for (const auto& c : P) {
        std::ostringstream os;
        os << c.numerator();
        if (c.denominator() != 1) os << "/" << c.denominator();
        a.push_back(os.str());
    }
    return a;
}

std::vector<int> parse_group(const std::string& s) {
    std::vector<int> g;
    std::stringstream ss(s);
    for (std::string x; std::getline(ss, x, ',');)
        if (!x.empty()) {
            try {
                if (const int d = std::stoi(x); d != 1) g.push_back(d);
            } catch (const std::exception&) {
                throw InputError("group must be comma-separated integers");
            }
        }
    return g;
}

FractionalLattice fitt_lattice(const EpsRing& C, const EtncInstance& inst) {
    FPModule H2(C.R, inst.h2_gens, inst.h2_relations);
    std::vector<ScaledElem> g;
    for (const auto& x : fitting_ideal(H2, 0).generators()) g.push_back(scaled(C, x));
    if (g.empty()) throw InsufficientPrecision("Fitt^0(H^2) vanishes at working precision", inst.h + 1);
    return FractionalLattice::from_gens(C, g);
}

// random module over the generator's ring
ModuleData random_module(const GeneratorParams& gp) {
    Rng rng(gp.seed * 0x94D049BB133111EBULL + 0x3D1ULL);
    ModuleData m;
    m.ring = {gp.p, gp.m, gp.f, gp.group, {}};
    auto R = Ring::build(m.ring);
    m.gens = 1 + rng.below(2);
    const int nrel = rng.below(3);
    for (int i = 0; i < nrel; ++i) {
        Vec row;
        for (int j = 0; j < m.gens; ++j) {
            Vec x = rng.nonunit(*R);
            row.insert(row.end(), x.begin(), x.end());
        }
        m.relations.push_back(row);
    }
    return m;
}

ModuleData random_permutation_module(const GeneratorParams& gp) {
    if (gp.group.size() != 1) throw InputError("permutation recipe needs a cyclic group");
    Rng rng(gp.seed * 0xBF58476D1CE4E5B9ULL + 0x9E37ULL);
    auto R = Ring::build(gp.p, gp.m, 1, gp.group);
    std::map<int, int> mult;
    for (int d = 1; d <= gp.group[0]; d *= gp.p)
        if (int k = rng.below(3)) mult[d] = k;
    if (mult.empty()) mult[gp.group[0]] = 1;
    FPModule M = permutation_module(R, mult);
    return {R->spec(), M.gens(), M.relations()};
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"finite-level Selmer, Stark-system and determinant-lattice checks"};
    app.require_subcommand(1);
    Common common;
    std::string tag, relax, strict, side = "primal";
    int j = -1, r = -1, depth = -1, level = 0, jmax = 3;
    std::string xs;
    std::function<int()> action;

    auto* ring = app.add_subcommand("ring", "describe a group ring");
    std::string group_s;
    int p = 3, m = 1, f = 1;
    std::vector<std::string> ring_files;
    ring->add_option("files", ring_files, "ring instance files");
    ring->add_option("--p", p);
    ring->add_option("--m", m);
    ring->add_option("--f", f);
    ring->add_option("--group", group_s, "invariant factors, comma separated");
    ring->callback([&] {
        action = [&] {
            auto describe = [](const RingSpec& s) {
                auto R = Ring::build(s);
                Outcome o;
                o.report = {{"ring", R->describe()},          {"log_card", R->log_card()},
                            {"additive_rank", R->n()},        {"group_order", R->gorder()},
                            {"residue_field_size", ipow(s.p, s.f)}, {"local", R->local()}};
                return o;
            };
            if (ring_files.empty()) {
                Outcome o;
                try {
                    o = describe({p, m, f, parse_group(group_s), {}});
                } catch (const std::invalid_argument& e) {
                    o.code = kExitInput;
                    o.report["error"] = e.what();
                }
                return emit("ring", "group ring over a Galois ring", o, out);
            }
            common.files = ring_files;
            return run_files("ring", "group ring over a Galois ring", common, {"ring"},
                             [&](const InstanceFile& fl) { return describe(ring_from_json(fl.payload)); }, out);
        };
    });

    auto* fitting = app.add_subcommand("fitting", "Fitting ideals of a module");
    add_common(fitting, common);
    fitting->add_option("--j", j, "single index (default: all up to the generator count)");
    fitting->callback([&] {
        action = [&] {
            return run_files("fitting", "Fitting ideals of a finitely presented module", common, {"module"}, [&](const InstanceFile& fl) {
                FPModule M = module_from_json(fl.payload).build();
                Outcome o;
                const int lo = j >= 0 ? j : 0, hi = j >= 0 ? j : M.gens();
                json ideals = json::object();
                std::optional<Ideal> prev;
                bool chain = true;
                for (int k = lo; k <= hi; ++k) {
                    Ideal I = fitting_ideal(M, k);
                    ideals[std::to_string(k)] = ideal_json(I);
                    if (prev && !I.contains(*prev)) chain = false;
                    prev = I;
                }
                const bool ann = annihilator(M).contains(fitting_ideal(M, 0));
                o.report["fitting"] = ideals;
                o.report["increasing"] = chain;
                o.report["fitt0_in_annihilator"] = ann;
                if (!chain || !ann) {
                    o.code = kExitViolation;
                    o.violation = !ann ? "Fitt^0 not inside the annihilator" : "Fitting ideals not increasing";
                }
                return o;
            }, out);
        };
    });

    auto* bidual = app.add_subcommand("bidual", "exterior bidual and image ideal of an element");
    add_common(bidual, common);
    bidual->add_option("--r", r, "exterior degree")->required();
    bidual->add_option("--x", xs, "element of M as a JSON array (default: first generator)");
    bidual->callback([&] {
        action = [&] {
            return run_files("bidual", "exterior bidual and image ideal", common, {"module"}, [&](const InstanceFile& fl) {
                FPModule M = module_from_json(fl.payload).build();
                if (r < 0 || r > M.gens()) throw InputError("need 0 <= r <= number of generators");
                Vec x;
                if (xs.empty()) {
                    x = Vec(static_cast<size_t>(subsets(M.gens(), r).size()) * M.ring()->n(), 0);
                    if (!x.empty()) x[0] = 1;
                } else {
                    x = parse_vec(xs);
                }
                if (x.size() != subsets(M.gens(), r).size() * M.ring()->n()) throw InputError("element has the wrong length");
                auto B = make_bidual(M, r);
                auto img = bidual_and_image(M, r, x);
                Outcome o;
                o.report["values"] = vec_json(img.values);
                o.report["image"] = ideal_json(img.image);
                o.report["canonical_map_bijective"] = canonical_map_bijective(B);
                if (M.is_free() && !canonical_map_bijective(B)) {
                    o.code = kExitViolation;
                    o.violation = "canonical map not bijective on a free module";
                }
                return o;
            }, out);
        };
    });

    auto* selmer = app.add_subcommand("selmer", "Selmer module of a modified structure");
    add_common(selmer, common);
    selmer->add_option("--tag", tag);
    selmer->add_option("--relax", relax, "aux labels, comma separated");
    selmer->add_option("--strict", strict, "aux labels, comma separated");
    selmer->add_option("--side", side)->check(CLI::IsMember({"primal", "dual"}));
    selmer->add_option("--level", level);
    selmer->callback([&] {
        action = [&] {
            return run_files("selmer", "Selmer module as kernel of localization", common, {"selmer", "stark"}, [&](const InstanceFile& fl) {
                SelmerInstance inst = selmer_of(fl);
                const std::string t = tag_or_default(inst, tag);
                auto rep = validate_instance(inst);
                if (!rep.ok()) {
                    std::string why;
                    for (const auto& c : rep.checks)
                        if (!c.pass) why += c.name + ": " + c.detail + "; ";
                    throw InputError("instance does not validate: " + why);
                }
                if (level < 0 || level > inst.level()) throw InputError("level out of range");
                auto S = selmer_module(inst, side == "dual" ? Side::dual : Side::primal, t, parse_mask(inst, relax), parse_mask(inst, strict), level);
                Outcome o;
                o.report = {{"tag", t},
                            {"log_card", S.module.log_card()},
                            {"min_gens", S.module.min_gens()},
                            {"free", S.module.is_free()},
                            {"generators", rows_json(S.gens)}};
                json hyp = json::object();
                for (const auto& h : rep.hypotheses) hyp[h.name] = h.pass;
                o.report["hypotheses"] = hyp;
                return o;
            }, out);
        };
    });

    auto* crank = app.add_subcommand("core-rank", "core rank of a Selmer structure");
    add_common(crank, common);
    crank->add_option("--tag", tag);
    crank->callback([&] {
        action = [&] {
            return run_files("core-rank", "core rank", common, {"selmer", "stark"}, [&](const InstanceFile& fl) {
                SelmerInstance inst = selmer_of(fl);
                auto c = core_rank(inst, tag_or_default(inst, tag));
                Outcome o;
                o.report = {{"chi", c.chi}, {"dim_primal", c.dim_primal}, {"dim_dual", c.dim_dual}, {"formula_ok", c.formula_ok}};
                if (c.declared_sum) o.report["declared_sum"] = *c.declared_sum;
                if (!c.formula_ok) {
                    o.code = kExitViolation;
                    o.violation = "core rank disagrees with the declared local data";
                }
                return o;
            }, out);
        };
    });

    auto* cvertex = app.add_subcommand("core-vertex", "search for core vertices");
    add_common(cvertex, common);
    cvertex->add_option("--tag", tag);
    cvertex->add_option("--depth", depth);
    cvertex->add_option("--level", level);
    cvertex->callback([&] {
        action = [&] {
            return run_files("core-vertex", "core vertex search", common, {"selmer", "stark"}, [&](const InstanceFile& fl) {
                SelmerInstance inst = selmer_of(fl);
                const int d = depth >= 0 ? depth : inst.depth;
                if (d > static_cast<int>(inst.aux_places().size())) throw InputError("depth exceeds the number of aux primes");
                Outcome o;
                json certs = json::array();
                bool found = false, ranks = true;
                for (const auto& c : core_vertex_search(inst, tag_or_default(inst, tag), d, level)) {
                    certs.push_back({{"n", c.label},
                                     {"nu", c.nu},
                                     {"selmer_free", c.selmer_free},
                                     {"rank", c.rank},
                                     {"dual_zero", c.dual_zero},
                                     {"vertex", c.vertex},
                                     {"expected_rank", c.expected_rank}});
                    if (c.vertex) {
                        found = true;
                        if (c.rank != c.expected_rank) ranks = false;
                    }
                }
                o.report["candidates"] = certs;
                o.report["vertex_found"] = found;
                if (!ranks) {
                    o.code = kExitViolation;
                    o.violation = "core vertex with rank different from chi + nu";
                }
                return o;
            }, out);
        };
    });

    auto* cart = app.add_subcommand("cartesian", "cartesian condition at core places");
    add_common(cart, common);
    cart->add_option("--tag", tag);
    cart->callback([&] {
        action = [&] {
            return run_files("cartesian", "cartesian condition", common, {"selmer", "stark"}, [&](const InstanceFile& fl) {
                SelmerInstance inst = selmer_of(fl);
                auto c = cartesian_check(inst, tag_or_default(inst, tag));
                Outcome o;
                json places = json::array();
                for (const auto& v : c.places) places.push_back({{"place", v.label}, {"pass", v.pass}, {"detail", v.detail}});
                o.report = {{"cartesian", c.cartesian}, {"places", places}};
                return o;
            }, out);
        };
    });

    auto* tfree = app.add_subcommand("thm-free", "equivalence harness: cartesian, vertex existence, propagation");
    add_common(tfree, common);
    tfree->add_option("--tag", tag);
    tfree->callback([&] {
        action = [&] {
            return run_files("thm-free", "free Selmer module at core vertices: equivalence harness", common, {"selmer", "stark"},
                             [&](const InstanceFile& fl) {
                                 SelmerInstance inst = selmer_of(fl);
                                 auto F = theorem_free_report(inst, tag_or_default(inst, tag));
                                 Outcome o;
                                 o.report = {{"tag", F.tag},
                                             {"chi", F.chi},
                                             {"exists_at_level", F.exists_at_level},
                                             {"cartesian", F.cartesian},
                                             {"injective_all", F.injective_all},
                                             {"equivalence", F.equivalence},
                                             {"propagation", F.propagation},
                                             {"ranks_ok", F.ranks_ok},
                                             {"shortcut_ok", F.shortcut_ok},
                                             {"notes", F.notes}};
                                 if (F.violation()) {
                                     o.code = kExitViolation;
                                     o.violation = "equivalence harness violated";
                                 }
                                 return o;
                             },
                             out);
        };
    });

    auto* stark = app.add_subcommand("stark", "Stark systems");
    stark->require_subcommand(1);
    auto* ssolve = stark->add_subcommand("solve", "module of Stark systems");
    auto* sij = stark->add_subcommand("ij", "I_j invariants of a generator");
    auto* srep = stark->add_subcommand("report", "I_j against Fitting ideals of the dual Selmer module");
    for (auto* s : {ssolve, sij, srep}) {
        add_common(s, common);
        s->add_option("--tag", tag);
    }
    srep->add_option("--jmax", jmax);
    auto stark_handler = [&](const std::string& mode) {
        return [&, mode](const InstanceFile& fl) {
            StarkTask t = stark_of(fl, tag);
            auto S = stark_solve(t.inst, t.tag, t.r, t.depth);
            Outcome o;
            Vec eps = S.generators.empty() ? Vec(S.total * S.ring->n(), 0) : S.generators[0];
            o.report = {{"tag", t.tag}, {"r", t.r}, {"depth", t.depth}};
            if (mode == "solve") {
                json verts = json::array();
                for (const auto& v : S.vertices) verts.push_back({{"n", v.label}, {"nu", v.nu}, {"width", v.width}});
                o.report["vertices"] = verts;
                o.report["log_card"] = S.structure.module.log_card();
                o.report["min_gens"] = S.min_gens;
                o.report["free_rank_one"] = S.free_rank_one;
                o.report["generator"] = vec_json(eps);
            } else if (mode == "ij") {
                json ij = json::object();
                for (int k = 0; k <= t.depth; ++k) ij[std::to_string(k)] = ideal_json(ij_invariant(S, eps, k));
                o.report["ij"] = ij;
            } else {
                auto R = stark_fitting_report(t.inst, S, eps, std::min(jmax, t.depth));
                json rows = json::array();
                bool contained = true;
                for (size_t k = 0; k < R.ij.size(); ++k) {
                    rows.push_back({{"j", k}, {"ij", ideal_json(R.ij[k])}, {"fitt", ideal_json(R.fitt[k])}, {"contained", bool(R.contained[k])}, {"equal", bool(R.equal[k])}});
                    contained = contained && R.contained[k];
                }
                o.report["comparison"] = rows;
                o.report["generator"] = R.generator;
                o.report["all_equal"] = R.all_equal;
                o.report["biconditional"] = R.biconditional;
                if (!R.biconditional || !contained) {
                    o.code = kExitViolation;
                    o.violation = !contained ? "I_j not inside the Fitting ideal" : "equality of all I_j without generating";
                }
            }
            return o;
        };
    };
    ssolve->callback([&] { action = [&] { return run_files("stark-solve", "Stark systems: module of systems", common, {"stark", "selmer"}, stark_handler("solve"), out); }; });
    sij->callback([&] { action = [&] { return run_files("stark-ij", "Stark systems: I_j invariants", common, {"stark", "selmer"}, stark_handler("ij"), out); }; });
    srep->callback([&] { action = [&] { return run_files("stark-report", "Stark systems: Fitting comparison", common, {"stark", "selmer"}, stark_handler("report"), out); }; });

    auto* euler = app.add_subcommand("euler-poly", "Euler factor polynomials");
    long long ea = 0, ell = 0;
    int ep = 3;
    std::string matrix_s, product_s, ring_s;
    euler->add_option("--a", ea, "trace of Frobenius (elliptic form)");
    euler->add_option("--ell", ell, "residue characteristic (elliptic form)");
    euler->add_option("--p", ep, "working prime");
    euler->add_option("--matrix", matrix_s, "Frobenius matrix, JSON rows of integers or \"a/b\"");
    euler->add_option("--product", product_s, "JSON list of [a, ell, g] evaluated at g^-1 and multiplied");
    euler->add_option("--ring", ring_s, "ring for --product, JSON {p, m, f, group}");
    euler->callback([&] {
        action = [&] {
            Outcome o;
            try {
                if (!matrix_s.empty()) {
                    std::vector<std::vector<Rational>> A;
                    json jm = json::parse(matrix_s);
                    if (!jm.is_array()) throw InputError("matrix must be a JSON array of rows");
                    for (const auto& row : jm) {
                        if (!row.is_array()) throw InputError("matrix rows must be arrays");
                        std::vector<Rational> rr;
                        for (const auto& e : row) rr.push_back(parse_rational(e));
                        A.push_back(rr);
                    }
                    o.report["poly"] = ratpoly_json(euler_poly_matrix(A));
                } else if (!product_s.empty()) {
                    if (ring_s.empty()) throw InputError("--product needs --ring");
                    auto R = Ring::build(ring_from_json(json::parse(ring_s)));
                    std::vector<std::pair<RatPoly, int>> fac;
                    for (const auto& t : json::parse(product_s)) {
                        auto v = t.get<std::vector<long long>>();
                        if (v.size() != 3) throw InputError("product entries are [a, ell, g]");
                        fac.push_back({euler_poly_elliptic(v[0], v[1], R->p()).poly, static_cast<int>(v[2])});
                    }
                    o.report["value"] = vec_json(euler_product(*R, fac));
                    o.report["value_str"] = elem_str(*R, euler_product(*R, fac));
                } else {
                    auto e = euler_poly_elliptic(ea, ell, ep);
                    o.report["poly"] = ratpoly_json(e.poly);
                    o.report["weil_bound"] = e.weil;
                }
            } catch (const json::exception& e) {
                o.code = kExitInput;
                o.report["error"] = std::string("bad JSON argument: ") + e.what();
            } catch (const std::invalid_argument& e) {
                o.code = kExitInput;
                o.report["error"] = e.what();
            }
            return emit("euler-poly", "Euler factor polynomial", o, out);
        };
    });

    auto* bk = app.add_subcommand("bk-check", "basic element image identity im(eta) * Xi = Fitt^0(H^2)");
    add_common(bk, common);
    bk->callback([&] {
        action = [&] {
            return run_files("bk-check", "basic element image identity", common, {"etnc"}, [&](const InstanceFile& fl) {
                EtncInstance inst = etnc_from_json(fl.payload);
                auto rep = bk_image_check(inst);
                Outcome o;
                o.report["verdict"] = verdict_keyword(rep.verdict);
                if (rep.verdict == Verdict::insufficient_precision) {
                    o.code = kExitPrecision;
                    o.report["required_h"] = rep.required_h;
                    o.report["detail"] = rep.detail;
                    return o;
                }
                o.report["eta"] = {{"y", vec_json(rep.eta.y)}, {"offset", rep.eta.e}, {"prec", rep.eta.prec}};
                o.report["im_eta"] = lattice_json(rep.im_eta);
                o.report["xi"] = lattice_json(rep.xi);
                o.report["fitt0"] = lattice_json(rep.fitt);
                o.report["product"] = lattice_json(rep.product);
                if (rep.verdict == Verdict::fail) {
                    o.code = kExitViolation;
                    o.violation = rep.detail;
                }
                return o;
            }, out);
        };
    });

    auto* xi = app.add_subcommand("xi", "determinant lattice and TNC verdict against the integral order");
    add_common(xi, common);
    xi->callback([&] {
        action = [&] {
            return run_files("xi", "determinant lattice Xi and TNC verdict", common, {"etnc"}, [&](const InstanceFile& fl) {
                EtncInstance inst = etnc_from_json(fl.payload);
                auto rep = bk_image_check(inst);
                Outcome o;
                if (rep.verdict == Verdict::insufficient_precision) {
                    o.code = kExitPrecision;
                    o.report["verdict"] = verdict_keyword(rep.verdict);
                    o.report["required_h"] = rep.required_h;
                    return o;
                }
                auto C = EpsRing::make(inst.p, inst.f, inst.group, inst.eps, inst.working_precision(), inst.h);
                o.report["xi"] = lattice_json(rep.xi);
                o.report["tnc"] = tnc_check(C, rep.xi) ? "PASS" : "FAIL";
                return o;
            }, out);
        };
    });

    auto* assoc = app.add_subcommand("assoc-order", "associated order of Fitt^0(H^2) and the minimal-order criterion");
    add_common(assoc, common);
    assoc->callback([&] {
        action = [&] {
            return run_files("assoc-order", "associated order and minimal-order criterion", common, {"etnc"}, [&](const InstanceFile& fl) {
                EtncInstance inst = etnc_from_json(fl.payload);
                auto C = EpsRing::make(inst.p, inst.f, inst.group, inst.eps, inst.working_precision(), inst.h);
                auto I = fitt_lattice(C, inst);
                auto A = associated_order(C, I);
                Outcome o;
                const bool stable = A.order.times(C, I).equals(C, I);
                const bool over = A.order.contains(C, FractionalLattice::integral(C));
                o.report = {{"lattice", lattice_json(I)},
                            {"order", lattice_json(A.order)},
                            {"principal", A.principal},
                            {"order_is_integral", A.order_is_integral},
                            {"cyclic", A.cyclic},
                            {"stabilizes", stable},
                            {"contains_integral", over}};
                if (!stable || !over || (A.cyclic && A.principal != A.order_is_integral)) {
                    o.code = kExitViolation;
                    o.violation = !stable ? "order does not stabilize the lattice" : !over ? "order misses the integral ring" : "min-order criterion disagrees with the order";
                }
                return o;
            }, out);
        };
    });

    auto* codesc = app.add_subcommand("codescent", "Fitting ideals and image ideals under G -> G/H");
    add_common(codesc, common);
    codesc->callback([&] {
        action = [&] {
            return run_files("codescent", "codescent along a quotient map", common, {"tower"}, [&](const InstanceFile& fl) {
                auto rep = codescent_check(tower_from_json(fl.payload));
                Outcome o;
                o.report = {{"fitting_ok", rep.fitting_ok},
                            {"image_ok", rep.image_ok},
                            {"target_fitt", ideal_json(rep.target_fitt)},
                            {"target_image", ideal_json(rep.target_image)}};
                if (!rep.ok()) {
                    o.code = kExitViolation;
                    o.violation = !rep.fitting_ok ? "projection of Fitt^0 differs" : "projection of the image ideal differs";
                }
                return o;
            }, out);
        };
    });

    auto* artin = app.add_subcommand("artin", "Artin induction decomposition of a rational character");
    std::string phi_s;
    artin->add_option("--group", group_s, "invariant factors, comma separated")->required();
    artin->add_option("--phi", phi_s, "JSON list of [character, multiplicity]")->required();
    artin->callback([&] {
        action = [&] {
            Outcome o;
            try {
                auto group = parse_group(group_s);
                std::map<std::vector<int>, long long> phi;
                for (const auto& e : json::parse(phi_s)) {
                    if (!e.is_array() || e.size() != 2) throw InputError("phi entries are [character, multiplicity]");
                    phi[e[0].get<std::vector<int>>()] += e[1].get<long long>();
                }
                auto d = artin_decompose(group, phi);
                json coeffs = json::array();
                for (const auto& [H, n] : d.coeffs) coeffs.push_back({{"subgroup_gens", H.gens}, {"order", H.order}, {"n", n}});
                const bool ok = artin_assemble(group, d.coeffs) == orbit_multiplicities(group, phi);
                o.report = {{"m", d.m}, {"coefficients", coeffs}, {"reconstruction_ok", ok}};
                if (!ok) {
                    o.code = kExitViolation;
                    o.report["error"] = "assembly does not reproduce m * phi";
                }
            } catch (const json::exception& e) {
                o.code = kExitInput;
                o.report["error"] = std::string("bad JSON argument: ") + e.what();
            } catch (const std::invalid_argument& e) {
                o.code = kExitInput;
                o.report["error"] = e.what();
            }
            return emit("artin", "Artin induction decomposition", o, out);
        };
    });

    auto* yak = app.add_subcommand("yakovlev", "Yakovlev decomposition over a cyclic p-group");
    add_common(yak, common);
    yak->callback([&] {
        action = [&] {
            return run_files("yakovlev", "Yakovlev decomposition", common, {"module"}, [&](const InstanceFile& fl) {
                FPModule M = module_from_json(fl.payload).build();
                auto Y = yakovlev_decompose(M);
                if (!Y.ok) throw InputError("hypothesis fails: " + Y.diagnostic);
                FPModule P = permutation_module(M.ring(), Y.mult);
                bool same = P.log_card() == M.log_card();
                const int G = M.ring()->gorder();
                for (int d = 1; d <= G; d *= M.ring()->p()) same = same && fixed_point_log(P, d) == fixed_point_log(M, d);
                const bool regular = Y.mult.count(1) && Y.mult.at(1) > 0;
                Outcome o;
                json mult = json::object();
                for (const auto& [d, n] : Y.mult) mult[std::to_string(d)] = n;
                o.report = {{"multiplicities", mult}, {"eps", Y.eps}, {"fixed_logs", Y.fixed_logs}, {"reconstruction_ok", same},
                            {"eps_zero", Y.eps.empty()}, {"regular_summand", regular}};
                if (!same || Y.eps.empty() != regular) {
                    o.code = kExitViolation;
                    o.violation = !same ? "reassembled module differs in fixed points" : "eps descriptor disagrees with the regular summand";
                }
                return o;
            }, out);
        };
    });

    auto* genc = app.add_subcommand("gen", "seeded instance generator");
    GeneratorParams gp;
    std::string recipe = "cartesian", out_path, gen_group = "3";
    genc->add_option("--recipe", recipe)
        ->check(CLI::IsMember({"cartesian", "non-cartesian", "core-vertex-at-depth-k", "stark", "etnc-basic", "tower", "module", "permutation", "ring"}));
    genc->add_option("--seed", gp.seed);
    genc->add_option("--p", gp.p);
    genc->add_option("--m", gp.m);
    genc->add_option("--f", gp.f);
    genc->add_option("--group", gen_group, "invariant factors, comma separated (1 for trivial)");
    genc->add_option("--core-places", gp.core_places);
    genc->add_option("--aux", gp.aux_primes);
    genc->add_option("--depth", gp.depth);
    genc->add_option("--chi", gp.chi);
    genc->add_option("--vertex-depth", gp.vertex_depth);
    genc->add_option("-o,--out", out_path, "output file (default: stdout)");
    genc->callback([&] {
        action = [&] {
            try {
                gp.recipe = recipe;
                gp.group = parse_group(gen_group);
                InstanceFile fl;
                const std::string note = "generated: recipe " + recipe + ", seed " + std::to_string(gp.seed);
                if (recipe == "etnc-basic") {
                    fl = make_file("etnc", etnc_to_json(generate_etnc(gp)), note);
                } else if (recipe == "tower") {
                    fl = make_file("tower", tower_to_json(generate_tower(gp)), note);
                } else if (recipe == "module") {
                    fl = make_file("module", module_to_json(random_module(gp)), note);
                } else if (recipe == "permutation") {
                    fl = make_file("module", module_to_json(random_permutation_module(gp)), note);
                } else if (recipe == "ring") {
                    fl = make_file("ring", ring_to_json(Ring::build(gp.p, gp.m, gp.f, gp.group)->spec()), note);
                } else if (recipe == "stark") {
                    StarkTask t;
                    t.inst = generate_selmer(gp);
                    t.tag = t.inst.tags()[0];
                    t.r = core_rank(t.inst, t.tag).chi;
                    t.depth = t.inst.depth;
                    fl = make_file("stark", stark_to_json(t), note);
                } else {
                    fl = make_file("selmer", selmer_to_json(generate_selmer(gp)), note);
                }
                if (out_path.empty()) out << serialize(fl);
                else save_file(out_path, fl);
                return kExitPass;
            } catch (const std::invalid_argument& e) {
                err << "error: " << e.what() << "\n";
                return kExitInput;
            }
        };
    });

    auto* orc = app.add_subcommand("oracle", "brute-force oracle compared with the main path");
    std::string task;
    orc->add_option("task", task)->required()->check(CLI::IsMember({"ideal-membership", "bidual-image", "stark-enumerate", "stabilizer", "fitting-minors"}));
    add_common(orc, common);
    orc->add_option("--j", j);
    orc->add_option("--r", r);
    orc->add_option("--x", xs);
    orc->callback([&] {
        action = [&] {
            const std::vector<std::string> kinds = task == "stark-enumerate" ? std::vector<std::string>{"stark", "selmer"}
                                                   : task == "stabilizer"    ? std::vector<std::string>{"etnc"}
                                                                             : std::vector<std::string>{"module"};
            return run_files("oracle-" + task, "brute-force oracle", common, kinds, [&](const InstanceFile& fl) {
                Outcome o;
                bool agree = true;
                if (task == "fitting-minors") {
                    FPModule M = module_from_json(fl.payload).build();
                    const int lo = j >= 0 ? j : 0, hi = j >= 0 ? j : M.gens();
                    for (int k = lo; k <= hi; ++k) agree = agree && oracle::ideal_codes(fitting_ideal(M, k)) == oracle::fitting_set(M, k);
                } else if (task == "ideal-membership") {
                    ModuleData md = module_from_json(fl.payload);
                    if (md.gens != 1) throw InputError("ideal-membership reads the relations of a one-generator module as ideal generators");
                    auto R = Ring::build(md.ring);
                    Ideal I(R, md.relations);
                    auto S = oracle::ideal_set(*R, md.relations);
                    agree = oracle::ideal_codes(I) == S;
                    if (!xs.empty()) {
                        Vec x = parse_vec(xs);
                        if (static_cast<int>(x.size()) != R->n()) throw InputError("element has the wrong length");
                        const bool main = I.contains(R->red(x)), brute = oracle::member({R->z().q, R->n()}, S, R->red(x));
                        o.report["member"] = main;
                        agree = agree && main == brute;
                    }
                } else if (task == "bidual-image") {
                    FPModule M = module_from_json(fl.payload).build();
                    const int rr = r >= 0 ? r : 1;
                    if (rr > M.gens()) throw InputError("r exceeds the number of generators");
                    Vec x = xs.empty() ? Vec(subsets(M.gens(), rr).size() * M.ring()->n(), 0) : parse_vec(xs);
                    if (xs.empty() && !x.empty()) x[0] = 1;
                    if (x.size() != subsets(M.gens(), rr).size() * M.ring()->n()) throw InputError("element has the wrong length");
                    agree = oracle::ideal_codes(bidual_and_image(M, rr, x).image) == oracle::bidual_image_set(M, rr, x);
                } else if (task == "stark-enumerate") {
                    StarkTask t = stark_of(fl, tag);
                    auto S = stark_solve(t.inst, t.tag, t.r, 1);
                    auto E = oracle::stark_enumerate(t.inst, t.tag, t.r);
                    agree = S.structure.module.log_card() == E.log_card;
                    for (int k = 0; k <= 1 && agree; ++k) {
                        std::vector<Vec> g;
                        for (const auto& row : S.systems.rows())
                            for (const auto& x : ij_invariant(S, row, k).generators()) g.push_back(x);
                        agree = oracle::ideal_set(*S.ring, g) == E.value_ideals[k];
                    }
                    o.report["log_card"] = E.log_card;
                } else {
                    EtncInstance inst = etnc_from_json(fl.payload);
                    auto C = EpsRing::make(inst.p, inst.f, inst.group, inst.eps, inst.working_precision(), inst.h);
                    if (C.R->log_card() > 14) throw InputError("stabilizer oracle bound exceeded");
                    auto I = fitt_lattice(C, inst);
                    auto A = associated_order(C, I);
                    const Ring& R = *C.R;
                    agree = oracle::stabilizer_set(R, I.span().rows(), C.kernel.rows(), I.exponent(), I.precision()) ==
                                oracle::lattice_set(R, A.stabilizer.rows(), {}, R.m()) &&
                            A.principal == oracle::principal_by_search(R, I.span().rows(), C.kernel.rows(), I.precision());
                    o.report["principal"] = A.principal;
                }
                o.report["task"] = task;
                o.report["agree"] = agree;
                if (!agree) {
                    o.code = kExitViolation;
                    o.violation = "oracle disagrees with the main path on " + task;
                }
                return o;
            }, out);
        };
    });

    std::vector<std::string> rev(args.rbegin(), args.rend());
    if (!rev.empty()) rev.pop_back();
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitPass;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInput;
    }
    if (!action) return kExitInput;
    return action();
}

}  // namespace starklab
