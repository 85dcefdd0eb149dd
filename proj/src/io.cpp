#include "starklab/io.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace starklab {

namespace {

const std::set<std::string> kKinds{"ring", "module", "selmer", "stark", "etnc", "tower"};

template <class T>
T need(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw InputError(std::string("missing field '") + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw InputError(std::string("field '") + key + "' has the wrong type");
    }
}

Vec vec_of(const json& j, const Ring& R, size_t len) {
    if (!j.is_array()) throw InputError("element must be an array");
    Vec v;
    for (const auto& x : j) {
        if (!x.is_number_integer()) throw InputError("element entries must be integers");
        const i64 c = x.get<i64>();
        if (c < 0 || c >= R.z().q) throw InputError("element entry out of range");
        v.push_back(c);
    }
    if (v.size() != len) throw InputError("element has length " + std::to_string(v.size()) + ", expected " + std::to_string(len));
    return v;
}

std::vector<Vec> rows_of(const json& j, const Ring& R, size_t len) {
    if (!j.is_array()) throw InputError("expected a list of elements");
    std::vector<Vec> out;
    for (const auto& x : j) out.push_back(vec_of(x, R, len));
    return out;
}

RingHandle ring_or_input_error(const RingSpec& s) {
    try {
        return Ring::build(s);
    } catch (const std::invalid_argument& e) {
        throw InputError(e.what());
    }
}

std::vector<std::vector<int>> int_rows(const json& j, const char* key) {
    return need<std::vector<std::vector<int>>>(j, key);
}

json scaled_json(const ScaledElem& a) { return {{"y", vec_json(a.y)}, {"offset", a.e}, {"prec", a.prec}}; }

ScaledElem scaled_of(const json& j, const Ring& R) {
    if (!j.is_object()) throw InputError("scaled element must be an object");
    return {vec_of(j.at("y"), R, R.n()), need<int>(j, "offset"), need<int>(j, "prec")};
}

}  // namespace

json vec_json(const Vec& v) { return json(v); }

json rows_json(const std::vector<Vec>& rows) {
    json a = json::array();
    for (const auto& r : rows) a.push_back(vec_json(r));
    return a;
}

FPModule ModuleData::build() const { return FPModule(Ring::build(ring), gens, relations); }

json ring_to_json(const RingSpec& s) {
    json j{{"p", s.p}, {"m", s.m}, {"f", s.f}, {"group", s.group}};
    if (!s.aux.empty()) j["aux"] = s.aux;
    return j;
}

RingSpec ring_from_json(const json& j) {
    RingSpec s;
    s.p = need<int>(j, "p");
    s.m = need<int>(j, "m");
    s.f = need<int>(j, "f");
    s.group = need<std::vector<int>>(j, "group");
    if (j.contains("aux")) s.aux = need<std::vector<int>>(j, "aux");
    ring_or_input_error(s);
    return s;
}

json module_to_json(const ModuleData& m) {
    return {{"ring", ring_to_json(m.ring)}, {"gens", m.gens}, {"relations", rows_json(m.relations)}};
}

ModuleData module_from_json(const json& j) {
    ModuleData m;
    m.ring = ring_from_json(need<json>(j, "ring"));
    auto R = ring_or_input_error(m.ring);
    m.gens = need<int>(j, "gens");
    if (m.gens < 0) throw InputError("negative generator count");
    m.relations = rows_of(need<json>(j, "relations"), *R, static_cast<size_t>(m.gens) * R->n());
    return m;
}

json selmer_to_json(const SelmerInstance& inst) {
    json places = json::array();
    for (const auto& P : inst.places) {
        json pairing = json::array();
        for (const auto& row : P.pairing) pairing.push_back(rows_json(row));
        json conds = json::object(), res = json::object();
        for (const auto& [t, g] : P.conditions) conds[t] = rows_json(g);
        for (const auto& [t, g] : P.residual_conditions) res[t] = rows_json(g);
        json pj{{"label", P.label}, {"aux", P.aux}, {"rank", P.rank}, {"pairing", pairing}, {"conditions", conds},
                {"residual_conditions", res}, {"phi_fs", vec_json(P.phi_fs)}, {"h0_residual", P.h0_residual}};
        pj["h0_rank"] = P.h0_rank ? json(*P.h0_rank) : json(nullptr);
        places.push_back(pj);
    }
    return {{"ring", ring_to_json(inst.ring)}, {"places", places},     {"global_rank", inst.global_rank},
            {"loc", rows_json(inst.loc)},      {"dual_global", rows_json(inst.dual_global)},
            {"depth", inst.depth},             {"flags", inst.flags}, {"recipe", inst.recipe}};
}

SelmerInstance selmer_from_json(const json& j) {
    SelmerInstance inst;
    inst.ring = ring_from_json(need<json>(j, "ring"));
    auto R = ring_or_input_error(inst.ring);
    auto k1 = R->residue_field();
    const size_t n = R->n();
    for (const auto& pj : need<json>(j, "places")) {
        Place P;
        P.label = need<std::string>(pj, "label");
        P.aux = need<bool>(pj, "aux");
        P.rank = need<int>(pj, "rank");
        if (P.rank < 0 || (P.aux && P.rank != 2)) throw InputError("bad rank at place " + P.label);
        for (const auto& row : need<json>(pj, "pairing")) P.pairing.push_back(rows_of(row, *R, n));
        if (P.pairing.size() != static_cast<size_t>(P.rank)) throw InputError("pairing size mismatch at place " + P.label);
        for (const auto& row : P.pairing)
            if (row.size() != static_cast<size_t>(P.rank)) throw InputError("pairing size mismatch at place " + P.label);
        const json conds = need<json>(pj, "conditions"), res = need<json>(pj, "residual_conditions");
        if (!conds.is_object() || !res.is_object()) throw InputError("conditions must be objects keyed by tag");
        for (const auto& [t, g] : conds.items()) P.conditions[t] = rows_of(g, *R, P.rank * n);
        for (const auto& [t, g] : res.items())
            P.residual_conditions[t] = rows_of(g, *k1, static_cast<size_t>(P.rank) * k1->n());
        const json& phi = need<json>(pj, "phi_fs");
        if (P.aux) P.phi_fs = vec_of(phi, *R, n);
        else if (!phi.empty()) throw InputError("phi_fs only at auxiliary places");
        P.h0_residual = need<int>(pj, "h0_residual");
        if (!pj.at("h0_rank").is_null()) P.h0_rank = need<int>(pj, "h0_rank");
        inst.places.push_back(std::move(P));
    }
    inst.global_rank = need<int>(j, "global_rank");
    const size_t N = static_cast<size_t>(inst.ambient()) * n;
    inst.loc = rows_of(need<json>(j, "loc"), *R, N);
    if (inst.loc.size() != static_cast<size_t>(inst.global_rank)) throw InputError("loc must have global_rank rows");
    inst.dual_global = rows_of(need<json>(j, "dual_global"), *R, N);
    inst.depth = need<int>(j, "depth");
    inst.flags = need<std::map<std::string, bool>>(j, "flags");
    inst.recipe = need<std::string>(j, "recipe");
    return inst;
}

json stark_to_json(const StarkTask& t) {
    return {{"selmer", selmer_to_json(t.inst)}, {"tag", t.tag}, {"r", t.r}, {"depth", t.depth}};
}

StarkTask stark_from_json(const json& j) {
    StarkTask t;
    t.inst = selmer_from_json(need<json>(j, "selmer"));
    t.tag = need<std::string>(j, "tag");
    t.r = need<int>(j, "r");
    t.depth = need<int>(j, "depth");
    if (t.r < 0 || t.depth < 0 || t.depth > static_cast<int>(t.inst.aux_places().size())) throw InputError("bad stark rank or depth");
    return t;
}

json etnc_to_json(const EtncInstance& inst) {
    return {{"p", inst.p},
            {"m", inst.m},
            {"f", inst.f},
            {"h", inst.h},
            {"group", inst.group},
            {"eps", inst.eps},
            {"r", inst.r},
            {"basic", vec_json(inst.basic)},
            {"h2_gens", inst.h2_gens},
            {"h2_relations", rows_json(inst.h2_relations)},
            {"lambda", scaled_json(inst.lambda)},
            {"lstar", scaled_json(inst.lstar)}};
}

EtncInstance etnc_from_json(const json& j) {
    EtncInstance inst;
    inst.p = need<int>(j, "p");
    inst.m = need<int>(j, "m");
    inst.f = need<int>(j, "f");
    inst.h = need<int>(j, "h");
    inst.group = need<std::vector<int>>(j, "group");
    inst.eps = int_rows(j, "eps");
    inst.r = need<int>(j, "r");
    if (inst.m < 1 || inst.h < 0) throw InputError("bad precision data");
    auto R = ring_or_input_error({inst.p, inst.working_precision(), inst.f, inst.group, {}});
    inst.basic = vec_of(need<json>(j, "basic"), *R, R->n());
    inst.h2_gens = need<int>(j, "h2_gens");
    if (inst.h2_gens < 0) throw InputError("negative generator count");
    inst.h2_relations = rows_of(need<json>(j, "h2_relations"), *R, static_cast<size_t>(inst.h2_gens) * R->n());
    inst.lambda = scaled_of(need<json>(j, "lambda"), *R);
    inst.lstar = scaled_of(need<json>(j, "lstar"), *R);
    for (const auto& chi : inst.eps) {
        if (chi.size() != inst.group.size()) throw InputError("character length mismatch");
        for (size_t i = 0; i < chi.size(); ++i)
            if (chi[i] < 0 || chi[i] >= inst.group[i]) throw InputError("character exponent out of range");
    }
    try {
        validate_etnc(inst);
    } catch (const std::invalid_argument& e) {
        throw InputError(e.what());
    }
    return inst;
}

json tower_to_json(const TowerInstance& t) {
    return {{"source", ring_to_json(t.source)},
            {"target_group", t.target_group},
            {"images", t.images},
            {"h2_gens", t.h2_gens},
            {"h2_relations", rows_json(t.h2_relations)},
            {"r", t.r},
            {"d", t.d},
            {"element", vec_json(t.element)}};
}

TowerInstance tower_from_json(const json& j) {
    TowerInstance t;
    t.source = ring_from_json(need<json>(j, "source"));
    auto R = ring_or_input_error(t.source);
    t.target_group = need<std::vector<int>>(j, "target_group");
    ring_or_input_error({t.source.p, t.source.m, t.source.f, t.target_group, {}});
    t.images = int_rows(j, "images");
    t.h2_gens = need<int>(j, "h2_gens");
    if (t.h2_gens < 0) throw InputError("negative generator count");
    t.h2_relations = rows_of(need<json>(j, "h2_relations"), *R, static_cast<size_t>(t.h2_gens) * R->n());
    t.r = need<int>(j, "r");
    t.d = need<int>(j, "d");
    if (t.d < 0 || t.r < 0 || t.r > t.d) throw InputError("need 0 <= r <= d");
    t.element = vec_of(need<json>(j, "element"), *R, subsets(t.d, t.r).size() * R->n());
    return t;
}

json canonical_of(const std::string& kind, const json& payload) {
    if (kind == "ring") {
        auto R = Ring::build(ring_from_json(payload));
        return {{"describe", R->describe()}, {"log_card", R->log_card()}};
    }
    if (kind == "module") {
        FPModule M = module_from_json(payload).build();
        return {{"log_card", M.log_card()}, {"relation_span", rows_json(M.rel_span().rows())}};
    }
    if (kind == "selmer" || kind == "stark") {
        SelmerInstance inst = kind == "selmer" ? selmer_from_json(payload) : stark_from_json(payload).inst;
        json sel = json::object();
        for (const auto& t : inst.tags()) sel[t] = selmer_module(inst, Side::primal, t, 0, 0).module.log_card();
        return {{"global_image", rows_json(global_image(inst).rows())}, {"selmer_log_card", sel}};
    }
    if (kind == "etnc") {
        EtncInstance inst = etnc_from_json(payload);
        FPModule H2(Ring::build(inst.p, inst.working_precision(), inst.f, inst.group), inst.h2_gens, inst.h2_relations);
        return {{"h2_span", rows_json(H2.rel_span().rows())}, {"h2_log_card", H2.log_card()},
                {"eps", eps_normalize(inst.group, inst.eps)}};
    }
    if (kind == "tower") {
        TowerInstance t = tower_from_json(payload);
        FPModule H2(Ring::build(t.source), t.h2_gens, t.h2_relations);
        return {{"h2_span", rows_json(H2.rel_span().rows())}, {"h2_log_card", H2.log_card()}};
    }
    throw InputError("unknown kind '" + kind + "'");
}

InstanceFile make_file(const std::string& kind, json payload, const std::string& note) {
    if (!kKinds.count(kind)) throw InputError("unknown kind '" + kind + "'");
    return {kSchemaVersion, kind, std::move(payload), note};
}

std::string serialize(const InstanceFile& f) {
    json j{{"schema", f.schema}, {"kind", f.kind}, {"payload", f.payload}, {"canonical", canonical_of(f.kind, f.payload)}};
    if (!f.note.empty()) j["note"] = f.note;
    return j.dump(1) + "\n";
}

InstanceFile parse(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw InputError(std::string("not valid JSON: ") + e.what());
    }
    InstanceFile f;
    f.schema = need<int>(j, "schema");
    if (f.schema != kSchemaVersion) throw InputError("schema version " + std::to_string(f.schema) + " is not supported");
    f.kind = need<std::string>(j, "kind");
    if (!kKinds.count(f.kind)) throw InputError("unknown kind '" + f.kind + "'");
    f.payload = need<json>(j, "payload");
    if (j.contains("note")) f.note = need<std::string>(j, "note");
    json canon;
    try {
        canon = canonical_of(f.kind, f.payload);
    } catch (const InputError&) {
        throw;
    } catch (const std::exception& e) {
        throw InputError(std::string("payload rejected: ") + e.what());
    }
    if (!j.contains("canonical") || j.at("canonical") != canon) throw InputError("canonical-form mismatch (file altered or inconsistent)");
    return f;
}

InstanceFile load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

void save_file(const std::string& path, const InstanceFile& f) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write " + path);
    out << serialize(f);
}

}  // namespace starklab
