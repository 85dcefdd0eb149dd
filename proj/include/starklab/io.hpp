#pragma once

#include <stdexcept>
#include <string>

#include <json.hpp>

#include "starklab/etnc_lattice.hpp"
#include "starklab/selmer_formalism.hpp"

namespace starklab {

using json = nlohmann::json;

constexpr int kSchemaVersion = 1;

// malformed input, schema or canonical-form mismatch: exit code 2 at the CLI
struct InputError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ModuleData {
    RingSpec ring;
    int gens = 0;
    std::vector<Vec> relations;
    FPModule build() const;
};

struct StarkTask {
    SelmerInstance inst;
    std::string tag = "can";
    int r = 1;
    int depth = 1;
};

// kind: ring | module | selmer | stark | etnc | tower
struct InstanceFile {
    int schema = kSchemaVersion;
    std::string kind;
    json payload;
    std::string note;
};

json ring_to_json(const RingSpec& s);
RingSpec ring_from_json(const json& j);
json module_to_json(const ModuleData& m);
ModuleData module_from_json(const json& j);
json selmer_to_json(const SelmerInstance& inst);
SelmerInstance selmer_from_json(const json& j);
json stark_to_json(const StarkTask& t);
StarkTask stark_from_json(const json& j);
json etnc_to_json(const EtncInstance& inst);
EtncInstance etnc_from_json(const json& j);
json tower_to_json(const TowerInstance& t);
TowerInstance tower_from_json(const json& j);

InstanceFile make_file(const std::string& kind, json payload, const std::string& note = "");
// canonical forms recomputed from the payload
json canonical_of(const std::string& kind, const json& payload);
std::string serialize(const InstanceFile& f);
InstanceFile parse(const std::string& text);  // throws InputError, including tampering
InstanceFile load_file(const std::string& path);
void save_file(const std::string& path, const InstanceFile& f);

json vec_json(const Vec& v);
json rows_json(const std::vector<Vec>& rows);

}  // namespace starklab
