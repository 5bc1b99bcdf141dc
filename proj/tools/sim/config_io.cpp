#include "config_io.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>

namespace ivpb::cli {

using nlohmann::json;

namespace {

void only_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) throw ConfigError(where + " must be an object");
    for (const auto& [key, _] : obj.items()) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || key == a;
        if (!ok) throw ConfigError("unknown key '" + (where.empty() ? key : where + "." + key) + "'");
    }
}

template <class T>
void read(const json& obj, const char* key, const std::string& where, T& out) {
    auto it = obj.find(key);
    if (it == obj.end()) return;
    try {
        out = it->get<T>();
    } catch (const json::exception&) {
        throw ConfigError(where + "." + key + " has the wrong type");
    }
}

Profile read_profile(const json& obj, const std::string& where) {
    only_keys(obj, where, {"amp", "mode", "axis"});
    Profile p;
    read(obj, "amp", where, p.amp);
    read(obj, "mode", where, p.mode);
    read(obj, "axis", where, p.axis);
    return p;
}

json profile_json(const Profile& p) { return {{"amp", p.amp}, {"mode", p.mode}, {"axis", p.axis}}; }

}  // namespace

RunConfig config_from_json(const json& doc) {
    only_keys(doc, "", {"grid", "time", "initial_data", "collision", "poisson", "output"});
    RunConfig c;

    if (doc.contains("grid")) {
        const json& g = doc["grid"];
        only_keys(g, "grid", {"nx", "v_max", "nv"});
        if (g.contains("nx")) {
            if (g["nx"].is_number_integer()) c.nx = {g["nx"].get<int>()};
            else read(g, "nx", "grid", c.nx);
        }
        read(g, "v_max", "grid", c.v_max);
        read(g, "nv", "grid", c.nv);
    }

    if (doc.contains("time")) {
        const json& t = doc["time"];
        only_keys(t, "time", {"dt", "cfl_safety", "t_end", "mode", "m0", "conservation_correction"});
        if (t.contains("dt")) {
            if (t["dt"].is_string()) {
                if (t["dt"].get<std::string>() != "auto") throw ConfigError("time.dt must be positive or 'auto'");
                c.dt.reset();
            } else if (t["dt"].is_number()) {
                c.dt = t["dt"].get<double>();
            } else {
                throw ConfigError("time.dt must be positive or 'auto'");
            }
        }
        read(t, "cfl_safety", "time", c.cfl_safety);
        read(t, "t_end", "time", c.t_end);
        read(t, "m0", "time", c.m0);
        read(t, "conservation_correction", "time", c.conservation_correction);
        if (t.contains("mode")) {
            const std::string m = t["mode"].is_string() ? t["mode"].get<std::string>() : "";
            if (m == "PERTURBATION") c.mode = Mode::Perturbation;
            else if (m == "PHYSICAL") c.mode = Mode::Physical;
            else throw ConfigError("time.mode must be \"PERTURBATION\" or \"PHYSICAL\"");
        }
    }

    if (doc.contains("initial_data")) {
        const json& d = doc["initial_data"];
        only_keys(d, "initial_data", {"a", "b", "c", "micro", "balance_energy"});
        if (d.contains("a")) c.init.a = read_profile(d["a"], "initial_data.a");
        if (d.contains("c")) c.init.c = read_profile(d["c"], "initial_data.c");
        if (d.contains("micro")) c.init.micro = read_profile(d["micro"], "initial_data.micro");
        if (d.contains("b")) {
            const json& b = d["b"];
            if (!b.is_array() || b.size() > 3) throw ConfigError("initial_data.b must be a list of up to 3 profiles");
            for (std::size_t i = 0; i < b.size(); ++i)
                c.init.b[i] = read_profile(b[i], "initial_data.b[" + std::to_string(i) + "]");
        }
        read(d, "balance_energy", "initial_data", c.init.balance_energy);
    }

    if (doc.contains("collision")) {
        const json& k = doc["collision"];
        only_keys(k, "collision", {"sphere_nodes", "kink_order", "cache_dir"});
        read(k, "sphere_nodes", "collision", c.collision.sphere_nodes);
        read(k, "kink_order", "collision", c.collision.kink_order);
        read(k, "cache_dir", "collision", c.cache_dir);
    }

    if (doc.contains("poisson")) {
        const json& p = doc["poisson"];
        only_keys(p, "poisson", {"tol", "max_iters", "max_halvings", "krylov_max", "solves_per_step"});
        read(p, "tol", "poisson", c.poisson.tol);
        read(p, "max_iters", "poisson", c.poisson.max_iters);
        read(p, "max_halvings", "poisson", c.poisson.max_halvings);
        read(p, "krylov_max", "poisson", c.poisson.krylov_max);
        read(p, "solves_per_step", "poisson", c.field_solves);
    }

    if (doc.contains("output")) {
        const json& o = doc["output"];
        only_keys(o, "output", {"every", "k_max", "transient_fraction"});
        read(o, "every", "output", c.output_every);
        read(o, "k_max", "output", c.k_max);
        read(o, "transient_fraction", "output", c.transient_fraction);
    }

    c.validate();
    return c;
}

RunConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    json doc;
    try {
        doc = json::parse(ss.str(), nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw ConfigError("config file '" + path + "': " + e.what());
    }
    return config_from_json(doc);
}

json config_to_json(const RunConfig& c) {
    json j;
    j["grid"] = {{"nx", c.nx}, {"v_max", c.v_max}, {"nv", c.nv}};
    j["time"] = {{"dt", c.resolved_dt()},
                 {"cfl_safety", c.cfl_safety},
                 {"t_end", c.t_end},
                 {"mode", c.mode == Mode::Physical ? "PHYSICAL" : "PERTURBATION"},
                 {"m0", c.m0},
                 {"conservation_correction", c.conservation_correction}};
    json b = json::array();
    for (const auto& p : c.init.b) b.push_back(profile_json(p));
    j["initial_data"] = {{"a", profile_json(c.init.a)},
                         {"b", b},
                         {"c", profile_json(c.init.c)},
                         {"micro", profile_json(c.init.micro)},
                         {"balance_energy", c.init.balance_energy}};
    j["collision"] = {{"sphere_nodes", c.collision.sphere_nodes},
                      {"kink_order", c.collision.kink_order},
                      {"cache_dir", c.cache_dir}};
    j["poisson"] = {{"tol", c.poisson.tol},
                    {"max_iters", c.poisson.max_iters},
                    {"max_halvings", c.poisson.max_halvings},
                    {"krylov_max", c.poisson.krylov_max},
                    {"solves_per_step", c.field_solves}};
    j["output"] = {{"every", c.output_every}, {"k_max", c.k_max}, {"transient_fraction", c.transient_fraction}};
    return j;
}

}  // namespace ivpb::cli
