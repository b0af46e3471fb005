#include "klkit/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "klkit/approximants.hpp"

namespace klkit {
namespace {

using nlohmann::json;

const std::set<std::string> kCommands = {"check", "approximate", "converge", "priormass",
                                         "verify-bounds"};

const std::map<std::string, std::set<std::string>> kDensityParams = {
    {"normal", {"mu", "sigma"}},
    {"uniform", {}},
    {"exp", {"rate"}},
    {"gamma", {"shape", "rate"}},
    {"cauchy", {"loc", "scale"}},
    {"laplace", {"loc", "scale"}},
    {"lognormal", {"mu", "sigma"}},
    {"parabolic", {}},
    {"pareto", {}},
    {"normal_mix", {"p", "mu1", "sigma1", "mu2", "sigma2"}},
    {"mv_normal", {"dim"}},
};

[[noreturn]] void fail(const std::string& source, const std::string& what) {
    throw ConfigError("config: " + source + ": " + what);
}

double need_number(const std::string& source, const json& v, const std::string& path) {
    if (!v.is_number()) fail(source, "field '" + path + "' must be a number");
    return v.get<double>();
}

std::string need_string(const std::string& source, const json& v, const std::string& path) {
    if (!v.is_string()) fail(source, "field '" + path + "' must be a string");
    return v.get<std::string>();
}

long long need_integer(const std::string& source, const json& v, const std::string& path) {
    if (!v.is_number_integer() && !v.is_number_unsigned())
        fail(source, "field '" + path + "' must be an integer");
    return v.get<long long>();
}

void reject_unknown(const std::string& source, const json& obj, const std::string& path,
                    const std::set<std::string>& allowed) {
    for (const auto& item : obj.items()) {
        if (!allowed.count(item.key()))
            fail(source, "unknown field '" + (path.empty() ? item.key() : path + "." + item.key()) +
                             "'");
    }
}

BaseComponent parse_component(const std::string& source, const json& obj,
                              const std::string& path) {
    if (!obj.is_object()) fail(source, "field '" + path + "' must be an object");
    reject_unknown(source, obj, path, {"kind", "p1", "p2"});
    if (!obj.contains("kind")) fail(source, "field '" + path + "' needs a 'kind'");
    const std::string kind = need_string(source, obj.at("kind"), path + ".kind");
    BaseComponent out;
    if (kind == "normal")
        out.kind = BaseComponent::Kind::normal;
    else if (kind == "lognormal")
        out.kind = BaseComponent::Kind::lognormal;
    else if (kind == "gamma")
        out.kind = BaseComponent::Kind::gamma;
    else if (kind == "uniform")
        out.kind = BaseComponent::Kind::uniform;
    else if (kind == "point_mass")
        out.kind = BaseComponent::Kind::point_mass;
    else
        fail(source, "field '" + path + ".kind': unknown component kind '" + kind + "'");
    if (obj.contains("p1")) out.p1 = need_number(source, obj.at("p1"), path + ".p1");
    if (obj.contains("p2")) out.p2 = need_number(source, obj.at("p2"), path + ".p2");
    return out;
}

void parse_f0_block(const std::string& source, const json& obj, ExperimentConfig* cfg) {
    if (!obj.is_object()) fail(source, "field 'f0' must be an object");
    if (!obj.contains("name")) fail(source, "field 'f0' needs a 'name'");
    cfg->f0_name = need_string(source, obj.at("name"), "f0.name");

    if (cfg->f0_name == "table") {
        reject_unknown(source, obj, "f0", {"name", "support", "breaks", "coeffs"});
        if (!obj.contains("support") || !obj.contains("breaks") || !obj.contains("coeffs"))
            fail(source, "table density needs 'support', 'breaks', and 'coeffs'");
        cfg->table_support = need_string(source, obj.at("support"), "f0.support");
        const json& breaks = obj.at("breaks");
        if (!breaks.is_array()) fail(source, "field 'f0.breaks' must be an array");
        for (const json& b : breaks)
            cfg->table_breaks.push_back(need_number(source, b, "f0.breaks"));
        const json& coeffs = obj.at("coeffs");
        if (!coeffs.is_array()) fail(source, "field 'f0.coeffs' must be an array of arrays");
        for (const json& seg : coeffs) {
            if (!seg.is_array()) fail(source, "field 'f0.coeffs' must be an array of arrays");
            std::vector<double> c;
            for (const json& v : seg) c.push_back(need_number(source, v, "f0.coeffs"));
            cfg->table_coeffs.push_back(std::move(c));
        }
        return;
    }

    const auto it = kDensityParams.find(cfg->f0_name);
    if (it == kDensityParams.end())
        fail(source, "field 'f0.name': unknown density '" + cfg->f0_name + "'");
    std::set<std::string> allowed = it->second;
    allowed.insert("name");
    reject_unknown(source, obj, "f0", allowed);
    for (const auto& item : obj.items()) {
        if (item.key() == "name") continue;
        cfg->f0_params[item.key()] = need_number(source, item.value(), "f0." + item.key());
    }
}

void parse_kernel_block(const std::string& source, const json& obj, ExperimentConfig* cfg) {
    if (!obj.is_object()) fail(source, "field 'kernel' must be an object");
    reject_unknown(source, obj, "kernel", {"family", "lambda", "nu", "dim"});
    if (!obj.contains("family")) fail(source, "field 'kernel' needs a 'family'");
    cfg->kernel_name = need_string(source, obj.at("family"), "kernel.family");
    if (!family_from_name(cfg->kernel_name))
        fail(source, "field 'kernel.family': unknown kernel '" + cfg->kernel_name + "'");
    if (obj.contains("lambda"))
        cfg->lambda = need_number(source, obj.at("lambda"), "kernel.lambda");
    if (obj.contains("nu")) cfg->nu = need_number(source, obj.at("nu"), "kernel.nu");
    if (obj.contains("dim"))
        cfg->dim = static_cast<int>(need_integer(source, obj.at("dim"), "kernel.dim"));
}

}  // namespace

void validate_density_params(const std::string& name,
                             const std::map<std::string, double>& params) {
    const auto it = kDensityParams.find(name);
    if (it == kDensityParams.end())
        throw ConfigError("config: unknown density '" + name + "'");
    for (const auto& [key, value] : params) {
        (void)value;
        if (!it->second.count(key))
            throw ConfigError("config: density '" + name + "' does not take parameter '" + key +
                              "'");
    }
}

DensitySpec ExperimentConfig::build_f0() const {
    if (f0_name == "table") {
        if (!table_support) throw ConfigError("config: table density without a support");
        Support s;
        if (*table_support == "real_line")
            s = Support::real_line;
        else if (*table_support == "unit_interval")
            s = Support::unit_interval;
        else if (*table_support == "positive_half_line")
            s = Support::positive_half_line;
        else
            throw ConfigError("config: unknown support '" + *table_support + "'");
        return density_from_table(s, table_breaks, table_coeffs);
    }
    validate_density_params(f0_name, f0_params);
    return make_builtin_density(f0_name, f0_params);
}

KernelSpec ExperimentConfig::build_kernel() const {
    if (kernel_name.empty()) throw ConfigError("config: no kernel family given");
    const std::optional<KernelFamily> fam = family_from_name(kernel_name);
    if (!fam) throw ConfigError("config: unknown kernel family '" + kernel_name + "'");
    KernelSpec spec;
    spec.family = *fam;
    spec.lambda = lambda;
    spec.nu = nu;
    spec.dim = dim;
    return spec;
}

ExperimentConfig parse_config_text(const std::string& text, const std::string& source_name) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        fail(source_name, e.what());
    }
    if (!root.is_object()) fail(source_name, "top level must be an object");

    static const std::set<std::string> kTopLevel = {
        "command", "f0",    "kernel",  "family",        "theorem", "ladder",
        "index",   "eta",   "delta",   "eps_target",    "tol",     "epsilon",
        "draws",   "seed",  "truncation", "concentration", "base", "hyper",
        "probes",  "grid",  "out",     "per_draw_out",  "b8_declared"};
    reject_unknown(source_name, root, "", kTopLevel);

    ExperimentConfig cfg;
    if (root.contains("command")) {
        cfg.command = need_string(source_name, root.at("command"), "command");
        if (!kCommands.count(cfg.command))
            fail(source_name, "field 'command': unknown command '" + cfg.command + "'");
    }
    if (root.contains("f0")) parse_f0_block(source_name, root.at("f0"), &cfg);
    if (root.contains("kernel")) parse_kernel_block(source_name, root.at("kernel"), &cfg);
    if (root.contains("family")) {
        cfg.family = need_string(source_name, root.at("family"), "family");
        if (!approximant_family_from_name(cfg.family))
            fail(source_name, "field 'family': unknown approximant family '" + cfg.family + "'");
    }
    if (root.contains("theorem"))
        cfg.theorem = static_cast<int>(need_integer(source_name, root.at("theorem"), "theorem"));
    if (root.contains("ladder")) {
        const json& arr = root.at("ladder");
        if (!arr.is_array()) fail(source_name, "field 'ladder' must be an array of integers");
        for (const json& v : arr) {
            const long long idx = need_integer(source_name, v, "ladder");
            if (idx < 1) fail(source_name, "field 'ladder': indices must be >= 1");
            cfg.ladder.push_back(static_cast<int>(idx));
        }
    }
    if (root.contains("index"))
        cfg.index = static_cast<int>(need_integer(source_name, root.at("index"), "index"));
    if (root.contains("eta")) cfg.eta = need_number(source_name, root.at("eta"), "eta");
    if (root.contains("delta")) cfg.delta = need_number(source_name, root.at("delta"), "delta");
    if (root.contains("eps_target"))
        cfg.eps_target = need_number(source_name, root.at("eps_target"), "eps_target");
    if (root.contains("tol")) cfg.tol = need_number(source_name, root.at("tol"), "tol");
    if (root.contains("epsilon"))
        cfg.epsilon = need_number(source_name, root.at("epsilon"), "epsilon");
    if (root.contains("draws"))
        cfg.draws = static_cast<int>(need_integer(source_name, root.at("draws"), "draws"));
    if (root.contains("seed")) {
        const json& v = root.at("seed");
        if (!(v.is_number_integer() || v.is_number_unsigned()) ||
            (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0))
            fail(source_name, "field 'seed' must be a nonnegative integer");
        cfg.seed = v.get<std::uint64_t>();
    }
    if (root.contains("truncation"))
        cfg.truncation =
            static_cast<int>(need_integer(source_name, root.at("truncation"), "truncation"));
    if (root.contains("concentration"))
        cfg.concentration = need_number(source_name, root.at("concentration"), "concentration");
    if (root.contains("base")) {
        const json& arr = root.at("base");
        if (!arr.is_array()) fail(source_name, "field 'base' must be an array of components");
        for (std::size_t i = 0; i < arr.size(); ++i)
            cfg.base.push_back(
                parse_component(source_name, arr[i], "base[" + std::to_string(i) + "]"));
    }
    if (root.contains("hyper"))
        cfg.hyper = parse_component(source_name, root.at("hyper"), "hyper");
    if (root.contains("probes")) {
        const json& arr = root.at("probes");
        if (!arr.is_array()) fail(source_name, "field 'probes' must be an array of numbers");
        for (const json& v : arr) cfg.probes.push_back(need_number(source_name, v, "probes"));
    }
    if (root.contains("grid")) {
        const json& arr = root.at("grid");
        if (!arr.is_array()) fail(source_name, "field 'grid' must be an array of numbers");
        for (const json& v : arr) cfg.grid.push_back(need_number(source_name, v, "grid"));
    }
    if (root.contains("b8_declared")) {
        const json& v = root.at("b8_declared");
        if (!v.is_boolean()) fail(source_name, "field 'b8_declared' must be a boolean");
        cfg.b8_declared = v.get<bool>();
    }
    if (root.contains("out")) cfg.out = need_string(source_name, root.at("out"), "out");
    if (root.contains("per_draw_out"))
        cfg.per_draw_out = need_string(source_name, root.at("per_draw_out"), "per_draw_out");
    return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError("config: cannot open " + path);
    std::ostringstream buf;
    buf << f.rdbuf();
    return parse_config_text(buf.str(), path);
}

}  // namespace klkit
