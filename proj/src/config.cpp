#include "rtrace/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "rtrace/errors.hpp"

namespace rtrace {
namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& v, const std::string& key) {
    try {
        std::size_t used = 0;
        const double d = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument("trailing characters");
        return d;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': cannot parse '" + v + "' as a number");
    }
}

int parse_int(const std::string& v, const std::string& key) {
    try {
        std::size_t used = 0;
        const int i = std::stoi(v, &used);
        if (used != v.size()) throw std::invalid_argument("trailing characters");
        return i;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': cannot parse '" + v + "' as an integer");
    }
}

std::vector<std::string> split_ws(const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> out;
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

Seed parse_seed(const std::string& value) {
    const auto tok = split_ws(value);
    Seed seed;
    if (!tok.empty() && tok[0] == "auto") {
        if (tok.size() != 4)
            throw ConfigError("seed: expected 'auto <lo> <hi> <lambda>', got '" +
                              value + "'");
        seed.bracket_lo = parse_double(tok[1], "seed");
        seed.bracket_hi = parse_double(tok[2], "seed");
        seed.lambda = parse_double(tok[3], "seed");
        return seed;
    }
    if (tok.size() != 2)
        throw ConfigError("seed: expected '<im_k> <lambda>', got '" + value + "'");
    seed.im_k = parse_double(tok[0], "seed");
    seed.lambda = parse_double(tok[1], "seed");
    return seed;
}

}  // namespace

StudyConfig parse_study_config(std::istream& in) {
    StudyConfig cfg;
    bool saw_r_end = false, saw_n_points = false, saw_lmin = false, saw_lmax = false;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) +
                              ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError("line " + std::to_string(lineno) +
                              ": empty key or value");

        if (key == "potential.kind") cfg.potential_kind = value;
        else if (key.rfind("potential.params.", 0) == 0)
            cfg.potential_params[key.substr(17)] = parse_double(value, key);
        else if (key == "l") cfg.l = parse_int(value, key);
        else if (key == "grid.r_end") { cfg.grid_r_end = parse_double(value, key); saw_r_end = true; }
        else if (key == "grid.n_points") { cfg.grid_n_points = parse_int(value, key); saw_n_points = true; }
        else if (key == "lambda.min") { cfg.lambda_min = parse_double(value, key); saw_lmin = true; }
        else if (key == "lambda.max") { cfg.lambda_max = parse_double(value, key); saw_lmax = true; }
        else if (key == "seed") cfg.seeds.push_back(parse_seed(value));
        else if (key == "step.ds") cfg.step.ds = parse_double(value, key);
        else if (key == "step.ds_min") cfg.step.ds_min = parse_double(value, key);
        else if (key == "step.ds_max") cfg.step.ds_max = parse_double(value, key);
        else if (key == "step.newton_tol") cfg.step.newton_tol = parse_double(value, key);
        else if (key == "step.newton_max_iter") cfg.step.newton_max_iter = parse_int(value, key);
        else if (key == "step.max_steps") cfg.max_steps = parse_int(value, key);
        else if (key == "study.im_k_floor") cfg.im_k_floor = parse_double(value, key);
        else if (key == "output.dir") cfg.output_dir = value;
        else throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" +
                               key + "'");
    }
    if (!saw_r_end || !saw_n_points)
        throw ConfigError("grid.r_end and grid.n_points are required");
    if (!saw_lmin || !saw_lmax)
        throw ConfigError("lambda.min and lambda.max are required");
    if (cfg.seeds.empty()) throw ConfigError("no seeds");
    return cfg;
}

StudyConfig parse_study_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    return parse_study_config(in);
}

RadialPotential build_potential(const std::string& kind,
                                const std::map<std::string, double>& params) {
    static const std::map<std::string, std::vector<std::string>> names = {
        {"none", {}},
        {"gaussian", {"width"}},
        {"square_well", {"a"}},
        {"morse", {"alpha", "r0"}},
        {"yukawa", {"mu"}},
        {"lennard_jones", {"sigma"}},
    };
    const auto it = names.find(kind);
    if (it == names.end()) throw ConfigError("unknown potential kind '" + kind + "'");
    for (const auto& [name, _] : params)
        if (std::find(it->second.begin(), it->second.end(), name) == it->second.end())
            throw ConfigError("potential '" + kind + "' has no parameter '" + name + "'");
    if (params.empty()) return make_potential(kind);
    std::vector<double> ordered;
    const RadialPotential defaults = make_potential(kind);
    for (std::size_t i = 0; i < it->second.size(); ++i) {
        const auto p = params.find(it->second[i]);
        ordered.push_back(p != params.end() ? p->second : defaults.shape_params[i]);
    }
    return make_potential(kind, ordered);
}

StudyDefinition to_study(const StudyConfig& cfg) {
    StudyDefinition study;
    study.potential = build_potential(cfg.potential_kind, cfg.potential_params);
    study.l = cfg.l;
    study.grid = RadialGrid{cfg.grid_r_end, cfg.grid_n_points};
    study.lambda_min = cfg.lambda_min;
    study.lambda_max = cfg.lambda_max;
    study.seeds = cfg.seeds;
    study.step = cfg.step;
    study.max_steps = cfg.max_steps;
    study.im_k_floor = cfg.im_k_floor;
    validate(study);
    return study;
}

Complex parse_complex(const std::string& text) {
    const std::string s = trim(text);
    if (s.empty()) throw ConfigError("empty complex literal");
    const auto bad = [&] {
        return ConfigError("cannot parse complex literal '" + text +
                           "' (expected forms: a, bi, a+bi, a-bi)");
    };
    // split at the last +/- that is not an exponent sign and not leading
    std::size_t split = std::string::npos;
    for (std::size_t i = s.size(); i-- > 1;) {
        if ((s[i] == '+' || s[i] == '-') && s[i - 1] != 'e' && s[i - 1] != 'E') {
            split = i;
            break;
        }
    }
    auto parse_part = [&](std::string part) -> double {
        if (part.empty() || part == "+" || part == "-") part += "1";
        std::size_t used = 0;
        double v = 0;
        try {
            v = std::stod(part, &used);
        } catch (const std::exception&) {
            throw bad();
        }
        if (used != part.size()) throw bad();
        return v;
    };
    if (s.back() == 'i' || s.back() == 'I') {
        const std::string imag_text = s.substr(0, s.size() - 1);
        if (split == std::string::npos)
            return Complex(0.0, parse_part(imag_text));
        return Complex(parse_part(s.substr(0, split)),
                       parse_part(imag_text.substr(split)));
    }
    std::size_t used = 0;
    double re = 0;
    try {
        re = std::stod(s, &used);
    } catch (const std::exception&) {
        throw bad();
    }
    if (used != s.size()) throw bad();
    return Complex(re, 0.0);
}

}  // namespace rtrace
