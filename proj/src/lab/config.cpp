#include "fraclab/lab/config.hpp"

#include <algorithm>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cctype>
#include <fstream>
#include <sstream>

namespace fraclab::lab {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double to_double(const std::string& s) {
    const std::string t = trim(s);
    std::size_t used = 0;
    double v = 0;
    try {
        v = std::stod(t, &used);
    } catch (const std::exception&) {
        throw ConfigError("not a number: '" + t + "'");
    }
    if (used != t.size()) throw ConfigError("not a number: '" + t + "'");
    return v;
}

// "name(args)" -> name, args
std::pair<std::string, std::string> call_parts(const std::string& text) {
    const std::string t = trim(text);
    const auto open = t.find('(');
    if (open == std::string::npos || t.back() != ')') return {t, ""};
    return {trim(t.substr(0, open)), t.substr(open + 1, t.size() - open - 2)};
}

std::vector<double> numbers(const std::string& args, std::size_t expected, const std::string& what) {
    std::vector<double> v;
    std::stringstream ss(args);
    std::string item;
    while (std::getline(ss, item, ',')) v.push_back(to_double(item));
    if (expected && v.size() != expected) throw ConfigError(what + ": expected " + std::to_string(expected) + " numbers");
    return v;
}

std::vector<std::vector<double>> groups(const std::string& args, const std::string& what) {
    std::vector<std::vector<double>> out;
    std::stringstream ss(args);
    std::string item;
    while (std::getline(ss, item, ';')) out.push_back(numbers(item, 2, what));
    return out;
}

}  // namespace

std::vector<std::string> split_top_level(const std::string& text) {
    std::vector<std::string> out;
    int depth = 0;
    std::string cur;
    for (char c : text) {
        if (c == '(') ++depth;
        if (c == ')') --depth;
        if (c == ',' && depth == 0) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (depth != 0) throw ConfigError("unbalanced parentheses in '" + text + "'");
    if (!trim(cur).empty() || !out.empty()) out.push_back(trim(cur));
    return out;
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> v;
    for (const auto& item : split_top_level(text)) {
        if (item.empty()) throw ConfigError("empty list entry in '" + text + "'");
        v.push_back(to_double(item));
    }
    return v;
}

RegionSpec parse_region(const std::string& text) {
    const auto [name, args] = call_parts(text);
    if (name == "empty") return empty_set();
    if (name == "line") return whole_line();
    if (name == "interval") {
        const auto v = numbers(args, 2, "interval");
        return interval(v[0], v[1]);
    }
    if (name == "intervals") {
        std::vector<Interval> parts;
        for (const auto& g : groups(args, "intervals")) parts.push_back({g[0], g[1]});
        return interval_union(parts);
    }
    if (name == "rect") {
        const auto v = numbers(args, 4, "rect");
        return rectangle(v[0], v[1], v[2], v[3]);
    }
    if (name == "disk") {
        const auto v = numbers(args, 3, "disk");
        return disk(v[0], v[1], v[2]);
    }
    if (name == "polygon") {
        std::vector<Point2> pts;
        for (const auto& g : groups(args, "polygon")) pts.push_back({g[0], g[1]});
        return polygon(pts);
    }
    if (name == "halfplane") {
        const auto v = numbers(args, 3, "halfplane");
        return half_space(v[0], v[1], v[2]);
    }
    if (name == "complement") return complement(parse_region(args));
    throw ConfigError("unknown region '" + trim(text) + "'");
}

VectorFieldSpec parse_field(const std::string& text) {
    const auto [name, args] = call_parts(text);
    if (name == "bump") {
        const auto v = numbers(args, 3, "bump");
        return bump_field(v[0], v[1], v[2], trim(text));
    }
    if (name == "bump2") {
        const auto v = numbers(args, 6, "bump2");
        return bump_field_2d(v[0], v[1], v[2], v[3], v[4], v[5], trim(text));
    }
    throw ConfigError("unknown vector field '" + trim(text) + "'");
}

ExperimentConfig parse_config(const std::string& text) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    std::istringstream is(text);
    try {
        pt::read_ini(is, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    ExperimentConfig c;
    auto str = [&](const char* key) { return tree.get_optional<std::string>(key); };
    auto num = [&](const char* key, double& dst) {
        if (auto v = str(key)) dst = to_double(*v);
    };
    auto integer = [&](const char* key, int& dst) {
        if (auto v = str(key)) dst = static_cast<int>(to_double(*v));
    };
    auto list = [&](const char* key, std::vector<double>& dst) {
        if (auto v = str(key)) dst = parse_list(*v);
    };
    if (auto v = str("experiment.kind")) c.experiment = trim(*v);
    if (auto v = str("experiment.name")) c.name = trim(*v);
    if (auto v = str("domain.omega")) c.omega = parse_region(*v);
    if (auto v = str("domain.exterior")) c.exterior = parse_region(*v);
    if (auto v = str("domain.family")) c.family = trim(*v);
    num("domain.h", c.h);
    num("domain.R", c.R);
    num("domain.h_per_eps", c.h_per_eps);
    num("model.s", c.s);
    list("model.s_list", c.s_list);
    list("model.eps_list", c.eps_list);
    num("model.m", c.m);
    num("model.M", c.M);
    num("model.H", c.H);
    num("model.mu_bracket", c.mu_bracket);
    num("solver.tol", c.solver.tol);
    integer("solver.max_iter", c.solver.max_iter);
    num("solver.armijo", c.solver.armijo);
    integer("solver.max_backtracks", c.solver.max_backtracks);
    integer("solver.max_projection_cycles", c.solver.max_projection_cycles);
    integer("massari.coarse_points", c.massari.coarse_points);
    num("massari.refine_tol", c.massari.refine_tol);
    num("shooting.slope_min", c.slope_min);
    num("shooting.slope_max", c.slope_max);
    num("shooting.slope_step", c.slope_step);
    integer("shooting.refinements", c.refinements);
    num("shooting.ode_step", c.ode_step);
    num("shooting.margin", c.margin);
    num("profile.L", c.profile_L);
    num("profile.h", c.profile_h);
    list("profile.eta_list", c.eta_list);
    if (auto v = str("profile.seed")) c.seed = static_cast<std::uint64_t>(to_double(*v));
    if (auto v = str("curvature.fields"))
        for (const auto& f : split_top_level(*v)) c.fields.push_back(parse_field(f));
    integer("run.jobs", c.jobs);
    if (c.name.empty()) c.name = c.experiment;
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

void validate(const ExperimentConfig& c) {
    if (!(c.M > 1)) throw ConfigError("config: M must exceed 1");
    if (c.jobs < 1) throw ConfigError("config: jobs must be positive");
    const std::string& e = c.experiment;
    if (e == "sweep-s") {
        if (c.s_list.empty()) throw ConfigError("config: sweep-s needs a non-empty model.s_list");
        for (std::size_t i = 0; i < c.s_list.size(); ++i) {
            if (!(c.s_list[i] > 0 && c.s_list[i] < 0.5)) throw ConfigError("config: s_list entries must lie in (0,1/2)");
            if (i && !(c.s_list[i] > c.s_list[i - 1])) throw ConfigError("config: s_list must be increasing");
        }
        if (c.family != "half-line" && c.family != "slab") throw ConfigError("config: family must be half-line or slab");
        return;
    }
    if (e == "sweep-eps" || e == "neumann-check" || e == "curvature-check" || e == "minimize") {
        if (c.eps_list.empty()) throw ConfigError("config: " + e + " needs a non-empty model.eps_list");
        for (std::size_t i = 0; i < c.eps_list.size(); ++i) {
            if (!(c.eps_list[i] > 0 && c.eps_list[i] < 1)) throw ConfigError("config: eps entries must lie in (0,1)");
            if (i && !(c.eps_list[i] < c.eps_list[i - 1])) throw ConfigError("config: eps_list must be decreasing");
        }
        if (!(c.s > 0 && c.s < 1)) throw ConfigError("config: s must lie in (0,1)");
        if (!(std::abs(c.m) < measure(c.omega))) throw ConfigError("config: need |m| < |omega|");
        if (e == "curvature-check" && !(c.s < 0.5)) throw ConfigError("config: curvature-check needs s < 1/2");
        return;
    }
    if (e == "counterexample-classical") {
        if (!(c.slope_step > 0) || !(c.slope_max > c.slope_min)) throw ConfigError("config: bad shooting grid");
        if (!(c.ode_step > 0) || c.refinements < 0) throw ConfigError("config: bad ODE step or refinement count");
        return;
    }
    if (e == "counterexample-fractional") {
        if (!(c.s >= 0.5 && c.s < 1)) throw ConfigError("config: fractional counterexample needs s in [1/2,1)");
        if (c.eta_list.empty()) throw ConfigError("config: eta_list must be non-empty");
        return;
    }
    throw ConfigError("config: unknown experiment '" + e + "'");
}

}  // namespace fraclab::lab
