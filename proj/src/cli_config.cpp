#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "ldg/cli.hpp"
#include "ldg/error.hpp"

namespace ldg::cli {

namespace {

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorKind::ConfigInvalid, what); }

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

double to_double(const std::string& s, const std::string& where) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        invalid(where + ": not a number: '" + s + "'");
    }
    if (used != s.size() || !std::isfinite(v)) invalid(where + ": not a finite number: '" + s + "'");
    return v;
}

long long to_integer(const std::string& s, const std::string& where) {
    std::size_t used = 0;
    long long v = 0;
    try {
        v = std::stoll(s, &used);
    } catch (const std::exception&) {
        invalid(where + ": not an integer: '" + s + "'");
    }
    if (used != s.size()) invalid(where + ": not an integer: '" + s + "'");
    return v;
}

const std::map<std::string, std::set<std::string>>& schema() {
    static const std::map<std::string, std::set<std::string>> s{
        {"domain", {"radius", "holes"}},
        {"grid", {"n"}},
        {"params", {"lambda", "mu", "mu_ladder", "a2", "b2", "c2", "L"}},
        {"bc", {"type", "file"}},
        {"solver", {"mode", "tol", "max_iters", "noise", "seed", "armijo_c", "step_cap", "progress_every"}},
        {"analysis", {"levels", "region", "monotonicity_points", "monotonicity_radii"}},
        {"output", {"dir"}},
    };
    return s;
}

// Reads values of one section and remembers which keys were used.
class SectionReader {
public:
    SectionReader(const Sections& all, const std::string& name) : name_(name) {
        if (auto it = all.find(name); it != all.end()) values_ = &it->second;
    }
    bool has(const std::string& key) const { return values_ && values_->count(key); }
    const std::string& raw(const std::string& key) const { return values_->at(key); }
    std::string where(const std::string& key) const { return "[" + name_ + "] " + key; }

    std::optional<double> number(const std::string& key) const {
        if (!has(key)) return std::nullopt;
        return to_double(raw(key), where(key));
    }
    std::optional<long long> integer(const std::string& key) const {
        if (!has(key)) return std::nullopt;
        return to_integer(raw(key), where(key));
    }
    std::optional<std::vector<double>> list(const std::string& key) const {
        if (!has(key)) return std::nullopt;
        try {
            return parse_list(raw(key));
        } catch (const Error& e) {
            invalid(where(key) + ": " + e.what());
        }
    }
    std::optional<std::vector<std::vector<double>>> groups(const std::string& key, std::size_t size) const {
        if (!has(key)) return std::nullopt;
        try {
            return parse_groups(raw(key), size);
        } catch (const Error& e) {
            invalid(where(key) + ": " + e.what());
        }
    }

private:
    std::string name_;
    const std::map<std::string, std::string>* values_ = nullptr;
};

void dump_value(std::ostringstream& out, const nlohmann::json& j, int indent, int depth) {
    const std::string pad = indent > 0 ? std::string(static_cast<std::size_t>(indent * (depth + 1)), ' ') : "";
    const std::string close_pad = indent > 0 ? std::string(static_cast<std::size_t>(indent * depth), ' ') : "";
    const char* nl = indent > 0 ? "\n" : "";
    switch (j.type()) {
        case nlohmann::json::value_t::number_float: {
            const double v = j.get<double>();
            if (!std::isfinite(v)) {
                out << "null";
            } else {
                char buf[40];
                std::snprintf(buf, sizeof buf, "%.17g", v);
                out << buf;
            }
            return;
        }
        case nlohmann::json::value_t::object: {
            if (j.empty()) {
                out << "{}";
                return;
            }
            out << '{' << nl;
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out << ',' << nl;
                first = false;
                out << pad << nlohmann::json(it.key()).dump() << (indent > 0 ? ": " : ":");
                dump_value(out, it.value(), indent, depth + 1);
            }
            out << nl << close_pad << '}';
            return;
        }
        case nlohmann::json::value_t::array: {
            if (j.empty()) {
                out << "[]";
                return;
            }
            // Arrays of scalars stay on one line.
            bool flat = true;
            for (const auto& e : j) flat = flat && !e.is_structured();
            out << '[';
            if (!flat) out << nl;
            for (std::size_t k = 0; k < j.size(); ++k) {
                if (k > 0) out << (flat ? ", " : ",") << (flat ? "" : nl);
                if (!flat) out << pad;
                dump_value(out, j[k], indent, depth + 1);
            }
            if (!flat) out << nl << close_pad;
            out << ']';
            return;
        }
        default:
            out << j.dump();
    }
}

}  // namespace

Sections parse_sections(std::string_view text) {
    Sections out;
    std::string section;
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        const std::string at = "line " + std::to_string(lineno);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']') invalid(at + ": malformed section header");
            section = trim(std::string_view(t).substr(1, t.size() - 2));
            if (section.empty()) invalid(at + ": empty section name");
            out[section];
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) invalid(at + ": expected key = value");
        if (section.empty()) invalid(at + ": key outside a section");
        const std::string key = trim(std::string_view(t).substr(0, eq));
        const std::string value = trim(std::string_view(t).substr(eq + 1));
        if (key.empty()) invalid(at + ": empty key");
        if (!out[section].emplace(key, value).second) invalid(at + ": duplicate key [" + section + "] " + key);
    }
    return out;
}

std::vector<double> parse_list(std::string_view text) {
    std::vector<double> out;
    std::string s(text);
    if (trim(s).empty()) return out;
    std::istringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) out.push_back(to_double(trim(item), "list item"));
    if (!s.empty() && s.back() == ',') invalid("trailing comma in list");
    return out;
}

std::vector<std::vector<double>> parse_groups(std::string_view text, std::size_t size) {
    std::vector<std::vector<double>> out;
    std::istringstream in{std::string(text)};
    std::string group;
    while (std::getline(in, group, ';')) {
        if (trim(group).empty()) continue;
        std::vector<double> g = parse_list(group);
        if (g.size() != size)
            invalid("expected groups of " + std::to_string(size) + " numbers, got '" + trim(group) + "'");
        out.push_back(std::move(g));
    }
    return out;
}

RunConfig parse_config(std::string_view text) {
    RunConfig c;
    c.echo = parse_sections(text);
    for (const auto& [name, keys] : c.echo) {
        const auto it = schema().find(name);
        if (it == schema().end()) invalid("unknown section [" + name + "]");
        for (const auto& kv : keys)
            if (!it->second.count(kv.first)) invalid("unknown key [" + name + "] " + kv.first);
    }

    const SectionReader domain(c.echo, "domain");
    if (auto r = domain.number("radius")) c.domain.outer_radius = *r;
    if (!(c.domain.outer_radius > 0.0)) invalid("[domain] radius must be positive");
    if (auto holes = domain.groups("holes", 4))
        for (const auto& h : *holes) c.domain.holes.push_back(Hole{{h[0], h[1], h[2]}, h[3]});

    const SectionReader grid(c.echo, "grid");
    if (auto n = grid.integer("n")) {
        if (*n < 2 || *n > 1024) invalid("[grid] n out of range");
        c.n = static_cast<int>(*n);
    }

    const SectionReader params(c.echo, "params");
    const bool any_physical = params.has("a2") || params.has("b2") || params.has("c2") || params.has("L");
    const bool all_physical = params.has("a2") && params.has("b2") && params.has("c2") && params.has("L");
    const bool reduced = params.has("lambda") || params.has("mu");
    if (any_physical && reduced) invalid("[params] set either lambda/mu or a2,b2,c2,L, not both");
    if (any_physical && !all_physical) invalid("[params] a2, b2, c2 and L must be given together");
    if (!any_physical && !params.has("lambda")) invalid("[params] lambda (or a2,b2,c2,L) is required");
    if (params.has("mu") && params.has("mu_ladder")) invalid("[params] set mu or mu_ladder, not both");
    try {
        if (all_physical) {
            c.params = params_from_physical(*params.number("a2"), *params.number("b2"), *params.number("c2"),
                                            *params.number("L"));
        } else {
            c.params.lambda = *params.number("lambda");
            c.params.mu = params.number("mu").value_or(0.0);
        }
        validate(c.params);
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::ConfigInvalid) throw;
        invalid(std::string("[params] ") + e.what());
    }
    if (auto ladder = params.list("mu_ladder")) {
        if (ladder->empty()) invalid("[params] mu_ladder is empty");
        for (std::size_t k = 0; k < ladder->size(); ++k)
            if (!((*ladder)[k] > 0.0) || (k > 0 && (*ladder)[k] <= (*ladder)[k - 1]))
                invalid("[params] mu_ladder must be positive and strictly increasing");
        c.mu_ladder = *ladder;
    } else if (params.has("mu") || all_physical) {
        if (!(c.params.mu > 0.0)) invalid("[params] mu must be positive");
        c.mu_ladder = {c.params.mu};
    }

    const SectionReader solver(c.echo, "solver");
    c.constrained = c.mu_ladder.empty();
    if (solver.has("mode")) {
        const std::string mode = solver.raw("mode");
        if (mode == "constrained") {
            if (params.has("mu") || params.has("mu_ladder"))
                invalid("[solver] mode = constrained takes no mu or mu_ladder");
            c.constrained = true;
            c.mu_ladder.clear();
        } else if (mode == "penalized") {
            if (c.mu_ladder.empty()) invalid("[solver] mode = penalized needs mu or mu_ladder");
            c.constrained = false;
        } else {
            invalid("[solver] mode must be constrained or penalized");
        }
    }
    if (auto v = solver.number("tol")) {
        if (!(*v > 0.0)) invalid("[solver] tol must be positive");
        c.solve.tol = *v;
    }
    if (auto v = solver.integer("max_iters")) {
        if (*v < 0 || *v > 100000000) invalid("[solver] max_iters out of range");
        c.solve.max_iters = static_cast<int>(*v);
    }
    if (auto v = solver.number("noise")) {
        if (*v < 0.0) invalid("[solver] noise must be non-negative");
        c.solve.noise_amplitude = *v;
    }
    if (auto v = solver.integer("seed")) {
        if (*v < 0) invalid("[solver] seed must be non-negative");
        c.solve.seed = static_cast<std::uint64_t>(*v);
    }
    if (auto v = solver.number("armijo_c")) {
        if (!(*v > 0.0 && *v < 1.0)) invalid("[solver] armijo_c must lie in (0, 1)");
        c.solve.armijo_c = *v;
    }
    if (auto v = solver.number("step_cap")) {
        if (*v < 0.0) invalid("[solver] step_cap must be non-negative");
        c.solve.step_cap = *v;
    }
    if (auto v = solver.integer("progress_every")) {
        if (*v < 0) invalid("[solver] progress_every must be non-negative");
        c.solve.progress_every = static_cast<int>(*v);
    }

    const SectionReader bc(c.echo, "bc");
    if (bc.has("type")) c.bc_type = bc.raw("type");
    if (c.bc_type == "hedgehog") {
        if (bc.has("file")) invalid("[bc] file is only used with type = uniaxial-file");
    } else if (c.bc_type == "uniaxial-file") {
        if (!bc.has("file") || bc.raw("file").empty()) invalid("[bc] type = uniaxial-file needs file");
        c.bc_file = bc.raw("file");
    } else {
        invalid("[bc] type must be hedgehog or uniaxial-file");
    }

    const SectionReader analysis(c.echo, "analysis");
    if (auto lv = analysis.list("levels")) {
        for (double t : *lv)
            if (!(t > -1.0 && t < 1.0)) invalid("[analysis] levels must lie in (-1, 1)");
        c.levels = *lv;
    }
    if (auto r = analysis.list("region")) {
        if (r->size() != 2 || !((*r)[0] < (*r)[1]) || (*r)[0] < -1.0 || (*r)[1] > 1.0)
            invalid("[analysis] region must be t1,t2 with -1 <= t1 < t2 <= 1");
        c.region_t1 = (*r)[0];
        c.region_t2 = (*r)[1];
    }
    if (auto pts = analysis.groups("monotonicity_points", 3))
        for (const auto& p : *pts) c.mono_points.push_back({p[0], p[1], p[2]});
    if (auto radii = analysis.list("monotonicity_radii")) {
        if (radii->empty()) invalid("[analysis] monotonicity_radii is empty");
        for (std::size_t k = 0; k < radii->size(); ++k)
            if (!((*radii)[k] > 0.0) || (k > 0 && (*radii)[k] <= (*radii)[k - 1]))
                invalid("[analysis] monotonicity_radii must be positive and strictly increasing");
        c.mono_radii = *radii;
    } else {
        const double r = c.domain.outer_radius;
        c.mono_radii = {r / 32.0, r / 16.0, r / 8.0, r / 4.0};
    }

    const SectionReader output(c.echo, "output");
    if (output.has("dir")) {
        if (output.raw("dir").empty()) invalid("[output] dir is empty");
        c.output_dir = output.raw("dir");
    }
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) invalid("cannot open config file " + path);
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

std::string dump_json(const nlohmann::json& j, int indent) {
    std::ostringstream out;
    dump_value(out, j, indent, 0);
    return out.str();
}

nlohmann::json make_summary(nlohmann::json config_echo, nlohmann::json energy, nlohmann::json min_norm,
                            nlohmann::json topology, nlohmann::json timings) {
    nlohmann::json s = nlohmann::json::object();
    s["version"] = kVersion;
    s["config_echo"] = std::move(config_echo);
    s["energy"] = std::move(energy);
    s["min_norm"] = std::move(min_norm);
    s["topology"] = std::move(topology);
    s["timings"] = std::move(timings);
    return s;
}

}  // namespace ldg::cli
