#include "wavekit/problem_file.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace wavekit::cli {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

[[noreturn]] void fail(int line, const std::string& what) {
    throw ParseError("problem file line " + std::to_string(line) + ": " + what, 0);
}

double parse_number(const std::string& v, int line) {
    char* end = nullptr;
    const double x = std::strtod(v.c_str(), &end);
    if (end != v.c_str() + v.size()) fail(line, "malformed number '" + v + "'");
    return x;
}

std::string parse_string(const std::string& v, int line) {
    if (v.size() < 2 || v.front() != '"' || v.back() != '"')
        fail(line, "expected a double-quoted string, got '" + v + "'");
    return v.substr(1, v.size() - 2);
}

}  // namespace

ProblemFile parse_problem_file(const std::string& text) {
    ProblemFile pf;
    std::istringstream in(text);
    std::string raw;
    std::string section;
    int line = 0;
    bool any = false;

    while (std::getline(in, raw)) {
        ++line;
        const auto hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        const std::string s = trim(raw);
        if (s.empty()) continue;
        any = true;

        if (s.front() == '[') {
            if (s.back() != ']') fail(line, "unterminated section header");
            section = trim(s.substr(1, s.size() - 2));
            if (section != "params" && section != "options")
                fail(line, "unknown section [" + section + "]");
            continue;
        }

        const auto eq = s.find('=');
        if (eq == std::string::npos) fail(line, "expected key = value");
        const std::string key = trim(s.substr(0, eq));
        const std::string value = trim(s.substr(eq + 1));
        if (key.empty() || value.empty()) fail(line, "expected key = value");

        if (section.empty()) {
            if (key == "name")
                pf.name = parse_string(value, line);
            else if (key == "g")
                pf.g = parse_string(value, line);
            else if (key == "f")
                pf.f = parse_string(value, line);
            else if (key == "D")
                pf.D = parse_string(value, line);
            else if (key == "rho")
                pf.rho = parse_string(value, line);
            else
                fail(line, "unknown key '" + key + "'");
        } else if (section == "params") {
            pf.params[key] = parse_number(value, line);
        } else {
            auto& o = pf.options;
            if (key == "scan_cells")
                o.scan_cells = static_cast<int>(parse_number(value, line));
            else if (key == "grid")
                o.grid = static_cast<int>(parse_number(value, line));
            else if (key == "tol_c")
                o.tol_c = parse_number(value, line);
            else if (key == "t_span_cap")
                o.t_span_cap = parse_number(value, line);
            else if (key == "root_tol")
                o.root_tol = parse_number(value, line);
            else if (key == "deriv_zero_tol")
                o.deriv_zero_tol = parse_number(value, line);
            else if (key == "delta0_frac")
                o.delta0_frac = parse_number(value, line);
            else if (key == "shoot_tol")
                o.shoot_tol = parse_number(value, line);
            else if (key == "at_threshold_band")
                o.at_threshold_band = parse_number(value, line);
            else
                fail(line, "unknown option '" + key + "'");
        }
    }
    if (!any) fail(1, "empty problem file");
    const std::pair<const std::string*, const char*> required[] = {
        {&pf.g, "g"}, {&pf.f, "f"}, {&pf.D, "D"}, {&pf.rho, "rho"}};
    for (const auto& [field, label] : required)
        if (field->empty()) fail(line, std::string("missing expression for ") + label);
    return pf;
}

ProblemFile load_problem_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open problem file '" + path + "'", 0);
    std::ostringstream buf;
    buf << in.rdbuf();
    ProblemFile pf = parse_problem_file(buf.str());
    if (pf.name.empty()) {
        const auto slash = path.find_last_of('/');
        const auto base = slash == std::string::npos ? path : path.substr(slash + 1);
        const auto dot = base.find_last_of('.');
        pf.name = dot == std::string::npos ? base : base.substr(0, dot);
    }
    return pf;
}

model::Problem build_problem(const ProblemFile& pf) {
    model::Problem p;
    p.name = pf.name;
    p.g = expr::ScalarFunction::from_source(pf.g, pf.params);
    p.f = expr::ScalarFunction::from_source(pf.f, pf.params);
    p.D = expr::ScalarFunction::from_source(pf.D, pf.params);
    p.rho = expr::ScalarFunction::from_source(pf.rho, pf.params);
    return p;
}

model::DecomposeOptions decompose_options(const ProblemFile& pf) {
    model::DecomposeOptions o;
    o.scan_cells = pf.options.scan_cells;
    o.root_tol = pf.options.root_tol;
    o.deriv_zero_tol = pf.options.deriv_zero_tol;
    return o;
}

wave::WaveOptions wave_options(const ProblemFile& pf) {
    wave::WaveOptions o;
    o.tol_c = pf.options.tol_c;
    o.grid = pf.options.grid;
    o.t_span_cap = pf.options.t_span_cap;
    o.at_threshold_band = pf.options.at_threshold_band;
    o.shoot.delta0_frac = pf.options.delta0_frac;
    o.shoot.tol = pf.options.shoot_tol;
    return o;
}

}  // namespace wavekit::cli
