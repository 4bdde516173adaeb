#pragma once

#include <map>
#include <string>

#include "wavekit/model.hpp"
#include "wavekit/wave.hpp"

namespace wavekit::cli {

/* Problem files are flat key/value text with two optional tables:
 *
 *   name = "ex1"
 *   g    = "u^2 - u + K"
 *   f    = "0"
 *   D    = "(3/4 - u)*sqrt(u - u^2)"
 *   rho  = "sqrt(u - u^2)"
 *
 *   [params]
 *   K = 1
 *
 *   [options]
 *   scan_cells = 2048
 *   tol_c = 1e-6
 *
 * '#' starts a comment. Strings are double-quoted, numbers are bare.
 */
struct ProblemFile {
    std::string name;
    std::string g, f, D, rho;
    std::map<std::string, double> params;

    struct Options {
        int scan_cells = 2048;
        int grid = 8192;
        double tol_c = 1e-6;
        double t_span_cap = 50.0;
        double root_tol = 1e-12;
        double deriv_zero_tol = 1e-7;
        double delta0_frac = 1e-6;
        double shoot_tol = 1e-10;
        double at_threshold_band = 1e-3;
    } options;
};

ProblemFile parse_problem_file(const std::string& text);
ProblemFile load_problem_file(const std::string& path);

model::Problem build_problem(const ProblemFile& pf);
model::DecomposeOptions decompose_options(const ProblemFile& pf);
wave::WaveOptions wave_options(const ProblemFile& pf);

}  // namespace wavekit::cli
