#include <CLI11.hpp>
#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wavekit/commands.hpp"

namespace {

// repeatable --param K=0.25 overrides for the [params] table
std::map<std::string, double> parse_param_overrides(const std::vector<std::string>& raw) {
    std::map<std::string, double> out;
    for (const auto& s : raw) {
        const auto eq = s.find('=');
        if (eq == std::string::npos)
            throw CLI::ValidationError("--param expects name=value, got '" + s + "'");
        char* end = nullptr;
        const std::string value = s.substr(eq + 1);
        const double v = std::strtod(value.c_str(), &end);
        if (end != value.c_str() + value.size())
            throw CLI::ValidationError("--param value is not a number in '" + s + "'");
        out[s.substr(0, eq)] = v;
    }
    return out;
}

int emit(const wavekit::cli::CommandResult& res) {
    if (!res.text.empty()) std::cout << res.text;
    if (!res.json.is_null()) std::cout << res.json.dump(2) << '\n';
    return res.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"travelling wavefront toolkit for sign-changing diffusion"};
    app.require_subcommand(1);

    std::string file;
    std::vector<std::string> params;
    std::string out_prefix;

    auto* validate = app.add_subcommand("validate", "check the existence hypotheses");
    validate->add_option("file", file, "problem file")->required();
    validate->add_option("--param", params, "override a [params] entry (name=value)");

    auto* threshold = app.add_subcommand("threshold", "threshold speed and analytic bracket");
    threshold->add_option("file", file, "problem file")->required();
    threshold->add_option("--param", params, "override a [params] entry (name=value)");

    auto* wave = app.add_subcommand("wave", "construct the wave at one speed");
    wave->add_option("file", file, "problem file")->required();
    std::optional<double> speed, offset;
    double speed_value = 0.0, offset_value = 0.0;
    auto* speed_opt = wave->add_option("--speed", speed_value, "wave speed c");
    auto* offset_opt =
        wave->add_option("--speed-offset", offset_value, "speed as c_hat + offset");
    speed_opt->excludes(offset_opt);
    wave->add_option("--out", out_prefix, "output file prefix (default: problem name)");
    wave->add_option("--param", params, "override a [params] entry (name=value)");

    auto* sweep = app.add_subcommand("sweep", "feasibility and existence across speeds");
    sweep->add_option("file", file, "problem file")->required();
    double from = 0.0, to = 0.0;
    int steps = 0;
    sweep->add_option("--from", from, "first speed")->required();
    sweep->add_option("--to", to, "last speed")->required();
    sweep->add_option("--steps", steps, "number of speeds")->required();
    sweep->add_option("--out", out_prefix, "output file prefix (default: problem name)");
    sweep->add_option("--param", params, "override a [params] entry (name=value)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);  // prints the message/usage
        return wavekit::cli::kExitUsage;
    }

    using namespace wavekit;
    try {
        const auto overrides = parse_param_overrides(params);
        if (*speed_opt) speed = speed_value;
        if (*offset_opt) offset = offset_value;
        auto prefix = [&](const std::string& path) {
            if (!out_prefix.empty()) return out_prefix;
            auto base = path;
            const auto slash = base.find_last_of('/');
            if (slash != std::string::npos) base = base.substr(slash + 1);
            const auto dot = base.find_last_of('.');
            return dot == std::string::npos ? base : base.substr(0, dot);
        };

        if (validate->parsed()) return emit(cli::cmd_validate(file, overrides));
        if (threshold->parsed()) return emit(cli::cmd_threshold(file, overrides));
        if (wave->parsed())
            return emit(cli::cmd_wave(file, speed, offset, prefix(file), overrides));
        if (sweep->parsed())
            return emit(cli::cmd_sweep(file, from, to, steps, prefix(file), overrides));
        return cli::kExitUsage;
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return cli::kExitUsage;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return cli::kExitParseFailure;
    } catch (const EvalDomainError& e) {
        std::cerr << "domain error: " << e.what() << '\n';
        return cli::kExitParseFailure;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return cli::kExitNumericalFailure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return cli::kExitNumericalFailure;
    }
}
