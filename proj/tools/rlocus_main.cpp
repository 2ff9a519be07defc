// rlocus: root locus of a dead-time plant inside Re(s) >= sigma0, k <= kmax.
#include <CLI11.hpp>

#include <iostream>

#include "rlocus/error.hpp"
#include "rlocus/io.hpp"

using namespace rlocus;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitInvalidInput = 2;
constexpr int kExitStepFailure = 3;

bool is_input_error(ErrorCode c) {
    switch (c) {
        case ErrorCode::ParseError:
        case ErrorCode::InvalidPlant:
        case ErrorCode::InvalidRegion:
        case ErrorCode::InvalidArgument:
        case ErrorCode::DegeneratePolynomial:
        case ErrorCode::PoleOrZeroOnBoundary:
        case ErrorCode::BiProperGainCapViolated:
        case ErrorCode::BranchOnBoundary:
        case ErrorCode::DegenerateCrossing:
            return true;
        default:
            return false;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Root locus of a SISO dead-time system"};
    RunConfig cfg;
    std::string format = "json";
    std::string out;
    std::string svg;
    bool no_mirror = false;
    bool serial = false;

    app.add_option("input", cfg.input, "plant description (JSON), or - for stdin")->required();
    app.add_option("--sigma0", cfg.sigma0, "left edge of the region Re(s) >= sigma0")->required();
    app.add_option("--kmax", cfg.kmax, "gain cap")->required()->check(CLI::PositiveNumber);
    app.add_option("--out", out, "output file (default: stdout)");
    app.add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--svg", svg, "also write an SVG plot here");
    app.add_flag("--negative-gains", cfg.trace.negative_gains, "trace k < 0 as well");
    app.add_flag("--strict", cfg.strict, "exit 3 when any trajectory ends in a step failure");
    app.add_option("--tol", cfg.trace.tol_corr, "corrector tolerance")->check(CLI::PositiveNumber);
    app.add_option("--h0", cfg.trace.step.h, "initial step length")->check(CLI::PositiveNumber);
    app.add_option("--kappa", cfg.trace.step.kappa_nom, "nominal contraction rate")->check(CLI::PositiveNumber);
    app.add_option("--delta", cfg.trace.step.delta_nom, "nominal first-step distance")->check(CLI::PositiveNumber);
    app.add_flag("--no-mirror", no_mirror, "trace lower half-plane branches instead of mirroring");
    app.add_flag("--serial", serial, "trace on one thread");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitInvalidInput;
    }
    cfg.format = format == "csv" ? OutputFormat::Csv : OutputFormat::Json;
    if (!out.empty()) cfg.out = out;
    if (!svg.empty()) cfg.svg = svg;
    cfg.trace.mirror = !no_mirror;
    cfg.trace.parallel = !serial;

    try {
        const Plant plant = parse_input(read_text(cfg.input));
        const RootLocusResult result = run(plant, RegionSpec(cfg.sigma0, cfg.kmax), cfg.trace);

        const std::string body = cfg.format == OutputFormat::Csv ? emit_csv(result) : emit_json(result);
        if (cfg.out)
            write_text(*cfg.out, body);
        else
            std::cout << body;
        if (cfg.svg) write_text(*cfg.svg, emit_svg(result));

        for (const auto& d : result.diagnostics) std::cerr << "warning: " << d << "\n";
        if (cfg.strict && result.has_step_failure()) {
            std::cerr << "error: step failure in at least one trajectory\n";
            return kExitStepFailure;
        }
        return kExitOk;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return is_input_error(e.code()) ? kExitInvalidInput : kExitFailure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    }
}
