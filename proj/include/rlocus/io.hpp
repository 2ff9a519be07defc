#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "rlocus/plant.hpp"
#include "rlocus/tracer.hpp"

namespace rlocus {

enum class OutputFormat { Json, Csv };

struct RunConfig {
    std::string input;  // path, or "-" for standard input
    double sigma0 = 0.0;
    double kmax = 1.0;
    OutputFormat format = OutputFormat::Json;
    std::optional<std::string> out;  // standard output when empty
    std::optional<std::string> svg;
    TraceOptions trace;
    bool strict = false;
};

// Accepts {"alpha", "delay", "zeros": [[re, im], ...], "poles": [...]} or
// {"num": [c0, ...], "den": [...], "delay"} with ascending coefficients.
// Throws ParseError naming the line or field, or InvalidPlant.
Plant parse_input(std::string_view text);

// The zero-pole-gain document for `plant`; parse_input reads it back exactly.
std::string plant_json(const Plant& plant);

std::string emit_json(const RootLocusResult& result);
std::string emit_csv(const RootLocusResult& result);
std::string emit_svg(const RootLocusResult& result);

// Throws IoError.
std::string read_text(const std::string& path);
void write_text(const std::string& path, const std::string& text);

}  // namespace rlocus
