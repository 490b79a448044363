#pragma once
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "lowlying/curve.hpp"

namespace lowlying {

// One experiment: a curve, a mode, and the numeric knobs. Everything is
// deterministic; there is no seed.
struct ExperimentConfig {
    int64_t a1 = 0, a2 = 0, a3 = 0, a4 = 0, a6 = 0;
    int64_t conductor = 0;
    std::optional<int> known_rank;

    std::string mode;  // ap | chars | density-cyclic | density-cubic | ranks | fields | bound | theta
    int l = 3;
    double X = 100.0;
    double sigma = 0.5;
    std::string weight = "bump";
    std::string family = "cyclic";  // bound mode: cyclic | s3

    int64_t prime_cap = 0;           // 0 = derived from the mode
    std::size_t coefficient_cap = 0; // 0 = derived from the family
    unsigned thread_count = 1;
    std::string cache_dir = "cache";
    std::string output_path;
};

// strict parse: unknown keys and type mismatches are ConfigError
ExperimentConfig config_from_json_text(const std::string& text);
ExperimentConfig config_from_file(const std::filesystem::path& path);

// mode-specific field validation; throws ConfigError
void validate_config(const ExperimentConfig& cfg);

// constructs the curve (which itself rejects singular models and
// conductor/discriminant mismatches)
EllipticCurve curve_from_config(const ExperimentConfig& cfg);

} // namespace lowlying
