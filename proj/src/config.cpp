#include "lowlying/config.hpp"

#include <set>

#include <json.hpp>

#include "lowlying/errors.hpp"
#include "lowlying/format.hpp"
#include "lowlying/primes.hpp"

namespace lowlying {

namespace {

const std::set<std::string> kModes = {"ap",    "chars",  "density-cyclic", "density-cubic",
                                      "ranks", "fields", "bound",          "theta"};

const std::set<std::string> kKeys = {
    "a1", "a2", "a3", "a4", "a6", "conductor", "known_rank", "mode",   "l",
    "X",  "sigma", "weight", "family", "prime_cap", "coefficient_cap",
    "thread_count", "cache_dir", "output_path"};

} // namespace

ExperimentConfig config_from_json_text(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config root must be a JSON object");
    for (auto& [k, v] : j.items())
        if (!kKeys.count(k)) throw ConfigError("unknown config key: " + k);

    ExperimentConfig cfg;
    try {
        auto geti = [&](const char* k, int64_t& out) { if (j.contains(k)) out = j.at(k).get<int64_t>(); };
        geti("a1", cfg.a1);
        geti("a2", cfg.a2);
        geti("a3", cfg.a3);
        geti("a4", cfg.a4);
        geti("a6", cfg.a6);
        geti("conductor", cfg.conductor);
        geti("prime_cap", cfg.prime_cap);
        if (j.contains("known_rank")) cfg.known_rank = j.at("known_rank").get<int>();
        if (j.contains("mode")) cfg.mode = j.at("mode").get<std::string>();
        if (j.contains("l")) cfg.l = j.at("l").get<int>();
        if (j.contains("X")) cfg.X = j.at("X").get<double>();
        if (j.contains("sigma")) cfg.sigma = j.at("sigma").get<double>();
        if (j.contains("weight")) cfg.weight = j.at("weight").get<std::string>();
        if (j.contains("family")) cfg.family = j.at("family").get<std::string>();
        if (j.contains("coefficient_cap"))
            cfg.coefficient_cap = j.at("coefficient_cap").get<std::size_t>();
        if (j.contains("thread_count")) cfg.thread_count = j.at("thread_count").get<unsigned>();
        if (j.contains("cache_dir")) cfg.cache_dir = j.at("cache_dir").get<std::string>();
        if (j.contains("output_path")) cfg.output_path = j.at("output_path").get<std::string>();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config field has the wrong type: ") + e.what());
    }
    return cfg;
}

ExperimentConfig config_from_file(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path))
        throw ConfigError("config file not found: " + path.string());
    return config_from_json_text(read_file(path));
}

void validate_config(const ExperimentConfig& cfg) {
    if (!kModes.count(cfg.mode)) throw ConfigError("unknown mode: '" + cfg.mode + "'");
    if (cfg.conductor <= 0) throw ConfigError("conductor must be positive");
    if (cfg.thread_count < 1) throw ConfigError("thread_count must be at least 1");
    if (cfg.output_path.empty()) throw ConfigError("output_path is required");
    if (cfg.known_rank && *cfg.known_rank < 0) throw ConfigError("known_rank must be >= 0");

    bool uses_l = cfg.mode == "chars" || cfg.mode == "density-cyclic" || cfg.mode == "ranks";
    bool uses_X = uses_l || cfg.mode == "density-cubic" || cfg.mode == "fields" ||
                  cfg.mode == "theta";
    bool uses_sigma = cfg.mode == "density-cyclic" || cfg.mode == "density-cubic" ||
                      cfg.mode == "bound";
    if (uses_l && (cfg.l < 3 || !is_prime(cfg.l)))
        throw ConfigError("l must be an odd prime");
    if (uses_X && !(cfg.X >= 1.0)) throw ConfigError("X must be at least 1");
    if (uses_sigma && !(cfg.sigma > 0.0 && cfg.sigma <= 1.0))
        throw ConfigError("sigma must lie in (0, 1]");
    if (cfg.mode == "bound" && cfg.family != "cyclic" && cfg.family != "s3")
        throw ConfigError("family must be 'cyclic' or 's3'");
    if (cfg.weight != "bump" && cfg.weight != "sharp")
        throw ConfigError("weight must be 'bump' or 'sharp'");
    if (cfg.mode == "ap" && cfg.prime_cap != 0 && cfg.prime_cap < 2)
        throw ConfigError("prime_cap must be at least 2");
}

EllipticCurve curve_from_config(const ExperimentConfig& cfg) {
    return EllipticCurve(cfg.a1, cfg.a2, cfg.a3, cfg.a4, cfg.a6, cfg.conductor, cfg.known_rank);
}

} // namespace lowlying
