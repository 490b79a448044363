#include "lowlying/runner.hpp"

#include <cmath>
#include <iostream>
#include <map>
#include <numbers>

#include "lowlying/cache.hpp"
#include "lowlying/characters.hpp"
#include "lowlying/cubic.hpp"
#include "lowlying/density.hpp"
#include "lowlying/errors.hpp"
#include "lowlying/fejer.hpp"
#include "lowlying/format.hpp"
#include "lowlying/lseries.hpp"

namespace lowlying {

namespace {

struct Artifacts {
    std::map<std::string, std::string> files;  // path -> contents
    std::string stdout_line;
};

std::string report_json(const DensityReport& r) {
    std::string s = "{\n";
    s += "  \"conductor_term\": " + fmt12(r.conductor_term) + ",\n";
    s += "  \"s1\": " + fmt12(r.s1) + ",\n";
    s += "  \"s2\": " + fmt12(r.s2) + ",\n";
    s += "  \"total\": " + fmt12(r.total) + ",\n";
    s += "  \"predicted\": " + fmt12(r.predicted) + ",\n";
    s += "  \"family_size\": " + fmt12(r.family_size) + ",\n";
    s += "  \"L_param\": " + fmt12(r.L_param) + ",\n";
    s += "  \"error_budget\": " + fmt12(r.error_budget) + ",\n";
    s += "  \"symmetry\": \"" + r.symmetry + "\"\n";
    s += "}\n";
    return s;
}

std::string density_artifact(const ExperimentConfig& cfg, const DensityReport& r) {
    if (cfg.output_path.size() >= 4 &&
        cfg.output_path.substr(cfg.output_path.size() - 4) == ".csv") {
        return "X,total,predicted,gap\n" + fmt12(cfg.X) + "," + fmt12(r.total) + "," +
               fmt12(r.predicted) + "," + fmt12(r.total - r.predicted) + "\n";
    }
    return report_json(r);
}

std::string signature_name(Signature s) {
    return s == Signature::TotallyReal ? "real" : "complex";
}

// covers the kernel tail for the widest root-number smoothing scale
int64_t afe_prime_demand(double X, double support_factor, int64_t Q_E) {
    double q_max = support_factor * X;
    double n_max = std::sqrt(q_max * q_max * static_cast<double>(Q_E)) * 50.0 /
                   (2.0 * std::numbers::pi * 0.5);
    return static_cast<int64_t>(n_max) + 16;
}

Artifacts dispatch(const ExperimentConfig& cfg, const EllipticCurve& E, ApCache& cache) {
    Artifacts out;
    unsigned threads = cfg.thread_count;
    WeightFunction weight{weight_from_name(cfg.weight)};

    if (cfg.mode == "ap") {
        int64_t cap = cfg.prime_cap > 0 ? cfg.prime_cap : 10000;
        auto rows = cache.load(cap, threads);
        cache.audit(cap);
        std::string csv = "p,reduction,a_p\n";
        for (const auto& d : rows)
            csv += std::to_string(d.p) + "," + reduction_name(d.reduction) + "," +
                   std::to_string(d.a_p) + "\n";
        out.files[cfg.output_path] = csv;
    } else if (cfg.mode == "chars") {
        auto fam = enumerate_family(cfg.l, cfg.X, E.conductor(), weight);
        std::string csv = "conductor,character\n";
        for (const auto& chi : fam)
            csv += std::to_string(chi.conductor()) + "," + chi.local_descriptor() + "\n";
        out.files[cfg.output_path] = csv;
    } else if (cfg.mode == "density-cyclic" || cfg.mode == "density-cubic") {
        FejerPair phi(cfg.sigma);
        auto p1 = static_cast<int64_t>(std::exp(cfg.sigma * 2.0 * std::log(cfg.X)) + 1e-9);
        auto provider = cache.provider(std::max<int64_t>(p1, 2), threads);
        cache.audit(std::max<int64_t>(p1, 2));
        DensityReport rep = cfg.mode == "density-cyclic"
                                ? family_average_cyclic(E, cfg.l, cfg.X, phi, weight, provider,
                                                        threads)
                                : family_average_cubic(E, cfg.X, phi, provider, threads);
        out.files[cfg.output_path] = density_artifact(cfg, rep);
    } else if (cfg.mode == "ranks") {
        int64_t demand = afe_prime_demand(cfg.X, weight.support_factor(), E.conductor());
        auto provider = cache.provider(demand, threads);
        cache.audit(demand);
        auto summary = family_rank_statistics(E, cfg.l, cfg.X, weight, provider, threads);
        std::string csv = "conductor,char_index,order,margin,re_omega,im_omega\n";
        for (const auto& t : summary.twists)
            csv += std::to_string(t.conductor) + "," + std::to_string(t.char_index) + "," +
                   std::to_string(t.overflow ? -1 : t.order) + "," + fmt12(t.margin) + "," +
                   fmt12(t.omega.real()) + "," + fmt12(t.omega.imag()) + "\n";
        out.files[cfg.output_path] = csv;

        std::string js = "{\n";
        js += "  \"weighted_average_rank\": " + fmt12(summary.weighted_average_rank) + ",\n";
        js += "  \"vanishing_proportion\": " + fmt12(summary.vanishing_proportion) + ",\n";
        js += "  \"overflow_count\": " + std::to_string(summary.overflow_count) + ",\n";
        js += "  \"fields\": [\n";
        for (std::size_t i = 0; i < summary.fields.size(); ++i) {
            const auto& f = summary.fields[i];
            js += "    {\"conductor\": " + std::to_string(f.conductor) +
                  ", \"weight\": " + fmt12(f.weight) +
                  ", \"rank\": " + std::to_string(f.field_rank) + "}";
            js += (i + 1 < summary.fields.size()) ? ",\n" : "\n";
        }
        js += "  ]\n}\n";
        out.files[cfg.output_path + ".summary.json"] = js;
    } else if (cfg.mode == "fields") {
        auto fields = enumerate_cubic_fields(cfg.X, E.conductor(), threads);
        std::string csv = "D_F,a,b,c,signature\n";
        for (const auto& F : fields)
            csv += std::to_string(F.disc_field) + "," + std::to_string(F.a) + "," +
                   std::to_string(F.b) + "," + std::to_string(F.c) + "," +
                   signature_name(F.signature) + "\n";
        out.files[cfg.output_path] = csv;

        std::string split = "D_F,p,kind\n";
        for (const auto& F : fields)
            for (int64_t p : {2, 3, 5, 7})
                split += std::to_string(F.disc_field) + "," + std::to_string(p) + "," +
                         split_kind_name(splitting_type(F, p).kind) + "\n";
        out.files[cfg.output_path + ".splitting.csv"] = split;
    } else if (cfg.mode == "bound") {
        FejerPair phi(cfg.sigma);
        double b = cfg.family == "s3" ? rank_bound_sd(phi) : rank_bound_cyclic(phi);
        std::string js = "{\"bound\": " + fmt12(b) + "}\n";
        out.files[cfg.output_path] = js;
        out.stdout_line = "{\"bound\": " + fmt12(b) + "}";
    } else if (cfg.mode == "theta") {
        auto cap = static_cast<int64_t>(cfg.X);
        auto provider = cache.provider(cap, threads);
        cache.audit(cap);
        double v = theta_f(E, cfg.X, provider);
        std::string js = "{\n  \"x\": " + fmt12(cfg.X) + ",\n  \"theta\": " + fmt12(v) +
                         ",\n  \"ratio\": " + fmt12(v / cfg.X) + "\n}\n";
        out.files[cfg.output_path] = js;
    } else {
        throw ConfigError("unknown mode: '" + cfg.mode + "'");
    }
    return out;
}

std::string config_echo(const ExperimentConfig& cfg) {
    // thread_count is a scheduling knob, deliberately not echoed so that
    // artifacts are byte-identical across thread counts
    std::string s = "{\n";
    s += "    \"a1\": " + std::to_string(cfg.a1) + ",\n";
    s += "    \"a2\": " + std::to_string(cfg.a2) + ",\n";
    s += "    \"a3\": " + std::to_string(cfg.a3) + ",\n";
    s += "    \"a4\": " + std::to_string(cfg.a4) + ",\n";
    s += "    \"a6\": " + std::to_string(cfg.a6) + ",\n";
    s += "    \"conductor\": " + std::to_string(cfg.conductor) + ",\n";
    if (cfg.known_rank) s += "    \"known_rank\": " + std::to_string(*cfg.known_rank) + ",\n";
    s += "    \"mode\": \"" + cfg.mode + "\",\n";
    s += "    \"l\": " + std::to_string(cfg.l) + ",\n";
    s += "    \"X\": " + fmt12(cfg.X) + ",\n";
    s += "    \"sigma\": " + fmt12(cfg.sigma) + ",\n";
    s += "    \"weight\": \"" + cfg.weight + "\",\n";
    s += "    \"family\": \"" + cfg.family + "\",\n";
    s += "    \"prime_cap\": " + std::to_string(cfg.prime_cap) + ",\n";
    s += "    \"coefficient_cap\": " + std::to_string(cfg.coefficient_cap) + ",\n";
    s += "    \"cache_dir\": \"" + cfg.cache_dir + "\",\n";
    s += "    \"output_path\": \"" + cfg.output_path + "\"\n";
    s += "  }";
    return s;
}

void write_error_record(const ExperimentConfig& cfg, const std::string& type,
                        const std::string& message) {
    std::string js =
        "{\"error\": {\"type\": \"" + type + "\", \"message\": \"" + message + "\"}}";
    std::cerr << js << "\n";
    if (!cfg.output_path.empty()) {
        try {
            atomic_write_file(cfg.output_path + ".error.json", js + "\n");
        } catch (...) {
        }
    }
}

} // namespace

std::string error_type_name(const std::exception& e) {
    if (dynamic_cast<const ConfigError*>(&e)) return "ConfigError";
    if (dynamic_cast<const CacheCorruption*>(&e)) return "CacheCorruption";
    if (dynamic_cast<const BadReduction*>(&e)) return "BadReduction";
    if (dynamic_cast<const NonminimalModel*>(&e)) return "NonminimalModel";
    if (dynamic_cast<const ConductorClash*>(&e)) return "ConductorClash";
    if (dynamic_cast<const EmptyFamily*>(&e)) return "EmptyFamily";
    if (dynamic_cast<const FamilyTooLarge*>(&e)) return "FamilyTooLarge";
    if (dynamic_cast<const InsufficientCoefficients*>(&e)) return "InsufficientCoefficients";
    if (dynamic_cast<const IllConditioned*>(&e)) return "IllConditioned";
    if (dynamic_cast<const RankOverflow*>(&e)) return "RankOverflow";
    if (dynamic_cast<const EnumerationBoundTooSmall*>(&e)) return "EnumerationBoundTooSmall";
    if (dynamic_cast<const IndexPrime*>(&e)) return "IndexPrime";
    if (dynamic_cast<const Error*>(&e)) return "Error";
    return "Exception";
}

int run(const ExperimentConfig& cfg) {
    try {
        validate_config(cfg);
        EllipticCurve E = curve_from_config(cfg);

        Artifacts art;
        for (int attempt = 0;; ++attempt) {
            try {
                ApCache cache(cfg.cache_dir, E);
                art = dispatch(cfg, E, cache);
                break;
            } catch (const CacheCorruption&) {
                // the thrower cleared the bad files; one rebuild attempt
                if (attempt > 0) throw;
            }
        }

        std::map<std::string, std::string> sums;
        for (const auto& [path, body] : art.files) {
            atomic_write_file(path, body);
            sums[std::filesystem::path(path).filename().string()] = hex64(fnv1a64(body));
        }
        std::string manifest = "{\n  \"version\": \"" + std::string(kToolVersion) + "\",\n";
        manifest += "  \"config\": " + config_echo(cfg) + ",\n";
        manifest += "  \"outputs\": {\n";
        std::size_t i = 0;
        for (const auto& [name, sum] : sums) {
            manifest += "    \"" + name + "\": \"" + sum + "\"";
            manifest += (++i < sums.size()) ? ",\n" : "\n";
        }
        manifest += "  }\n}\n";
        atomic_write_file(cfg.output_path + ".manifest.json", manifest);

        if (!art.stdout_line.empty()) std::cout << art.stdout_line << std::endl;
        return 0;
    } catch (const ConfigError& e) {
        write_error_record(cfg, "ConfigError", e.what());
        return 2;
    } catch (const CacheCorruption& e) {
        write_error_record(cfg, "CacheCorruption", e.what());
        return 3;
    } catch (const std::exception& e) {
        write_error_record(cfg, error_type_name(e), e.what());
        return 1;
    }
}

} // namespace lowlying
