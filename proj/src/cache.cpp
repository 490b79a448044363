#include "lowlying/cache.hpp"

#include <algorithm>
#include <unordered_map>

#include <json.hpp>

#include "lowlying/errors.hpp"
#include "lowlying/format.hpp"
#include "lowlying/parallel.hpp"
#include "lowlying/primes.hpp"

namespace lowlying {

std::string hex64(uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i) {
        s[static_cast<size_t>(i)] = digits[v & 0xf];
        v >>= 4;
    }
    return s;
}

ApCache::ApCache(std::filesystem::path dir, const EllipticCurve& E)
    : dir_(std::move(dir)), curve_(E), tag_(hex64(E.fingerprint())) {
    read_state();
}

std::filesystem::path ApCache::data_file() const { return dir_ / ("ap_" + tag_ + ".csv"); }
std::filesystem::path ApCache::manifest_file() const {
    return dir_ / ("manifest_" + tag_ + ".json");
}

void ApCache::read_state() {
    manifest_ = CacheManifest{curve_.fingerprint(), 2, 1, {}};
    if (!std::filesystem::exists(manifest_file())) return;
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_file(manifest_file()));
        manifest_.fingerprint = std::stoull(j.at("fingerprint").get<std::string>(), nullptr, 16);
        manifest_.prime_lo = j.at("prime_lo").get<int64_t>();
        manifest_.prime_hi = j.at("prime_hi").get<int64_t>();
        for (auto& [k, v] : j.at("files").items())
            manifest_.checksums[k] = v.get<std::string>();
    } catch (const std::exception& e) {
        clear_files();
        throw CacheCorruption(std::string("unreadable cache manifest: ") + e.what());
    }
    if (manifest_.fingerprint != curve_.fingerprint()) {
        clear_files();
        throw CacheCorruption("cache manifest fingerprint does not match the curve");
    }
}

void ApCache::clear_files() {
    std::error_code ec;
    std::filesystem::remove(data_file(), ec);
    std::filesystem::remove(manifest_file(), ec);
    manifest_ = CacheManifest{curve_.fingerprint(), 2, 1, {}};
}

std::vector<LocalData> ApCache::parse_rows() const {
    std::string name = data_file().filename().string();
    auto it = manifest_.checksums.find(name);
    if (it == manifest_.checksums.end())
        throw CacheCorruption("cache manifest lists no checksum for " + name);
    if (!std::filesystem::exists(data_file()))
        throw CacheCorruption("cache data file missing: " + name);
    if (hex64(fnv1a64_file(data_file())) != it->second)
        throw CacheCorruption("cache data checksum mismatch for " + name);

    std::string body = read_file(data_file());
    std::vector<LocalData> rows;
    size_t pos = 0;
    bool header = true;
    while (pos < body.size()) {
        size_t end = body.find('\n', pos);
        if (end == std::string::npos) end = body.size();
        std::string line = body.substr(pos, end - pos);
        pos = end + 1;
        if (line.empty()) continue;
        if (header) {
            header = false;
            if (line != "p,reduction,a_p") throw CacheCorruption("unexpected cache header");
            continue;
        }
        auto parts = split_csv_line(line);
        if (parts.size() != 3) throw CacheCorruption("malformed cache row: " + line);
        LocalData d;
        d.p = std::stoll(parts[0]);
        d.reduction = reduction_from_name(parts[1]);
        d.a_p = std::stoll(parts[2]);
        rows.push_back(d);
    }
    return rows;
}

void ApCache::write_state(const std::vector<LocalData>& rows, int64_t hi) {
    std::string csv = "p,reduction,a_p\n";
    for (const auto& d : rows)
        csv += std::to_string(d.p) + "," + reduction_name(d.reduction) + "," +
               std::to_string(d.a_p) + "\n";
    atomic_write_file(data_file(), csv);

    manifest_.fingerprint = curve_.fingerprint();
    manifest_.prime_lo = 2;
    manifest_.prime_hi = hi;
    manifest_.checksums.clear();
    manifest_.checksums[data_file().filename().string()] = hex64(fnv1a64(csv));

    nlohmann::json j;
    j["fingerprint"] = hex64(manifest_.fingerprint);
    j["prime_lo"] = manifest_.prime_lo;
    j["prime_hi"] = manifest_.prime_hi;
    j["files"] = manifest_.checksums;
    atomic_write_file(manifest_file(), j.dump(2) + "\n");
}

const CacheManifest& ApCache::extend(int64_t new_prime_cap, unsigned threads) {
    if (new_prime_cap < 2) throw ConfigError("prime cap must be at least 2");
    std::vector<LocalData> rows;
    if (manifest_.prime_hi >= manifest_.prime_lo) {
        try {
            rows = parse_rows();
        } catch (const CacheCorruption&) {
            clear_files();
            throw;
        }
    }
    if (manifest_.prime_hi >= new_prime_cap) return manifest_;

    int64_t lo = std::max<int64_t>(2, manifest_.prime_hi + 1);
    auto all = primes_up_to(new_prime_cap);
    std::vector<int64_t> fresh;
    for (int64_t p : all)
        if (p >= lo) fresh.push_back(p);
    auto computed = parallel_map<LocalData>(fresh.size(), threads, [&](std::size_t i) {
        return reduction_type(curve_, fresh[i]);
    });
    rows.insert(rows.end(), computed.begin(), computed.end());
    write_state(rows, new_prime_cap);
    return manifest_;
}

std::vector<LocalData> ApCache::load(int64_t cap, unsigned threads) {
    extend(cap, threads);
    std::vector<LocalData> rows;
    try {
        rows = parse_rows();
    } catch (const CacheCorruption&) {
        clear_files();
        throw;
    }
    std::erase_if(rows, [cap](const LocalData& d) { return d.p > cap; });
    return rows;
}

LocalProvider ApCache::provider(int64_t cap, unsigned threads) {
    auto rows = load(cap, threads);
    auto table = std::make_shared<std::unordered_map<int64_t, LocalData>>();
    table->reserve(rows.size());
    for (const auto& d : rows) (*table)[d.p] = d;
    const EllipticCurve E = curve_;
    return [table, E](int64_t p) {
        auto it = table->find(p);
        return it != table->end() ? it->second : reduction_type(E, p);
    };
}

void ApCache::audit(int64_t cap, int64_t audit_modulus) {
    auto rows = load(cap);
    for (const auto& d : rows) {
        uint64_t h = fnv1a64(std::to_string(d.p) + ":" + tag_);
        if (audit_modulus > 1 && h % static_cast<uint64_t>(audit_modulus) != 0) continue;
        LocalData fresh = reduction_type(curve_, d.p);
        if (fresh.reduction != d.reduction || fresh.a_p != d.a_p) {
            clear_files();
            throw CacheCorruption("cache audit mismatch at p = " + std::to_string(d.p));
        }
    }
}

} // namespace lowlying
