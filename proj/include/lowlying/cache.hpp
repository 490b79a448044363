#pragma once
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "lowlying/curve.hpp"

namespace lowlying {

struct CacheManifest {
    uint64_t fingerprint = 0;
    int64_t prime_lo = 2;
    int64_t prime_hi = 1;  // hi < lo means nothing covered yet
    std::map<std::string, std::string> checksums;  // file name -> fnv1a64 hex
};

// On-disk store of local reduction data, one (curve, directory) pair per
// instance. Rows live in ap_<fingerprint>.csv as `p,reduction,a_p`; the
// manifest JSON records the covered prime range and file checksums. All
// writes go through write-new-then-rename.
class ApCache {
public:
    ApCache(std::filesystem::path dir, const EllipticCurve& E);

    // extend coverage to [2, new_prime_cap], computing only the uncovered
    // part; throws CacheCorruption (after clearing the bad files) when the
    // stored data fails its checksum or does not parse
    const CacheManifest& extend(int64_t new_prime_cap, unsigned threads = 1);

    // rows with p <= cap, extending first when needed
    std::vector<LocalData> load(int64_t cap, unsigned threads = 1);

    // lookup closure over the loaded rows
    LocalProvider provider(int64_t cap, unsigned threads = 1);

    // recompute a deterministic ~1/audit_modulus sample; CacheCorruption on
    // any disagreement
    void audit(int64_t cap, int64_t audit_modulus = 100);

    const CacheManifest& manifest() const { return manifest_; }
    std::filesystem::path data_file() const;
    std::filesystem::path manifest_file() const;

private:
    void read_state();
    void clear_files();
    std::vector<LocalData> parse_rows() const;
    void write_state(const std::vector<LocalData>& rows, int64_t hi);

    std::filesystem::path dir_;
    const EllipticCurve curve_;
    std::string tag_;  // fingerprint as hex
    CacheManifest manifest_;
};

std::string hex64(uint64_t v);

} // namespace lowlying
