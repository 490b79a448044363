#pragma once
#include <stdexcept>
#include <string>

namespace lowlying {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// curve model problems
struct BadReduction : Error { using Error::Error; };
struct NonminimalModel : Error { using Error::Error; };

// family construction
struct ConductorClash : Error { using Error::Error; };
struct EmptyFamily : Error { using Error::Error; };
struct FamilyTooLarge : Error { using Error::Error; };

// central values / ranks
struct InsufficientCoefficients : Error { using Error::Error; };
struct IllConditioned : Error { using Error::Error; };
struct RankOverflow : Error { using Error::Error; };

// cubic fields
struct EnumerationBoundTooSmall : Error { using Error::Error; };
struct IndexPrime : Error { using Error::Error; };

// plumbing
struct ConfigError : Error { using Error::Error; };
struct CacheCorruption : Error { using Error::Error; };

} // namespace lowlying
