#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace sdcor {

/// Bad user input: unreadable files, malformed rows, out-of-range arguments.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The requested computation has no feasible answer (all-noise sample,
/// singular initial cluster, exhausted rejection budget, ...).
class InfeasibleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An internal guarantee was broken; indicates a bug, not bad input.
class InvariantError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// splitmix64 step; used to derive independent stream seeds from one base seed.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t stream) {
    return splitmix64(base ^ splitmix64(stream + 0x51ed2701a97359f3ULL));
}

}  // namespace sdcor
