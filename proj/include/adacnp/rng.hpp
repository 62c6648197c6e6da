#pragma once

#include <cstdint>
#include <vector>

namespace adacnp {

// Deterministic random stream. All distribution code is self-contained so a
// (seed, call sequence) pair reproduces bit-identical values on any platform;
// the standard-library distributions are implementation-defined and would not.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    // Derives an independent stream, e.g. one per evaluation worker.
    Rng fork(std::uint64_t stream_id) const;

    std::uint64_t next_u64();

    // Uniform on [0, 1).
    double uniform();
    // Uniform on [lo, hi).
    double uniform(double lo, double hi);
    // Uniform integer on [lo, hi] inclusive, rejection-sampled (unbiased).
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
    // Standard normal via Box-Muller (pairs cached).
    double normal();
    double normal(double mean, double stddev);

    // Fisher-Yates shuffle of the whole vector.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(uniform_int(0, static_cast<std::int64_t>(i) - 1));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::uint64_t state_;
    bool has_cached_normal_ = false;
    double cached_normal_ = 0.0;
};

} // namespace adacnp
