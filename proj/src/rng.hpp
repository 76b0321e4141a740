#pragma once

#include <cstdint>

namespace ite {

// Identifies one independent random stream. Per-trial streams are derived as a
// pure function of (master_seed, stream_index), so ensemble runs are
// reproducible regardless of how trials are scheduled across threads.
struct SeedPath {
    std::uint64_t master_seed = 0;
    std::uint64_t stream_index = 0;
};

// Counter-derived splittable generator (splitmix64 core). All variates are
// produced by deterministic transforms of the 64-bit output sequence, never by
// platform-dependent library distributions, so identical seeds give
// bit-identical streams on every platform and thread count.
class RngStream {
  public:
    RngStream(std::uint64_t master_seed, std::uint64_t stream_index);
    explicit RngStream(SeedPath path) : RngStream(path.master_seed, path.stream_index) {}

    std::uint64_t next_u64();

    // Uniform on [0, 1), 53-bit resolution.
    double uniform01();

    // Standard normal via Box-Muller on consecutive uniforms. Pairs are
    // generated together and the spare is cached; consumption order is still a
    // pure function of the call sequence.
    double gaussian();

    // Uniform integer in [0, bound), rejection-sampled (unbiased).
    std::uint64_t uniform_below(std::uint64_t bound);

    // Gamma(shape, 1) via Marsaglia-Tsang, boosted for shape < 1.
    double gamma(double shape);

    bool coin() { return (next_u64() >> 63) != 0; }

  private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace ite
