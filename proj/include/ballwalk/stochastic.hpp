#pragma once

#include "ballwalk/point.hpp"

#include <array>
#include <cstdint>

namespace ballwalk {

/// Philox4x32-10 block function: 128-bit counter, 64-bit key.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter, std::array<std::uint32_t, 2> key) noexcept;

/// Counter-based random stream identified by (master_seed, stream_index).
///
/// The Philox key is the master seed; the counter is (draw index, stream
/// index), so every stream is addressable without touching any other and the
/// draws of a walk do not depend on which thread runs it.
class RngStream {
public:
    RngStream(std::uint64_t master_seed, std::uint64_t stream_index) noexcept
        : seed_(master_seed), index_(stream_index) {}

    std::uint64_t master_seed() const noexcept { return seed_; }
    std::uint64_t stream_index() const noexcept { return index_; }

    std::uint64_t next_u64() noexcept;
    /// Uniform on the open interval (0, 1), 53-bit resolution.
    double uniform() noexcept;
    /// Standard normal by Box-Muller; each pair of uniforms yields two normals.
    double normal() noexcept;

private:
    void refill() noexcept;

    std::uint64_t seed_;
    std::uint64_t index_;
    std::uint64_t block_ = 0;
    std::array<std::uint64_t, 2> buf_{};
    unsigned pos_ = 2;
    double spare_normal_ = 0.0;
    bool has_spare_ = false;
};

/// Stream for walk `walk_index` under `master_seed`. Pure.
inline RngStream derive_stream(std::uint64_t master_seed, std::uint64_t walk_index) noexcept {
    return RngStream(master_seed, walk_index);
}

/// SplitMix64-style hash used to derive independent master seeds for the
/// sub-stages of nested experiments.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag) noexcept;

/// Uniform on the open unit ball B_1(0) of R^dim: Gaussian direction, radius U^(1/dim).
Point sample_unit_ball(RngStream& stream, std::size_t dim);

/// Uniform on the unit sphere of R^dim (normalized Gaussian vector).
Point sample_unit_sphere(RngStream& stream, std::size_t dim);

} // namespace ballwalk
