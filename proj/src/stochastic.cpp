#include "ballwalk/stochastic.hpp"

#include <cmath>
#include <numbers>

namespace ballwalk {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) noexcept {
    std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

Point gaussian_direction(RngStream& stream, std::size_t dim) {
    Point g(dim);
    double len = 0.0;
    while (len == 0.0) {
        for (std::size_t i = 0; i < dim; ++i) g[i] = stream.normal();
        len = norm(g);
    }
    return (1.0 / len) * g;
}

} // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr, std::array<std::uint32_t, 2> key) noexcept {
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            key[0] += kWeyl0;
            key[1] += kWeyl1;
        }
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kMul0, ctr[0], hi0, lo0);
        mulhilo(kMul1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
}

void RngStream::refill() noexcept {
    auto out = philox4x32({static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
                           static_cast<std::uint32_t>(index_), static_cast<std::uint32_t>(index_ >> 32)},
                          {static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)});
    ++block_;
    buf_[0] = (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
    buf_[1] = (static_cast<std::uint64_t>(out[3]) << 32) | out[2];
    pos_ = 0;
}

std::uint64_t RngStream::next_u64() noexcept {
    if (pos_ == 2) refill();
    return buf_[pos_++];
}

double RngStream::uniform() noexcept {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::normal() noexcept {
    if (has_spare_) {
        has_spare_ = false;
        return spare_normal_;
    }
    double r = std::sqrt(-2.0 * std::log(uniform()));
    double theta = 2.0 * std::numbers::pi * uniform();
    spare_normal_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag) noexcept {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (tag + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

Point sample_unit_ball(RngStream& stream, std::size_t dim) {
    while (true) {
        Point dir = gaussian_direction(stream, dim);
        double u = stream.uniform();
        double r = dim == 1 ? u : dim == 2 ? std::sqrt(u) : std::pow(u, 1.0 / static_cast<double>(dim));
        Point w = r * dir;
        // r^(1/N) can round to 1 for u near 1; keep the open-ball contract.
        if (dot(w, w) < 1.0) return w;
    }
}

Point sample_unit_sphere(RngStream& stream, std::size_t dim) { return gaussian_direction(stream, dim); }

} // namespace ballwalk
