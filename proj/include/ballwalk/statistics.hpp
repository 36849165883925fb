#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace ballwalk {

/// One-pass mean/variance (Welford) with Chan's pairwise merge.
///
/// Merging partials in a fixed order gives bit-identical results no matter
/// how the partials were scheduled.
class RunningStats {
public:
    void add(double x) noexcept {
        ++n_;
        double delta = x - mean_;
        mean_ += delta / static_cast<double>(n_);
        m2_ += delta * (x - mean_);
        if (x < min_) min_ = x;
        if (x > max_) max_ = x;
    }

    void merge(const RunningStats& o) noexcept {
        if (o.n_ == 0) return;
        if (n_ == 0) {
            *this = o;
            return;
        }
        const double n = static_cast<double>(n_ + o.n_);
        const double delta = o.mean_ - mean_;
        mean_ += delta * (static_cast<double>(o.n_) / n);
        m2_ += o.m2_ + delta * delta * (static_cast<double>(n_) * static_cast<double>(o.n_) / n);
        n_ += o.n_;
        if (o.min_ < min_) min_ = o.min_;
        if (o.max_ > max_) max_ = o.max_;
    }

    std::uint64_t count() const noexcept { return n_; }
    double mean() const noexcept { return mean_; }
    /// Unbiased sample variance; 0 for fewer than two samples.
    double variance() const noexcept { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
    double stderr_of_mean() const noexcept {
        return n_ > 1 ? std::sqrt(variance() / static_cast<double>(n_)) : std::numeric_limits<double>::infinity();
    }
    double min() const noexcept { return min_; }
    double max() const noexcept { return max_; }

private:
    std::uint64_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
    double min_ = std::numeric_limits<double>::infinity();
    double max_ = -std::numeric_limits<double>::infinity();
};

} // namespace ballwalk
