#pragma once

#include <cmath>
#include <cstdint>
#include <set>
#include <utility>
#include <vector>

#include "photonkit/errors.hpp"

namespace photonkit {

// All record types validate their invariants at construction and are
// immutable afterwards; sharing between concurrent readers is safe.

struct TimeTag {
    std::int64_t time_ps;
    std::uint8_t channel;

    friend bool operator==(const TimeTag& a, const TimeTag& b) {
        return a.time_ps == b.time_ps && a.channel == b.channel;
    }
};

class TimeTagStream {
public:
    TimeTagStream(std::vector<TimeTag> tags, std::int64_t duration_ps,
                  int channel_count)
        : tags_(std::move(tags)),
          duration_ps_(duration_ps),
          channel_count_(channel_count) {
        if (duration_ps_ < 0) throw DomainError("stream duration must be >= 0");
        if (channel_count_ < 1) throw DomainError("stream needs >= 1 channel");
        std::int64_t prev = 0;
        for (const auto& t : tags_) {
            if (t.time_ps < prev)
                throw IntegrityError("timestamps must be non-decreasing");
            if (t.time_ps > duration_ps_)
                throw IntegrityError("timestamp beyond stream duration");
            if (t.channel >= channel_count_)
                throw IntegrityError("channel id out of range");
            prev = t.time_ps;
        }
    }

    const std::vector<TimeTag>& tags() const { return tags_; }
    std::int64_t duration_ps() const { return duration_ps_; }
    double duration_s() const { return static_cast<double>(duration_ps_) * 1e-12; }
    int channel_count() const { return channel_count_; }
    std::size_t size() const { return tags_.size(); }

    std::vector<std::int64_t> channel_times(int channel) const {
        std::vector<std::int64_t> out;
        for (const auto& t : tags_)
            if (t.channel == channel) out.push_back(t.time_ps);
        return out;
    }

private:
    std::vector<TimeTag> tags_;
    std::int64_t duration_ps_;
    int channel_count_;
};

struct SpectrumSample {
    double wavelength_nm;
    double intensity;  // counts
};

class SpectrumTrace {
public:
    explicit SpectrumTrace(std::vector<SpectrumSample> samples)
        : samples_(std::move(samples)) {
        for (std::size_t i = 0; i < samples_.size(); ++i) {
            if (samples_[i].intensity < 0)
                throw IntegrityError("spectrum intensities must be >= 0");
            if (i > 0 && samples_[i].wavelength_nm <= samples_[i - 1].wavelength_nm)
                throw IntegrityError("wavelengths must be strictly increasing");
        }
    }

    const std::vector<SpectrumSample>& samples() const { return samples_; }
    std::size_t size() const { return samples_.size(); }
    double min_wavelength() const { return samples_.front().wavelength_nm; }
    double max_wavelength() const { return samples_.back().wavelength_nm; }

private:
    std::vector<SpectrumSample> samples_;
};

struct PolarizationPoint {
    double angle_deg;   // [0, 360)
    double intensity;   // counts/s
};

class PolarizationScan {
public:
    explicit PolarizationScan(std::vector<PolarizationPoint> points)
        : points_(std::move(points)) {
        std::set<double> angles;
        for (auto& p : points_) {
            p.angle_deg = std::fmod(p.angle_deg, 360.0);
            if (p.angle_deg < 0) p.angle_deg += 360.0;
            if (p.intensity < 0)
                throw IntegrityError("polarization intensities must be >= 0");
            angles.insert(p.angle_deg);
        }
        if (angles.size() < 8)
            throw DomainError("polarization scan needs >= 8 distinct angles");
    }

    const std::vector<PolarizationPoint>& points() const { return points_; }

private:
    std::vector<PolarizationPoint> points_;
};

struct SaturationPoint {
    double power_uW;        // > 0
    double intensity_kcps;  // >= 0
};

class SaturationSeries {
public:
    explicit SaturationSeries(std::vector<SaturationPoint> points)
        : points_(std::move(points)) {
        if (points_.size() < 4)
            throw DomainError("saturation series needs >= 4 points");
        double prev = 0.0;
        for (const auto& p : points_) {
            if (!(p.power_uW > prev))
                throw IntegrityError("powers must be positive and strictly increasing");
            if (p.intensity_kcps < 0)
                throw IntegrityError("intensities must be >= 0");
            prev = p.power_uW;
        }
    }

    const std::vector<SaturationPoint>& points() const { return points_; }

private:
    std::vector<SaturationPoint> points_;
};

class DecayHistogram {
public:
    DecayHistogram(std::vector<double> bin_edges_ns,
                   std::vector<std::uint64_t> counts, double pulse_period_ns)
        : bin_edges_ns_(std::move(bin_edges_ns)),
          counts_(std::move(counts)),
          pulse_period_ns_(pulse_period_ns) {
        if (bin_edges_ns_.size() < 2 || counts_.size() + 1 != bin_edges_ns_.size())
            throw DomainError("need len(counts) = len(bin_edges) - 1");
        const double width = bin_edges_ns_[1] - bin_edges_ns_[0];
        if (!(width > 0)) throw DomainError("bin width must be positive");
        for (std::size_t i = 1; i < bin_edges_ns_.size(); ++i) {
            const double w = bin_edges_ns_[i] - bin_edges_ns_[i - 1];
            if (std::abs(w - width) > 1e-9 * width)
                throw IntegrityError("bin edges must be uniform");
        }
        if (bin_edges_ns_.back() > pulse_period_ns_ * (1.0 + 1e-12))
            throw IntegrityError("bin edges must not exceed the pulse period");
    }

    const std::vector<double>& bin_edges_ns() const { return bin_edges_ns_; }
    const std::vector<std::uint64_t>& counts() const { return counts_; }
    double pulse_period_ns() const { return pulse_period_ns_; }
    double bin_width_ns() const { return bin_edges_ns_[1] - bin_edges_ns_[0]; }
    double bin_center_ns(std::size_t i) const {
        return 0.5 * (bin_edges_ns_[i] + bin_edges_ns_[i + 1]);
    }
    std::uint64_t total_counts() const {
        std::uint64_t s = 0;
        for (auto c : counts_) s += c;
        return s;
    }

private:
    std::vector<double> bin_edges_ns_;
    std::vector<std::uint64_t> counts_;
    double pulse_period_ns_;
};

}  // namespace photonkit
