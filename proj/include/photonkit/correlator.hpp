#pragma once

#include <cstdint>
#include <vector>

#include "photonkit/types.hpp"

namespace photonkit::correlator {

// Symmetric coincidence histogram: an odd number of uniform bins whose edge
// set mirrors about zero delay; the central bin is centered on tau = 0.
struct CorrelationHistogram {
    std::vector<double> bin_edges_ns;
    std::vector<std::uint64_t> coincidences;
    std::vector<double> normalized_g2;
    double rate1_cps = 0.0;
    double rate2_cps = 0.0;
    double duration_s = 0.0;

    std::size_t bins() const { return coincidences.size(); }
    std::size_t center_bin() const { return coincidences.size() / 2; }
    double bin_width_ns() const { return bin_edges_ns[1] - bin_edges_ns[0]; }
    double bin_center_ns(std::size_t i) const {
        return 0.5 * (bin_edges_ns[i] + bin_edges_ns[i + 1]);
    }
    // Expected coincidences per bin for uncorrelated channels.
    double expected_per_bin() const {
        return rate1_cps * rate2_cps * duration_s * bin_width_ns() * 1e-9;
    }
};

struct G2Zero {
    double value = 0.0;
    double sigma = 0.0;
};

// Full (all-pairs) cross-correlation of two channels within +/- window via a
// sorted-merge sweep. Self-correlation (channel_a == channel_b) skips
// identical-index pairs.
CorrelationHistogram correlate(const TimeTagStream& s, double window_ns,
                               double bin_width_ns, int channel_a = 0,
                               int channel_b = 1, int threads = 1);

G2Zero g2_at_zero(const CorrelationHistogram& h, int averaging_bins = 3);

// Antibunching gate with a 1-sigma guard band below the 0.5 threshold.
bool is_single_emitter(const G2Zero& g);

}  // namespace photonkit::correlator
