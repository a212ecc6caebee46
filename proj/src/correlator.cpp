#include "photonkit/correlator.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "photonkit/errors.hpp"

namespace photonkit::correlator {

namespace {

// Bins one contiguous slice of channel-a tags against all of channel b.
// Delays are assigned to bins in integer ps arithmetic; ties at half-bin
// boundaries round away from zero so reversing a stream mirrors the
// histogram exactly.
void correlate_chunk(const std::vector<std::int64_t>& a,
                     const std::vector<std::int64_t>& b, std::size_t a_begin,
                     std::size_t a_end, bool self, std::int64_t bin_ps,
                     std::size_t nbins, std::vector<std::uint64_t>& counts) {
    const std::int64_t span2 =
        static_cast<std::int64_t>(nbins) * bin_ps;  // 2 * half-window
    const auto nside = static_cast<std::int64_t>((nbins - 1) / 2);
    std::size_t lo = 0, hi = 0;
    for (std::size_t i = a_begin; i < a_end; ++i) {
        const std::int64_t t = a[i];
        while (lo < b.size() && 2 * (b[lo] - t) < -span2) ++lo;
        if (hi < lo) hi = lo;
        while (hi < b.size() && 2 * (b[hi] - t) < span2) ++hi;
        for (std::size_t j = lo; j < hi; ++j) {
            if (self && j == i) continue;
            const std::int64_t d = b[j] - t;
            const std::int64_t mag = (2 * std::llabs(d) + bin_ps) / (2 * bin_ps);
            if (mag > nside) continue;
            ++counts[static_cast<std::size_t>(nside + (d < 0 ? -mag : mag))];
        }
    }
}

}  // namespace

CorrelationHistogram correlate(const TimeTagStream& s, double window_ns,
                               double bin_width_ns, int channel_a,
                               int channel_b, int threads) {
    if (!(bin_width_ns > 0) || window_ns < bin_width_ns)
        throw DomainError("need window >= bin width > 0");
    if (channel_a != channel_b &&
        (s.channel_count() < 2 || channel_a >= s.channel_count() ||
         channel_b >= s.channel_count()))
        throw ChannelError("cross-correlation needs two valid channels");

    const auto bin_ps = std::llround(bin_width_ns * 1e3);
    if (bin_ps <= 0) throw DomainError("bin width below 1 ps");
    const auto nside = static_cast<std::size_t>(
        std::ceil(window_ns / bin_width_ns - 1e-9));
    const std::size_t nbins = 2 * nside + 1;

    CorrelationHistogram h;
    h.bin_edges_ns.resize(nbins + 1);
    const double bin_ns = static_cast<double>(bin_ps) * 1e-3;
    for (std::size_t i = 0; i <= nbins; ++i)
        h.bin_edges_ns[i] =
            (static_cast<double>(i) - static_cast<double>(nbins) / 2.0) * bin_ns;
    h.coincidences.assign(nbins, 0);
    h.normalized_g2.assign(nbins, 0.0);
    h.duration_s = s.duration_s();

    const auto a = s.channel_times(channel_a);
    const auto b = s.channel_times(channel_b);
    const bool self = channel_a == channel_b;
    if (h.duration_s > 0) {
        h.rate1_cps = static_cast<double>(a.size()) / h.duration_s;
        h.rate2_cps = static_cast<double>(b.size()) / h.duration_s;
    }
    if (a.empty() || b.empty()) return h;

    threads = std::max(1, threads);
    if (threads == 1 || a.size() < 4096) {
        correlate_chunk(a, b, 0, a.size(), self, bin_ps, nbins, h.coincidences);
    } else {
        std::vector<std::vector<std::uint64_t>> partial(
            threads, std::vector<std::uint64_t>(nbins, 0));
        std::vector<std::thread> pool;
        const std::size_t chunk = (a.size() + threads - 1) / threads;
        for (int t = 0; t < threads; ++t) {
            const std::size_t begin = std::min(a.size(), t * chunk);
            const std::size_t end = std::min(a.size(), begin + chunk);
            pool.emplace_back([&, t, begin, end] {
                correlate_chunk(a, b, begin, end, self, bin_ps, nbins, partial[t]);
            });
        }
        for (auto& th : pool) th.join();
        for (const auto& p : partial)
            for (std::size_t i = 0; i < nbins; ++i) h.coincidences[i] += p[i];
    }

    const double expected = h.expected_per_bin();
    if (expected > 0)
        for (std::size_t i = 0; i < nbins; ++i)
            h.normalized_g2[i] =
                static_cast<double>(h.coincidences[i]) / expected;
    return h;
}

G2Zero g2_at_zero(const CorrelationHistogram& h, int averaging_bins) {
    if (averaging_bins < 1 || averaging_bins % 2 == 0)
        throw DomainError("averaging_bins must be odd and >= 1");
    if (static_cast<std::size_t>(averaging_bins) > h.bins())
        throw DomainError("averaging window exceeds the histogram");
    const double expected = h.expected_per_bin();
    if (!(expected > 0))
        throw UndefinedNormalizationError(
            "histogram has zero expected coincidences");

    const std::size_t center = h.center_bin();
    const std::size_t half = static_cast<std::size_t>(averaging_bins) / 2;
    std::uint64_t raw = 0;
    for (std::size_t i = center - half; i <= center + half; ++i)
        raw += h.coincidences[i];

    const double denom = expected * static_cast<double>(averaging_bins);
    G2Zero g;
    g.value = static_cast<double>(raw) / denom;
    g.sigma = raw > 0 ? std::sqrt(static_cast<double>(raw)) / denom : 1.0 / denom;
    return g;
}

bool is_single_emitter(const G2Zero& g) {
    if (g.sigma < 0) throw DomainError("uncertainty must be >= 0");
    return g.value + g.sigma < 0.5;
}

}  // namespace photonkit::correlator
