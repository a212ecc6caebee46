#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "photonkit/types.hpp"

namespace photonkit::io {

// TTG1 fixed-width binary time-tag format:
//   16-byte header: magic "TTG1", u32 channel_count, u64 record_count (LE)
//   records: u64 timestamp_ps, u8 channel, 7 pad bytes
void write_time_tags(const std::filesystem::path& path, const TimeTagStream& s);
TimeTagStream read_time_tags(const std::filesystem::path& path);

// Two-column CSVs with a one-line typed header, e.g. "spectrum,nm,counts".
void write_spectrum_csv(const std::filesystem::path& path, const SpectrumTrace& s);
SpectrumTrace read_spectrum_csv(const std::filesystem::path& path);

void write_polarization_csv(const std::filesystem::path& path,
                            const PolarizationScan& s);
PolarizationScan read_polarization_csv(const std::filesystem::path& path);

void write_saturation_csv(const std::filesystem::path& path,
                          const SaturationSeries& s);
SaturationSeries read_saturation_csv(const std::filesystem::path& path);

void write_decay_csv(const std::filesystem::path& path, const DecayHistogram& h);
DecayHistogram read_decay_csv(const std::filesystem::path& path);

struct BundleMetadata {
    std::string emitter_id;
    double temperature_K = 30.0;
    double layer_thickness_nm = 0.0;
    double axis_reference_deg = 0.0;
    double excitation_wavelength_nm = 532.0;
};

// One bundle per defect: a directory holding meta.json plus any subset of
// the measurement files.
struct MeasurementBundle {
    BundleMetadata meta;
    std::optional<TimeTagStream> stream;
    std::optional<DecayHistogram> decay;
    std::optional<PolarizationScan> polarization;
    std::optional<SaturationSeries> saturation;
    std::optional<SpectrumTrace> spectrum;

    bool has_any_measurement() const {
        return stream || decay || polarization || saturation || spectrum;
    }
};

void write_bundle(const std::filesystem::path& dir, const MeasurementBundle& b);
MeasurementBundle read_bundle(const std::filesystem::path& dir);

}  // namespace photonkit::io
