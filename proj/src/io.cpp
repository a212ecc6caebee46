#include "photonkit/io.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "photonkit/errors.hpp"

namespace photonkit::io {

namespace fs = std::filesystem;

namespace {

constexpr char kMagic[4] = {'T', 'T', 'G', '1'};

// write-temp-then-rename so partially written files never shadow good data
class AtomicFile {
public:
    AtomicFile(const fs::path& target, std::ios::openmode mode)
        : target_(target), tmp_(target.string() + ".tmp") {
        out_.open(tmp_, mode | std::ios::trunc);
        if (!out_) throw FormatError("cannot open for writing: " + tmp_.string());
    }
    std::ofstream& stream() { return out_; }
    void commit() {
        out_.close();
        if (!out_) throw FormatError("write failed: " + tmp_.string());
        fs::rename(tmp_, target_);
    }

private:
    fs::path target_, tmp_;
    std::ofstream out_;
};

template <typename T>
void put_le(std::ofstream& out, T v) {
    unsigned char buf[sizeof(T)];
    for (std::size_t i = 0; i < sizeof(T); ++i)
        buf[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    out.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <typename T>
T get_le(std::ifstream& in) {
    unsigned char buf[sizeof(T)];
    in.read(reinterpret_cast<char*>(buf), sizeof(T));
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i)
        v |= static_cast<T>(buf[i]) << (8 * i);
    return v;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, sep)) out.push_back(field);
    return out;
}

struct CsvBody {
    std::vector<std::string> header;
    std::vector<std::pair<double, double>> rows;
};

CsvBody read_csv(const fs::path& path, const std::string& kind,
                 const std::string& x_unit, const std::string& y_unit) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open: " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw FormatError("empty file: " + path.string());
    if (!line.empty() && line.back() == '\r') line.pop_back();
    CsvBody body;
    body.header = split(line, ',');
    if (body.header.size() < 3 || body.header[0] != kind)
        throw FormatError("expected a '" + kind + "' header in " + path.string());
    if (body.header[1] != x_unit || body.header[2] != y_unit)
        throw FormatError("unit mismatch in " + path.string() + ": got " +
                          body.header[1] + "," + body.header[2]);
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = split(line, ',');
        if (fields.size() != 2)
            throw FormatError(path.string() + ":" + std::to_string(lineno) +
                              ": expected two columns");
        try {
            body.rows.emplace_back(std::stod(fields[0]), std::stod(fields[1]));
        } catch (const std::exception&) {
            throw FormatError(path.string() + ":" + std::to_string(lineno) +
                              ": bad number");
        }
    }
    return body;
}

}  // namespace

void write_time_tags(const fs::path& path, const TimeTagStream& s) {
    AtomicFile file(path, std::ios::binary);
    auto& out = file.stream();
    out.write(kMagic, 4);
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(s.channel_count()));
    put_le<std::uint64_t>(out, s.size());
    for (const auto& tag : s.tags()) {
        put_le<std::uint64_t>(out, static_cast<std::uint64_t>(tag.time_ps));
        char rec[8] = {};
        rec[0] = static_cast<char>(tag.channel);
        out.write(rec, 8);
    }
    file.commit();
}

TimeTagStream read_time_tags(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open: " + path.string());
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0)
        throw FormatError("bad magic in " + path.string());
    const auto channel_count = get_le<std::uint32_t>(in);
    const auto record_count = get_le<std::uint64_t>(in);
    if (!in || channel_count == 0 || channel_count > 255)
        throw FormatError("bad header in " + path.string());

    std::vector<TimeTag> tags;
    tags.reserve(record_count);
    std::int64_t prev = 0;
    for (std::uint64_t i = 0; i < record_count; ++i) {
        const auto t = static_cast<std::int64_t>(get_le<std::uint64_t>(in));
        char rec[8];
        in.read(rec, 8);
        if (!in) throw FormatError("truncated record in " + path.string());
        if (t < prev)
            throw IntegrityError("non-monotonic timestamps in " + path.string());
        prev = t;
        tags.push_back({t, static_cast<std::uint8_t>(rec[0])});
    }
    const std::int64_t duration = tags.empty() ? 0 : tags.back().time_ps;
    return TimeTagStream(std::move(tags), duration,
                         static_cast<int>(channel_count));
}

void write_spectrum_csv(const fs::path& path, const SpectrumTrace& s) {
    AtomicFile file(path, std::ios::out);
    file.stream() << "spectrum,nm,counts\n";
    for (const auto& p : s.samples())
        file.stream() << fmt(p.wavelength_nm) << "," << fmt(p.intensity) << "\n";
    file.commit();
}

SpectrumTrace read_spectrum_csv(const fs::path& path) {
    auto body = read_csv(path, "spectrum", "nm", "counts");
    std::vector<SpectrumSample> samples;
    samples.reserve(body.rows.size());
    for (auto [x, y] : body.rows) samples.push_back({x, y});
    return SpectrumTrace(std::move(samples));
}

void write_polarization_csv(const fs::path& path, const PolarizationScan& s) {
    AtomicFile file(path, std::ios::out);
    file.stream() << "polarization,deg,cps\n";
    for (const auto& p : s.points())
        file.stream() << fmt(p.angle_deg) << "," << fmt(p.intensity) << "\n";
    file.commit();
}

PolarizationScan read_polarization_csv(const fs::path& path) {
    auto body = read_csv(path, "polarization", "deg", "cps");
    std::vector<PolarizationPoint> pts;
    pts.reserve(body.rows.size());
    for (auto [x, y] : body.rows) pts.push_back({x, y});
    return PolarizationScan(std::move(pts));
}

void write_saturation_csv(const fs::path& path, const SaturationSeries& s) {
    AtomicFile file(path, std::ios::out);
    file.stream() << "saturation,uW,kcps\n";
    for (const auto& p : s.points())
        file.stream() << fmt(p.power_uW) << "," << fmt(p.intensity_kcps) << "\n";
    file.commit();
}

SaturationSeries read_saturation_csv(const fs::path& path) {
    auto body = read_csv(path, "saturation", "uW", "kcps");
    std::vector<SaturationPoint> pts;
    pts.reserve(body.rows.size());
    for (auto [x, y] : body.rows) pts.push_back({x, y});
    return SaturationSeries(std::move(pts));
}

void write_decay_csv(const fs::path& path, const DecayHistogram& h) {
    AtomicFile file(path, std::ios::out);
    file.stream() << "decay,ns,counts,period_ns=" << fmt(h.pulse_period_ns())
                  << "\n";
    for (std::size_t i = 0; i < h.counts().size(); ++i)
        file.stream() << fmt(h.bin_center_ns(i)) << "," << h.counts()[i] << "\n";
    file.commit();
}

DecayHistogram read_decay_csv(const fs::path& path) {
    auto body = read_csv(path, "decay", "ns", "counts");
    if (body.header.size() < 4 || body.header[3].rfind("period_ns=", 0) != 0)
        throw FormatError("decay header is missing period_ns in " + path.string());
    double period;
    try {
        period = std::stod(body.header[3].substr(10));
    } catch (const std::exception&) {
        throw FormatError("bad period_ns in " + path.string());
    }
    if (body.rows.size() < 2)
        throw FormatError("decay file needs at least two bins");

    const double width = body.rows[1].first - body.rows[0].first;
    if (!(width > 0)) throw IntegrityError("bin centers must be increasing");
    std::vector<double> edges;
    std::vector<std::uint64_t> counts;
    edges.push_back(body.rows[0].first - width / 2);
    for (std::size_t i = 0; i < body.rows.size(); ++i) {
        if (i > 0 && std::abs(body.rows[i].first - body.rows[i - 1].first - width) >
                         1e-6 * width)
            throw IntegrityError("non-uniform decay bins in " + path.string());
        if (body.rows[i].second < 0)
            throw IntegrityError("negative count in " + path.string());
        edges.push_back(body.rows[i].first + width / 2);
        counts.push_back(static_cast<std::uint64_t>(std::llround(body.rows[i].second)));
    }
    return DecayHistogram(std::move(edges), std::move(counts), period);
}

void write_bundle(const fs::path& dir, const MeasurementBundle& b) {
    if (b.meta.emitter_id.empty())
        throw DomainError("bundle needs a nonempty emitter id");
    if (!b.has_any_measurement())
        throw DomainError("bundle needs at least one measurement");
    fs::create_directories(dir);

    nlohmann::json j;
    j["emitter_id"] = b.meta.emitter_id;
    j["temperature_K"] = b.meta.temperature_K;
    j["layer_thickness_nm"] = b.meta.layer_thickness_nm;
    j["axis_reference_deg"] = b.meta.axis_reference_deg;
    j["excitation_wavelength_nm"] = b.meta.excitation_wavelength_nm;
    {
        AtomicFile file(dir / "meta.json", std::ios::out);
        file.stream() << j.dump(2) << "\n";
        file.commit();
    }
    if (b.stream) write_time_tags(dir / "stream.ttg", *b.stream);
    if (b.decay) write_decay_csv(dir / "decay.csv", *b.decay);
    if (b.polarization)
        write_polarization_csv(dir / "polarization.csv", *b.polarization);
    if (b.saturation) write_saturation_csv(dir / "saturation.csv", *b.saturation);
    if (b.spectrum) write_spectrum_csv(dir / "spectrum.csv", *b.spectrum);
}

MeasurementBundle read_bundle(const fs::path& dir) {
    const fs::path meta_path = dir / "meta.json";
    std::ifstream in(meta_path);
    if (!in) throw FormatError("missing meta.json in " + dir.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("bad meta.json: " + std::string(e.what()));
    }

    MeasurementBundle b;
    b.meta.emitter_id = j.value("emitter_id", "");
    if (b.meta.emitter_id.empty())
        throw FormatError("meta.json is missing emitter_id");
    b.meta.temperature_K = j.value("temperature_K", 30.0);
    b.meta.layer_thickness_nm = j.value("layer_thickness_nm", 0.0);
    b.meta.axis_reference_deg = j.value("axis_reference_deg", 0.0);
    b.meta.excitation_wavelength_nm = j.value("excitation_wavelength_nm", 532.0);

    if (fs::exists(dir / "stream.ttg"))
        b.stream = read_time_tags(dir / "stream.ttg");
    if (fs::exists(dir / "decay.csv")) b.decay = read_decay_csv(dir / "decay.csv");
    if (fs::exists(dir / "polarization.csv"))
        b.polarization = read_polarization_csv(dir / "polarization.csv");
    if (fs::exists(dir / "saturation.csv"))
        b.saturation = read_saturation_csv(dir / "saturation.csv");
    if (fs::exists(dir / "spectrum.csv"))
        b.spectrum = read_spectrum_csv(dir / "spectrum.csv");

    if (!b.has_any_measurement())
        throw FormatError("bundle has no measurement files: " + dir.string());
    return b;
}

}  // namespace photonkit::io
