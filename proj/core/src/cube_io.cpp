#include "rrfnn/cube_io.hpp"

#include <cmath>
#include <limits>

#include "rrfnn/byte_io.hpp"
#include "rrfnn/errors.hpp"

namespace rrfnn {

namespace {

constexpr std::string_view kCubeMagic = "HSCUBE1";
constexpr std::string_view kLabelMagic = "HSLBL1";
constexpr std::uint8_t kLabelDtype = 2;

struct Header {
    std::size_t height = 0;
    std::size_t width = 0;
    std::size_t bands = 0;
    std::uint8_t dtype = 0;
};

Header read_header(byte_io::Reader& r) {
    Header h;
    const std::size_t dims_at = r.offset();
    h.height = r.get<std::uint32_t>("height");
    h.width = r.get<std::uint32_t>("width");
    h.bands = r.get<std::uint32_t>("band count");
    if (h.height == 0 || h.width == 0 || h.bands == 0) throw FormatError("zero dimension in header", dims_at);
    h.dtype = r.get<std::uint8_t>("dtype tag");
    return h;
}

void write_header(byte_io::Writer& w, std::string_view magic, std::size_t height, std::size_t width,
                  std::size_t bands, std::uint8_t dtype) {
    constexpr auto kMax = std::numeric_limits<std::uint32_t>::max();
    if (height > kMax || width > kMax || bands > kMax) throw InvalidArgument("dimension exceeds u32 range");
    w.bytes(magic);
    w.put(static_cast<std::uint32_t>(height));
    w.put(static_cast<std::uint32_t>(width));
    w.put(static_cast<std::uint32_t>(bands));
    w.put(dtype);
}

template <class T>
std::vector<double> read_values(byte_io::Reader& r, std::size_t count) {
    r.expect_payload(count * sizeof(T));
    std::vector<double> values(count);
    for (double& v : values) {
        const std::size_t at = r.offset();
        v = static_cast<double>(r.get<T>("cube value"));
        if (!std::isfinite(v)) throw FormatError("non-finite cube value", at);
    }
    return values;
}

}  // namespace

HyperCube load_cube(const std::filesystem::path& path) {
    auto r = byte_io::Reader::open(path);
    r.expect_magic(kCubeMagic, "HSCUBE1 cube");
    const std::size_t dtype_at = r.offset() + 12;
    const Header h = read_header(r);
    const std::size_t count = h.height * h.width * h.bands;
    switch (h.dtype) {
        case static_cast<std::uint8_t>(CubeDtype::float32):
            return HyperCube(h.height, h.width, h.bands, read_values<float>(r, count));
        case static_cast<std::uint8_t>(CubeDtype::float64):
            return HyperCube(h.height, h.width, h.bands, read_values<double>(r, count));
        default:
            throw FormatError("unknown cube dtype tag " + std::to_string(h.dtype), dtype_at);
    }
}

void save_cube(const HyperCube& cube, const std::filesystem::path& path, CubeDtype dtype) {
    byte_io::Writer w;
    write_header(w, kCubeMagic, cube.height(), cube.width(), cube.bands(), static_cast<std::uint8_t>(dtype));
    if (dtype == CubeDtype::float32) {
        for (double v : cube.values()) w.put(static_cast<float>(v));
    } else {
        for (double v : cube.values()) w.put(v);
    }
    w.save(path);
}

LabelMap load_labels(const std::filesystem::path& path) {
    auto r = byte_io::Reader::open(path);
    r.expect_magic(kLabelMagic, "HSLBL1 label");
    const std::size_t bands_at = r.offset() + 8;
    const Header h = read_header(r);
    if (h.bands != 1) throw FormatError("label files carry exactly one band", bands_at);
    if (h.dtype != kLabelDtype) throw FormatError("label dtype tag must be 2 (uint8)", bands_at + 4);
    r.expect_payload(h.height * h.width);
    std::vector<std::uint8_t> labels(h.height * h.width);
    for (auto& l : labels) l = r.get<std::uint8_t>("label");
    return LabelMap(h.height, h.width, std::move(labels));
}

void save_labels(const LabelMap& labels, const std::filesystem::path& path) {
    byte_io::Writer w;
    write_header(w, kLabelMagic, labels.height(), labels.width(), 1, kLabelDtype);
    for (std::uint8_t l : labels.values()) w.put(l);
    w.save(path);
}

HyperCube load_raw_bsq_float32(const std::filesystem::path& path, std::size_t height, std::size_t width,
                               std::size_t bands) {
    if (height == 0 || width == 0 || bands == 0) throw InvalidArgument("raw cube dimensions must be positive");
    auto r = byte_io::Reader::open(path);
    return HyperCube(height, width, bands, read_values<float>(r, height * width * bands));
}

LabelMap load_raw_labels_u8(const std::filesystem::path& path, std::size_t height, std::size_t width) {
    if (height == 0 || width == 0) throw InvalidArgument("raw label dimensions must be positive");
    auto r = byte_io::Reader::open(path);
    r.expect_payload(height * width);
    std::vector<std::uint8_t> labels(height * width);
    for (auto& l : labels) l = r.get<std::uint8_t>("label");
    return LabelMap(height, width, std::move(labels));
}

}  // namespace rrfnn
