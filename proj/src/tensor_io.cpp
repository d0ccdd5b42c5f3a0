#include "boundarykit/tensor_io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <vector>

#include "boundarykit/errors.hpp"

namespace bk {

namespace {

constexpr char kMagic[4] = {'B', 'W', 'T', 'F'};
constexpr std::uint32_t kVersion = 1;

void put_u32le(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(std::uint8_t(v & 0xff));
    out.push_back(std::uint8_t((v >> 8) & 0xff));
    out.push_back(std::uint8_t((v >> 16) & 0xff));
    out.push_back(std::uint8_t((v >> 24) & 0xff));
}

std::uint32_t get_u32le(const std::uint8_t* p) {
    return std::uint32_t(p[0]) | (std::uint32_t(p[1]) << 8) | (std::uint32_t(p[2]) << 16) |
           (std::uint32_t(p[3]) << 24);
}

[[noreturn]] void fail(const std::string& path, std::size_t offset, const std::string& what) {
    throw DataError("BWTF '" + path + "': " + what + " at byte " + std::to_string(offset));
}

void write_file(const std::string& path, const std::uint32_t dims[3],
                const float* values, std::size_t count) {
    std::vector<std::uint8_t> bytes;
    bytes.reserve(4 + 4 + 1 + 12 + count * 4);
    bytes.insert(bytes.end(), kMagic, kMagic + 4);
    put_u32le(bytes, kVersion);
    bytes.push_back(3); // rank
    for (int i = 0; i < 3; ++i) put_u32le(bytes, dims[i]);
    for (std::size_t i = 0; i < count; ++i)
        put_u32le(bytes, std::bit_cast<std::uint32_t>(values[i]));

    // Write to a temporary and rename so readers never see partial files.
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw DataError("BWTF '" + path + "': cannot open for writing");
        out.write(reinterpret_cast<const char*>(bytes.data()),
                  std::streamsize(bytes.size()));
        if (!out) {
            out.close();
            std::remove(tmp.c_str());
            throw DataError("BWTF '" + path + "': write failed");
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::remove(tmp.c_str());
        throw DataError("BWTF '" + path + "': rename failed: " + ec.message());
    }
}

struct RawTensor {
    std::uint32_t dims[3];
    std::vector<float> values;
};

RawTensor read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw DataError("BWTF '" + path + "': cannot open file");
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());

    std::size_t off = 0;
    if (bytes.size() < 4 || !std::equal(kMagic, kMagic + 4, bytes.data()))
        fail(path, 0, "bad magic, expected \"BWTF\"");
    off = 4;
    if (bytes.size() < off + 4) fail(path, off, "truncated header");
    std::uint32_t version = get_u32le(bytes.data() + off);
    if (version != kVersion)
        fail(path, off, "unsupported format version " + std::to_string(version));
    off += 4;
    if (bytes.size() < off + 1) fail(path, off, "truncated header");
    int rank = bytes[off];
    if (rank != 3)
        fail(path, off, "unsupported rank " + std::to_string(rank) + ", expected 3");
    off += 1;

    RawTensor t;
    std::size_t count = 1;
    for (int i = 0; i < 3; ++i) {
        if (bytes.size() < off + 4) fail(path, off, "truncated dims");
        t.dims[i] = get_u32le(bytes.data() + off);
        if (t.dims[i] == 0) fail(path, off, "zero-sized dimension");
        if (t.dims[i] > (1u << 20)) fail(path, off, "dimension too large");
        off += 4;
        count *= t.dims[i];
    }
    if (count > (std::size_t(1) << 31))
        fail(path, off, "tensor too large");
    if (bytes.size() < off + count * 4)
        fail(path, off, "truncated payload, expected " + std::to_string(count * 4) +
                            " bytes, have " + std::to_string(bytes.size() - off));
    if (bytes.size() > off + count * 4)
        fail(path, off + count * 4, "trailing bytes after payload");

    t.values.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        float v = std::bit_cast<float>(get_u32le(bytes.data() + off));
        if (!std::isfinite(v)) fail(path, off, "non-finite value");
        t.values[i] = v;
        off += 4;
    }
    return t;
}

} // namespace

void write_tensor(const FeatureMap& value, const std::string& path) {
    value.validate();
    const std::uint32_t dims[3] = {std::uint32_t(value.channels), std::uint32_t(value.height),
                                   std::uint32_t(value.width)};
    write_file(path, dims, value.data.data(), value.data.size());
}

void write_tensor(const DisplacementField& value, const std::string& path) {
    value.validate();
    const std::uint32_t dims[3] = {2u, std::uint32_t(value.height), std::uint32_t(value.width)};
    std::vector<float> packed;
    packed.reserve(value.pixel_count() * 2);
    packed.insert(packed.end(), value.dx.begin(), value.dx.end());
    packed.insert(packed.end(), value.dy.begin(), value.dy.end());
    write_file(path, dims, packed.data(), packed.size());
}

FeatureMap read_feature_map(const std::string& path) {
    RawTensor t = read_file(path);
    FeatureMap m(int(t.dims[0]), int(t.dims[1]), int(t.dims[2]));
    m.data = std::move(t.values);
    return m;
}

DisplacementField read_displacement_field(const std::string& path) {
    RawTensor t = read_file(path);
    if (t.dims[0] != 2)
        throw DataError("BWTF '" + path + "': displacement field needs 2 channels, file has " +
                        std::to_string(t.dims[0]));
    DisplacementField d(int(t.dims[1]), int(t.dims[2]));
    const std::size_t n = d.pixel_count();
    std::copy(t.values.begin(), t.values.begin() + n, d.dx.begin());
    std::copy(t.values.begin() + n, t.values.end(), d.dy.begin());
    return d;
}

} // namespace bk
