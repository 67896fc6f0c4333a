#include "jdac/io.hpp"

#include <zlib.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <vector>

#include "jdac/error.hpp"

namespace jdac {

namespace {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <typename T>
T byteswap(T v) {
    std::array<unsigned char, sizeof(T)> b;
    std::memcpy(b.data(), &v, sizeof(T));
    std::reverse(b.begin(), b.end());
    std::memcpy(&v, b.data(), sizeof(T));
    return v;
}

template <typename T>
void put_le(std::vector<unsigned char>& out, T v) {
    if constexpr (std::endian::native == std::endian::big) v = byteswap(v);
    const auto* p = reinterpret_cast<const unsigned char*>(&v);
    out.insert(out.end(), p, p + sizeof(T));
}

template <typename T>
T get(const unsigned char* p, bool swap) {
    T v;
    std::memcpy(&v, p, sizeof(T));
    return swap ? byteswap(v) : v;
}

template <typename T>
T get_le(const unsigned char* p) {
    return get<T>(p, std::endian::native == std::endian::big);
}

std::vector<unsigned char> slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoFailure("cannot open '" + path.string() + "' for reading");
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

} // namespace

void write_rvol(const Volume& v, const std::filesystem::path& path) {
    std::vector<unsigned char> buf;
    buf.reserve(kRvolHeaderBytes + 4 * v.size());
    for (char c : {'R', 'V', 'O', 'L'}) buf.push_back(static_cast<unsigned char>(c));
    put_le<std::uint32_t>(buf, kRvolVersion);
    for (std::size_t a = 0; a < 3; ++a) put_le<std::uint32_t>(buf, static_cast<std::uint32_t>(v.dims()[a]));
    for (std::size_t a = 0; a < 3; ++a) put_le<float>(buf, static_cast<float>(v.spacing()[a]));
    buf.push_back(v.residual() ? 1 : 0);
    buf.insert(buf.end(), 3, 0);
    for (double x : v.data()) put_le<float>(buf, static_cast<float>(x));

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoFailure("cannot open '" + path.string() + "' for writing");
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!out) throw IoFailure("short write to '" + path.string() + "'");
}

Volume read_rvol(const std::filesystem::path& path) {
    const std::vector<unsigned char> buf = slurp(path);
    if (buf.size() < 4 || std::memcmp(buf.data(), "RVOL", 4) != 0) {
        if (buf.size() < 4) throw TruncatedPayload("'" + path.string() + "' is shorter than the magic");
        throw BadMagic("'" + path.string() + "' is not an rvol file");
    }
    if (buf.size() < kRvolHeaderBytes) throw TruncatedPayload("'" + path.string() + "' has a truncated header");
    const auto version = get_le<std::uint32_t>(buf.data() + 4);
    if (version != kRvolVersion) throw VersionUnsupported("rvol version " + std::to_string(version));

    const Dims dims{get_le<std::uint32_t>(buf.data() + 8), get_le<std::uint32_t>(buf.data() + 12),
                    get_le<std::uint32_t>(buf.data() + 16)};
    const Spacing spacing{get_le<float>(buf.data() + 20), get_le<float>(buf.data() + 24),
                          get_le<float>(buf.data() + 28)};
    if (dims.voxels() == 0) throw MalformedHeader("rvol dims must be positive");
    if (!(spacing.x > 0 && spacing.y > 0 && spacing.z > 0)) throw MalformedHeader("rvol spacing must be positive");
    const bool residual = buf[32] != 0;

    const std::size_t expected = kRvolHeaderBytes + 4 * dims.voxels();
    if (buf.size() < expected) {
        throw TruncatedPayload("'" + path.string() + "' declares " + to_string(dims) + " but holds " +
                               std::to_string((buf.size() - kRvolHeaderBytes) / 4) + " voxels");
    }
    if (buf.size() > expected) throw MalformedHeader("'" + path.string() + "' has trailing bytes");

    std::vector<double> data(dims.voxels());
    const unsigned char* p = buf.data() + kRvolHeaderBytes;
    for (std::size_t n = 0; n < data.size(); ++n) data[n] = get_le<float>(p + 4 * n);
    Volume v(dims, spacing, std::move(data));
    v.set_residual(residual);
    return v;
}

// ---------------------------------------------------------------------------
// NIfTI-1

namespace {

constexpr int kNiftiHeaderBytes = 348;
constexpr short kDtInt16 = 4;
constexpr short kDtFloat32 = 16;

std::vector<unsigned char> slurp_maybe_gzip(const std::filesystem::path& path) {
    gzFile f = gzopen(path.string().c_str(), "rb");
    if (f == nullptr) throw IoFailure("cannot open '" + path.string() + "' for reading");
    std::vector<unsigned char> out;
    std::array<unsigned char, 1 << 16> chunk;
    while (true) {
        const int got = gzread(f, chunk.data(), static_cast<unsigned>(chunk.size()));
        if (got < 0) {
            gzclose(f);
            throw IoFailure("decompression failed for '" + path.string() + "'");
        }
        if (got == 0) break;
        out.insert(out.end(), chunk.begin(), chunk.begin() + got);
    }
    gzclose(f);
    return out;
}

} // namespace

Volume read_nifti(const std::filesystem::path& path) {
    const std::vector<unsigned char> buf = slurp_maybe_gzip(path);
    if (buf.size() < static_cast<std::size_t>(kNiftiHeaderBytes)) throw MalformedHeader("file shorter than a NIfTI-1 header");
    const unsigned char* h = buf.data();

    bool swap = false;
    if (get<std::int32_t>(h, false) != kNiftiHeaderBytes) {
        if (get<std::int32_t>(h, true) != kNiftiHeaderBytes) throw MalformedHeader("sizeof_hdr is not 348");
        swap = true;
    }
    if (std::memcmp(h + 344, "n+1\0", 4) != 0) throw MalformedHeader("only single-file NIfTI-1 ('n+1') is supported");

    std::array<std::int16_t, 8> dim{};
    for (std::size_t n = 0; n < 8; ++n) dim[n] = get<std::int16_t>(h + 40 + 2 * n, swap);
    if (dim[0] < 3 || dim[0] > 7) throw NotThreeDimensional("dim[0] = " + std::to_string(dim[0]));
    for (int n = 4; n <= dim[0]; ++n) {
        if (dim[static_cast<std::size_t>(n)] > 1) throw NotThreeDimensional("dim[" + std::to_string(n) + "] = " + std::to_string(dim[static_cast<std::size_t>(n)]));
    }
    if (dim[1] < 1 || dim[2] < 1 || dim[3] < 1) throw MalformedHeader("non-positive spatial dims");

    const auto datatype = get<std::int16_t>(h + 70, swap);
    std::size_t bytes = 0;
    if (datatype == kDtFloat32) {
        bytes = 4;
    } else if (datatype == kDtInt16) {
        bytes = 2;
    } else {
        throw UnsupportedDatatype("NIfTI datatype code " + std::to_string(datatype));
    }

    Spacing spacing{get<float>(h + 80, swap), get<float>(h + 84, swap), get<float>(h + 88, swap)};
    // Some writers leave pixdim at zero; fall back to unit spacing.
    auto fix = [](double s) { return s > 0.0 ? s : 1.0; };
    spacing = {fix(std::abs(spacing.x)), fix(std::abs(spacing.y)), fix(std::abs(spacing.z))};

    const float vox_offset = get<float>(h + 108, swap);
    const float slope = get<float>(h + 112, swap);
    const float inter = get<float>(h + 116, swap);
    if (!(vox_offset >= static_cast<float>(kNiftiHeaderBytes))) throw MalformedHeader("vox_offset < 348");

    const Dims dims{static_cast<std::size_t>(dim[1]), static_cast<std::size_t>(dim[2]),
                    static_cast<std::size_t>(dim[3])};
    const auto offset = static_cast<std::size_t>(vox_offset);
    if (buf.size() < offset + bytes * dims.voxels()) throw TruncatedPayload("NIfTI payload shorter than dims imply");

    const bool scaled = slope != 0.0f && !(slope == 1.0f && inter == 0.0f);
    std::vector<double> data(dims.voxels());
    const unsigned char* p = buf.data() + offset;
    for (std::size_t n = 0; n < data.size(); ++n) {
        double raw = datatype == kDtFloat32 ? static_cast<double>(get<float>(p + 4 * n, swap))
                                            : static_cast<double>(get<std::int16_t>(p + 2 * n, swap));
        data[n] = scaled ? raw * slope + inter : raw;
    }
    if (datatype == kDtInt16) {
        const auto [lo, hi] = std::minmax_element(data.begin(), data.end());
        const double a = *lo;
        const double range = *hi - *lo;
        for (double& x : data) x = range > 0.0 ? (x - a) / range : 0.0;
    }
    return Volume(dims, spacing, std::move(data));
}

Volume read_volume(const std::filesystem::path& path) {
    const std::string name = path.filename().string();
    auto ends_with = [&name](std::string_view suffix) {
        return name.size() >= suffix.size() && name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0;
    };
    if (ends_with(".nii") || ends_with(".nii.gz")) return read_nifti(path);
    return read_rvol(path);
}

} // namespace jdac
