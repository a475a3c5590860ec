#include "msdc/msi_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "msdc/error.hpp"

namespace msdc {

namespace {

static_assert(std::endian::native == std::endian::little,
              "MSI encoding assumes a little-endian host");

void put_u32(std::string& out, std::uint32_t v)
{
    for (int i = 0; i < 4; ++i)
        out.push_back(char((v >> (8 * i)) & 0xffu));
}

std::uint32_t get_u32(const std::string& in, std::size_t offset)
{
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
        v |= std::uint32_t(static_cast<unsigned char>(in[offset + std::size_t(i)])) << (8 * i);
    return v;
}

}  // namespace

std::string encode_msi(const SpectralImage& img)
{
    std::string out;
    out.reserve(kMsiHeaderBytes + img.size() * sizeof(float));
    out.append(kMsiMagic, 4);
    put_u32(out, kMsiVersion);
    put_u32(out, std::uint32_t(img.height()));
    put_u32(out, std::uint32_t(img.width()));
    put_u32(out, std::uint32_t(img.channels()));
    const auto data = img.data();
    out.append(reinterpret_cast<const char*>(data.data()), data.size() * sizeof(float));
    return out;
}

SpectralImage decode_msi(const std::string& bytes)
{
    if (bytes.size() < kMsiHeaderBytes)
        throw IntegrityError("MSI header truncated at byte offset " + std::to_string(bytes.size()));
    if (std::memcmp(bytes.data(), kMsiMagic, 4) != 0)
        throw IntegrityError("MSI magic mismatch at byte offset 0");
    if (get_u32(bytes, 4) != kMsiVersion)
        throw IntegrityError("unsupported MSI version " + std::to_string(get_u32(bytes, 4)) +
                             " at byte offset 4");
    const std::uint32_t h = get_u32(bytes, 8);
    const std::uint32_t w = get_u32(bytes, 12);
    const std::uint32_t c = get_u32(bytes, 16);
    const std::uint64_t count = std::uint64_t(h) * w * c;
    const std::uint64_t expected = kMsiHeaderBytes + count * sizeof(float);
    if (bytes.size() != expected)
        throw IntegrityError("MSI payload size mismatch: expected " + std::to_string(expected) +
                             " bytes, found " + std::to_string(bytes.size()) +
                             " (data ends at byte offset " + std::to_string(bytes.size()) + ")");
    std::vector<float> data(count);
    std::memcpy(data.data(), bytes.data() + kMsiHeaderBytes, count * sizeof(float));
    return SpectralImage(int(h), int(w), int(c), std::move(data));
}

void write_file_atomic(const std::filesystem::path& path, const std::string& bytes)
{
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw IoError("cannot open " + tmp.string() + " for writing");
        out.write(bytes.data(), std::streamsize(bytes.size()));
        out.flush();
        if (!out)
            throw IoError("write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec)
        throw IoError("cannot rename " + tmp.string() + ": " + ec.message());
}

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_msi(const std::filesystem::path& path, const SpectralImage& img)
{
    write_file_atomic(path, encode_msi(img));
}

SpectralImage read_msi(const std::filesystem::path& path)
{
    try {
        return decode_msi(read_file(path));
    } catch (const IntegrityError& e) {
        throw IntegrityError(path.string() + ": " + e.what());
    }
}

std::filesystem::path sidecar_path(const std::filesystem::path& msi_path)
{
    auto p = msi_path;
    p.replace_extension(".json");
    return p;
}

void write_sidecar(const std::filesystem::path& msi_path, const MsiSidecar& sidecar)
{
    nlohmann::json j;
    j["pattern"] = sidecar.pattern;
    j["white_level"] = sidecar.white_level;
    j["notes"] = sidecar.notes;
    write_file_atomic(sidecar_path(msi_path), j.dump(2) + "\n");
}

std::optional<MsiSidecar> read_sidecar(const std::filesystem::path& msi_path)
{
    const auto path = sidecar_path(msi_path);
    if (!std::filesystem::exists(path))
        return std::nullopt;
    try {
        const auto j = nlohmann::json::parse(read_file(path));
        MsiSidecar s;
        s.pattern = j.value("pattern", std::string{});
        s.white_level = j.value("white_level", 1.0);
        s.notes = j.value("notes", std::string{});
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw IntegrityError(path.string() + ": " + e.what());
    }
}

}  // namespace msdc
