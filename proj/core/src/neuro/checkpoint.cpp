#include "msdc/neuro/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <zlib.h>

#include "json.hpp"
#include "msdc/error.hpp"
#include "msdc/msi_io.hpp"

namespace msdc::nn {

using nlohmann::json;

namespace {

constexpr char kMagic[8] = {'M', 'S', 'D', 'C', 'C', 'K', 'P', 'T'};

static_assert(std::endian::native == std::endian::little,
              "checkpoint encoding assumes a little-endian host");

std::uint32_t crc_of(const char* data, std::size_t n)
{
    return std::uint32_t(crc32(0L, reinterpret_cast<const Bytef*>(data), uInt(n)));
}

struct Parsed {
    json header;
    std::size_t blob_start = 0;
};

Parsed parse_header(const std::string& bytes)
{
    if (bytes.size() < 16 || std::memcmp(bytes.data(), kMagic, 8) != 0)
        throw IntegrityError("checkpoint: bad magic or truncated at byte offset 0");
    std::uint64_t len = 0;
    std::memcpy(&len, bytes.data() + 8, 8);
    if (len > bytes.size() - 16)
        throw IntegrityError("checkpoint: header truncated at byte offset 16 (declares " +
                             std::to_string(len) + " bytes)");
    Parsed p;
    try {
        p.header = json::parse(bytes.begin() + 16, bytes.begin() + 16 + std::ptrdiff_t(len));
    } catch (const json::exception& e) {
        throw IntegrityError(std::string("checkpoint: header corrupt at byte offset 16: ") +
                             e.what());
    }
    p.blob_start = 16 + std::size_t(len);
    return p;
}

}  // namespace

template <typename T>
std::string encode_checkpoint(const CheckpointInfo& info, const std::vector<Parameter<T>*>& params)
{
    std::string blob;
    json entries = json::array();
    for (const Parameter<T>* p : params) {
        const Tensor<T>& v = p->value();
        std::string chunk(v.numel() * 4, '\0');
        for (std::size_t i = 0; i < v.numel(); ++i) {
            const float f = float(v[i]);
            std::memcpy(chunk.data() + 4 * i, &f, 4);
        }
        entries.push_back({{"name", p->name},
                           {"shape", v.shape()},
                           {"offset", blob.size()},
                           {"bytes", chunk.size()},
                           {"crc32", crc_of(chunk.data(), chunk.size())}});
        blob += chunk;
    }
    json header = {{"arch", info.arch_json.empty() ? json::object() : json::parse(info.arch_json)},
                   {"step", info.step},
                   {"blob_bytes", blob.size()},
                   {"params", entries}};
    const std::string text = header.dump();
    std::string out(kMagic, 8);
    const std::uint64_t len = text.size();
    out.append(reinterpret_cast<const char*>(&len), 8);
    out += text;
    out += blob;
    return out;
}

CheckpointInfo peek_checkpoint(const std::string& bytes)
{
    const Parsed p = parse_header(bytes);
    try {
        return {p.header.at("arch").dump(), p.header.at("step").get<std::int64_t>()};
    } catch (const json::exception& e) {
        throw IntegrityError(std::string("checkpoint: header corrupt at byte offset 16: ") +
                             e.what());
    }
}

template <typename T>
CheckpointInfo decode_checkpoint(const std::string& bytes, const std::vector<Parameter<T>*>& params)
{
    const Parsed p = parse_header(bytes);
    CheckpointInfo info = peek_checkpoint(bytes);
    const json& entries = p.header.at("params");
    const std::size_t blob_bytes = p.header.value("blob_bytes", std::size_t(0));
    if (bytes.size() - p.blob_start != blob_bytes)
        throw IntegrityError("checkpoint: blob truncated at byte offset " +
                             std::to_string(bytes.size()) + " (expected " +
                             std::to_string(p.blob_start + blob_bytes) + " bytes)");
    if (entries.size() != params.size())
        throw ConfigError("checkpoint: holds " + std::to_string(entries.size()) +
                          " parameters, model has " + std::to_string(params.size()));

    // Validate everything before touching the model.
    for (std::size_t k = 0; k < params.size(); ++k) {
        const json& e = entries[k];
        const Tensor<T>& v = params[k]->value();
        const auto name = e.at("name").get<std::string>();
        if (name != params[k]->name || e.at("shape").get<std::vector<int>>() != v.shape())
            throw ConfigError("checkpoint: parameter '" + name + "' does not match model '" +
                              params[k]->name + "' " + v.shape_string());
        const std::size_t off = e.at("offset").get<std::size_t>();
        const std::size_t len = e.at("bytes").get<std::size_t>();
        if (len != v.numel() * 4 || off + len > blob_bytes)
            throw IntegrityError("checkpoint: parameter '" + name +
                                 "' extends past blob at byte offset " +
                                 std::to_string(p.blob_start + off));
        if (crc_of(bytes.data() + p.blob_start + off, len) != e.at("crc32").get<std::uint32_t>())
            throw IntegrityError("checkpoint: blob corrupt at byte offset " +
                                 std::to_string(p.blob_start + off) + " (parameter '" + name +
                                 "')");
    }
    for (std::size_t k = 0; k < params.size(); ++k) {
        Tensor<T>& v = params[k]->value();
        const char* src = bytes.data() + p.blob_start + entries[k].at("offset").get<std::size_t>();
        for (std::size_t i = 0; i < v.numel(); ++i) {
            float f;
            std::memcpy(&f, src + 4 * i, 4);
            v[i] = T(f);
        }
    }
    return info;
}

template <typename T>
void save_checkpoint(const std::filesystem::path& path, const CheckpointInfo& info,
                     const std::vector<Parameter<T>*>& params)
{
    write_file_atomic(path, encode_checkpoint(info, params));
}

template <typename T>
CheckpointInfo load_checkpoint(const std::filesystem::path& path,
                               const std::vector<Parameter<T>*>& params)
{
    return decode_checkpoint(read_file(path), params);
}

#define MSDC_INSTANTIATE(T)                                                                   \
    template std::string encode_checkpoint<T>(const CheckpointInfo&,                          \
                                              const std::vector<Parameter<T>*>&);             \
    template CheckpointInfo decode_checkpoint<T>(const std::string&,                          \
                                                 const std::vector<Parameter<T>*>&);          \
    template void save_checkpoint<T>(const std::filesystem::path&, const CheckpointInfo&,     \
                                     const std::vector<Parameter<T>*>&);                      \
    template CheckpointInfo load_checkpoint<T>(const std::filesystem::path&,                  \
                                               const std::vector<Parameter<T>*>&);

MSDC_INSTANTIATE(float)
MSDC_INSTANTIATE(double)
#undef MSDC_INSTANTIATE

}  // namespace msdc::nn
