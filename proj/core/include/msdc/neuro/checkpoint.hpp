#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "msdc/neuro/optim.hpp"

namespace msdc::nn {

struct CheckpointInfo {
    std::string arch_json;  // architecture config as serialized JSON text
    std::int64_t step = 0;
};

/// Layout: magic "MSDCCKPT", u64 LE header length, JSON header
/// {arch, step, params: [{name, shape, offset, bytes, crc32}]}, then the
/// little-endian float32 values of every parameter in declaration order.
template <typename T>
std::string encode_checkpoint(const CheckpointInfo& info, const std::vector<Parameter<T>*>& params);

/// Restores values into params (names and shapes must match). Corruption is
/// reported as IntegrityError naming the absolute byte offset.
template <typename T>
CheckpointInfo decode_checkpoint(const std::string& bytes, const std::vector<Parameter<T>*>& params);

/// Header only, without touching any parameters.
CheckpointInfo peek_checkpoint(const std::string& bytes);

template <typename T>
void save_checkpoint(const std::filesystem::path& path, const CheckpointInfo& info,
                     const std::vector<Parameter<T>*>& params);

template <typename T>
CheckpointInfo load_checkpoint(const std::filesystem::path& path,
                               const std::vector<Parameter<T>*>& params);

}  // namespace msdc::nn
