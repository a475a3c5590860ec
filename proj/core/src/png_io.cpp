#include "msdc/png_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <vector>

#include <png.h>

#include "msdc/error.hpp"

namespace msdc {

void write_png(const std::filesystem::path& path, const SpectralImage& img)
{
    if (img.channels() != 1 && img.channels() != 3)
        throw DimensionError("write_png: expects 1 or 3 channels, got " + img.shape_string());
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());

    auto tmp = path;
    tmp += ".tmp";
    std::unique_ptr<FILE, int (*)(FILE*)> file(std::fopen(tmp.c_str(), "wb"), &std::fclose);
    if (!file)
        throw IoError("cannot open " + tmp.string());

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, &info);
        throw IoError("libpng initialisation failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("libpng failed writing " + path.string());
    }
    png_init_io(png, file.get());
    png_set_IHDR(png, info, png_uint_32(img.width()), png_uint_32(img.height()), 8,
                 img.channels() == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);

    std::vector<png_byte> row(std::size_t(img.width()) * std::size_t(img.channels()));
    for (int y = 0; y < img.height(); ++y) {
        const float* src = img.pixel(y, 0);
        for (std::size_t i = 0; i < row.size(); ++i)
            row[i] = png_byte(std::lround(std::clamp(src[i], 0.0f, 1.0f) * 255.0f));
        png_write_row(png, row.data());
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    file.reset();

    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec)
        throw IoError("cannot rename " + tmp.string() + ": " + ec.message());
}

}  // namespace msdc
