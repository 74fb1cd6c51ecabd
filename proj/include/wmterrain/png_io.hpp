#pragma once

// Grayscale PNG reading and writing through libpng. Output bytes depend only
// on the pixel data: compression level and filter set are fixed and no
// time or text chunks are written.

#include <png.h>

#include <csetjmp>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "wmterrain/elevation.hpp"
#include "wmterrain/error.hpp"
#include "wmterrain/grid.hpp"

namespace wmterrain {

namespace png_detail {

struct FileCloser
{
    void operator()(std::FILE* f) const noexcept
    {
        if (f)
            std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

[[noreturn]] inline void on_error(png_structp png, png_const_charp msg)
{
    auto* text = static_cast<std::string*>(png_get_error_ptr(png));
    if (text)
        *text = msg;
    png_longjmp(png, 1);
}

inline void on_warning(png_structp, png_const_charp) {}

/// Writes a square single-channel image; `bit_depth` is 8 or 16 and rows
/// hold big-endian samples.
inline void write_gray(const std::filesystem::path& path, std::size_t size, int bit_depth,
                       const std::vector<std::uint8_t>& bytes)
{
    FilePtr file(std::fopen(path.c_str(), "wb"));
    if (!file)
        throw IoError("cannot open " + path.string() + " for writing");
    std::string message;
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &message, on_error, on_warning);
    if (!png)
        throw IoError("libpng initialisation failed");
    png_infop info = png_create_info_struct(png);
    const std::size_t row_bytes = size * static_cast<std::size_t>(bit_depth / 8);
    std::vector<png_bytep> rows(size);
    for (std::size_t i = 0; i < size; ++i)
        rows[i] = const_cast<png_bytep>(bytes.data() + i * row_bytes);
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("writing " + path.string() + ": " + message);
    }
    png_init_io(png, file.get());
    png_set_compression_level(png, 6);
    png_set_filter(png, PNG_FILTER_TYPE_BASE, PNG_ALL_FILTERS);
    png_set_IHDR(png, info, static_cast<png_uint_32>(size), static_cast<png_uint_32>(size), bit_depth,
                 PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

/// Reads a square single-channel image of the given bit depth.
inline std::vector<std::uint8_t> read_gray(const std::filesystem::path& path, int bit_depth, std::size_t& size)
{
    FilePtr file(std::fopen(path.c_str(), "rb"));
    if (!file)
        throw MissingInputError("cannot open " + path.string());
    std::string message;
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &message, on_error, on_warning);
    if (!png)
        throw IoError("libpng initialisation failed");
    png_infop info = png_create_info_struct(png);
    std::vector<std::uint8_t> bytes;
    std::vector<png_bytep> rows;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("reading " + path.string() + ": " + message);
    }
    png_init_io(png, file.get());
    png_read_info(png, info);
    const png_uint_32 width = png_get_image_width(png, info);
    const png_uint_32 height = png_get_image_height(png, info);
    const int depth = png_get_bit_depth(png, info);
    const int color = png_get_color_type(png, info);
    if (width != height || depth != bit_depth || color != PNG_COLOR_TYPE_GRAY) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError(path.string() + " is not a square " + std::to_string(bit_depth) + "-bit grayscale PNG");
    }
    size = width;
    const std::size_t row_bytes = size * static_cast<std::size_t>(bit_depth / 8);
    bytes.resize(row_bytes * size);
    rows.resize(size);
    for (std::size_t i = 0; i < size; ++i)
        rows[i] = bytes.data() + i * row_bytes;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return bytes;
}

} // namespace png_detail

inline void write_png16(const std::filesystem::path& path, const QuantizedDEM& q)
{
    std::vector<std::uint8_t> bytes(q.values.count() * 2);
    for (std::size_t k = 0; k < q.values.count(); ++k) {
        bytes[2 * k] = static_cast<std::uint8_t>(q.values[k] >> 8);
        bytes[2 * k + 1] = static_cast<std::uint8_t>(q.values[k] & 0xff);
    }
    png_detail::write_gray(path, q.size(), 16, bytes);
}

inline QuantizedDEM read_png16(const std::filesystem::path& path)
{
    std::size_t size = 0;
    const auto bytes = png_detail::read_gray(path, 16, size);
    Grid<std::uint16_t> values(size);
    for (std::size_t k = 0; k < values.count(); ++k)
        values[k] = static_cast<std::uint16_t>((bytes[2 * k] << 8) | bytes[2 * k + 1]);
    return {std::move(values)};
}

inline void write_png8(const std::filesystem::path& path, const Grid<std::uint8_t>& image)
{
    std::vector<std::uint8_t> bytes(image.begin(), image.end());
    png_detail::write_gray(path, image.size(), 8, bytes);
}

inline Grid<std::uint8_t> read_png8(const std::filesystem::path& path)
{
    std::size_t size = 0;
    auto bytes = png_detail::read_gray(path, 8, size);
    return {size, std::move(bytes)};
}

} // namespace wmterrain
