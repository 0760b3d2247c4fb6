#include "clra/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <vector>

#include "clra/errors.hpp"

namespace clra {

namespace {

// PGM tokens may be separated by whitespace and '#' comments.
long next_pgm_token(std::istream& in, const std::string& path) {
    int c = in.get();
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = in.get();
        } else if (std::isspace(c)) {
            c = in.get();
        } else {
            break;
        }
    }
    if (c == EOF || !std::isdigit(c)) {
        throw IoError("pgm: malformed header in " + path);
    }
    long value = 0;
    while (c != EOF && std::isdigit(c)) {
        value = value * 10 + (c - '0');
        c = in.get();
    }
    return value;
}

LoadedImage read_pgm(std::ifstream& in, const std::string& path) {
    char magic[2];
    in.read(magic, 2);
    if (!in || magic[0] != 'P' || magic[1] != '5') {
        throw IoError("pgm: not a P5 file: " + path);
    }
    const long width = next_pgm_token(in, path);
    const long height = next_pgm_token(in, path);
    const long maxval = next_pgm_token(in, path);
    if (width < 1 || height < 1) {
        throw IoError("pgm: bad dimensions in " + path);
    }
    if (maxval < 1 || maxval > 255) {
        throw IoError("pgm: only 8-bit data supported (maxval " +
                      std::to_string(maxval) + ") in " + path);
    }
    // The single whitespace byte terminating the header was consumed by the
    // token reader, so the raster starts at the current position.
    std::vector<unsigned char> raw(static_cast<std::size_t>(width) * height);
    in.read(reinterpret_cast<char*>(raw.data()),
            static_cast<std::streamsize>(raw.size()));
    if (in.gcount() != static_cast<std::streamsize>(raw.size())) {
        throw IoError("pgm: truncated pixel data in " + path);
    }

    LoadedImage img;
    img.max_value = static_cast<double>(maxval);
    img.pixels.resize(height, width);
    for (long i = 0; i < height; ++i)
        for (long j = 0; j < width; ++j)
            img.pixels(i, j) = raw[static_cast<std::size_t>(i) * width + j];
    return img;
}

struct PngReadCloser {
    png_structp png = nullptr;
    png_infop info = nullptr;
    FILE* file = nullptr;
    ~PngReadCloser() {
        if (png) png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
        if (file) std::fclose(file);
    }
};

LoadedImage read_png(const std::string& path) {
    PngReadCloser ctx;
    ctx.file = std::fopen(path.c_str(), "rb");
    if (!ctx.file) throw IoError("png: cannot open " + path);

    ctx.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr,
                                     nullptr);
    if (!ctx.png) throw IoError("png: reader initialization failed");
    ctx.info = png_create_info_struct(ctx.png);
    if (!ctx.info) throw IoError("png: info initialization failed");
    if (setjmp(png_jmpbuf(ctx.png))) {
        throw IoError("png: failed to decode " + path);
    }

    png_init_io(ctx.png, ctx.file);
    png_read_info(ctx.png, ctx.info);

    const png_uint_32 width = png_get_image_width(ctx.png, ctx.info);
    const png_uint_32 height = png_get_image_height(ctx.png, ctx.info);
    const int color = png_get_color_type(ctx.png, ctx.info);
    const int depth = png_get_bit_depth(ctx.png, ctx.info);

    if (color != PNG_COLOR_TYPE_GRAY) {
        throw IoError("png: only grayscale inputs are supported; " + path +
                      " has color type " + std::to_string(color));
    }
    if (depth > 8) {
        throw IoError("png: only 8-bit inputs are supported; " + path +
                      " has bit depth " + std::to_string(depth));
    }
    if (depth < 8) png_set_expand_gray_1_2_4_to_8(ctx.png);
    png_set_interlace_handling(ctx.png);
    png_read_update_info(ctx.png, ctx.info);

    std::vector<unsigned char> raw(static_cast<std::size_t>(width) * height);
    std::vector<png_bytep> rows(height);
    for (png_uint_32 i = 0; i < height; ++i)
        rows[i] = raw.data() + static_cast<std::size_t>(i) * width;
    png_read_image(ctx.png, rows.data());
    png_read_end(ctx.png, nullptr);

    LoadedImage img;
    img.max_value = 255.0;
    img.pixels.resize(static_cast<Eigen::Index>(height),
                      static_cast<Eigen::Index>(width));
    for (png_uint_32 i = 0; i < height; ++i)
        for (png_uint_32 j = 0; j < width; ++j)
            img.pixels(static_cast<Eigen::Index>(i),
                       static_cast<Eigen::Index>(j)) =
                raw[static_cast<std::size_t>(i) * width + j];
    return img;
}

}  // namespace

LoadedImage read_image(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    char head[2] = {0, 0};
    in.read(head, 2);
    if (!in) throw IoError("cannot read " + path);
    in.seekg(0);
    if (head[0] == 'P' && head[1] == '5') return read_pgm(in, path);
    if (static_cast<unsigned char>(head[0]) == 0x89 && head[1] == 'P') {
        in.close();
        return read_png(path);
    }
    throw IoError("unsupported image format (need PGM P5 or PNG): " + path);
}

RegionMask read_mask(const std::string& path) {
    LoadedImage img = read_image(path);
    return img.pixels.array() > 0.0;
}

namespace {

std::vector<unsigned char> quantize(const Matrix& pixels, double max_value) {
    std::vector<unsigned char> raw(static_cast<std::size_t>(pixels.size()));
    const auto cols = pixels.cols();
    for (Eigen::Index i = 0; i < pixels.rows(); ++i)
        for (Eigen::Index j = 0; j < cols; ++j)
            raw[static_cast<std::size_t>(i) * static_cast<std::size_t>(cols) +
                static_cast<std::size_t>(j)] = static_cast<unsigned char>(
                std::clamp(std::round(pixels(i, j)), 0.0, max_value));
    return raw;
}

struct PngWriteCloser {
    png_structp png = nullptr;
    png_infop info = nullptr;
    FILE* file = nullptr;
    ~PngWriteCloser() {
        if (png) png_destroy_write_struct(&png, info ? &info : nullptr);
        if (file) std::fclose(file);
    }
};

}  // namespace

void write_png(const std::string& path, const Matrix& pixels, double max_value) {
    if (max_value < 1.0 || max_value > 255.0) {
        throw IoError("png: max_value must be in [1, 255] for 8-bit export");
    }
    auto raw = quantize(pixels, max_value);

    PngWriteCloser ctx;
    ctx.file = std::fopen(path.c_str(), "wb");
    if (!ctx.file) throw IoError("png: cannot create " + path);
    ctx.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr,
                                      nullptr);
    if (!ctx.png) throw IoError("png: writer initialization failed");
    ctx.info = png_create_info_struct(ctx.png);
    if (!ctx.info) throw IoError("png: info initialization failed");
    if (setjmp(png_jmpbuf(ctx.png))) {
        throw IoError("png: failed to encode " + path);
    }

    png_init_io(ctx.png, ctx.file);
    png_set_IHDR(ctx.png, ctx.info, static_cast<png_uint_32>(pixels.cols()),
                 static_cast<png_uint_32>(pixels.rows()), 8,
                 PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(ctx.png, ctx.info);
    for (Eigen::Index i = 0; i < pixels.rows(); ++i) {
        png_write_row(ctx.png,
                      raw.data() + static_cast<std::size_t>(i) *
                                       static_cast<std::size_t>(pixels.cols()));
    }
    png_write_end(ctx.png, nullptr);
}

void write_pgm(const std::string& path, const Matrix& pixels, double max_value) {
    if (max_value < 1.0 || max_value > 255.0) {
        throw IoError("pgm: max_value must be in [1, 255] for 8-bit export");
    }
    auto raw = quantize(pixels, max_value);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("pgm: cannot create " + path);
    out << "P5\n"
        << pixels.cols() << " " << pixels.rows() << "\n"
        << static_cast<int>(max_value) << "\n";
    out.write(reinterpret_cast<const char*>(raw.data()),
              static_cast<std::streamsize>(raw.size()));
    if (!out) throw IoError("pgm: write failed for " + path);
}

void write_image(const std::string& path, const Matrix& pixels,
                 double max_value) {
    if (path.size() >= 4 && path.substr(path.size() - 4) == ".pgm") {
        write_pgm(path, pixels, max_value);
    } else {
        write_png(path, pixels, max_value);
    }
}

}  // namespace clra
