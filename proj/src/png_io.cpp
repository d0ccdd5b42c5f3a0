#include "boundarykit/png_io.hpp"

#include <png.h>

#include <csetjmp>
#include <cstdio>
#include <filesystem>
#include <vector>

#include "boundarykit/errors.hpp"

namespace bk {

namespace {

void error_handler(png_structp png, png_const_charp msg) {
    auto* s = static_cast<std::string*>(png_get_error_ptr(png));
    if (s) *s = msg;
    longjmp(png_jmpbuf(png), 1);
}

void warning_handler(png_structp, png_const_charp) {}

struct FileHandle {
    std::FILE* fp = nullptr;
    explicit FileHandle(const std::string& path, const char* mode)
        : fp(std::fopen(path.c_str(), mode)) {}
    ~FileHandle() {
        if (fp) std::fclose(fp);
    }
    FileHandle(const FileHandle&) = delete;
    FileHandle& operator=(const FileHandle&) = delete;
};

struct Reader {
    png_structp png = nullptr;
    png_infop info = nullptr;
    std::string error;

    Reader() {
        png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &error, error_handler,
                                     warning_handler);
        if (png) info = png_create_info_struct(png);
    }
    ~Reader() {
        if (png) png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
    }
};

struct Writer {
    png_structp png = nullptr;
    png_infop info = nullptr;
    std::string error;

    Writer() {
        png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &error, error_handler,
                                      warning_handler);
        if (png) info = png_create_info_struct(png);
    }
    ~Writer() {
        if (png) png_destroy_write_struct(&png, info ? &info : nullptr);
    }
};

// Reads the whole file as 8-bit rows with `want_channels` channels per pixel.
// `index_mode` keeps palette indices raw and rejects anything that is not an
// index image; otherwise everything is converted to RGB.
void read_rows(const std::string& path, bool index_mode, int& width, int& height,
               std::vector<std::uint8_t>& rows) {
    FileHandle file(path, "rb");
    if (!file.fp)
        throw DataError("PNG '" + path + "': cannot open file");

    Reader r;
    if (!r.png || !r.info)
        throw DataError("PNG '" + path + "': libpng initialization failed");

    if (setjmp(png_jmpbuf(r.png)))
        throw DataError("PNG '" + path + "': " + (r.error.empty() ? "read error" : r.error));

    png_init_io(r.png, file.fp);
    png_read_info(r.png, r.info);

    const png_uint_32 w = png_get_image_width(r.png, r.info);
    const png_uint_32 h = png_get_image_height(r.png, r.info);
    const int depth = png_get_bit_depth(r.png, r.info);
    const int color = png_get_color_type(r.png, r.info);

    if (w == 0 || h == 0 || w > (1u << 20) || h > (1u << 20))
        throw DataError("PNG '" + path + "': unsupported image size");

    if (index_mode) {
        if (depth == 16)
            throw DataError("PNG '" + path + "': 16-bit PNG not supported for label maps, "
                            "use 8-bit index images");
        if (color == PNG_COLOR_TYPE_PALETTE) {
            if (depth < 8) png_set_packing(r.png); // one index per byte
        } else if (color == PNG_COLOR_TYPE_GRAY) {
            if (depth != 8)
                throw DataError("PNG '" + path + "': label maps must be 8-bit, got " +
                                std::to_string(depth) + "-bit gray");
        } else {
            throw DataError("PNG '" + path + "': label maps must be single-channel or "
                            "paletted index images, not RGB(A); re-encode as an index image");
        }
    } else {
        if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(r.png);
        if (color == PNG_COLOR_TYPE_GRAY && depth < 8)
            png_set_expand_gray_1_2_4_to_8(r.png);
        if (png_get_valid(r.png, r.info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(r.png);
        if (depth == 16) png_set_strip_16(r.png);
        if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA)
            png_set_gray_to_rgb(r.png);
        png_set_strip_alpha(r.png);
    }

    png_read_update_info(r.png, r.info);
    const std::size_t rowbytes = png_get_rowbytes(r.png, r.info);
    const std::size_t expected = std::size_t(w) * (index_mode ? 1 : 3);
    if (rowbytes != expected)
        throw DataError("PNG '" + path + "': unexpected row layout");

    rows.assign(rowbytes * h, 0);
    std::vector<png_bytep> row_ptrs(h);
    for (png_uint_32 y = 0; y < h; ++y) row_ptrs[y] = rows.data() + y * rowbytes;
    png_read_image(r.png, row_ptrs.data());
    png_read_end(r.png, nullptr);

    width = int(w);
    height = int(h);
}

void write_rows(const std::string& path, int width, int height, int color_type,
                const std::uint8_t* rows, std::size_t rowbytes) {
    const std::string tmp = path + ".tmp";
    {
        FileHandle file(tmp, "wb");
        if (!file.fp)
            throw DataError("PNG '" + path + "': cannot open for writing");

        Writer w;
        if (!w.png || !w.info)
            throw DataError("PNG '" + path + "': libpng initialization failed");

        if (setjmp(png_jmpbuf(w.png))) {
            std::remove(tmp.c_str());
            throw DataError("PNG '" + path + "': " +
                            (w.error.empty() ? "write error" : w.error));
        }

        png_init_io(w.png, file.fp);
        png_set_IHDR(w.png, w.info, png_uint_32(width), png_uint_32(height), 8, color_type,
                     PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                     PNG_FILTER_TYPE_DEFAULT);
        png_write_info(w.png, w.info);

        std::vector<png_bytep> row_ptrs(height);
        for (int y = 0; y < height; ++y)
            row_ptrs[y] = const_cast<png_bytep>(rows + std::size_t(y) * rowbytes);
        png_write_image(w.png, row_ptrs.data());
        png_write_end(w.png, nullptr);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::remove(tmp.c_str());
        throw DataError("PNG '" + path + "': rename failed: " + ec.message());
    }
}

} // namespace

LabelMap read_label_png(const std::string& path, int num_classes, int ignore_index) {
    int w = 0, h = 0;
    std::vector<std::uint8_t> rows;
    read_rows(path, /*index_mode=*/true, w, h, rows);

    LabelMap map(h, w, num_classes, ignore_index);
    map.data = std::move(rows);
    try {
        map.validate();
    } catch (const ValidationError& e) {
        throw DataError("PNG '" + path + "': " + e.what());
    }
    return map;
}

void write_label_png(const LabelMap& map, const std::string& path) {
    map.validate();
    write_rows(path, map.width, map.height, PNG_COLOR_TYPE_GRAY, map.data.data(),
               std::size_t(map.width));
}

RgbImage read_rgb_png(const std::string& path) {
    int w = 0, h = 0;
    std::vector<std::uint8_t> rows;
    read_rows(path, /*index_mode=*/false, w, h, rows);
    RgbImage img(h, w);
    img.data = std::move(rows);
    return img;
}

void write_rgb_png(const RgbImage& img, const std::string& path) {
    img.validate();
    write_rows(path, img.width, img.height, PNG_COLOR_TYPE_RGB, img.data.data(),
               std::size_t(img.width) * 3);
}

BinaryMask read_mask_png(const std::string& path) {
    int w = 0, h = 0;
    std::vector<std::uint8_t> rows;
    read_rows(path, /*index_mode=*/true, w, h, rows);
    BinaryMask mask(h, w);
    for (std::size_t i = 0; i < rows.size(); ++i) mask.bits[i] = rows[i] >= 128 ? 1 : 0;
    return mask;
}

void write_mask_png(const BinaryMask& mask, const std::string& path) {
    mask.validate();
    std::vector<std::uint8_t> rows(mask.pixel_count());
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = mask.bits[i] ? 255 : 0;
    write_rows(path, mask.width, mask.height, PNG_COLOR_TYPE_GRAY, rows.data(),
               std::size_t(mask.width));
}

} // namespace bk
