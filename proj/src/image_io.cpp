#include "pasguide/image_io.hpp"

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>

#include <jpeglib.h>
#include <png.h>

#include "pasguide/errors.hpp"

namespace pasguide {

std::uint8_t quantize_u8(double v) {
    v = std::clamp(v, 0.0, 1.0);
    return static_cast<std::uint8_t>(std::floor(v * 255.0 + 0.5));
}

namespace {

struct FileCloser {
    std::FILE* fp = nullptr;
    ~FileCloser() {
        if (fp) std::fclose(fp);
    }
};

Image from_bytes(const std::vector<std::uint8_t>& bytes, int h, int w, int c) {
    Image img(h, w, c);
    for (std::size_t i = 0; i < bytes.size(); ++i) {
        img.data()[i] = static_cast<double>(bytes[i]) / 255.0;
    }
    return img;
}

std::vector<std::uint8_t> to_bytes(const Image& img) {
    std::vector<std::uint8_t> bytes(static_cast<std::size_t>(img.element_count()));
    for (std::size_t i = 0; i < bytes.size(); ++i) {
        bytes[i] = quantize_u8(img.data()[i]);
    }
    return bytes;
}

}  // namespace

Image load_png(const std::string& path) {
    FileCloser file{std::fopen(path.c_str(), "rb")};
    if (!file.fp) throw IoError("load_png: cannot open " + path);

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw IoError("load_png: png_create_read_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw IoError("load_png: png_create_info_struct failed");
    }

    // Declared before the setjmp so the error longjmp never crosses their
    // construction.
    std::vector<std::uint8_t> bytes;
    std::vector<png_bytep> rows;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("load_png: failed reading " + path);
    }

    png_init_io(png, file.fp);
    png_read_info(png, info);

    const png_uint_32 w = png_get_image_width(png, info);
    const png_uint_32 h = png_get_image_height(png, info);
    const png_byte color = png_get_color_type(png, info);
    const png_byte depth = png_get_bit_depth(png, info);

    if (depth == 16) png_set_strip_16(png);
    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
    png_read_update_info(png, info);

    const int channels = png_get_channels(png, info);
    if (channels != 1 && channels != 3) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("load_png: unsupported channel count in " + path);
    }

    bytes.resize(static_cast<std::size_t>(w) * h * channels);
    rows.resize(h);
    for (png_uint_32 y = 0; y < h; ++y) {
        rows[y] = bytes.data() + static_cast<std::size_t>(y) * w * channels;
    }
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    return from_bytes(bytes, static_cast<int>(h), static_cast<int>(w), channels);
}

void save_png(const Image& img, const std::string& path) {
    if (img.channels() != 1 && img.channels() != 3) {
        throw InvalidInputError("save_png: image must have 1 or 3 channels");
    }
    FileCloser file{std::fopen(path.c_str(), "wb")};
    if (!file.fp) throw IoError("save_png: cannot open " + path);

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw IoError("save_png: png_create_write_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw IoError("save_png: png_create_info_struct failed");
    }

    auto bytes = to_bytes(img);
    std::vector<png_bytep> rows;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("save_png: failed writing " + path);
    }

    png_init_io(png, file.fp);
    png_set_IHDR(png, info, static_cast<png_uint_32>(img.width()), static_cast<png_uint_32>(img.height()), 8,
                 img.channels() == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);

    rows.resize(static_cast<std::size_t>(img.height()));
    for (int y = 0; y < img.height(); ++y) {
        rows[static_cast<std::size_t>(y)] = bytes.data() + static_cast<std::size_t>(y) * img.width() * img.channels();
    }
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

namespace {

struct JpegErrorMgr {
    jpeg_error_mgr pub;
    std::jmp_buf jump;
};

void jpeg_error_exit(j_common_ptr cinfo) {
    auto* mgr = reinterpret_cast<JpegErrorMgr*>(cinfo->err);
    std::longjmp(mgr->jump, 1);
}

}  // namespace

std::vector<std::uint8_t> jpeg_encode(const Image& img, int quality) {
    if (img.channels() != 1 && img.channels() != 3) {
        throw InvalidInputError("jpeg_encode: image must have 1 or 3 channels");
    }
    if (quality < 1 || quality > 100) throw InvalidInputError("jpeg_encode: quality must be in [1,100]");

    jpeg_compress_struct cinfo;
    JpegErrorMgr err;
    cinfo.err = jpeg_std_error(&err.pub);
    err.pub.error_exit = jpeg_error_exit;

    auto bytes = to_bytes(img);
    unsigned char* volatile out_buf = nullptr;
    unsigned long out_size = 0;
    if (setjmp(err.jump)) {
        jpeg_destroy_compress(&cinfo);
        if (out_buf) std::free(out_buf);
        throw IoError("jpeg_encode: compression failed");
    }
    jpeg_create_compress(&cinfo);
    jpeg_mem_dest(&cinfo, const_cast<unsigned char**>(&out_buf), &out_size);

    cinfo.image_width = static_cast<JDIMENSION>(img.width());
    cinfo.image_height = static_cast<JDIMENSION>(img.height());
    cinfo.input_components = img.channels();
    cinfo.in_color_space = img.channels() == 1 ? JCS_GRAYSCALE : JCS_RGB;
    jpeg_set_defaults(&cinfo);
    jpeg_set_quality(&cinfo, quality, TRUE);
    jpeg_start_compress(&cinfo, TRUE);

    const std::size_t stride = static_cast<std::size_t>(img.width()) * img.channels();
    while (cinfo.next_scanline < cinfo.image_height) {
        JSAMPROW row = bytes.data() + cinfo.next_scanline * stride;
        jpeg_write_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_compress(&cinfo);
    jpeg_destroy_compress(&cinfo);

    std::vector<std::uint8_t> result(out_buf, out_buf + out_size);
    std::free(out_buf);
    return result;
}

Image jpeg_decode(const std::vector<std::uint8_t>& bytes) {
    jpeg_decompress_struct cinfo;
    JpegErrorMgr err;
    cinfo.err = jpeg_std_error(&err.pub);
    err.pub.error_exit = jpeg_error_exit;

    std::vector<std::uint8_t> pixels;
    if (setjmp(err.jump)) {
        jpeg_destroy_decompress(&cinfo);
        throw IoError("jpeg_decode: decompression failed");
    }
    jpeg_create_decompress(&cinfo);
    jpeg_mem_src(&cinfo, bytes.data(), static_cast<unsigned long>(bytes.size()));
    jpeg_read_header(&cinfo, TRUE);
    jpeg_start_decompress(&cinfo);

    const int w = static_cast<int>(cinfo.output_width);
    const int h = static_cast<int>(cinfo.output_height);
    const int c = cinfo.output_components;
    if (c != 1 && c != 3) {
        jpeg_destroy_decompress(&cinfo);
        throw IoError("jpeg_decode: unsupported component count");
    }
    pixels.resize(static_cast<std::size_t>(w) * h * c);
    const std::size_t stride = static_cast<std::size_t>(w) * c;
    while (cinfo.output_scanline < cinfo.output_height) {
        JSAMPROW row = pixels.data() + cinfo.output_scanline * stride;
        jpeg_read_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_decompress(&cinfo);
    jpeg_destroy_decompress(&cinfo);
    return from_bytes(pixels, h, w, c);
}

Image jpeg_roundtrip(const Image& img, int quality) {
    return jpeg_decode(jpeg_encode(img, quality));
}

Image load_jpeg(const std::string& path) {
    FileCloser file{std::fopen(path.c_str(), "rb")};
    if (!file.fp) throw IoError("load_jpeg: cannot open " + path);
    std::fseek(file.fp, 0, SEEK_END);
    const long size = std::ftell(file.fp);
    std::fseek(file.fp, 0, SEEK_SET);
    if (size <= 0) throw IoError("load_jpeg: empty file " + path);
    std::vector<std::uint8_t> bytes(static_cast<std::size_t>(size));
    if (std::fread(bytes.data(), 1, bytes.size(), file.fp) != bytes.size()) {
        throw IoError("load_jpeg: short read on " + path);
    }
    return jpeg_decode(bytes);
}

void save_jpeg(const Image& img, const std::string& path, int quality) {
    const auto bytes = jpeg_encode(img, quality);
    FileCloser file{std::fopen(path.c_str(), "wb")};
    if (!file.fp) throw IoError("save_jpeg: cannot open " + path);
    if (std::fwrite(bytes.data(), 1, bytes.size(), file.fp) != bytes.size()) {
        throw IoError("save_jpeg: short write on " + path);
    }
}

Image load_image(const std::string& path) {
    auto lower = path;
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char ch) { return std::tolower(ch); });
    if (lower.size() >= 4 && lower.compare(lower.size() - 4, 4, ".png") == 0) return load_png(path);
    if (lower.size() >= 4 && lower.compare(lower.size() - 4, 4, ".jpg") == 0) return load_jpeg(path);
    if (lower.size() >= 5 && lower.compare(lower.size() - 5, 5, ".jpeg") == 0) return load_jpeg(path);
    throw IoError("load_image: unsupported extension for " + path);
}

}  // namespace pasguide
