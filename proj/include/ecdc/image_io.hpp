/*
 * Copyright 2026 the ecdc authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* PNG/JPEG/BMP decoding to luminance, PNG encoding, and JPEG round trips. */

#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <csetjmp>
#include <fstream>
#include <string>
#include <vector>

#include <jpeglib.h>
#include <png.h>

#include "ecdc/image.hpp"

namespace ecdc {

/* 8-bit interleaved RGB raster, used for overlays and tri-color maps. */
struct RgbImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;  // 3 bytes per pixel, row-major

    RgbImage() = default;
    RgbImage(int w, int h)
        : width(w), height(h), data(static_cast<std::size_t>(w) * h * 3, 0)
    {
        if (w <= 0 || h <= 0)
            throw std::invalid_argument("RgbImage: dimensions must be positive");
    }

    std::uint8_t* px(int x, int y) { return &data[(static_cast<std::size_t>(y) * width + x) * 3]; }
    const std::uint8_t* px(int x, int y) const
    {
        return &data[(static_cast<std::size_t>(y) * width + x) * 3];
    }
};

namespace detail {

inline std::vector<std::uint8_t> read_file_bytes(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw DecodeError("cannot open file: " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return bytes;
}

/* ITU-R 601 luma from interleaved RGB bytes. */
inline GrayImage rgb_to_gray(const std::vector<std::uint8_t>& rgb, int w, int h)
{
    if (w <= 0 || h <= 0)
        throw std::invalid_argument("decoded image has zero dimension");
    GrayImage out(w, h);
    const std::uint8_t* p = rgb.data();
    for (std::size_t i = 0; i < out.size(); ++i, p += 3) {
        const float y = 0.299f * p[0] + 0.587f * p[1] + 0.114f * p[2];
        out.data[i] = std::clamp(y, 0.0f, 255.0f);
    }
    return out;
}

inline GrayImage decode_png(const std::string& path)
{
    png_image image;
    std::memset(&image, 0, sizeof(image));
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&image, path.c_str()))
        throw DecodeError("PNG decode failed: " + path + ": " + image.message);
    image.format = PNG_FORMAT_RGB;
    std::vector<std::uint8_t> buffer(PNG_IMAGE_SIZE(image));
    if (!png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr)) {
        const std::string msg = image.message;
        png_image_free(&image);
        throw DecodeError("PNG decode failed: " + path + ": " + msg);
    }
    return rgb_to_gray(buffer, static_cast<int>(image.width), static_cast<int>(image.height));
}

struct JpegErrorMgr {
    jpeg_error_mgr pub;
    std::jmp_buf jump;
    char message[JMSG_LENGTH_MAX] = {0};
};

inline void jpeg_error_exit(j_common_ptr cinfo)
{
    auto* err = reinterpret_cast<JpegErrorMgr*>(cinfo->err);
    (*cinfo->err->format_message)(cinfo, err->message);
    std::longjmp(err->jump, 1);
}

inline GrayImage decode_jpeg_bytes(const std::uint8_t* bytes, std::size_t size,
                                   const std::string& origin)
{
    jpeg_decompress_struct cinfo;
    JpegErrorMgr jerr;
    cinfo.err = jpeg_std_error(&jerr.pub);
    jerr.pub.error_exit = jpeg_error_exit;
    if (setjmp(jerr.jump)) {
        jpeg_destroy_decompress(&cinfo);
        throw DecodeError("JPEG decode failed: " + origin + ": " + jerr.message);
    }
    jpeg_create_decompress(&cinfo);
    jpeg_mem_src(&cinfo, const_cast<std::uint8_t*>(bytes), size);
    jpeg_read_header(&cinfo, TRUE);
    cinfo.out_color_space = JCS_RGB;
    jpeg_start_decompress(&cinfo);
    const int w = static_cast<int>(cinfo.output_width);
    const int h = static_cast<int>(cinfo.output_height);
    std::vector<std::uint8_t> rgb(static_cast<std::size_t>(w) * h * 3);
    while (cinfo.output_scanline < cinfo.output_height) {
        std::uint8_t* row = rgb.data() + static_cast<std::size_t>(cinfo.output_scanline) * w * 3;
        JSAMPROW rows[1] = {row};
        jpeg_read_scanlines(&cinfo, rows, 1);
    }
    jpeg_finish_decompress(&cinfo);
    jpeg_destroy_decompress(&cinfo);
    return rgb_to_gray(rgb, w, h);
}

inline std::uint32_t read_u32le(const std::uint8_t* p)
{
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

inline std::uint16_t read_u16le(const std::uint8_t* p)
{
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

/* Uncompressed 8/24/32-bit BMP, bottom-up or top-down rows. */
inline GrayImage decode_bmp(const std::vector<std::uint8_t>& bytes, const std::string& origin)
{
    if (bytes.size() < 54 || bytes[0] != 'B' || bytes[1] != 'M')
        throw DecodeError("BMP decode failed: " + origin);
    const std::uint32_t pixel_offset = read_u32le(&bytes[10]);
    const std::uint32_t header_size = read_u32le(&bytes[14]);
    if (header_size < 40)
        throw DecodeError("BMP decode failed (unsupported header): " + origin);
    const std::int32_t w = static_cast<std::int32_t>(read_u32le(&bytes[18]));
    std::int32_t h = static_cast<std::int32_t>(read_u32le(&bytes[22]));
    const std::uint16_t bpp = read_u16le(&bytes[28]);
    const std::uint32_t compression = read_u32le(&bytes[30]);
    const bool top_down = h < 0;
    h = std::abs(h);
    if (w <= 0 || h <= 0)
        throw std::invalid_argument("decoded image has zero dimension");
    if (compression != 0 || (bpp != 8 && bpp != 24 && bpp != 32))
        throw DecodeError("BMP decode failed (unsupported format): " + origin);

    // 8-bit files carry a palette right after the info header
    std::array<std::array<std::uint8_t, 3>, 256> palette{};
    if (bpp == 8) {
        const std::size_t pal_off = 14 + header_size;
        std::uint32_t colors = read_u32le(&bytes[46]);
        if (colors == 0)
            colors = 256;
        if (bytes.size() < pal_off + colors * 4)
            throw DecodeError("BMP decode failed (truncated palette): " + origin);
        for (std::uint32_t i = 0; i < colors; ++i) {
            palette[i] = {bytes[pal_off + i * 4 + 2], bytes[pal_off + i * 4 + 1],
                          bytes[pal_off + i * 4 + 0]};
        }
    }

    const std::size_t stride = ((static_cast<std::size_t>(w) * bpp + 31) / 32) * 4;
    if (bytes.size() < pixel_offset + stride * h)
        throw DecodeError("BMP decode failed (truncated pixels): " + origin);

    std::vector<std::uint8_t> rgb(static_cast<std::size_t>(w) * h * 3);
    for (std::int32_t row = 0; row < h; ++row) {
        const std::int32_t src_row = top_down ? row : (h - 1 - row);
        const std::uint8_t* src = &bytes[pixel_offset + stride * src_row];
        std::uint8_t* dst = &rgb[static_cast<std::size_t>(row) * w * 3];
        for (std::int32_t x = 0; x < w; ++x) {
            if (bpp == 8) {
                const auto& c = palette[src[x]];
                dst[x * 3 + 0] = c[0];
                dst[x * 3 + 1] = c[1];
                dst[x * 3 + 2] = c[2];
            } else {
                const std::uint8_t* p = src + x * (bpp / 8);
                dst[x * 3 + 0] = p[2];
                dst[x * 3 + 1] = p[1];
                dst[x * 3 + 2] = p[0];
            }
        }
    }
    return rgb_to_gray(rgb, w, h);
}

}  // namespace detail

/* Decodes PNG, JPEG, or BMP (sniffed by magic bytes) to luminance. */
inline GrayImage load_grayscale(const std::string& path)
{
    const auto bytes = detail::read_file_bytes(path);
    if (bytes.size() >= 8 && bytes[0] == 0x89 && bytes[1] == 'P' && bytes[2] == 'N' &&
        bytes[3] == 'G')
        return detail::decode_png(path);
    if (bytes.size() >= 2 && bytes[0] == 0xFF && bytes[1] == 0xD8)
        return detail::decode_jpeg_bytes(bytes.data(), bytes.size(), path);
    if (bytes.size() >= 2 && bytes[0] == 'B' && bytes[1] == 'M')
        return detail::decode_bmp(bytes, path);
    throw DecodeError("unrecognized image format: " + path);
}

inline void save_png_gray(const std::string& path, const GrayImage& img)
{
    std::vector<std::uint8_t> bytes(img.size());
    for (std::size_t i = 0; i < img.size(); ++i)
        bytes[i] = static_cast<std::uint8_t>(std::clamp(std::lround(img.data[i]), 0L, 255L));

    png_image image;
    std::memset(&image, 0, sizeof(image));
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(img.width);
    image.height = static_cast<png_uint_32>(img.height);
    image.format = PNG_FORMAT_GRAY;
    if (!png_image_write_to_file(&image, path.c_str(), 0, bytes.data(), 0, nullptr))
        throw std::runtime_error(std::string("PNG write failed: ") + path + ": " + image.message);
}

inline void save_png_rgb(const std::string& path, const RgbImage& img)
{
    png_image image;
    std::memset(&image, 0, sizeof(image));
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(img.width);
    image.height = static_cast<png_uint_32>(img.height);
    image.format = PNG_FORMAT_RGB;
    if (!png_image_write_to_file(&image, path.c_str(), 0, img.data.data(), 0, nullptr))
        throw std::runtime_error(std::string("PNG write failed: ") + path + ": " + image.message);
}

namespace detail {

/* Grayscale JPEG encode into a malloc'd buffer owned by the caller. */
inline void encode_jpeg_gray(const GrayImage& img, int quality, std::uint8_t** out_buf,
                             unsigned long* out_size)
{
    if (quality < 1 || quality > 100)
        throw std::invalid_argument("JPEG quality must be in [1, 100]");

    std::vector<std::uint8_t> pixels(img.size());
    for (std::size_t i = 0; i < img.size(); ++i)
        pixels[i] = static_cast<std::uint8_t>(std::clamp(std::lround(img.data[i]), 0L, 255L));

    jpeg_compress_struct cinfo;
    JpegErrorMgr jerr;
    cinfo.err = jpeg_std_error(&jerr.pub);
    jerr.pub.error_exit = jpeg_error_exit;
    if (setjmp(jerr.jump)) {
        jpeg_destroy_compress(&cinfo);
        if (*out_buf)
            free(*out_buf);
        *out_buf = nullptr;
        throw std::runtime_error(std::string("JPEG encode failed: ") + jerr.message);
    }
    jpeg_create_compress(&cinfo);
    jpeg_mem_dest(&cinfo, out_buf, out_size);
    cinfo.image_width = static_cast<JDIMENSION>(img.width);
    cinfo.image_height = static_cast<JDIMENSION>(img.height);
    cinfo.input_components = 1;
    cinfo.in_color_space = JCS_GRAYSCALE;
    jpeg_set_defaults(&cinfo);
    jpeg_set_quality(&cinfo, quality, TRUE);
    jpeg_start_compress(&cinfo, TRUE);
    while (cinfo.next_scanline < cinfo.image_height) {
        JSAMPROW row = pixels.data() + static_cast<std::size_t>(cinfo.next_scanline) * img.width;
        jpeg_write_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_compress(&cinfo);
    jpeg_destroy_compress(&cinfo);
}

}  // namespace detail

inline void save_jpeg_gray(const std::string& path, const GrayImage& img, int quality = 95)
{
    std::uint8_t* buf = nullptr;
    unsigned long size = 0;
    detail::encode_jpeg_gray(img, quality, &buf, &size);
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        free(buf);
        throw std::runtime_error("cannot write JPEG: " + path);
    }
    out.write(reinterpret_cast<const char*>(buf), static_cast<std::streamsize>(size));
    free(buf);
}

/* Encodes as grayscale JPEG at the given quality and decodes back. */
inline GrayImage jpeg_roundtrip(const GrayImage& img, int quality)
{
    std::uint8_t* buf = nullptr;
    unsigned long size = 0;
    detail::encode_jpeg_gray(img, quality, &buf, &size);
    GrayImage decoded;
    try {
        decoded = detail::decode_jpeg_bytes(buf, size, "<memory>");
    } catch (...) {
        free(buf);
        throw;
    }
    free(buf);
    return decoded;
}

}  // namespace ecdc
