#include "relight/image_io.hpp"

#include <png.h>

#include <ImfChannelList.h>
#include <ImfFrameBuffer.h>
#include <ImfInputFile.h>
#include <ImfOutputFile.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <vector>

namespace relight {

namespace {

std::string lower_ext(const std::string& path) {
    const auto pos = path.find_last_of('.');
    if (pos == std::string::npos) return "";
    std::string ext = path.substr(pos + 1);
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return ext;
}

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

}  // namespace

SrgbImage read_png(const std::string& path) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) throw io_error("cannot open PNG for reading: " + path);

    png_structp png =
        png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw io_error("libpng init failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw io_error("failed to decode PNG: " + path);
    }
    png_init_io(png, fp.get());
    png_read_info(png, info);

    png_set_expand(png);          // palette/gray/low-bit to 8-bit RGB(A)
    png_set_strip_16(png);
    png_set_gray_to_rgb(png);
    png_read_update_info(png, info);

    const int w = static_cast<int>(png_get_image_width(png, info));
    const int h = static_cast<int>(png_get_image_height(png, info));
    const int ch = static_cast<int>(png_get_channels(png, info));
    if (ch != 3 && ch != 4) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw io_error("unsupported PNG channel count in " + path);
    }

    std::vector<png_byte> row(static_cast<std::size_t>(w) * ch);
    SrgbImage img(w, h, ch);
    for (int y = 0; y < h; ++y) {
        png_read_row(png, row.data(), nullptr);
        for (std::size_t i = 0; i < row.size(); ++i)
            img.data[static_cast<std::size_t>(y) * w * ch + i] = row[i] / 255.f;
    }
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return img;
}

void write_png(const std::string& path, const SrgbImage& img) {
    if (img.empty()) throw invalid_input("cannot write empty image");
    if (img.channels != 3 && img.channels != 4)
        throw invalid_input("PNG output requires 3 or 4 channels");

    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) throw io_error("cannot open PNG for writing: " + path);

    png_structp png =
        png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, &info);
        throw io_error("libpng init failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw io_error("failed to encode PNG: " + path);
    }
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, img.width, img.height, 8,
                 img.channels == 4 ? PNG_COLOR_TYPE_RGBA : PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);

    std::vector<png_byte> row(static_cast<std::size_t>(img.width) * img.channels);
    for (int y = 0; y < img.height; ++y) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            const float v =
                std::clamp(img.data[static_cast<std::size_t>(y) * row.size() + i],
                           0.f, 1.f);
            row[i] = static_cast<png_byte>(std::lround(255.f * v));
        }
        png_write_row(png, row.data());
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

LinearImage read_exr(const std::string& path) {
    try {
        Imf::InputFile file(path.c_str());
        const Imath::Box2i dw = file.header().dataWindow();
        const int w = dw.max.x - dw.min.x + 1;
        const int h = dw.max.y - dw.min.y + 1;
        const Imf::ChannelList& channels = file.header().channels();
        const bool has_alpha = channels.findChannel("A") != nullptr;
        const int ch = has_alpha ? 4 : 3;

        LinearImage img(w, h, ch);
        const std::size_t xs = sizeof(float) * ch;
        const std::size_t ys = xs * w;
        char* base = reinterpret_cast<char*>(img.data.data()) -
                     (dw.min.x + static_cast<std::ptrdiff_t>(dw.min.y) * w) * xs;

        Imf::FrameBuffer fb;
        const char* names[4] = {"R", "G", "B", "A"};
        for (int c = 0; c < ch; ++c)
            fb.insert(names[c], Imf::Slice(Imf::FLOAT, base + c * sizeof(float),
                                           xs, ys, 1, 1, c == 3 ? 1.f : 0.f));
        file.setFrameBuffer(fb);
        file.readPixels(dw.min.y, dw.max.y);
        return img;
    } catch (const std::exception& e) {
        throw io_error("failed to read EXR " + path + ": " + e.what());
    }
}

void write_exr(const std::string& path, const LinearImage& img) {
    if (img.empty()) throw invalid_input("cannot write empty image");
    if (img.channels != 3 && img.channels != 4)
        throw invalid_input("EXR output requires 3 or 4 channels");
    try {
        Imf::Header header(img.width, img.height);
        header.compression() = Imf::ZIP_COMPRESSION;
        const char* names[4] = {"R", "G", "B", "A"};
        for (int c = 0; c < img.channels; ++c)
            header.channels().insert(names[c], Imf::Channel(Imf::FLOAT));

        Imf::OutputFile file(path.c_str(), header);
        Imf::FrameBuffer fb;
        const std::size_t xs = sizeof(float) * img.channels;
        const std::size_t ys = xs * img.width;
        char* base =
            const_cast<char*>(reinterpret_cast<const char*>(img.data.data()));
        for (int c = 0; c < img.channels; ++c)
            fb.insert(names[c],
                      Imf::Slice(Imf::FLOAT, base + c * sizeof(float), xs, ys));
        file.setFrameBuffer(fb);
        file.writePixels(img.height);
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        throw io_error("failed to write EXR " + path + ": " + e.what());
    }
}

LinearImage read_pfm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open PFM for reading: " + path);

    std::string magic;
    int w = 0, h = 0;
    float scale = 0.f;
    in >> magic >> w >> h >> scale;
    if (!in || (magic != "PF" && magic != "Pf") || w <= 0 || h <= 0)
        throw io_error("malformed PFM header in " + path);
    in.get();  // single whitespace after the header

    const int ch = magic == "PF" ? 3 : 1;
    LinearImage img(w, h, ch);
    const std::size_t row_floats = static_cast<std::size_t>(w) * ch;
    std::vector<float> row(row_floats);
    // PFM stores rows bottom-to-top.
    for (int y = h - 1; y >= 0; --y) {
        in.read(reinterpret_cast<char*>(row.data()), row_floats * sizeof(float));
        if (!in) throw io_error("truncated PFM data in " + path);
        if (scale > 0.f) {  // big-endian file
            for (float& v : row) {
                char* b = reinterpret_cast<char*>(&v);
                std::swap(b[0], b[3]);
                std::swap(b[1], b[2]);
            }
        }
        std::memcpy(&img.data[static_cast<std::size_t>(y) * row_floats],
                    row.data(), row_floats * sizeof(float));
    }
    if (std::fabs(scale) != 1.f)
        for (float& v : img.data) v *= std::fabs(scale);
    return img;
}

void write_pfm(const std::string& path, const LinearImage& img) {
    if (img.empty()) throw invalid_input("cannot write empty image");
    if (img.channels != 1 && img.channels != 3)
        throw invalid_input("PFM output requires 1 or 3 channels");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot open PFM for writing: " + path);
    out << (img.channels == 3 ? "PF" : "Pf") << "\n"
        << img.width << " " << img.height << "\n"
        << "-1.0\n";
    const std::size_t row_floats =
        static_cast<std::size_t>(img.width) * img.channels;
    for (int y = img.height - 1; y >= 0; --y)
        out.write(reinterpret_cast<const char*>(
                      &img.data[static_cast<std::size_t>(y) * row_floats]),
                  row_floats * sizeof(float));
    if (!out) throw io_error("failed to write PFM data to " + path);
}

bool is_linear_extension(const std::string& path) {
    const std::string ext = lower_ext(path);
    return ext == "exr" || ext == "pfm";
}

LinearImage read_linear_image(const std::string& path) {
    const std::string ext = lower_ext(path);
    if (ext == "exr") return read_exr(path);
    if (ext == "pfm") return read_pfm(path);
    throw invalid_input("unsupported linear image extension: " + path);
}

void write_linear_image(const std::string& path, const LinearImage& img) {
    const std::string ext = lower_ext(path);
    if (ext == "exr") return write_exr(path, img);
    if (ext == "pfm") return write_pfm(path, img);
    throw invalid_input("unsupported linear image extension: " + path);
}

}  // namespace relight
