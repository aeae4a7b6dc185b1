// Copyright (c) 2026 The blurf Authors.
// SPDX-License-Identifier: Apache-2.0
#include "blurf/image.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace blurf {

namespace {

void put_u32be(std::vector<unsigned char>& out, std::uint32_t v) {
  out.push_back((v >> 24) & 0xff);
  out.push_back((v >> 16) & 0xff);
  out.push_back((v >> 8) & 0xff);
  out.push_back(v & 0xff);
}

void write_chunk(std::ofstream& os, const char type[4], const std::vector<unsigned char>& data) {
  std::vector<unsigned char> hdr;
  put_u32be(hdr, std::uint32_t(data.size()));
  os.write(reinterpret_cast<const char*>(hdr.data()), 4);
  os.write(type, 4);
  if (!data.empty()) os.write(reinterpret_cast<const char*>(data.data()), std::streamsize(data.size()));
  uLong crc = crc32(0L, Z_NULL, 0);
  crc = crc32(crc, reinterpret_cast<const Bytef*>(type), 4);
  if (!data.empty()) crc = crc32(crc, data.data(), uInt(data.size()));
  std::vector<unsigned char> tail;
  put_u32be(tail, std::uint32_t(crc));
  os.write(reinterpret_cast<const char*>(tail.data()), 4);
}

void save_png_raw(const std::string& path, int width, int height, int channels, int bit_depth,
                  const std::vector<unsigned char>& raw_rows) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot write " + path);
  static const unsigned char sig[8] = {137, 80, 78, 71, 13, 10, 26, 10};
  os.write(reinterpret_cast<const char*>(sig), 8);

  std::vector<unsigned char> ihdr;
  put_u32be(ihdr, std::uint32_t(width));
  put_u32be(ihdr, std::uint32_t(height));
  ihdr.push_back(static_cast<unsigned char>(bit_depth));
  ihdr.push_back(channels == 3 ? 2 : 0);  // color type
  ihdr.push_back(0);
  ihdr.push_back(0);
  ihdr.push_back(0);
  write_chunk(os, "IHDR", ihdr);

  uLongf bound = compressBound(uLong(raw_rows.size()));
  std::vector<unsigned char> idat(bound);
  if (compress2(idat.data(), &bound, raw_rows.data(), uLong(raw_rows.size()), 9) != Z_OK)
    throw std::runtime_error("png deflate failed");
  idat.resize(bound);
  write_chunk(os, "IDAT", idat);
  write_chunk(os, "IEND", {});
  if (!os) throw std::runtime_error("png write failed: " + path);
}

unsigned char quantize(double v) {
  const double c = std::min(1.0, std::max(0.0, v));
  return static_cast<unsigned char>(std::lround(c * 255.0));
}

int paeth(int a, int b, int c) {
  const int p = a + b - c;
  const int pa = std::abs(p - a), pb = std::abs(p - b), pc = std::abs(p - c);
  if (pa <= pb && pa <= pc) return a;
  if (pb <= pc) return b;
  return c;
}

}  // namespace

void save_png(const std::string& path, const Image& img) {
  if (img.channels != 1 && img.channels != 3)
    throw std::invalid_argument("save_png: 1 or 3 channels");
  const std::size_t rowbytes = std::size_t(img.width) * img.channels;
  std::vector<unsigned char> raw;
  raw.reserve((rowbytes + 1) * img.height);
  for (int r = 0; r < img.height; ++r) {
    raw.push_back(0);  // filter none
    for (int c = 0; c < img.width; ++c)
      for (int ch = 0; ch < img.channels; ++ch) raw.push_back(quantize(img.at(r, c, ch)));
  }
  save_png_raw(path, img.width, img.height, img.channels, 8, raw);
}

void save_png_mask(const std::string& path, const Image& img) {
  if (img.channels != 1) throw std::invalid_argument("save_png_mask: 1 channel");
  const std::size_t rowbytes = (std::size_t(img.width) + 7) / 8;
  std::vector<unsigned char> raw;
  raw.reserve((rowbytes + 1) * img.height);
  for (int r = 0; r < img.height; ++r) {
    raw.push_back(0);
    unsigned char acc = 0;
    int nbits = 0;
    for (int c = 0; c < img.width; ++c) {
      acc = static_cast<unsigned char>((acc << 1) | (img.at(r, c) > 0.5 ? 1 : 0));
      if (++nbits == 8) {
        raw.push_back(acc);
        acc = 0;
        nbits = 0;
      }
    }
    if (nbits > 0) raw.push_back(static_cast<unsigned char>(acc << (8 - nbits)));
  }
  save_png_raw(path, img.width, img.height, 1, 1, raw);
}

Image load_png(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot read " + path);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(is)),
                                   std::istreambuf_iterator<char>());
  static const unsigned char sig[8] = {137, 80, 78, 71, 13, 10, 26, 10};
  if (bytes.size() < 8 || std::memcmp(bytes.data(), sig, 8) != 0)
    throw std::runtime_error("not a png: " + path);

  auto u32 = [&](std::size_t off) {
    return (std::uint32_t(bytes[off]) << 24) | (std::uint32_t(bytes[off + 1]) << 16) |
           (std::uint32_t(bytes[off + 2]) << 8) | std::uint32_t(bytes[off + 3]);
  };

  int width = 0, height = 0, bit_depth = 0, color_type = 0;
  std::vector<unsigned char> compressed;
  std::size_t off = 8;
  while (off + 8 <= bytes.size()) {
    const std::uint32_t len = u32(off);
    const std::string type(reinterpret_cast<const char*>(&bytes[off + 4]), 4);
    const std::size_t data = off + 8;
    if (type == "IHDR") {
      width = int(u32(data));
      height = int(u32(data + 4));
      bit_depth = bytes[data + 8];
      color_type = bytes[data + 9];
      if (bytes[data + 12] != 0) throw std::runtime_error("interlaced png unsupported");
    } else if (type == "IDAT") {
      compressed.insert(compressed.end(), bytes.begin() + std::ptrdiff_t(data),
                        bytes.begin() + std::ptrdiff_t(data + len));
    } else if (type == "IEND") {
      break;
    }
    off = data + len + 4;
  }
  int channels;
  if (color_type == 0) {
    channels = 1;
  } else if (color_type == 2) {
    channels = 3;
  } else {
    throw std::runtime_error("png color type unsupported");
  }
  if (bit_depth != 8 && !(bit_depth == 1 && channels == 1))
    throw std::runtime_error("png bit depth unsupported");

  const std::size_t rowbytes =
      bit_depth == 8 ? std::size_t(width) * channels : (std::size_t(width) + 7) / 8;
  std::vector<unsigned char> raw((rowbytes + 1) * height);
  uLongf raw_len = uLongf(raw.size());
  if (uncompress(raw.data(), &raw_len, compressed.data(), uLong(compressed.size())) != Z_OK ||
      raw_len != raw.size())
    throw std::runtime_error("png inflate failed: " + path);

  // defilter
  const int bpp = bit_depth == 8 ? channels : 1;
  std::vector<unsigned char> prev(rowbytes, 0);
  std::vector<unsigned char> cur(rowbytes);
  Image img(width, height, channels);
  for (int r = 0; r < height; ++r) {
    const unsigned char* row = &raw[(rowbytes + 1) * std::size_t(r)];
    const int filter = row[0];
    for (std::size_t i = 0; i < rowbytes; ++i) {
      const int x = row[1 + i];
      const int a = i >= std::size_t(bpp) ? cur[i - bpp] : 0;
      const int b = prev[i];
      const int c = i >= std::size_t(bpp) ? prev[i - bpp] : 0;
      int v;
      switch (filter) {
        case 0: v = x; break;
        case 1: v = x + a; break;
        case 2: v = x + b; break;
        case 3: v = x + (a + b) / 2; break;
        case 4: v = x + paeth(a, b, c); break;
        default: throw std::runtime_error("png filter unsupported");
      }
      cur[i] = static_cast<unsigned char>(v & 0xff);
    }
    if (bit_depth == 8) {
      for (int col = 0; col < width; ++col)
        for (int ch = 0; ch < channels; ++ch)
          img.at(r, col, ch) = double(cur[std::size_t(col) * channels + ch]) / 255.0;
    } else {
      for (int col = 0; col < width; ++col) {
        const unsigned char byte = cur[std::size_t(col) / 8];
        img.at(r, col) = (byte >> (7 - (col % 8))) & 1 ? 1.0 : 0.0;
      }
    }
    std::swap(prev, cur);
  }
  return img;
}

void save_pfm(const std::string& path, const Image& img) {
  const int out_ch = img.channels == 1 ? 1 : 3;
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << (out_ch == 1 ? "Pf" : "PF") << "\n" << img.width << " " << img.height << "\n" << "-1.0\n";
  // PFM stores rows bottom-to-top
  std::vector<float> row(std::size_t(img.width) * out_ch);
  for (int r = img.height - 1; r >= 0; --r) {
    for (int c = 0; c < img.width; ++c)
      for (int ch = 0; ch < out_ch; ++ch)
        row[std::size_t(c) * out_ch + ch] =
            ch < img.channels ? float(img.at(r, c, ch)) : 0.0f;
    os.write(reinterpret_cast<const char*>(row.data()), std::streamsize(row.size() * sizeof(float)));
  }
  if (!os) throw std::runtime_error("pfm write failed: " + path);
}

Image load_pfm(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot read " + path);
  std::string magic;
  is >> magic;
  int width, height;
  double scale;
  is >> width >> height >> scale;
  is.get();  // newline after scale
  if (magic != "PF" && magic != "Pf") throw std::runtime_error("not a pfm: " + path);
  if (scale > 0) throw std::runtime_error("big-endian pfm unsupported");
  const int channels = magic == "PF" ? 3 : 1;
  Image img(width, height, channels);
  std::vector<float> row(std::size_t(width) * channels);
  for (int r = height - 1; r >= 0; --r) {
    is.read(reinterpret_cast<char*>(row.data()), std::streamsize(row.size() * sizeof(float)));
    for (int c = 0; c < width; ++c)
      for (int ch = 0; ch < channels; ++ch) img.at(r, c, ch) = double(row[std::size_t(c) * channels + ch]);
  }
  if (!is) throw std::runtime_error("pfm truncated: " + path);
  return img;
}

}  // namespace blurf
