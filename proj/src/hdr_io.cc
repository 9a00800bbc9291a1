// Copyright 2026 The hdrc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "hdrc/hdr_io.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "hdrc/errors.h"

namespace hdrc {
namespace {

constexpr int kMinRunLength = 4;

std::string next_line(std::span<const std::uint8_t> bytes, std::size_t* pos) {
  std::string line;
  while (*pos < bytes.size() && bytes[*pos] != '\n') {
    line.push_back(static_cast<char>(bytes[*pos]));
    ++*pos;
  }
  if (*pos >= bytes.size()) throw FormatError("RGBE header is not terminated");
  ++*pos;
  return line;
}

void write_rle_component(const std::uint8_t* data, int count,
                         std::vector<std::uint8_t>* out) {
  int cur = 0;
  while (cur < count) {
    int beg_run = cur;
    int run_count = 0;
    int old_run_count = 0;
    while (run_count < kMinRunLength && beg_run < count) {
      beg_run += run_count;
      old_run_count = run_count;
      run_count = 1;
      while (beg_run + run_count < count && run_count < 127 &&
             data[beg_run] == data[beg_run + run_count]) {
        ++run_count;
      }
    }
    if (old_run_count > 1 && old_run_count == beg_run - cur) {
      out->push_back(static_cast<std::uint8_t>(128 + old_run_count));
      out->push_back(data[cur]);
      cur = beg_run;
    }
    while (cur < beg_run) {
      const int literal = std::min(128, beg_run - cur);
      out->push_back(static_cast<std::uint8_t>(literal));
      out->insert(out->end(), data + cur, data + cur + literal);
      cur += literal;
    }
    if (run_count >= kMinRunLength) {
      out->push_back(static_cast<std::uint8_t>(128 + run_count));
      out->push_back(data[beg_run]);
      cur += run_count;
    }
  }
}

double sample_bilinear_wrap(const Image& img, double u, double v, int c) {
  const int w = img.width();
  const int h = img.height();
  const double fx = std::floor(u);
  const double fy = std::floor(v);
  const double ax = u - fx;
  const double ay = v - fy;
  auto wrap_x = [w](long long x) {
    long long m = x % w;
    return static_cast<int>(m < 0 ? m + w : m);
  };
  auto clamp_y = [h](long long y) {
    return static_cast<int>(std::clamp<long long>(y, 0, h - 1));
  };
  const int x0 = wrap_x(static_cast<long long>(fx));
  const int x1 = wrap_x(static_cast<long long>(fx) + 1);
  const int y0 = clamp_y(static_cast<long long>(fy));
  const int y1 = clamp_y(static_cast<long long>(fy) + 1);
  const double top = (1 - ax) * img.at(y0, x0, c) + ax * img.at(y0, x1, c);
  const double bottom = (1 - ax) * img.at(y1, x0, c) + ax * img.at(y1, x1, c);
  return (1 - ay) * top + ay * bottom;
}

}  // namespace

Tensor Image::to_tensor() const {
  Tensor t(Shape{1, 3, height_, width_});
  for (int c = 0; c < 3; ++c) {
    double* p = t.plane(0, c);
    for (std::size_t i = 0; i < pixel_count(); ++i) p[i] = data_[i * 3 + c];
  }
  return t;
}

Image Image::from_tensor(const Tensor& t, int batch_index) {
  const Shape& s = t.shape();
  if (s.c != 3)
    throw ShapeError("image tensor must have 3 channels: " + s.str());
  Image img(s.h, s.w);
  for (int c = 0; c < 3; ++c) {
    const double* p = t.plane(batch_index, c);
    for (std::size_t i = 0; i < img.pixel_count(); ++i) {
      img.data_[i * 3 + c] = p[i];
    }
  }
  return img;
}

Image::Image(int height, int width, double fill)
    : height_(height),
      width_(width),
      data_(static_cast<std::size_t>(height) * width * 3, fill) {
  if (height < 0 || width < 0) throw ShapeError("negative image extent");
}

Plane luminance(const Image& image) {
  Plane out(image.height(), image.width());
  const auto& d = image.data();
  for (std::size_t i = 0; i < image.pixel_count(); ++i) {
    out.data[i] =
        kLumaR * d[3 * i] + kLumaG * d[3 * i + 1] + kLumaB * d[3 * i + 2];
  }
  return out;
}

void float_to_rgbe(double r, double g, double b, std::uint8_t out[4]) {
  const double v = std::max({r, g, b});
  int e = 0;
  if (v < 1e-32) {
    out[0] = out[1] = out[2] = out[3] = 0;
    return;
  }
  const double m = std::frexp(v, &e);
  if (e + 128 > 255) throw ParameterError("pixel value exceeds RGBE range");
  if (e + 128 < 1) {
    out[0] = out[1] = out[2] = out[3] = 0;
    return;
  }
  const double scale = m * 256.0 / v;
  out[0] = static_cast<std::uint8_t>(std::min(255.0, r * scale));
  out[1] = static_cast<std::uint8_t>(std::min(255.0, g * scale));
  out[2] = static_cast<std::uint8_t>(std::min(255.0, b * scale));
  out[3] = static_cast<std::uint8_t>(e + 128);
}

void rgbe_to_float(const std::uint8_t in[4], double* r, double* g, double* b) {
  if (in[3] == 0) {
    *r = *g = *b = 0.0;
    return;
  }
  const double f = std::ldexp(1.0, static_cast<int>(in[3]) - 136);
  *r = in[0] * f;
  *g = in[1] * f;
  *b = in[2] * f;
}

HdrImage read_radiance_hdr(std::span<const std::uint8_t> bytes) {
  std::size_t pos = 0;
  const std::string magic = next_line(bytes, &pos);
  if (magic.rfind("#?RADIANCE", 0) != 0 && magic.rfind("#?RGBE", 0) != 0) {
    throw FormatError("missing Radiance magic");
  }
  while (true) {
    const std::string line = next_line(bytes, &pos);
    if (line.empty()) break;
    if (line.rfind("FORMAT=", 0) == 0 && line != "FORMAT=32-bit_rle_rgbe") {
      throw FormatError("unsupported pixel format: " + line);
    }
  }
  const std::string res = next_line(bytes, &pos);
  char ya[3] = {0};
  char xa[3] = {0};
  int height = 0;
  int width = 0;
  if (std::sscanf(res.c_str(), "%2s %d %2s %d", ya, &height, xa, &width) != 4 ||
      std::string(ya) != "-Y" || std::string(xa) != "+X" || height <= 0 ||
      width <= 0) {
    throw FormatError("unsupported resolution line: " + res);
  }

  HdrImage out;
  out.pixels = Image(height, width);
  std::vector<std::uint8_t> scan(static_cast<std::size_t>(width) * 4);
  auto need = [&](std::size_t n) {
    if (pos + n > bytes.size())
      throw CorruptionError("truncated scanline data");
  };
  for (int y = 0; y < height; ++y) {
    need(4);
    const bool rle = width >= 8 && width < 0x8000 && bytes[pos] == 2 &&
                     bytes[pos + 1] == 2 && (bytes[pos + 2] & 0x80) == 0;
    if (rle) {
      const int encoded_width = (bytes[pos + 2] << 8) | bytes[pos + 3];
      if (encoded_width != width)
        throw CorruptionError("scanline width mismatch");
      pos += 4;
      for (int c = 0; c < 4; ++c) {
        int x = 0;
        while (x < width) {
          need(1);
          int count = bytes[pos++];
          if (count > 128) {
            count -= 128;
            if (x + count > width) throw CorruptionError("bad RLE run");
            need(1);
            const std::uint8_t v = bytes[pos++];
            for (int i = 0; i < count; ++i) scan[(x + i) * 4 + c] = v;
          } else {
            if (count == 0 || x + count > width) {
              throw CorruptionError("bad RLE literal");
            }
            need(count);
            for (int i = 0; i < count; ++i)
              scan[(x + i) * 4 + c] = bytes[pos++];
          }
          x += count;
        }
      }
    } else {
      need(scan.size());
      std::copy(bytes.begin() + pos, bytes.begin() + pos + scan.size(),
                scan.begin());
      pos += scan.size();
    }
    for (int x = 0; x < width; ++x) {
      double r = 0;
      double g = 0;
      double b = 0;
      rgbe_to_float(&scan[x * 4], &r, &g, &b);
      out.pixels.at(y, x, 0) = r;
      out.pixels.at(y, x, 1) = g;
      out.pixels.at(y, x, 2) = b;
    }
  }
  return out;
}

std::vector<std::uint8_t> write_radiance_hdr(const HdrImage& image) {
  const Image& px = image.pixels;
  for (double v : px.data()) {
    if (!std::isfinite(v) || v < 0) {
      throw ParameterError("RGBE cannot encode negative or non-finite pixels");
    }
  }
  std::ostringstream header;
  header << "#?RADIANCE\nFORMAT=32-bit_rle_rgbe\n\n-Y " << px.height() << " +X "
         << px.width() << "\n";
  const std::string h = header.str();
  std::vector<std::uint8_t> out(h.begin(), h.end());

  const int width = px.width();
  const bool rle = width >= 8 && width < 0x8000;
  std::vector<std::uint8_t> scan(static_cast<std::size_t>(width) * 4);
  std::vector<std::uint8_t> component(width);
  for (int y = 0; y < px.height(); ++y) {
    for (int x = 0; x < width; ++x) {
      float_to_rgbe(px.at(y, x, 0), px.at(y, x, 1), px.at(y, x, 2),
                    &scan[x * 4]);
    }
    if (!rle) {
      out.insert(out.end(), scan.begin(), scan.end());
      continue;
    }
    out.push_back(2);
    out.push_back(2);
    out.push_back(static_cast<std::uint8_t>(width >> 8));
    out.push_back(static_cast<std::uint8_t>(width & 0xff));
    for (int c = 0; c < 4; ++c) {
      for (int x = 0; x < width; ++x) component[x] = scan[x * 4 + c];
      write_rle_component(component.data(), width, &out);
    }
  }
  return out;
}

HdrImage read_radiance_hdr_file(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  return read_radiance_hdr(bytes);
}

void write_radiance_hdr_file(const std::filesystem::path& path,
                             const HdrImage& image) {
  write_file_bytes(path, write_radiance_hdr(image));
}

HdrImage equirect_to_perspective(const HdrImage& panorama, double yaw,
                                 double pitch, double fov, int out_size) {
  const Image& pano = panorama.pixels;
  if (pano.empty() || pano.width() != 2 * pano.height()) {
    throw ShapeError("equirectangular panorama must be 2:1, got " +
                     std::to_string(pano.width()) + "x" +
                     std::to_string(pano.height()));
  }
  if (!(fov > 0.0 && fov < std::numbers::pi)) {
    throw ParameterError("field of view must lie in (0, pi)");
  }
  if (out_size <= 0) throw ParameterError("output size must be positive");

  const double half = std::tan(0.5 * fov);
  const double cy = std::cos(yaw), sy = std::sin(yaw);
  const double cp = std::cos(pitch), sp = std::sin(pitch);
  // World frame: x right, y up, z forward.
  const double fwd[3] = {cp * sy, sp, cp * cy};
  const double right[3] = {cy, 0.0, -sy};
  const double up[3] = {-sp * sy, cp, -sp * cy};

  HdrImage out;
  out.pixels = Image(out_size, out_size);
  out.calib_max_luminance = panorama.calib_max_luminance;
  const double two_pi = 2.0 * std::numbers::pi;
  for (int row = 0; row < out_size; ++row) {
    const double py = (2.0 * (row + 0.5) / out_size - 1.0) * half;
    for (int col = 0; col < out_size; ++col) {
      const double px = (2.0 * (col + 0.5) / out_size - 1.0) * half;
      double d[3];
      for (int i = 0; i < 3; ++i) d[i] = fwd[i] + px * right[i] - py * up[i];
      const double norm = std::sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]);
      const double lon = std::atan2(d[0], d[2]);
      const double lat = std::asin(std::clamp(d[1] / norm, -1.0, 1.0));
      const double u = (lon / two_pi + 0.5) * pano.width() - 0.5;
      const double v = (0.5 - lat / std::numbers::pi) * pano.height() - 0.5;
      for (int c = 0; c < 3; ++c) {
        out.pixels.at(row, col, c) = sample_bilinear_wrap(pano, u, v, c);
      }
    }
  }
  return out;
}

HdrImage preprocess(const HdrImage& image) {
  const Plane lum = luminance(image.pixels);
  double max_lum = 0.0;
  for (double v : lum.data) max_lum = std::max(max_lum, v);
  if (!(max_lum > 0.0)) {
    throw DegenerateInputError("image has no pixel with positive luminance");
  }
  HdrImage out;
  out.pixels = image.pixels;
  // Already normalized up to rounding: returned bit-exact.
  if (std::fabs(max_lum - 1.0) <= 1e-12) {
    out.scale_applied = 1.0;
    return out;
  }
  const double scale = 1.0 / max_lum;
  for (double& v : out.pixels.data()) v *= scale;
  out.scale_applied = scale;
  return out;
}

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open manifest " + path.string());
  std::vector<ManifestEntry> entries;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream is(line);
    std::vector<std::string> tokens;
    for (std::string t; is >> t;) tokens.push_back(t);
    if (tokens.empty()) continue;
    ManifestEntry e;
    if (tokens.size() >= 3) {
      try {
        e.yaw = std::stod(tokens[tokens.size() - 2]);
        e.pitch = std::stod(tokens.back());
      } catch (const std::logic_error&) {
        throw FormatError("bad manifest line: " + line);
      }
      tokens.resize(tokens.size() - 2);
    }
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      if (i) e.path += ' ';
      e.path += tokens[i];
    }
    std::filesystem::path p(e.path);
    if (p.is_relative()) e.path = (path.parent_path() / p).string();
    entries.push_back(std::move(e));
  }
  return entries;
}

void write_manifest(const std::filesystem::path& path,
                    const std::vector<ManifestEntry>& entries) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write manifest " + path.string());
  out.precision(17);
  for (const auto& e : entries) {
    out << e.path << ' ' << e.yaw << ' ' << e.pitch << '\n';
  }
}

void write_ppm_file(const std::filesystem::path& path, const LdrImage& image) {
  const Image& px = image.pixels;
  std::string header = "P6\n" + std::to_string(px.width()) + " " +
                       std::to_string(px.height()) + "\n255\n";
  std::vector<std::uint8_t> bytes(header.begin(), header.end());
  for (double v : px.data()) {
    bytes.push_back(static_cast<std::uint8_t>(
        std::lround(std::clamp(v, 0.0, 1.0) * 255.0)));
  }
  write_file_bytes(path, bytes);
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), {});
}

void write_file_bytes(const std::filesystem::path& path,
                      std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

}  // namespace hdrc
