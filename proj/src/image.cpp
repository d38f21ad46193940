#include "advroad/image.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

namespace advroad {

std::array<float, 3> ImageF::mean_color() const {
  std::array<double, 3> acc = {0, 0, 0};
  const long n = height * width;
  for (long i = 0; i < n; ++i)
    for (long c = 0; c < 3; ++c) acc[c] += px[i * 3 + c];
  std::array<float, 3> out;
  for (long c = 0; c < 3; ++c) out[c] = n ? static_cast<float>(acc[c] / n) : 0.f;
  return out;
}

namespace {

std::uint8_t to_byte(float v) {
  const float c = std::min(std::max(v, 0.f), 1.f);
  return static_cast<std::uint8_t>(std::lround(c * 255.f));
}

// Skips whitespace and '#' comments between PPM header tokens.
long read_header_int(const std::uint8_t* data, std::size_t size, std::size_t& pos) {
  while (pos < size) {
    const char c = static_cast<char>(data[pos]);
    if (c == '#') {
      while (pos < size && data[pos] != '\n') ++pos;
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      ++pos;
    } else {
      break;
    }
  }
  long value = 0;
  bool any = false;
  while (pos < size && std::isdigit(data[pos])) {
    value = value * 10 + (data[pos] - '0');
    ++pos;
    any = true;
  }
  if (!any) raise(Errc::CorruptFile, "malformed PPM header");
  return value;
}

}  // namespace

std::vector<std::uint8_t> encode_ppm(const ImageF& img) {
  char header[64];
  const int n = std::snprintf(header, sizeof(header), "P6\n%ld %ld\n255\n", img.width, img.height);
  std::vector<std::uint8_t> out;
  out.reserve(static_cast<std::size_t>(n) + img.px.size());
  out.insert(out.end(), header, header + n);
  for (float v : img.px) out.push_back(to_byte(v));
  return out;
}

ImageF decode_ppm(const std::uint8_t* data, std::size_t size) {
  if (size < 2 || data[0] != 'P' || data[1] != '6') raise(Errc::CorruptFile, "not a P6 PPM");
  std::size_t pos = 2;
  const long width = read_header_int(data, size, pos);
  const long height = read_header_int(data, size, pos);
  const long maxval = read_header_int(data, size, pos);
  if (maxval != 255) raise(Errc::CorruptFile, "PPM maxval must be 255");
  ++pos;  // single whitespace byte after maxval
  const std::size_t need = static_cast<std::size_t>(width) * height * 3;
  if (pos + need > size) raise(Errc::CorruptFile, "truncated PPM pixel data");
  ImageF img(height, width);
  for (std::size_t i = 0; i < need; ++i) img.px[i] = static_cast<float>(data[pos + i]) / 255.f;
  return img;
}

void save_ppm(const ImageF& img, const std::filesystem::path& path) {
  const auto bytes = encode_ppm(img);
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(Errc::Io, "cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) raise(Errc::Io, "write failed for " + path.string());
}

ImageF load_ppm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(Errc::Io, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return decode_ppm(bytes.data(), bytes.size());
}

ImageF resize_bilinear(const ImageF& img, long new_height, long new_width) {
  ImageF out(new_height, new_width);
  const double sy = new_height > 1 ? double(img.height - 1) / (new_height - 1) : 0.0;
  const double sx = new_width > 1 ? double(img.width - 1) / (new_width - 1) : 0.0;
  for (long y = 0; y < new_height; ++y) {
    const double fy = y * sy;
    const long y0 = static_cast<long>(fy);
    const long y1 = std::min(y0 + 1, img.height - 1);
    const double wy = fy - y0;
    for (long x = 0; x < new_width; ++x) {
      const double fx = x * sx;
      const long x0 = static_cast<long>(fx);
      const long x1 = std::min(x0 + 1, img.width - 1);
      const double wx = fx - x0;
      for (long c = 0; c < 3; ++c) {
        const double v = (1 - wy) * ((1 - wx) * img.at(y0, x0, c) + wx * img.at(y0, x1, c)) +
                         wy * ((1 - wx) * img.at(y1, x0, c) + wx * img.at(y1, x1, c));
        out.at(y, x, c) = static_cast<float>(v);
      }
    }
  }
  return out;
}

}  // namespace advroad
