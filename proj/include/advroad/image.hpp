#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "advroad/error.hpp"
#include "advroad/tensor.hpp"

namespace advroad {

// RGB image, HWC float storage, values in [0,1].
struct ImageF {
  long height = 0;
  long width = 0;
  std::vector<float> px;

  ImageF() = default;
  ImageF(long h, long w) : height(h), width(w), px(static_cast<std::size_t>(h * w * 3), 0.f) {}

  float& at(long y, long x, long c) { return px[(y * width + x) * 3 + c]; }
  float at(long y, long x, long c) const { return px[(y * width + x) * 3 + c]; }

  std::array<float, 3> mean_color() const;
};

// Binary PPM (P6, maxval 255).
std::vector<std::uint8_t> encode_ppm(const ImageF& img);
ImageF decode_ppm(const std::uint8_t* data, std::size_t size);
void save_ppm(const ImageF& img, const std::filesystem::path& path);
ImageF load_ppm(const std::filesystem::path& path);

// Bilinear resample to a new resolution.
ImageF resize_bilinear(const ImageF& img, long new_height, long new_width);

template <typename S>
Tensor<S> image_to_chw(const ImageF& img) {
  Tensor<S> t = Tensor<S>::zeros({3, img.height, img.width});
  for (long c = 0; c < 3; ++c)
    for (long y = 0; y < img.height; ++y)
      for (long x = 0; x < img.width; ++x)
        t.data()[(c * img.height + y) * img.width + x] = static_cast<S>(img.at(y, x, c));
  return t;
}

template <typename S>
ImageF image_from_chw(const Tensor<S>& t) {
  if (t.rank() != 3 || t.shape()[0] != 3)
    raise(Errc::ShapeMismatch, "image_from_chw: need [3,H,W], got " + shape_str(t.shape()));
  ImageF img(t.shape()[1], t.shape()[2]);
  for (long c = 0; c < 3; ++c)
    for (long y = 0; y < img.height; ++y)
      for (long x = 0; x < img.width; ++x)
        img.at(y, x, c) = static_cast<float>(t.data()[(c * img.height + y) * img.width + x]);
  return img;
}

}  // namespace advroad
