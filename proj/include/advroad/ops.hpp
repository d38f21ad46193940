#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_map>
#include <vector>

#include "advroad/error.hpp"
#include "advroad/tensor.hpp"

// Primitive tensor operations. Each free function computes the forward value
// and, when an input requires a gradient and a tape is active, records a
// backward closure. Elementwise ops allow a size-1 operand broadcast against a
// full tensor; anything richer needs an explicit reshape.

namespace advroad {

namespace detail {

template <typename S>
using MatRM = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename S>
using MapRM = Eigen::Map<MatRM<S>>;
template <typename S>
using CMapRM = Eigen::Map<const MatRM<S>>;

template <typename S>
inline void record(Tensor<S>& out, const std::vector<Tensor<S>>& ins,
                   typename Tape<S>::BackwardFn fn) {
  bool any = false;
  for (const auto& t : ins) any = any || t.requires_grad();
  out.set_requires_grad(any);
  if (any && Tape<S>::current()) Tape<S>::current()->record(out, ins, std::move(fn));
}

inline void check_same_shape(const char* op, const Shape& a, const Shape& b) {
  if (a != b)
    raise(Errc::ShapeMismatch,
          std::string(op) + ": shapes " + shape_str(a) + " and " + shape_str(b) + " differ");
}

// col[(c*k+ki)*k+kj][oy*Wo+ox] = src[c][oy*s+ki-p][ox*s+kj-p], zero outside.
template <typename S>
void im2col(const S* src, long C, long H, long W, long k, long s, long p, long Ho, long Wo,
            S* col) {
  const long cols = Ho * Wo;
  for (long c = 0; c < C; ++c) {
    for (long ki = 0; ki < k; ++ki) {
      for (long kj = 0; kj < k; ++kj) {
        S* row = col + ((c * k + ki) * k + kj) * cols;
        for (long oy = 0; oy < Ho; ++oy) {
          const long iy = oy * s + ki - p;
          if (iy < 0 || iy >= H) {
            std::fill(row + oy * Wo, row + (oy + 1) * Wo, S(0));
            continue;
          }
          const S* srow = src + (c * H + iy) * W;
          for (long ox = 0; ox < Wo; ++ox) {
            const long ix = ox * s + kj - p;
            row[oy * Wo + ox] = (ix < 0 || ix >= W) ? S(0) : srow[ix];
          }
        }
      }
    }
  }
}

template <typename S>
void col2im_add(const S* col, long C, long H, long W, long k, long s, long p, long Ho, long Wo,
                S* dst) {
  const long cols = Ho * Wo;
  for (long c = 0; c < C; ++c) {
    for (long ki = 0; ki < k; ++ki) {
      for (long kj = 0; kj < k; ++kj) {
        const S* row = col + ((c * k + ki) * k + kj) * cols;
        for (long oy = 0; oy < Ho; ++oy) {
          const long iy = oy * s + ki - p;
          if (iy < 0 || iy >= H) continue;
          S* drow = dst + (c * H + iy) * W;
          for (long ox = 0; ox < Wo; ++ox) {
            const long ix = ox * s + kj - p;
            if (ix >= 0 && ix < W) drow[ix] += row[oy * Wo + ox];
          }
        }
      }
    }
  }
}

struct ConvGeom {
  long n, c, h, w;       // input
  long f, k;             // filters
  long s, p;             // stride, pad
  long ho, wo;           // output spatial
  bool batched;          // rank-4 input
};

template <typename S>
ConvGeom conv_geometry(const char* op, const Tensor<S>& x, long f_dim, long k, long s, long p,
                       bool transposed) {
  if (s != 1 && s != 2) raise(Errc::ShapeMismatch, std::string(op) + ": stride must be 1 or 2");
  if (p < 0) raise(Errc::ShapeMismatch, std::string(op) + ": negative padding");
  ConvGeom g{};
  g.batched = x.rank() == 4;
  if (x.rank() != 3 && x.rank() != 4)
    raise(Errc::ShapeMismatch, std::string(op) + ": input rank must be 3 or 4, got " +
                                   shape_str(x.shape()));
  const auto& sh = x.shape();
  g.n = g.batched ? sh[0] : 1;
  g.c = sh[g.batched ? 1 : 0];
  g.h = sh[g.batched ? 2 : 1];
  g.w = sh[g.batched ? 3 : 2];
  g.f = f_dim;
  g.k = k;
  g.s = s;
  g.p = p;
  if (transposed) {
    g.ho = (g.h - 1) * s + k - 2 * p;
    g.wo = (g.w - 1) * s + k - 2 * p;
  } else {
    g.ho = (g.h + 2 * p - k) / s + 1;
    g.wo = (g.w + 2 * p - k) / s + 1;
  }
  if (g.ho < 1 || g.wo < 1)
    raise(Errc::ShapeMismatch, std::string(op) + ": empty output for input " + shape_str(sh));
  return g;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Elementwise binary ops (same shape, or one operand of size 1)

namespace detail {

enum class BinKind { Add, Sub, Mul };

template <typename S>
Tensor<S> binary_op(const char* name, BinKind kind, const Tensor<S>& a, const Tensor<S>& b) {
  const bool a_scalar = a.size() == 1 && b.size() != 1;
  const bool b_scalar = b.size() == 1 && a.size() != 1;
  if (!a_scalar && !b_scalar) check_same_shape(name, a.shape(), b.shape());

  const Shape& out_shape = a_scalar ? b.shape() : a.shape();
  Tensor<S> out = Tensor<S>::zeros(out_shape);
  const long n = out.size();
  const S* pa = a.data();
  const S* pb = b.data();
  S* po = out.data();
  for (long i = 0; i < n; ++i) {
    const S va = a_scalar ? pa[0] : pa[i];
    const S vb = b_scalar ? pb[0] : pb[i];
    po[i] = kind == BinKind::Add ? va + vb : kind == BinKind::Sub ? va - vb : va * vb;
  }

  record<S>(out, {a, b},
            [a, b, a_scalar, b_scalar, kind, n](const S* dy, const std::function<S*(std::size_t)>& gin) {
              if (S* da = gin(0)) {
                for (long i = 0; i < n; ++i) {
                  const S g = kind == BinKind::Mul ? dy[i] * (b_scalar ? b.data()[0] : b.data()[i])
                                                   : dy[i];
                  da[a_scalar ? 0 : i] += g;
                }
              }
              if (S* db = gin(1)) {
                for (long i = 0; i < n; ++i) {
                  S g;
                  if (kind == BinKind::Mul)
                    g = dy[i] * (a_scalar ? a.data()[0] : a.data()[i]);
                  else if (kind == BinKind::Sub)
                    g = -dy[i];
                  else
                    g = dy[i];
                  db[b_scalar ? 0 : i] += g;
                }
              }
            });
  return out;
}

}  // namespace detail

template <typename S>
Tensor<S> add(const Tensor<S>& a, const Tensor<S>& b) {
  return detail::binary_op("add", detail::BinKind::Add, a, b);
}
template <typename S>
Tensor<S> sub(const Tensor<S>& a, const Tensor<S>& b) {
  return detail::binary_op("sub", detail::BinKind::Sub, a, b);
}
template <typename S>
Tensor<S> mul(const Tensor<S>& a, const Tensor<S>& b) {
  return detail::binary_op("mul", detail::BinKind::Mul, a, b);
}

template <typename S>
Tensor<S> scalar_mul(const Tensor<S>& x, double c) {
  Tensor<S> out = Tensor<S>::zeros(x.shape());
  const long n = x.size();
  const S cs = static_cast<S>(c);
  for (long i = 0; i < n; ++i) out.data()[i] = x.data()[i] * cs;
  detail::record<S>(out, {x}, [cs, n](const S* dy, const std::function<S*(std::size_t)>& gin) {
    if (S* dx = gin(0))
      for (long i = 0; i < n; ++i) dx[i] += dy[i] * cs;
  });
  return out;
}

template <typename S>
Tensor<S> add_scalar(const Tensor<S>& x, double c) {
  return add(x, Tensor<S>::scalar(static_cast<S>(c)));
}

// ---------------------------------------------------------------------------
// Elementwise unary ops

namespace detail {

template <typename S, typename Fwd, typename Bwd>
Tensor<S> unary_op(const Tensor<S>& x, Fwd f, Bwd dfdx_from_xy) {
  Tensor<S> out = Tensor<S>::zeros(x.shape());
  const long n = x.size();
  for (long i = 0; i < n; ++i) out.data()[i] = f(x.data()[i]);
  record<S>(out, {x},
            [x, out, dfdx_from_xy, n](const S* dy, const std::function<S*(std::size_t)>& gin) {
              if (S* dx = gin(0)) {
                const S* px = x.data();
                const S* py = out.data();
                for (long i = 0; i < n; ++i) dx[i] += dy[i] * dfdx_from_xy(px[i], py[i]);
              }
            });
  return out;
}

}  // namespace detail

template <typename S>
Tensor<S> relu(const Tensor<S>& x) {
  return detail::unary_op(
      x, [](S v) { return v > S(0) ? v : S(0); },
      [](S v, S) { return v > S(0) ? S(1) : S(0); });
}

template <typename S>
Tensor<S> leaky_relu(const Tensor<S>& x, double slope) {
  const S a = static_cast<S>(slope);
  return detail::unary_op(
      x, [a](S v) { return v > S(0) ? v : a * v; },
      [a](S v, S) { return v > S(0) ? S(1) : a; });
}

template <typename S>
Tensor<S> sigmoid(const Tensor<S>& x) {
  return detail::unary_op(
      x,
      [](S v) {
        if (v >= S(0)) return S(1) / (S(1) + std::exp(-v));
        const S e = std::exp(v);
        return e / (S(1) + e);
      },
      [](S, S y) { return y * (S(1) - y); });
}

template <typename S>
Tensor<S> tanh(const Tensor<S>& x) {
  return detail::unary_op(
      x, [](S v) { return std::tanh(v); }, [](S, S y) { return S(1) - y * y; });
}

template <typename S>
Tensor<S> exp(const Tensor<S>& x) {
  return detail::unary_op(
      x, [](S v) { return std::exp(v); }, [](S, S y) { return y; });
}

// log(max(x, eps)); the gradient uses the clamped argument.
template <typename S>
Tensor<S> log(const Tensor<S>& x, double eps = 1e-12) {
  const S e = static_cast<S>(eps);
  return detail::unary_op(
      x, [e](S v) { return std::log(std::max(v, e)); },
      [e](S v, S) { return S(1) / std::max(v, e); });
}

template <typename S>
Tensor<S> power(const Tensor<S>& x, double exponent) {
  const S p = static_cast<S>(exponent);
  return detail::unary_op(
      x, [p](S v) { return std::pow(v, p); },
      [p](S v, S) { return p * std::pow(v, p - S(1)); });
}

// Gradient passes only strictly inside the active range.
template <typename S>
Tensor<S> clamp(const Tensor<S>& x, double lo, double hi) {
  const S l = static_cast<S>(lo), h = static_cast<S>(hi);
  return detail::unary_op(
      x, [l, h](S v) { return std::min(std::max(v, l), h); },
      [l, h](S v, S) { return (v > l && v < h) ? S(1) : S(0); });
}

// ---------------------------------------------------------------------------
// Reductions

template <typename S>
Tensor<S> sum(const Tensor<S>& x) {
  S acc = S(0);
  for (long i = 0; i < x.size(); ++i) acc += x.data()[i];
  Tensor<S> out = Tensor<S>::from({1}, {acc});
  const long n = x.size();
  detail::record<S>(out, {x}, [n](const S* dy, const std::function<S*(std::size_t)>& gin) {
    if (S* dx = gin(0))
      for (long i = 0; i < n; ++i) dx[i] += dy[0];
  });
  return out;
}

template <typename S>
Tensor<S> mean(const Tensor<S>& x) {
  if (x.size() == 0) raise(Errc::EmptyInput, "mean of empty tensor");
  S acc = S(0);
  for (long i = 0; i < x.size(); ++i) acc += x.data()[i];
  const long n = x.size();
  Tensor<S> out = Tensor<S>::from({1}, {acc / S(n)});
  detail::record<S>(out, {x}, [n](const S* dy, const std::function<S*(std::size_t)>& gin) {
    if (S* dx = gin(0)) {
      const S g = dy[0] / S(n);
      for (long i = 0; i < n; ++i) dx[i] += g;
    }
  });
  return out;
}

// ---------------------------------------------------------------------------
// Shape ops

template <typename S>
Tensor<S> reshape(const Tensor<S>& x, Shape new_shape) {
  if (shape_numel(new_shape) != x.size())
    raise(Errc::ShapeMismatch, "reshape: cannot view " + shape_str(x.shape()) + " as " +
                                   shape_str(new_shape));
  Tensor<S> out = Tensor<S>::from(std::move(new_shape), x.values());
  const long n = x.size();
  detail::record<S>(out, {x}, [n](const S* dy, const std::function<S*(std::size_t)>& gin) {
    if (S* dx = gin(0))
      for (long i = 0; i < n; ++i) dx[i] += dy[i];
  });
  return out;
}

template <typename S>
Tensor<S> concat(const std::vector<Tensor<S>>& parts, long axis) {
  if (parts.empty()) raise(Errc::EmptyInput, "concat of zero tensors");
  const auto& ref = parts[0].shape();
  if (axis < 0 || axis >= static_cast<long>(ref.size()))
    raise(Errc::ShapeMismatch, "concat: axis " + std::to_string(axis) + " out of range");
  Shape out_shape = ref;
  out_shape[axis] = 0;
  for (const auto& t : parts) {
    if (t.rank() != ref.size())
      raise(Errc::ShapeMismatch, "concat: rank mismatch " + shape_str(t.shape()));
    for (std::size_t d = 0; d < ref.size(); ++d)
      if (static_cast<long>(d) != axis && t.shape()[d] != ref[d])
        raise(Errc::ShapeMismatch, "concat: shapes " + shape_str(ref) + " and " +
                                       shape_str(t.shape()) + " differ off-axis");
    out_shape[axis] += t.shape()[axis];
  }

  long outer = 1, inner = 1;
  for (long d = 0; d < axis; ++d) outer *= ref[d];
  for (std::size_t d = axis + 1; d < ref.size(); ++d) inner *= ref[d];

  Tensor<S> out = Tensor<S>::zeros(out_shape);
  const long out_axis = out_shape[axis];
  long offset = 0;
  for (const auto& t : parts) {
    const long ta = t.shape()[axis];
    for (long o = 0; o < outer; ++o)
      std::copy(t.data() + o * ta * inner, t.data() + (o + 1) * ta * inner,
                out.data() + (o * out_axis + offset) * inner);
    offset += ta;
  }

  std::vector<long> axis_lens;
  axis_lens.reserve(parts.size());
  for (const auto& t : parts) axis_lens.push_back(t.shape()[axis]);
  detail::record<S>(out, parts,
                    [axis_lens, outer, inner, out_axis](const S* dy,
                                                        const std::function<S*(std::size_t)>& gin) {
                      long off = 0;
                      for (std::size_t i = 0; i < axis_lens.size(); ++i) {
                        const long ta = axis_lens[i];
                        if (S* dp = gin(i)) {
                          for (long o = 0; o < outer; ++o) {
                            const S* srow = dy + (o * out_axis + off) * inner;
                            S* drow = dp + o * ta * inner;
                            for (long j = 0; j < ta * inner; ++j) drow[j] += srow[j];
                          }
                        }
                        off += ta;
                      }
                    });
  return out;
}

// ---------------------------------------------------------------------------
// matmul [m,k] x [k,n] -> [m,n]

template <typename S>
Tensor<S> matmul(const Tensor<S>& a, const Tensor<S>& b) {
  if (a.rank() != 2 || b.rank() != 2 || a.shape()[1] != b.shape()[0])
    raise(Errc::ShapeMismatch,
          "matmul: incompatible " + shape_str(a.shape()) + " x " + shape_str(b.shape()));
  const long m = a.shape()[0], k = a.shape()[1], n = b.shape()[1];
  Tensor<S> out = Tensor<S>::zeros({m, n});
  {
    detail::CMapRM<S> ma(a.data(), m, k), mb(b.data(), k, n);
    detail::MapRM<S> mo(out.data(), m, n);
    mo.noalias() = ma * mb;
  }
  detail::record<S>(out, {a, b},
                    [a, b, m, k, n](const S* dy, const std::function<S*(std::size_t)>& gin) {
                      detail::CMapRM<S> mdy(dy, m, n);
                      if (S* da = gin(0)) {
                        detail::CMapRM<S> mb(b.data(), k, n);
                        detail::MapRM<S>(da, m, k).noalias() += mdy * mb.transpose();
                      }
                      if (S* db = gin(1)) {
                        detail::CMapRM<S> ma(a.data(), m, k);
                        detail::MapRM<S>(db, k, n).noalias() += ma.transpose() * mdy;
                      }
                    });
  return out;
}

// ---------------------------------------------------------------------------
// conv2d: x [N,C,H,W] or [C,H,W], w [F,C,k,k], optional bias [F].
// Stride 1 or 2, square kernel, zero padding.

template <typename S>
Tensor<S> conv2d(const Tensor<S>& x, const Tensor<S>& w, const Tensor<S>* bias, long stride,
                 long pad) {
  if (w.rank() != 4 || w.shape()[2] != w.shape()[3])
    raise(Errc::ShapeMismatch, "conv2d: weight must be [F,C,k,k], got " + shape_str(w.shape()));
  const auto g = detail::conv_geometry("conv2d", x, w.shape()[0], w.shape()[2], stride, pad, false);
  if (w.shape()[1] != g.c)
    raise(Errc::ShapeMismatch, "conv2d: input channels " + std::to_string(g.c) +
                                   " vs weight " + shape_str(w.shape()));
  if (bias && (bias->rank() != 1 || bias->shape()[0] != g.f))
    raise(Errc::ShapeMismatch, "conv2d: bias must be [F]");

  Shape out_shape = g.batched ? Shape{g.n, g.f, g.ho, g.wo} : Shape{g.f, g.ho, g.wo};
  Tensor<S> out = Tensor<S>::zeros(out_shape);

  const long ckk = g.c * g.k * g.k;
  const long cols = g.ho * g.wo;
  std::vector<S> col(static_cast<std::size_t>(ckk * cols));
  detail::CMapRM<S> mw(w.data(), g.f, ckk);
  for (long s = 0; s < g.n; ++s) {
    detail::im2col(x.data() + s * g.c * g.h * g.w, g.c, g.h, g.w, g.k, g.s, g.p, g.ho, g.wo,
                   col.data());
    detail::MapRM<S> mo(out.data() + s * g.f * cols, g.f, cols);
    mo.noalias() = mw * detail::CMapRM<S>(col.data(), ckk, cols);
    if (bias) {
      const S* pb = bias->data();
      for (long f = 0; f < g.f; ++f) mo.row(f).array() += pb[f];
    }
  }

  std::vector<Tensor<S>> ins = {x, w};
  if (bias) ins.push_back(*bias);
  const bool has_bias = bias != nullptr;
  detail::record<S>(out, ins,
                    [x, w, g, ckk, cols, has_bias](const S* dy,
                                                   const std::function<S*(std::size_t)>& gin) {
                      S* dx = gin(0);
                      S* dw = gin(1);
                      S* db = has_bias ? gin(2) : nullptr;
                      std::vector<S> col(static_cast<std::size_t>(ckk * cols));
                      std::vector<S> dcol;
                      detail::CMapRM<S> mw(w.data(), g.f, ckk);
                      for (long s = 0; s < g.n; ++s) {
                        detail::CMapRM<S> mdy(dy + s * g.f * cols, g.f, cols);
                        if (dw) {
                          detail::im2col(x.data() + s * g.c * g.h * g.w, g.c, g.h, g.w, g.k, g.s,
                                         g.p, g.ho, g.wo, col.data());
                          detail::MapRM<S>(dw, g.f, ckk).noalias() +=
                              mdy * detail::CMapRM<S>(col.data(), ckk, cols).transpose();
                        }
                        if (dx) {
                          dcol.assign(static_cast<std::size_t>(ckk * cols), S(0));
                          detail::MapRM<S>(dcol.data(), ckk, cols).noalias() =
                              mw.transpose() * mdy;
                          detail::col2im_add(dcol.data(), g.c, g.h, g.w, g.k, g.s, g.p, g.ho, g.wo,
                                             dx + s * g.c * g.h * g.w);
                        }
                        if (db)
                          for (long f = 0; f < g.f; ++f) db[f] += mdy.row(f).sum();
                      }
                    });
  return out;
}

template <typename S>
Tensor<S> conv2d(const Tensor<S>& x, const Tensor<S>& w, const Tensor<S>& bias, long stride,
                 long pad) {
  return conv2d(x, w, &bias, stride, pad);
}

// transposed-conv2d: x [N,C,H,W] or [C,H,W], w [C,F,k,k], optional bias [F].
// Output spatial size (H-1)*stride + k - 2*pad; mirrors conv2d's configuration.

template <typename S>
Tensor<S> transposed_conv2d(const Tensor<S>& x, const Tensor<S>& w, const Tensor<S>* bias,
                            long stride, long pad) {
  if (w.rank() != 4 || w.shape()[2] != w.shape()[3])
    raise(Errc::ShapeMismatch,
          "transposed-conv2d: weight must be [C,F,k,k], got " + shape_str(w.shape()));
  const long f = w.shape()[1];
  const auto g =
      detail::conv_geometry("transposed-conv2d", x, f, w.shape()[2], stride, pad, true);
  if (w.shape()[0] != g.c)
    raise(Errc::ShapeMismatch, "transposed-conv2d: input channels " + std::to_string(g.c) +
                                   " vs weight " + shape_str(w.shape()));
  if (bias && (bias->rank() != 1 || bias->shape()[0] != f))
    raise(Errc::ShapeMismatch, "transposed-conv2d: bias must be [F]");

  Shape out_shape = g.batched ? Shape{g.n, g.f, g.ho, g.wo} : Shape{g.f, g.ho, g.wo};
  Tensor<S> out = Tensor<S>::zeros(out_shape);

  const long fkk = g.f * g.k * g.k;
  const long in_cols = g.h * g.w;
  std::vector<S> colt(static_cast<std::size_t>(fkk * in_cols));
  detail::CMapRM<S> mw(w.data(), g.c, fkk);
  for (long s = 0; s < g.n; ++s) {
    detail::CMapRM<S> mx(x.data() + s * g.c * in_cols, g.c, in_cols);
    detail::MapRM<S>(colt.data(), fkk, in_cols).noalias() = mw.transpose() * mx;
    // scatter input-position columns into the enlarged output grid
    detail::col2im_add(colt.data(), g.f, g.ho, g.wo, g.k, g.s, g.p, g.h, g.w,
                       out.data() + s * g.f * g.ho * g.wo);
    if (bias) {
      S* po = out.data() + s * g.f * g.ho * g.wo;
      const S* pb = bias->data();
      for (long fc = 0; fc < g.f; ++fc)
        for (long i = 0; i < g.ho * g.wo; ++i) po[fc * g.ho * g.wo + i] += pb[fc];
    }
  }

  std::vector<Tensor<S>> ins = {x, w};
  if (bias) ins.push_back(*bias);
  const bool has_bias = bias != nullptr;
  detail::record<S>(out, ins,
                    [x, w, g, fkk, in_cols, has_bias](const S* dy,
                                                      const std::function<S*(std::size_t)>& gin) {
                      S* dx = gin(0);
                      S* dw = gin(1);
                      S* db = has_bias ? gin(2) : nullptr;
                      std::vector<S> col(static_cast<std::size_t>(fkk * in_cols));
                      detail::CMapRM<S> mw(w.data(), g.c, fkk);
                      for (long s = 0; s < g.n; ++s) {
                        const S* pdy = dy + s * g.f * g.ho * g.wo;
                        if (dx || dw)
                          detail::im2col(pdy, g.f, g.ho, g.wo, g.k, g.s, g.p, g.h, g.w, col.data());
                        detail::CMapRM<S> mcol(col.data(), fkk, in_cols);
                        if (dx)
                          detail::MapRM<S>(dx + s * g.c * in_cols, g.c, in_cols).noalias() +=
                              mw * mcol;
                        if (dw) {
                          detail::CMapRM<S> mx(x.data() + s * g.c * in_cols, g.c, in_cols);
                          detail::MapRM<S>(dw, g.c, fkk).noalias() += mx * mcol.transpose();
                        }
                        if (db)
                          for (long fc = 0; fc < g.f; ++fc) {
                            S acc = S(0);
                            for (long i = 0; i < g.ho * g.wo; ++i) acc += pdy[fc * g.ho * g.wo + i];
                            db[fc] += acc;
                          }
                      }
                    });
  return out;
}

template <typename S>
Tensor<S> transposed_conv2d(const Tensor<S>& x, const Tensor<S>& w, const Tensor<S>& bias,
                            long stride, long pad) {
  return transposed_conv2d(x, w, &bias, stride, pad);
}

// ---------------------------------------------------------------------------
// bilinear-sample: src [C,Hs,Ws], grid [Ho,Wo,2] of (row,col) coordinates in
// source pixel units. Coordinates are edge-clamped; the grid is an attribute,
// gradients flow to the source only.

template <typename S>
Tensor<S> bilinear_sample(const Tensor<S>& src, const Tensor<S>& grid) {
  if (src.rank() != 3)
    raise(Errc::ShapeMismatch, "bilinear-sample: source must be [C,H,W], got " +
                                   shape_str(src.shape()));
  if (grid.rank() != 3 || grid.shape()[2] != 2)
    raise(Errc::ShapeMismatch, "bilinear-sample: grid must be [Ho,Wo,2], got " +
                                   shape_str(grid.shape()));
  const long c = src.shape()[0], hs = src.shape()[1], ws = src.shape()[2];
  const long ho = grid.shape()[0], wo = grid.shape()[1];
  Tensor<S> out = Tensor<S>::zeros({c, ho, wo});

  struct Tap {
    long y0, x0, y1, x1;
    S w00, w01, w10, w11;
  };
  auto tap_at = [hs, ws](S ry, S rx) {
    ry = std::min(std::max(ry, S(0)), S(hs - 1));
    rx = std::min(std::max(rx, S(0)), S(ws - 1));
    Tap t;
    t.y0 = static_cast<long>(std::floor(ry));
    t.x0 = static_cast<long>(std::floor(rx));
    t.y1 = std::min(t.y0 + 1, hs - 1);
    t.x1 = std::min(t.x0 + 1, ws - 1);
    const S fy = ry - S(t.y0), fx = rx - S(t.x0);
    t.w00 = (S(1) - fy) * (S(1) - fx);
    t.w01 = (S(1) - fy) * fx;
    t.w10 = fy * (S(1) - fx);
    t.w11 = fy * fx;
    return t;
  };

  const S* pg = grid.data();
  const S* ps = src.data();
  S* po = out.data();
  for (long i = 0; i < ho * wo; ++i) {
    const Tap t = tap_at(pg[2 * i], pg[2 * i + 1]);
    for (long ch = 0; ch < c; ++ch) {
      const S* plane = ps + ch * hs * ws;
      po[ch * ho * wo + i] = t.w00 * plane[t.y0 * ws + t.x0] + t.w01 * plane[t.y0 * ws + t.x1] +
                             t.w10 * plane[t.y1 * ws + t.x0] + t.w11 * plane[t.y1 * ws + t.x1];
    }
  }

  detail::record<S>(out, {src},
                    [grid, c, hs, ws, ho, wo, tap_at](const S* dy,
                                                      const std::function<S*(std::size_t)>& gin) {
                      S* ds = gin(0);
                      if (!ds) return;
                      const S* pg = grid.data();
                      for (long i = 0; i < ho * wo; ++i) {
                        const Tap t = tap_at(pg[2 * i], pg[2 * i + 1]);
                        for (long ch = 0; ch < c; ++ch) {
                          S* plane = ds + ch * hs * ws;
                          const S g = dy[ch * ho * wo + i];
                          plane[t.y0 * ws + t.x0] += t.w00 * g;
                          plane[t.y0 * ws + t.x1] += t.w01 * g;
                          plane[t.y1 * ws + t.x0] += t.w10 * g;
                          plane[t.y1 * ws + t.x1] += t.w11 * g;
                        }
                      }
                    });
  return out;
}

// ---------------------------------------------------------------------------
// Composite helpers built from primitives.

template <typename S>
Tensor<S> neg(const Tensor<S>& x) {
  return scalar_mul(x, -1.0);
}

// Numerically stable log(1 + exp(x)).
template <typename S>
Tensor<S> softplus(const Tensor<S>& x) {
  Tensor<S> abs_x = add(relu(x), relu(neg(x)));
  Tensor<S> tail = log(add_scalar(exp(neg(abs_x)), 1.0), 1e-30);
  return add(relu(x), tail);
}

// ---------------------------------------------------------------------------
// String-dispatched forward over the registered primitive set.

struct OpAttrs {
  std::unordered_map<std::string, double> scalars;
  std::unordered_map<std::string, Shape> shapes;

  double get(const std::string& key, double fallback) const {
    auto it = scalars.find(key);
    return it == scalars.end() ? fallback : it->second;
  }
  double require(const std::string& key) const {
    auto it = scalars.find(key);
    if (it == scalars.end()) raise(Errc::InvalidConfig, "missing op attribute '" + key + "'");
    return it->second;
  }
};

inline const std::vector<std::string>& registered_ops() {
  static const std::vector<std::string> names = {
      "add",   "sub",       "mul",   "scalar-mul", "matmul", "conv2d", "transposed-conv2d",
      "leaky-relu", "relu", "sigmoid", "tanh",     "exp",    "log",    "power",
      "sum",   "mean",      "clamp", "bilinear-sample",      "concat", "reshape"};
  return names;
}

template <typename S>
Tensor<S> forward(const std::string& op, const std::vector<Tensor<S>>& inputs,
                  const OpAttrs& attrs = {}) {
  auto want = [&](std::size_t n) {
    if (inputs.size() != n)
      raise(Errc::ShapeMismatch,
            op + ": expected " + std::to_string(n) + " inputs, got " + std::to_string(inputs.size()));
  };
  if (op == "add") {
    want(2);
    return add(inputs[0], inputs[1]);
  }
  if (op == "sub") {
    want(2);
    return sub(inputs[0], inputs[1]);
  }
  if (op == "mul") {
    want(2);
    return mul(inputs[0], inputs[1]);
  }
  if (op == "scalar-mul") {
    want(1);
    return scalar_mul(inputs[0], attrs.require("value"));
  }
  if (op == "matmul") {
    want(2);
    return matmul(inputs[0], inputs[1]);
  }
  if (op == "conv2d") {
    const long stride = static_cast<long>(attrs.get("stride", 1));
    const long pad = static_cast<long>(attrs.get("pad", 0));
    if (inputs.size() == 3) return conv2d(inputs[0], inputs[1], inputs[2], stride, pad);
    want(2);
    return conv2d(inputs[0], inputs[1], static_cast<const Tensor<S>*>(nullptr), stride, pad);
  }
  if (op == "transposed-conv2d") {
    const long stride = static_cast<long>(attrs.get("stride", 1));
    const long pad = static_cast<long>(attrs.get("pad", 0));
    if (inputs.size() == 3) return transposed_conv2d(inputs[0], inputs[1], inputs[2], stride, pad);
    want(2);
    return transposed_conv2d(inputs[0], inputs[1], static_cast<const Tensor<S>*>(nullptr), stride, pad);
  }
  if (op == "leaky-relu") {
    want(1);
    return leaky_relu(inputs[0], attrs.get("slope", 0.01));
  }
  if (op == "relu") {
    want(1);
    return relu(inputs[0]);
  }
  if (op == "sigmoid") {
    want(1);
    return sigmoid(inputs[0]);
  }
  if (op == "tanh") {
    want(1);
    return tanh(inputs[0]);
  }
  if (op == "exp") {
    want(1);
    return exp(inputs[0]);
  }
  if (op == "log") {
    want(1);
    return log(inputs[0], attrs.get("eps", 1e-12));
  }
  if (op == "power") {
    want(1);
    return power(inputs[0], attrs.require("exponent"));
  }
  if (op == "sum") {
    want(1);
    return sum(inputs[0]);
  }
  if (op == "mean") {
    want(1);
    return mean(inputs[0]);
  }
  if (op == "clamp") {
    want(1);
    return clamp(inputs[0], attrs.require("lo"), attrs.require("hi"));
  }
  if (op == "bilinear-sample") {
    want(2);
    return bilinear_sample(inputs[0], inputs[1]);
  }
  if (op == "concat") {
    return concat(inputs, static_cast<long>(attrs.get("axis", 0)));
  }
  if (op == "reshape") {
    want(1);
    auto it = attrs.shapes.find("shape");
    if (it == attrs.shapes.end()) raise(Errc::InvalidConfig, "reshape: missing 'shape' attribute");
    return reshape(inputs[0], it->second);
  }
  raise(Errc::UnknownOp, "no primitive named '" + op + "'");
}

}  // namespace advroad
