#include "texsmooth/nn/ops.hpp"

#include <Eigen/Core>

#include <cmath>
#include <stdexcept>
#include <string>

namespace texsmooth::nn {
namespace {

template <typename T>
using RowMajor = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MapM = Eigen::Map<RowMajor<T>>;
template <typename T>
using CMapM = Eigen::Map<const RowMajor<T>>;

void check_conv_shapes(const std::array<int, 4>& xs, const ConvSpec& spec, const std::array<int, 4>& ws) {
  spec.validate();
  if (xs[1] != spec.in_channels) {
    throw std::invalid_argument("conv2d: input has " + std::to_string(xs[1]) + " channels, spec expects " +
                                std::to_string(spec.in_channels));
  }
  const std::array<int, 4> expect = {spec.out_channels, spec.in_channels, spec.kernel, spec.kernel};
  if (ws != expect) {
    throw std::invalid_argument("conv2d: weight shape " + shape_string(ws) + " != " + shape_string(expect));
  }
}

// Column matrix (in*k*k) x (oh*ow) for batch entry n.
template <typename T>
void im2col(const BasicTensor<T>& x, int n, const ConvSpec& spec, int oh, int ow, T* cols) {
  const int k = spec.kernel;
  const int pad = spec.padding();
  const int h = x.h();
  const int w = x.w();
  const std::size_t p = static_cast<std::size_t>(oh) * ow;
  for (int c = 0; c < spec.in_channels; ++c) {
    const T* src = x.plane_ptr(n, c);
    for (int ky = 0; ky < k; ++ky) {
      for (int kx = 0; kx < k; ++kx) {
        T* row = cols + ((static_cast<std::size_t>(c) * k + ky) * k + kx) * p;
        for (int oy = 0; oy < oh; ++oy) {
          const int iy = oy * spec.stride + ky - pad;
          T* dst = row + static_cast<std::size_t>(oy) * ow;
          if (iy < 0 || iy >= h) {
            std::fill(dst, dst + ow, T(0));
            continue;
          }
          const T* line = src + static_cast<std::size_t>(iy) * w;
          for (int ox = 0; ox < ow; ++ox) {
            const int ix = ox * spec.stride + kx - pad;
            dst[ox] = (ix >= 0 && ix < w) ? line[ix] : T(0);
          }
        }
      }
    }
  }
}

template <typename T>
void col2im_add(const T* cols, const ConvSpec& spec, int oh, int ow, BasicTensor<T>& gx, int n) {
  const int k = spec.kernel;
  const int pad = spec.padding();
  const int h = gx.h();
  const int w = gx.w();
  const std::size_t p = static_cast<std::size_t>(oh) * ow;
  for (int c = 0; c < spec.in_channels; ++c) {
    T* dst = gx.plane_ptr(n, c);
    for (int ky = 0; ky < k; ++ky) {
      for (int kx = 0; kx < k; ++kx) {
        const T* row = cols + ((static_cast<std::size_t>(c) * k + ky) * k + kx) * p;
        for (int oy = 0; oy < oh; ++oy) {
          const int iy = oy * spec.stride + ky - pad;
          if (iy < 0 || iy >= h) continue;
          T* line = dst + static_cast<std::size_t>(iy) * w;
          const T* src = row + static_cast<std::size_t>(oy) * ow;
          for (int ox = 0; ox < ow; ++ox) {
            const int ix = ox * spec.stride + kx - pad;
            if (ix >= 0 && ix < w) line[ix] += src[ox];
          }
        }
      }
    }
  }
}

bool is_pointwise(const ConvSpec& spec) { return spec.kernel == 1 && spec.stride == 1; }

}  // namespace

void ConvSpec::validate() const {
  if (kernel < 1 || kernel % 2 == 0) throw std::invalid_argument("conv kernel size must be odd and positive");
  if (stride < 1) throw std::invalid_argument("conv stride must be >= 1");
  if (in_channels < 1 || out_channels < 1) throw std::invalid_argument("conv channel counts must be positive");
}

template <typename T>
BasicTensor<T> conv2d_forward(const BasicTensor<T>& x, const ConvSpec& spec, const BasicTensor<T>& w,
                              const BasicTensor<T>& b) {
  check_conv_shapes(x.shape(), spec, w.shape());
  if (b.size() != static_cast<std::size_t>(spec.out_channels)) throw std::invalid_argument("conv2d: bias size mismatch");
  const int oh = spec.out_size(x.h());
  const int ow = spec.out_size(x.w());
  const std::size_t p = static_cast<std::size_t>(oh) * ow;
  const int kdim = spec.in_channels * spec.kernel * spec.kernel;
  BasicTensor<T> out(x.n(), spec.out_channels, oh, ow);
  std::vector<T> cols(is_pointwise(spec) ? 0 : static_cast<std::size_t>(kdim) * p);
  CMapM<T> wm(w.data(), spec.out_channels, kdim);
  for (int n = 0; n < x.n(); ++n) {
    const T* colp = x.plane_ptr(n, 0);
    if (!is_pointwise(spec)) {
      im2col(x, n, spec, oh, ow, cols.data());
      colp = cols.data();
    }
    MapM<T> om(out.plane_ptr(n, 0), spec.out_channels, p);
    om.noalias() = wm * CMapM<T>(colp, kdim, p);
    for (int oc = 0; oc < spec.out_channels; ++oc) om.row(oc).array() += b[oc];
  }
  return out;
}

template <typename T>
ConvGrads<T> conv2d_backward(const BasicTensor<T>& x, const ConvSpec& spec, const BasicTensor<T>& w,
                             const BasicTensor<T>& grad_out) {
  check_conv_shapes(x.shape(), spec, w.shape());
  const int oh = spec.out_size(x.h());
  const int ow = spec.out_size(x.w());
  const std::array<int, 4> expect = {x.n(), spec.out_channels, oh, ow};
  if (grad_out.shape() != expect) {
    throw std::invalid_argument("conv2d_backward: grad_out shape " + shape_string(grad_out.shape()) +
                                " != " + shape_string(expect));
  }
  const std::size_t p = static_cast<std::size_t>(oh) * ow;
  const int kdim = spec.in_channels * spec.kernel * spec.kernel;

  ConvGrads<T> g{BasicTensor<T>(x.n(), x.c(), x.h(), x.w()), BasicTensor<T>(w.n(), w.c(), w.h(), w.w()),
                 BasicTensor<T>(1, spec.out_channels, 1, 1)};
  std::vector<T> cols(is_pointwise(spec) ? 0 : static_cast<std::size_t>(kdim) * p);
  std::vector<T> gcols(static_cast<std::size_t>(kdim) * p);
  CMapM<T> wm(w.data(), spec.out_channels, kdim);
  MapM<T> gw(g.grad_w.data(), spec.out_channels, kdim);
  for (int n = 0; n < x.n(); ++n) {
    const T* colp = x.plane_ptr(n, 0);
    if (!is_pointwise(spec)) {
      im2col(x, n, spec, oh, ow, cols.data());
      colp = cols.data();
    }
    CMapM<T> go(grad_out.plane_ptr(n, 0), spec.out_channels, p);
    gw.noalias() += go * CMapM<T>(colp, kdim, p).transpose();
    for (int oc = 0; oc < spec.out_channels; ++oc) g.grad_b[oc] += go.row(oc).sum();
    if (is_pointwise(spec)) {
      MapM<T>(g.grad_x.plane_ptr(n, 0), kdim, p).noalias() = wm.transpose() * go;
    } else {
      MapM<T>(gcols.data(), kdim, p).noalias() = wm.transpose() * go;
      col2im_add(gcols.data(), spec, oh, ow, g.grad_x, n);
    }
  }
  return g;
}

template <typename T>
BasicTensor<T> activation_forward(const BasicTensor<T>& x, Activation kind) {
  BasicTensor<T> y = x;
  if (kind == Activation::kRelu) {
    for (T& v : y.values()) v = v > T(0) ? v : T(0);
  } else {
    for (T& v : y.values()) v = T(1) / (T(1) + std::exp(-v));
  }
  return y;
}

template <typename T>
BasicTensor<T> activation_backward(const BasicTensor<T>& input, const BasicTensor<T>& output,
                                   const BasicTensor<T>& grad_out, Activation kind) {
  BasicTensor<T> g = grad_out;
  if (kind == Activation::kRelu) {
    if (!input.same_shape(grad_out)) throw std::invalid_argument("relu backward: shape mismatch");
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (!(input[i] > T(0))) g[i] = T(0);
    }
  } else {
    if (!output.same_shape(grad_out)) throw std::invalid_argument("sigmoid backward: shape mismatch");
    for (std::size_t i = 0; i < g.size(); ++i) g[i] *= output[i] * (T(1) - output[i]);
  }
  return g;
}

template <typename T>
BasicTensor<T> concat_channels(const std::vector<const BasicTensor<T>*>& xs) {
  if (xs.empty()) throw std::invalid_argument("concat_channels: no inputs");
  const auto& f = *xs.front();
  int channels = 0;
  for (const auto* t : xs) {
    if (t->n() != f.n() || t->h() != f.h() || t->w() != f.w()) {
      throw std::invalid_argument("concat_channels: batch/spatial mismatch " + shape_string(t->shape()) + " vs " +
                                  shape_string(f.shape()));
    }
    channels += t->c();
  }
  BasicTensor<T> out(f.n(), channels, f.h(), f.w());
  for (int n = 0; n < f.n(); ++n) {
    int c0 = 0;
    for (const auto* t : xs) {
      std::copy(t->plane_ptr(n, 0), t->plane_ptr(n, 0) + t->c() * t->plane(), out.plane_ptr(n, c0));
      c0 += t->c();
    }
  }
  return out;
}

template <typename T>
std::vector<BasicTensor<T>> split_channels(const BasicTensor<T>& grad, const std::vector<int>& widths) {
  int total = 0;
  for (int w : widths) total += w;
  if (total != grad.c()) throw std::invalid_argument("split_channels: widths do not sum to channel count");
  std::vector<BasicTensor<T>> parts;
  for (int w : widths) parts.emplace_back(grad.n(), w, grad.h(), grad.w());
  for (int n = 0; n < grad.n(); ++n) {
    int c0 = 0;
    for (auto& part : parts) {
      std::copy(grad.plane_ptr(n, c0), grad.plane_ptr(n, c0) + part.c() * part.plane(), part.plane_ptr(n, 0));
      c0 += part.c();
    }
  }
  return parts;
}

template <typename T>
BasicTensor<T> resize_bilinear_forward(const BasicTensor<T>& x, int out_h, int out_w) {
  if (out_h < 1 || out_w < 1) throw std::invalid_argument("resize target must be at least 1x1");
  if (out_h == x.h() && out_w == x.w()) return x;
  const auto ty = texsmooth::detail::bilinear_taps(x.h(), out_h);
  const auto tx = texsmooth::detail::bilinear_taps(x.w(), out_w);
  BasicTensor<T> out(x.n(), x.c(), out_h, out_w);
  for (int n = 0; n < x.n(); ++n) {
    for (int c = 0; c < x.c(); ++c) {
      const T* src = x.plane_ptr(n, c);
      T* dst = out.plane_ptr(n, c);
      for (int y = 0; y < out_h; ++y) {
        const auto& a = ty[y];
        const T* r0 = src + static_cast<std::size_t>(a.i0) * x.w();
        const T* r1 = src + static_cast<std::size_t>(a.i1) * x.w();
        const T wy = static_cast<T>(a.w1);
        for (int xx = 0; xx < out_w; ++xx) {
          const auto& b = tx[xx];
          const T wx = static_cast<T>(b.w1);
          const T top = r0[b.i0] * (T(1) - wx) + r0[b.i1] * wx;
          const T bot = r1[b.i0] * (T(1) - wx) + r1[b.i1] * wx;
          dst[static_cast<std::size_t>(y) * out_w + xx] = top * (T(1) - wy) + bot * wy;
        }
      }
    }
  }
  return out;
}

template <typename T>
BasicTensor<T> resize_bilinear_backward(const BasicTensor<T>& grad_out, int in_h, int in_w) {
  if (in_h < 1 || in_w < 1) throw std::invalid_argument("resize source must be at least 1x1");
  if (grad_out.h() == in_h && grad_out.w() == in_w) return grad_out;
  const int out_h = grad_out.h();
  const int out_w = grad_out.w();
  const auto ty = texsmooth::detail::bilinear_taps(in_h, out_h);
  const auto tx = texsmooth::detail::bilinear_taps(in_w, out_w);
  BasicTensor<T> gx(grad_out.n(), grad_out.c(), in_h, in_w);
  for (int n = 0; n < grad_out.n(); ++n) {
    for (int c = 0; c < grad_out.c(); ++c) {
      const T* src = grad_out.plane_ptr(n, c);
      T* dst = gx.plane_ptr(n, c);
      for (int y = 0; y < out_h; ++y) {
        const auto& a = ty[y];
        T* r0 = dst + static_cast<std::size_t>(a.i0) * in_w;
        T* r1 = dst + static_cast<std::size_t>(a.i1) * in_w;
        const T wy = static_cast<T>(a.w1);
        for (int xx = 0; xx < out_w; ++xx) {
          const auto& b = tx[xx];
          const T wx = static_cast<T>(b.w1);
          const T g = src[static_cast<std::size_t>(y) * out_w + xx];
          const T gt = g * (T(1) - wy);
          const T gb = g * wy;
          r0[b.i0] += gt * (T(1) - wx);
          r0[b.i1] += gt * wx;
          r1[b.i0] += gb * (T(1) - wx);
          r1[b.i1] += gb * wx;
        }
      }
    }
  }
  return gx;
}

#define TEXSMOOTH_INSTANTIATE_OPS(T)                                                                           \
  template BasicTensor<T> conv2d_forward(const BasicTensor<T>&, const ConvSpec&, const BasicTensor<T>&,        \
                                         const BasicTensor<T>&);                                               \
  template ConvGrads<T> conv2d_backward(const BasicTensor<T>&, const ConvSpec&, const BasicTensor<T>&,         \
                                        const BasicTensor<T>&);                                                \
  template BasicTensor<T> activation_forward(const BasicTensor<T>&, Activation);                               \
  template BasicTensor<T> activation_backward(const BasicTensor<T>&, const BasicTensor<T>&,                    \
                                              const BasicTensor<T>&, Activation);                              \
  template BasicTensor<T> concat_channels(const std::vector<const BasicTensor<T>*>&);                          \
  template std::vector<BasicTensor<T>> split_channels(const BasicTensor<T>&, const std::vector<int>&);         \
  template BasicTensor<T> resize_bilinear_forward(const BasicTensor<T>&, int, int);                            \
  template BasicTensor<T> resize_bilinear_backward(const BasicTensor<T>&, int, int);

TEXSMOOTH_INSTANTIATE_OPS(float)
TEXSMOOTH_INSTANTIATE_OPS(double)

}  // namespace texsmooth::nn
