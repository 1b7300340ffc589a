#include "horizon/kernels.hpp"

#include <atomic>
#include <cstdlib>

namespace horizon::nn::kernels {

namespace {

std::atomic<bool> g_parallel{[] {
#ifdef _OPENMP
  const char* env = std::getenv("HORIZON_SERIAL");
  return !(env && env[0] == '1');
#else
  return false;
#endif
}()};

}  // namespace

bool parallel_enabled() { return g_parallel.load(std::memory_order_relaxed); }
void set_parallel(bool enabled) {
  g_parallel.store(enabled, std::memory_order_relaxed);
}

Conv2dDims conv2d_dims(const Tensor& input, const Tensor& kernel, int stride) {
  if (input.rank() != 3 || kernel.rank() != 4)
    throw ShapeMismatch("conv2d expects input [C,H,W], kernel [O,C,A,B]");
  if (kernel.dim(1) != input.dim(0))
    throw ShapeMismatch("conv2d channel mismatch: kernel " +
                        kernel.shape_string() + " vs input " +
                        input.shape_string());
  if (kernel.dim(2) % 2 == 0 || kernel.dim(3) % 2 == 0)
    throw ShapeMismatch("conv2d kernel spatial dims must be odd");
  if (stride < 1) throw ShapeMismatch("conv2d stride must be >= 1");
  Conv2dDims d;
  d.c_in = input.dim(0);
  d.h_in = input.dim(1);
  d.w_in = input.dim(2);
  d.c_out = kernel.dim(0);
  d.kh = kernel.dim(2);
  d.kw = kernel.dim(3);
  d.stride = stride;
  d.pad_h = (d.kh - 1) / 2;
  d.pad_w = (d.kw - 1) / 2;
  d.h_out = (d.h_in - 1) / stride + 1;
  d.w_out = (d.w_in - 1) / stride + 1;
  return d;
}

namespace {

inline double conv_slot(const double* x, const double* w, const Conv2dDims& d,
                        int o, int oy, int ox) {
  double acc = 0.0;
  for (int c = 0; c < d.c_in; ++c) {
    const double* xc = x + static_cast<std::size_t>(c) * d.h_in * d.w_in;
    const double* wc =
        w + (static_cast<std::size_t>(o) * d.c_in + c) * d.kh * d.kw;
    for (int a = 0; a < d.kh; ++a) {
      int iy = oy * d.stride + a - d.pad_h;
      if (iy < 0 || iy >= d.h_in) continue;
      const double* xrow = xc + static_cast<std::size_t>(iy) * d.w_in;
      const double* wrow = wc + static_cast<std::size_t>(a) * d.kw;
      for (int bb = 0; bb < d.kw; ++bb) {
        int ix = ox * d.stride + bb - d.pad_w;
        if (ix < 0 || ix >= d.w_in) continue;
        acc += wrow[bb] * xrow[ix];
      }
    }
  }
  return acc;
}

inline double input_grad_slot(const double* dy, const double* w,
                              const Conv2dDims& d, int c, int iy, int ix) {
  double acc = 0.0;
  for (int o = 0; o < d.c_out; ++o) {
    const double* dyo = dy + static_cast<std::size_t>(o) * d.h_out * d.w_out;
    const double* wc =
        w + (static_cast<std::size_t>(o) * d.c_in + c) * d.kh * d.kw;
    for (int a = 0; a < d.kh; ++a) {
      int num_y = iy + d.pad_h - a;
      if (num_y < 0 || num_y % d.stride != 0) continue;
      int oy = num_y / d.stride;
      if (oy >= d.h_out) continue;
      for (int bb = 0; bb < d.kw; ++bb) {
        int num_x = ix + d.pad_w - bb;
        if (num_x < 0 || num_x % d.stride != 0) continue;
        int ox = num_x / d.stride;
        if (ox >= d.w_out) continue;
        acc += wc[a * d.kw + bb] * dyo[oy * d.w_out + ox];
      }
    }
  }
  return acc;
}

inline double kernel_grad_slot(const double* dy, const double* x,
                               const Conv2dDims& d, int o, int c, int a,
                               int bb) {
  double acc = 0.0;
  const double* dyo = dy + static_cast<std::size_t>(o) * d.h_out * d.w_out;
  const double* xc = x + static_cast<std::size_t>(c) * d.h_in * d.w_in;
  for (int oy = 0; oy < d.h_out; ++oy) {
    int iy = oy * d.stride + a - d.pad_h;
    if (iy < 0 || iy >= d.h_in) continue;
    for (int ox = 0; ox < d.w_out; ++ox) {
      int ix = ox * d.stride + bb - d.pad_w;
      if (ix < 0 || ix >= d.w_in) continue;
      acc += dyo[oy * d.w_out + ox] * xc[iy * d.w_in + ix];
    }
  }
  return acc;
}

}  // namespace

void conv2d_forward_serial(const double* x, const double* w, const double* b,
                           double* y, const Conv2dDims& d) {
  for (int o = 0; o < d.c_out; ++o)
    for (int oy = 0; oy < d.h_out; ++oy)
      for (int ox = 0; ox < d.w_out; ++ox)
        y[(static_cast<std::size_t>(o) * d.h_out + oy) * d.w_out + ox] =
            (b ? b[o] : 0.0) + conv_slot(x, w, d, o, oy, ox);
}

void conv2d_forward_omp(const double* x, const double* w, const double* b,
                        double* y, const Conv2dDims& d) {
#pragma omp parallel for collapse(2) schedule(static)
  for (int o = 0; o < d.c_out; ++o)
    for (int oy = 0; oy < d.h_out; ++oy)
      for (int ox = 0; ox < d.w_out; ++ox)
        y[(static_cast<std::size_t>(o) * d.h_out + oy) * d.w_out + ox] =
            (b ? b[o] : 0.0) + conv_slot(x, w, d, o, oy, ox);
}

void conv2d_forward(const double* x, const double* w, const double* b,
                    double* y, const Conv2dDims& d) {
  if (parallel_enabled())
    conv2d_forward_omp(x, w, b, y, d);
  else
    conv2d_forward_serial(x, w, b, y, d);
}

void conv2d_backward_input_serial(const double* dy, const double* w,
                                  double* dx, const Conv2dDims& d) {
  for (int c = 0; c < d.c_in; ++c)
    for (int iy = 0; iy < d.h_in; ++iy)
      for (int ix = 0; ix < d.w_in; ++ix)
        dx[(static_cast<std::size_t>(c) * d.h_in + iy) * d.w_in + ix] +=
            input_grad_slot(dy, w, d, c, iy, ix);
}

void conv2d_backward_input_omp(const double* dy, const double* w, double* dx,
                               const Conv2dDims& d) {
#pragma omp parallel for collapse(2) schedule(static)
  for (int c = 0; c < d.c_in; ++c)
    for (int iy = 0; iy < d.h_in; ++iy)
      for (int ix = 0; ix < d.w_in; ++ix)
        dx[(static_cast<std::size_t>(c) * d.h_in + iy) * d.w_in + ix] +=
            input_grad_slot(dy, w, d, c, iy, ix);
}

void conv2d_backward_input(const double* dy, const double* w, double* dx,
                           const Conv2dDims& d) {
  if (parallel_enabled())
    conv2d_backward_input_omp(dy, w, dx, d);
  else
    conv2d_backward_input_serial(dy, w, dx, d);
}

void conv2d_backward_kernel_serial(const double* dy, const double* x,
                                   double* dw, const Conv2dDims& d) {
  for (int o = 0; o < d.c_out; ++o)
    for (int c = 0; c < d.c_in; ++c)
      for (int a = 0; a < d.kh; ++a)
        for (int bb = 0; bb < d.kw; ++bb)
          dw[((static_cast<std::size_t>(o) * d.c_in + c) * d.kh + a) * d.kw +
             bb] += kernel_grad_slot(dy, x, d, o, c, a, bb);
}

void conv2d_backward_kernel_omp(const double* dy, const double* x, double* dw,
                                const Conv2dDims& d) {
#pragma omp parallel for collapse(2) schedule(static)
  for (int o = 0; o < d.c_out; ++o)
    for (int c = 0; c < d.c_in; ++c)
      for (int a = 0; a < d.kh; ++a)
        for (int bb = 0; bb < d.kw; ++bb)
          dw[((static_cast<std::size_t>(o) * d.c_in + c) * d.kh + a) * d.kw +
             bb] += kernel_grad_slot(dy, x, d, o, c, a, bb);
}

void conv2d_backward_kernel(const double* dy, const double* x, double* dw,
                            const Conv2dDims& d) {
  if (parallel_enabled())
    conv2d_backward_kernel_omp(dy, x, dw, d);
  else
    conv2d_backward_kernel_serial(dy, x, dw, d);
}

void conv2d_backward_bias(const double* dy, double* db, const Conv2dDims& d) {
  for (int o = 0; o < d.c_out; ++o) {
    double acc = 0.0;
    const double* dyo = dy + static_cast<std::size_t>(o) * d.h_out * d.w_out;
    for (int i = 0; i < d.h_out * d.w_out; ++i) acc += dyo[i];
    db[o] += acc;
  }
}

}  // namespace horizon::nn::kernels
