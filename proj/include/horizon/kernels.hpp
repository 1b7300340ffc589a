#ifndef HORIZON_KERNELS_HPP
#define HORIZON_KERNELS_HPP

#include "horizon/tensor.hpp"

// Compute kernels behind the tensor ops. Each kernel has a serial reference
// implementation and an OpenMP variant; the dispatcher picks at runtime.
// The OpenMP variants parallelize over independent output slots and keep a
// fixed summation order inside each slot, so results are bit-identical to the
// serial reference at any thread count.
namespace horizon::nn::kernels {

bool parallel_enabled();
void set_parallel(bool enabled);

struct Conv2dDims {
  int c_in, h_in, w_in;
  int c_out, kh, kw;
  int stride;
  int h_out, w_out;
  int pad_h, pad_w;
};

// Cross-correlation with zero "same" padding; output size floor((H-1)/s)+1.
Conv2dDims conv2d_dims(const Tensor& input, const Tensor& kernel, int stride);

void conv2d_forward_serial(const double* x, const double* w, const double* b,
                           double* y, const Conv2dDims& d);
void conv2d_forward_omp(const double* x, const double* w, const double* b,
                        double* y, const Conv2dDims& d);
void conv2d_forward(const double* x, const double* w, const double* b,
                    double* y, const Conv2dDims& d);

// Accumulates into dx (caller zeroes or chains).
void conv2d_backward_input_serial(const double* dy, const double* w, double* dx,
                                  const Conv2dDims& d);
void conv2d_backward_input_omp(const double* dy, const double* w, double* dx,
                               const Conv2dDims& d);
void conv2d_backward_input(const double* dy, const double* w, double* dx,
                           const Conv2dDims& d);

// Accumulates into dw.
void conv2d_backward_kernel_serial(const double* dy, const double* x,
                                   double* dw, const Conv2dDims& d);
void conv2d_backward_kernel_omp(const double* dy, const double* x, double* dw,
                                const Conv2dDims& d);
void conv2d_backward_kernel(const double* dy, const double* x, double* dw,
                            const Conv2dDims& d);

// Accumulates into db.
void conv2d_backward_bias(const double* dy, double* db, const Conv2dDims& d);

}  // namespace horizon::nn::kernels

#endif
