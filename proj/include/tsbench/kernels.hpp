#pragma once

#include <cstddef>
#include <span>

// Dense kernels used by the student network, the teacher evaluator and the
// Monte-Carlo error estimator.
//
// Every kernel in `kernels` parallelizes over independent output elements
// only. Each output is still accumulated in the same index order as the
// matching routine in `kernels::serial`, so the two agree bit for bit for any
// thread count. The serial versions are the reference used by the tests and
// the benchmark.
//
// Layout: all matrices are row-major. `x` is batch x in, `w` is in x out,
// `z` is batch x out.

namespace tsbench::kernels {

/// c = a * b with a: m x k, b: k x n.
void matmul(std::span<const double> a, std::span<const double> b, std::span<double> c,
            std::size_t m, std::size_t k, std::size_t n);

/// z[r][o] = bias[o] + sum_i x[r][i] * w[i][o]
void dense_forward(std::span<const double> x, std::span<const double> w,
                   std::span<const double> bias, std::span<double> z, std::size_t batch,
                   std::size_t in, std::size_t out);

/// a = max(z, 0) elementwise.
void relu(std::span<const double> z, std::span<double> a);

/// dw[i][o] = sum_r x[r][i] * dz[r][o];  db[o] = sum_r dz[r][o]
void dense_grad_params(std::span<const double> x, std::span<const double> dz,
                       std::span<double> dw, std::span<double> db, std::size_t batch,
                       std::size_t in, std::size_t out);

/// dx[r][i] = sum_o dz[r][o] * w[i][o], then masked by z_in[r][i] > 0 when
/// `mask_preact` is non-empty (relu backward folded in).
void dense_grad_input(std::span<const double> dz, std::span<const double> w,
                      std::span<const double> mask_preact, std::span<double> dx,
                      std::size_t batch, std::size_t in, std::size_t out);

/// out[r] = sum_i theta[i] * relu(b[i] + sum_j x[r][j] * a[i][j]) with
/// a: units x dim (teacher layout, one row per hidden unit).
void teacher_forward_batch(std::span<const double> x, std::span<const double> a,
                           std::span<const double> b, std::span<const double> theta,
                           std::span<double> out, std::size_t batch, std::size_t dim,
                           std::size_t units);

namespace serial {

void matmul(std::span<const double> a, std::span<const double> b, std::span<double> c,
            std::size_t m, std::size_t k, std::size_t n);
void dense_forward(std::span<const double> x, std::span<const double> w,
                   std::span<const double> bias, std::span<double> z, std::size_t batch,
                   std::size_t in, std::size_t out);
void relu(std::span<const double> z, std::span<double> a);
void dense_grad_params(std::span<const double> x, std::span<const double> dz,
                       std::span<double> dw, std::span<double> db, std::size_t batch,
                       std::size_t in, std::size_t out);
void dense_grad_input(std::span<const double> dz, std::span<const double> w,
                      std::span<const double> mask_preact, std::span<double> dx,
                      std::size_t batch, std::size_t in, std::size_t out);
void teacher_forward_batch(std::span<const double> x, std::span<const double> a,
                           std::span<const double> b, std::span<const double> theta,
                           std::span<double> out, std::size_t batch, std::size_t dim,
                           std::size_t units);

}  // namespace serial

/// Work (multiply-adds) below which kernels stay on the calling thread.
inline constexpr std::size_t kParallelThreshold = 1 << 16;

}  // namespace tsbench::kernels
