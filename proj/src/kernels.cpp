#include "tsbench/kernels.hpp"

#include <algorithm>

namespace tsbench::kernels {

namespace {
// Column block used when a kernel parallelizes over output columns.
constexpr std::size_t kColumnBlock = 64;
}

void matmul(std::span<const double> a, std::span<const double> b, std::span<double> c,
            std::size_t m, std::size_t k, std::size_t n) {
  const bool par = m * k * n >= kParallelThreshold;
#pragma omp parallel for schedule(static) if (par)
  for (std::size_t i = 0; i < m; ++i) {
    double* crow = c.data() + i * n;
    std::fill(crow, crow + n, 0.0);
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = a[i * k + p];
      const double* brow = b.data() + p * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += aip * brow[j];
    }
  }
}

void dense_forward(std::span<const double> x, std::span<const double> w,
                   std::span<const double> bias, std::span<double> z, std::size_t batch,
                   std::size_t in, std::size_t out) {
  const bool par = batch * in * out >= kParallelThreshold;
#pragma omp parallel for schedule(static) if (par)
  for (std::size_t r = 0; r < batch; ++r) {
    double* zrow = z.data() + r * out;
    std::copy(bias.begin(), bias.end(), zrow);
    const double* xrow = x.data() + r * in;
    for (std::size_t i = 0; i < in; ++i) {
      const double xi = xrow[i];
      const double* wrow = w.data() + i * out;
      for (std::size_t o = 0; o < out; ++o) zrow[o] += xi * wrow[o];
    }
  }
}

void relu(std::span<const double> z, std::span<double> a) {
  const std::size_t n = z.size();
#pragma omp parallel for schedule(static) if (n >= kParallelThreshold)
  for (std::size_t i = 0; i < n; ++i) a[i] = z[i] > 0.0 ? z[i] : 0.0;
}

void dense_grad_params(std::span<const double> x, std::span<const double> dz,
                       std::span<double> dw, std::span<double> db, std::size_t batch,
                       std::size_t in, std::size_t out) {
  const std::size_t blocks = (out + kColumnBlock - 1) / kColumnBlock;
  const bool par = batch * in * out >= kParallelThreshold && blocks > 1;
#pragma omp parallel for schedule(static) if (par)
  for (std::size_t blk = 0; blk < blocks; ++blk) {
    const std::size_t o0 = blk * kColumnBlock;
    const std::size_t o1 = std::min(out, o0 + kColumnBlock);
    for (std::size_t i = 0; i < in; ++i) {
      double* dwrow = dw.data() + i * out;
      std::fill(dwrow + o0, dwrow + o1, 0.0);
      for (std::size_t r = 0; r < batch; ++r) {
        const double xi = x[r * in + i];
        const double* dzrow = dz.data() + r * out;
        for (std::size_t o = o0; o < o1; ++o) dwrow[o] += xi * dzrow[o];
      }
    }
    std::fill(db.begin() + o0, db.begin() + o1, 0.0);
    for (std::size_t r = 0; r < batch; ++r) {
      const double* dzrow = dz.data() + r * out;
      for (std::size_t o = o0; o < o1; ++o) db[o] += dzrow[o];
    }
  }
}

void dense_grad_input(std::span<const double> dz, std::span<const double> w,
                      std::span<const double> mask_preact, std::span<double> dx,
                      std::size_t batch, std::size_t in, std::size_t out) {
  const bool masked = !mask_preact.empty();
  const bool par = batch * in * out >= kParallelThreshold;
#pragma omp parallel for schedule(static) if (par)
  for (std::size_t r = 0; r < batch; ++r) {
    const double* dzrow = dz.data() + r * out;
    for (std::size_t i = 0; i < in; ++i) {
      if (masked && !(mask_preact[r * in + i] > 0.0)) {
        dx[r * in + i] = 0.0;
        continue;
      }
      const double* wrow = w.data() + i * out;
      double s = 0.0;
      for (std::size_t o = 0; o < out; ++o) s += dzrow[o] * wrow[o];
      dx[r * in + i] = s;
    }
  }
}

void teacher_forward_batch(std::span<const double> x, std::span<const double> a,
                           std::span<const double> b, std::span<const double> theta,
                           std::span<double> out, std::size_t batch, std::size_t dim,
                           std::size_t units) {
  const bool par = batch * dim * units >= kParallelThreshold;
#pragma omp parallel for schedule(static) if (par)
  for (std::size_t r = 0; r < batch; ++r) {
    const double* xrow = x.data() + r * dim;
    double acc = 0.0;
    for (std::size_t u = 0; u < units; ++u) {
      const double* arow = a.data() + u * dim;
      double pre = b[u];
      for (std::size_t j = 0; j < dim; ++j) pre += arow[j] * xrow[j];
      if (pre > 0.0) acc += theta[u] * pre;
    }
    out[r] = acc;
  }
}

namespace serial {

void matmul(std::span<const double> a, std::span<const double> b, std::span<double> c,
            std::size_t m, std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t p = 0; p < k; ++p) s += a[i * k + p] * b[p * n + j];
      c[i * n + j] = s;
    }
}

void dense_forward(std::span<const double> x, std::span<const double> w,
                   std::span<const double> bias, std::span<double> z, std::size_t batch,
                   std::size_t in, std::size_t out) {
  for (std::size_t r = 0; r < batch; ++r)
    for (std::size_t o = 0; o < out; ++o) {
      double s = bias[o];
      for (std::size_t i = 0; i < in; ++i) s += x[r * in + i] * w[i * out + o];
      z[r * out + o] = s;
    }
}

void relu(std::span<const double> z, std::span<double> a) {
  for (std::size_t i = 0; i < z.size(); ++i) a[i] = std::max(z[i], 0.0);
}

void dense_grad_params(std::span<const double> x, std::span<const double> dz,
                       std::span<double> dw, std::span<double> db, std::size_t batch,
                       std::size_t in, std::size_t out) {
  for (std::size_t i = 0; i < in; ++i)
    for (std::size_t o = 0; o < out; ++o) {
      double s = 0.0;
      for (std::size_t r = 0; r < batch; ++r) s += x[r * in + i] * dz[r * out + o];
      dw[i * out + o] = s;
    }
  for (std::size_t o = 0; o < out; ++o) {
    double s = 0.0;
    for (std::size_t r = 0; r < batch; ++r) s += dz[r * out + o];
    db[o] = s;
  }
}

void dense_grad_input(std::span<const double> dz, std::span<const double> w,
                      std::span<const double> mask_preact, std::span<double> dx,
                      std::size_t batch, std::size_t in, std::size_t out) {
  for (std::size_t r = 0; r < batch; ++r)
    for (std::size_t i = 0; i < in; ++i) {
      double s = 0.0;
      for (std::size_t o = 0; o < out; ++o) s += dz[r * out + o] * w[i * out + o];
      if (!mask_preact.empty() && !(mask_preact[r * in + i] > 0.0)) s = 0.0;
      dx[r * in + i] = s;
    }
}

void teacher_forward_batch(std::span<const double> x, std::span<const double> a,
                           std::span<const double> b, std::span<const double> theta,
                           std::span<double> out, std::size_t batch, std::size_t dim,
                           std::size_t units) {
  for (std::size_t r = 0; r < batch; ++r) {
    double acc = 0.0;
    for (std::size_t u = 0; u < units; ++u) {
      double pre = b[u];
      for (std::size_t j = 0; j < dim; ++j) pre += a[u * dim + j] * x[r * dim + j];
      acc += theta[u] * std::max(pre, 0.0);
    }
    out[r] = acc;
  }
}

}  // namespace serial

}  // namespace tsbench::kernels
