// Copyright 2026 The depthcodec Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>

#include "depthcodec/error.hpp"
#include "depthcodec/nn/layers.hpp"

namespace depthcodec::nn {
namespace {

void check_input(const Tensor& x, int channels) {
  if (x.c != channels) throw Error(ErrorCode::InvalidArgument, "channel count mismatch");
}

void fill_normal(Param& p, std::mt19937_64& rng, double stddev) {
  std::normal_distribution<double> dist(0.0, stddev);
  for (double& v : p.value) v = dist(rng);
}

}  // namespace

Conv2d::Conv2d(int in_channels, int out_channels, int kernel, int stride, int padding)
    : in_(in_channels), out_(out_channels), k_(kernel), stride_(stride), pad_(padding) {
  if (in_ <= 0 || out_ <= 0 || k_ <= 0 || stride_ <= 0 || pad_ < 0) {
    throw Error(ErrorCode::InvalidArgument, "bad conv geometry");
  }
  weight.name = "weight";
  bias.name = "bias";
  weight.resize(static_cast<std::size_t>(out_) * in_ * k_ * k_);
  bias.resize(static_cast<std::size_t>(out_));
}

void Conv2d::init(std::mt19937_64& rng, double gain) {
  fill_normal(weight, rng, gain / std::sqrt(static_cast<double>(in_ * k_ * k_)));
  std::fill(bias.value.begin(), bias.value.end(), 0.0);
}

void Conv2d::collect(std::vector<Param*>& out) {
  out.push_back(&weight);
  out.push_back(&bias);
}

Tensor Conv2d::forward(const Tensor& x) const {
  check_input(x, in_);
  Tensor y(out_, out_size(x.h), out_size(x.w));
  const int kk = k_ * k_;
#pragma omp parallel for schedule(static)
  for (int co = 0; co < out_; ++co) {
    double* dst = y.channel(co);
    std::fill(dst, dst + y.plane(), bias.value[co]);
    for (int ci = 0; ci < in_; ++ci) {
      const double* src = x.channel(ci);
      const double* wk = &weight.value[(static_cast<std::size_t>(co) * in_ + ci) * kk];
      for (int ky = 0; ky < k_; ++ky) {
        for (int kx = 0; kx < k_; ++kx) {
          const double wv = wk[ky * k_ + kx];
          for (int oy = 0; oy < y.h; ++oy) {
            const int iy = oy * stride_ - pad_ + ky;
            if (iy < 0 || iy >= x.h) continue;
            double* row = dst + static_cast<std::size_t>(oy) * y.w;
            const double* in_row = src + static_cast<std::size_t>(iy) * x.w;
            for (int ox = 0; ox < y.w; ++ox) {
              const int ix = ox * stride_ - pad_ + kx;
              if (ix < 0 || ix >= x.w) continue;
              row[ox] += wv * in_row[ix];
            }
          }
        }
      }
    }
  }
  return y;
}

Tensor Conv2d::backward(const Tensor& x, const Tensor& gy) {
  check_input(x, in_);
  Tensor gx(in_, x.h, x.w);
  const int kk = k_ * k_;
#pragma omp parallel for schedule(static)
  for (int ci = 0; ci < in_; ++ci) {
    double* dst = gx.channel(ci);
    for (int co = 0; co < out_; ++co) {
      const double* g = gy.channel(co);
      const double* wk = &weight.value[(static_cast<std::size_t>(co) * in_ + ci) * kk];
      for (int ky = 0; ky < k_; ++ky) {
        for (int kx = 0; kx < k_; ++kx) {
          const double wv = wk[ky * k_ + kx];
          for (int oy = 0; oy < gy.h; ++oy) {
            const int iy = oy * stride_ - pad_ + ky;
            if (iy < 0 || iy >= x.h) continue;
            for (int ox = 0; ox < gy.w; ++ox) {
              const int ix = ox * stride_ - pad_ + kx;
              if (ix < 0 || ix >= x.w) continue;
              dst[static_cast<std::size_t>(iy) * x.w + ix] += wv * g[static_cast<std::size_t>(oy) * gy.w + ox];
            }
          }
        }
      }
    }
  }
#pragma omp parallel for schedule(static)
  for (int co = 0; co < out_; ++co) {
    const double* g = gy.channel(co);
    double gb = 0.0;
    for (std::size_t i = 0; i < gy.plane(); ++i) gb += g[i];
    bias.grad[co] += gb;
    for (int ci = 0; ci < in_; ++ci) {
      const double* src = x.channel(ci);
      double* gw = &weight.grad[(static_cast<std::size_t>(co) * in_ + ci) * kk];
      for (int ky = 0; ky < k_; ++ky) {
        for (int kx = 0; kx < k_; ++kx) {
          double acc = 0.0;
          for (int oy = 0; oy < gy.h; ++oy) {
            const int iy = oy * stride_ - pad_ + ky;
            if (iy < 0 || iy >= x.h) continue;
            for (int ox = 0; ox < gy.w; ++ox) {
              const int ix = ox * stride_ - pad_ + kx;
              if (ix < 0 || ix >= x.w) continue;
              acc += g[static_cast<std::size_t>(oy) * gy.w + ox] * src[static_cast<std::size_t>(iy) * x.w + ix];
            }
          }
          gw[ky * k_ + kx] += acc;
        }
      }
    }
  }
  return gx;
}

ConvTranspose2d::ConvTranspose2d(int in_channels, int out_channels, int kernel, int stride,
                                 int padding)
    : in_(in_channels), out_(out_channels), k_(kernel), stride_(stride), pad_(padding) {
  if (in_ <= 0 || out_ <= 0 || k_ <= 0 || stride_ <= 0 || pad_ < 0) {
    throw Error(ErrorCode::InvalidArgument, "bad transposed conv geometry");
  }
  weight.name = "weight";
  bias.name = "bias";
  weight.resize(static_cast<std::size_t>(in_) * out_ * k_ * k_);
  bias.resize(static_cast<std::size_t>(out_));
}

void ConvTranspose2d::init(std::mt19937_64& rng, double gain) {
  // Each output sees about in·k²/stride² taps.
  const double fan = static_cast<double>(in_ * k_ * k_) / (stride_ * stride_);
  fill_normal(weight, rng, gain / std::sqrt(fan));
  std::fill(bias.value.begin(), bias.value.end(), 0.0);
}

void ConvTranspose2d::collect(std::vector<Param*>& out) {
  out.push_back(&weight);
  out.push_back(&bias);
}

Tensor ConvTranspose2d::forward(const Tensor& x) const {
  check_input(x, in_);
  Tensor y(out_, out_size(x.h), out_size(x.w));
  const int kk = k_ * k_;
#pragma omp parallel for schedule(static)
  for (int co = 0; co < out_; ++co) {
    double* dst = y.channel(co);
    std::fill(dst, dst + y.plane(), bias.value[co]);
    for (int ci = 0; ci < in_; ++ci) {
      const double* src = x.channel(ci);
      const double* wk = &weight.value[(static_cast<std::size_t>(ci) * out_ + co) * kk];
      for (int ky = 0; ky < k_; ++ky) {
        for (int kx = 0; kx < k_; ++kx) {
          const double wv = wk[ky * k_ + kx];
          for (int iy = 0; iy < x.h; ++iy) {
            const int oy = iy * stride_ - pad_ + ky;
            if (oy < 0 || oy >= y.h) continue;
            for (int ix = 0; ix < x.w; ++ix) {
              const int ox = ix * stride_ - pad_ + kx;
              if (ox < 0 || ox >= y.w) continue;
              dst[static_cast<std::size_t>(oy) * y.w + ox] += wv * src[static_cast<std::size_t>(iy) * x.w + ix];
            }
          }
        }
      }
    }
  }
  return y;
}

Tensor ConvTranspose2d::backward(const Tensor& x, const Tensor& gy) {
  check_input(x, in_);
  Tensor gx(in_, x.h, x.w);
  const int kk = k_ * k_;
#pragma omp parallel for schedule(static)
  for (int ci = 0; ci < in_; ++ci) {
    double* dst = gx.channel(ci);
    const double* src = x.channel(ci);
    for (int co = 0; co < out_; ++co) {
      const double* g = gy.channel(co);
      const double* wk = &weight.value[(static_cast<std::size_t>(ci) * out_ + co) * kk];
      double* gw = &weight.grad[(static_cast<std::size_t>(ci) * out_ + co) * kk];
      for (int ky = 0; ky < k_; ++ky) {
        for (int kx = 0; kx < k_; ++kx) {
          const double wv = wk[ky * k_ + kx];
          double acc = 0.0;
          for (int iy = 0; iy < x.h; ++iy) {
            const int oy = iy * stride_ - pad_ + ky;
            if (oy < 0 || oy >= gy.h) continue;
            for (int ix = 0; ix < x.w; ++ix) {
              const int ox = ix * stride_ - pad_ + kx;
              if (ox < 0 || ox >= gy.w) continue;
              const double gv = g[static_cast<std::size_t>(oy) * gy.w + ox];
              dst[static_cast<std::size_t>(iy) * x.w + ix] += wv * gv;
              acc += gv * src[static_cast<std::size_t>(iy) * x.w + ix];
            }
          }
          gw[ky * k_ + kx] += acc;
        }
      }
    }
  }
  for (int co = 0; co < out_; ++co) {
    const double* g = gy.channel(co);
    double gb = 0.0;
    for (std::size_t i = 0; i < gy.plane(); ++i) gb += g[i];
    bias.grad[co] += gb;
  }
  return gx;
}

namespace serial {

Tensor conv2d_forward(const Conv2d& layer, const Tensor& x) {
  const int k = layer.kernel(), s = layer.stride(), p = layer.padding();
  Tensor y(layer.out_channels(), layer.out_size(x.h), layer.out_size(x.w));
  for (int co = 0; co < y.c; ++co) {
    for (int oy = 0; oy < y.h; ++oy) {
      for (int ox = 0; ox < y.w; ++ox) {
        double acc = layer.bias.value[co];
        for (int ci = 0; ci < x.c; ++ci) {
          for (int ky = 0; ky < k; ++ky) {
            for (int kx = 0; kx < k; ++kx) {
              const int iy = oy * s - p + ky, ix = ox * s - p + kx;
              if (iy < 0 || iy >= x.h || ix < 0 || ix >= x.w) continue;
              acc += layer.weight.value[((static_cast<std::size_t>(co) * x.c + ci) * k + ky) * k + kx] *
                     x.at(ci, iy, ix);
            }
          }
        }
        y.at(co, oy, ox) = acc;
      }
    }
  }
  return y;
}

Tensor conv_transpose2d_forward(const ConvTranspose2d& layer, const Tensor& x) {
  const int k = layer.kernel(), s = layer.stride(), p = layer.padding();
  Tensor y(layer.out_channels(), layer.out_size(x.h), layer.out_size(x.w));
  for (int co = 0; co < y.c; ++co) {
    for (int oy = 0; oy < y.h; ++oy) {
      for (int ox = 0; ox < y.w; ++ox) {
        double acc = layer.bias.value[co];
        for (int ci = 0; ci < x.c; ++ci) {
          for (int ky = 0; ky < k; ++ky) {
            for (int kx = 0; kx < k; ++kx) {
              const int ny = oy + p - ky, nx = ox + p - kx;
              if (ny < 0 || nx < 0 || ny % s != 0 || nx % s != 0) continue;
              const int iy = ny / s, ix = nx / s;
              if (iy >= x.h || ix >= x.w) continue;
              acc += layer.weight.value[((static_cast<std::size_t>(ci) * y.c + co) * k + ky) * k + kx] *
                     x.at(ci, iy, ix);
            }
          }
        }
        y.at(co, oy, ox) = acc;
      }
    }
  }
  return y;
}

}  // namespace serial
}  // namespace depthcodec::nn
