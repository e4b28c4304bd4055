// Copyright 2026 The depthcodec Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>

#include "depthcodec/error.hpp"
#include "depthcodec/nn/layers.hpp"

namespace depthcodec::nn {

// Token-major activations of one tile; matrices are [token][channel].
struct WindowAttention::Tile {
  int x0 = 0, y0 = 0, tw = 0, th = 0, n = 0;
  std::vector<double> x, q, k, v, a, o;
};

namespace {

// out[t][i] = Σ_j w[i][j]·in[t][j] + b[i]
void project(const std::vector<double>& in, const Param& w, const Param& b, int n, int c,
             std::vector<double>& out) {
  out.assign(static_cast<std::size_t>(n) * c, 0.0);
  for (int t = 0; t < n; ++t) {
    for (int i = 0; i < c; ++i) {
      double acc = b.value[i];
      for (int j = 0; j < c; ++j) acc += w.value[static_cast<std::size_t>(i) * c + j] * in[static_cast<std::size_t>(t) * c + j];
      out[static_cast<std::size_t>(t) * c + i] = acc;
    }
  }
}

// Accumulates weight/bias gradients of `project` and adds the input gradient.
void project_backward(const std::vector<double>& in, const std::vector<double>& gout, Param& w,
                      Param& b, int n, int c, std::vector<double>& gin) {
  for (int t = 0; t < n; ++t) {
    for (int i = 0; i < c; ++i) {
      const double g = gout[static_cast<std::size_t>(t) * c + i];
      b.grad[i] += g;
      for (int j = 0; j < c; ++j) {
        w.grad[static_cast<std::size_t>(i) * c + j] += g * in[static_cast<std::size_t>(t) * c + j];
        gin[static_cast<std::size_t>(t) * c + j] += g * w.value[static_cast<std::size_t>(i) * c + j];
      }
    }
  }
}

}  // namespace

WindowAttention::WindowAttention(int channels, int window) : c_(channels), window_(window) {
  if (c_ <= 0 || window_ <= 0) throw Error(ErrorCode::InvalidArgument, "bad attention geometry");
  const char* names[] = {"wq", "wk", "wv", "wo"};
  Param* mats[] = {&wq, &wk, &wv, &wo};
  Param* vecs[] = {&bq, &bk, &bv, &bo};
  for (int i = 0; i < 4; ++i) {
    mats[i]->name = names[i];
    mats[i]->resize(static_cast<std::size_t>(c_) * c_);
    vecs[i]->name = std::string("b") + names[i][1];
    vecs[i]->resize(static_cast<std::size_t>(c_));
  }
}

void WindowAttention::init(std::mt19937_64& rng, double gain) {
  std::normal_distribution<double> dist(0.0, gain / std::sqrt(static_cast<double>(c_)));
  for (Param* p : {&wq, &wk, &wv, &wo}) {
    for (double& v : p->value) v = dist(rng);
  }
  for (Param* p : {&bq, &bk, &bv, &bo}) std::fill(p->value.begin(), p->value.end(), 0.0);
}

void WindowAttention::collect(std::vector<Param*>& out) {
  for (Param* p : {&wq, &bq, &wk, &bk, &wv, &bv, &wo, &bo}) out.push_back(p);
}

WindowAttention::Tile WindowAttention::gather(const Tensor& x, int x0, int y0) const {
  Tile t;
  t.x0 = x0;
  t.y0 = y0;
  t.tw = std::min(window_, x.w - x0);
  t.th = std::min(window_, x.h - y0);
  t.n = t.tw * t.th;
  const int n = t.n;
  t.x.resize(static_cast<std::size_t>(n) * c_);
  for (int ty = 0; ty < t.th; ++ty) {
    for (int tx = 0; tx < t.tw; ++tx) {
      for (int ch = 0; ch < c_; ++ch) {
        t.x[static_cast<std::size_t>(ty * t.tw + tx) * c_ + ch] = x.at(ch, y0 + ty, x0 + tx);
      }
    }
  }
  project(t.x, wq, bq, n, c_, t.q);
  project(t.x, wk, bk, n, c_, t.k);
  project(t.x, wv, bv, n, c_, t.v);
  const double scale = 1.0 / std::sqrt(static_cast<double>(c_));
  t.a.assign(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) {
    double* row = &t.a[static_cast<std::size_t>(i) * n];
    double peak = -INFINITY;
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int ch = 0; ch < c_; ++ch) s += t.q[static_cast<std::size_t>(i) * c_ + ch] * t.k[static_cast<std::size_t>(j) * c_ + ch];
      row[j] = s * scale;
      peak = std::max(peak, row[j]);
    }
    double sum = 0.0;
    for (int j = 0; j < n; ++j) {
      row[j] = std::exp(row[j] - peak);
      sum += row[j];
    }
    for (int j = 0; j < n; ++j) row[j] /= sum;
  }
  t.o.assign(static_cast<std::size_t>(n) * c_, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double aij = t.a[static_cast<std::size_t>(i) * n + j];
      for (int ch = 0; ch < c_; ++ch) t.o[static_cast<std::size_t>(i) * c_ + ch] += aij * t.v[static_cast<std::size_t>(j) * c_ + ch];
    }
  }
  return t;
}

std::vector<double> WindowAttention::attention_weights(const Tensor& x, int x0, int y0) const {
  return gather(x, x0, y0).a;
}

Tensor WindowAttention::forward(const Tensor& x) const {
  if (x.c != c_) throw Error(ErrorCode::InvalidArgument, "channel count mismatch");
  Tensor y = x;
  const int tiles_x = (x.w + window_ - 1) / window_;
  const int tiles = tiles_x * ((x.h + window_ - 1) / window_);
#pragma omp parallel for schedule(static)
  for (int idx = 0; idx < tiles; ++idx) {
    const Tile t = gather(x, (idx % tiles_x) * window_, (idx / tiles_x) * window_);
    std::vector<double> proj;
    project(t.o, wo, bo, t.n, c_, proj);
    for (int ty = 0; ty < t.th; ++ty) {
      for (int tx = 0; tx < t.tw; ++tx) {
        for (int ch = 0; ch < c_; ++ch) {
          y.at(ch, t.y0 + ty, t.x0 + tx) += proj[static_cast<std::size_t>(ty * t.tw + tx) * c_ + ch];
        }
      }
    }
  }
  return y;
}

Tensor WindowAttention::backward(const Tensor& x, const Tensor& gy) {
  Tensor gx = gy;  // residual path
  const int tiles_x = (x.w + window_ - 1) / window_;
  const int tiles = tiles_x * ((x.h + window_ - 1) / window_);
  const double scale = 1.0 / std::sqrt(static_cast<double>(c_));
  for (int idx = 0; idx < tiles; ++idx) {
    const Tile t = gather(x, (idx % tiles_x) * window_, (idx / tiles_x) * window_);
    const int n = t.n;
    const std::size_t nc = static_cast<std::size_t>(n) * c_;
    std::vector<double> g_out(nc);
    for (int ty = 0; ty < t.th; ++ty) {
      for (int tx = 0; tx < t.tw; ++tx) {
        for (int ch = 0; ch < c_; ++ch) {
          g_out[static_cast<std::size_t>(ty * t.tw + tx) * c_ + ch] = gy.at(ch, t.y0 + ty, t.x0 + tx);
        }
      }
    }
    std::vector<double> g_o(nc, 0.0);
    project_backward(t.o, g_out, wo, bo, n, c_, g_o);

    std::vector<double> g_v(nc, 0.0), g_s(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) {
      double dot = 0.0;
      for (int j = 0; j < n; ++j) {
        double ga = 0.0;
        const double aij = t.a[static_cast<std::size_t>(i) * n + j];
        for (int ch = 0; ch < c_; ++ch) {
          const double go = g_o[static_cast<std::size_t>(i) * c_ + ch];
          ga += go * t.v[static_cast<std::size_t>(j) * c_ + ch];
          g_v[static_cast<std::size_t>(j) * c_ + ch] += aij * go;
        }
        g_s[static_cast<std::size_t>(i) * n + j] = ga;
        dot += aij * ga;
      }
      for (int j = 0; j < n; ++j) {
        double& g = g_s[static_cast<std::size_t>(i) * n + j];
        g = t.a[static_cast<std::size_t>(i) * n + j] * (g - dot) * scale;
      }
    }
    std::vector<double> g_q(nc, 0.0), g_k(nc, 0.0);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const double g = g_s[static_cast<std::size_t>(i) * n + j];
        for (int ch = 0; ch < c_; ++ch) {
          g_q[static_cast<std::size_t>(i) * c_ + ch] += g * t.k[static_cast<std::size_t>(j) * c_ + ch];
          g_k[static_cast<std::size_t>(j) * c_ + ch] += g * t.q[static_cast<std::size_t>(i) * c_ + ch];
        }
      }
    }
    std::vector<double> g_x(nc, 0.0);
    project_backward(t.x, g_q, wq, bq, n, c_, g_x);
    project_backward(t.x, g_k, wk, bk, n, c_, g_x);
    project_backward(t.x, g_v, wv, bv, n, c_, g_x);
    for (int ty = 0; ty < t.th; ++ty) {
      for (int tx = 0; tx < t.tw; ++tx) {
        for (int ch = 0; ch < c_; ++ch) {
          gx.at(ch, t.y0 + ty, t.x0 + tx) += g_x[static_cast<std::size_t>(ty * t.tw + tx) * c_ + ch];
        }
      }
    }
  }
  return gx;
}

}  // namespace depthcodec::nn
