// Copyright 2026 The SpeechFix Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "speechfix/nn/ops.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>

namespace speechfix::nn {

namespace {

// C (m x n) += A (m x k) * B (k x n), all row-major.
void matmul_acc(const double* a, const double* b, double* c, int m, int k, int n) {
  for (int i = 0; i < m; ++i) {
    const double* arow = a + static_cast<std::size_t>(i) * k;
    double* crow = c + static_cast<std::size_t>(i) * n;
    for (int p = 0; p < k; ++p) {
      const double av = arow[p];
      if (av == 0.0) continue;
      const double* brow = b + static_cast<std::size_t>(p) * n;
      for (int j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

// C (m x n) += A(k x m)^T * B (k x n)
void matmul_ta_acc(const double* a, const double* b, double* c, int m, int k, int n) {
  for (int p = 0; p < k; ++p) {
    const double* arow = a + static_cast<std::size_t>(p) * m;
    const double* brow = b + static_cast<std::size_t>(p) * n;
    for (int i = 0; i < m; ++i) {
      const double av = arow[i];
      if (av == 0.0) continue;
      double* crow = c + static_cast<std::size_t>(i) * n;
      for (int j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

// C (m x n) += A (m x k) * B(n x k)^T
void matmul_tb_acc(const double* a, const double* b, double* c, int m, int k, int n) {
  for (int i = 0; i < m; ++i) {
    const double* arow = a + static_cast<std::size_t>(i) * k;
    double* crow = c + static_cast<std::size_t>(i) * n;
    for (int j = 0; j < n; ++j) {
      const double* brow = b + static_cast<std::size_t>(j) * k;
      double acc = 0.0;
      for (int p = 0; p < k; ++p) acc += arow[p] * brow[p];
      crow[j] += acc;
    }
  }
}

void require_rank(const TensorPtr& t, std::size_t rank, const char* what) {
  if (!t || t->shape.size() != rank)
    throw std::invalid_argument(std::string(what) + ": unexpected tensor rank");
}

void require_same_shape(const TensorPtr& a, const TensorPtr& b, const char* what) {
  if (!a || !b || a->shape != b->shape)
    throw std::invalid_argument(std::string(what) + ": shape mismatch");
}

TensorPtr op_output(std::vector<int> shape, std::vector<TensorPtr> parents) {
  auto out = make_tensor(std::move(shape));
  out->parents = std::move(parents);
  return out;
}

}  // namespace

TensorPtr conv2d(const TensorPtr& x, const TensorPtr& w, const TensorPtr& b) {
  require_rank(x, 4, "conv2d input");
  require_rank(w, 4, "conv2d weight");
  require_rank(b, 1, "conv2d bias");
  const int batch = x->shape[0], cin = x->shape[1], h = x->shape[2], wd = x->shape[3];
  const int cout = w->shape[0], kh = w->shape[2], kw = w->shape[3];
  if (w->shape[1] != cin) throw std::invalid_argument("conv2d: channel mismatch");
  if (b->shape[0] != cout) throw std::invalid_argument("conv2d: bias mismatch");
  if (kh % 2 == 0 || kw % 2 == 0) throw std::invalid_argument("conv2d: kernel dims must be odd");
  const int ph = kh / 2, pw = kw / 2;
  const int ckk = cin * kh * kw;
  const int hw = h * wd;

  auto out = op_output({batch, cout, h, wd}, {x, w, b});

  // im2col per sample, cached for the backward pass.
  auto cols = std::make_shared<std::vector<std::vector<double>>>(static_cast<std::size_t>(batch));
  for (int n = 0; n < batch; ++n) {
    auto& col = (*cols)[static_cast<std::size_t>(n)];
    col.assign(static_cast<std::size_t>(ckk) * hw, 0.0);
    const double* xin = x->v.data() + static_cast<std::size_t>(n) * cin * hw;
    for (int c = 0; c < cin; ++c)
      for (int i = 0; i < kh; ++i)
        for (int j = 0; j < kw; ++j) {
          double* crow = col.data() + (static_cast<std::size_t>((c * kh + i) * kw + j)) * hw;
          const int dy = i - ph, dx = j - pw;
          for (int y = 0; y < h; ++y) {
            const int sy = y + dy;
            if (sy < 0 || sy >= h) continue;
            const double* src = xin + (static_cast<std::size_t>(c) * h + sy) * wd;
            double* dst = crow + static_cast<std::size_t>(y) * wd;
            const int x0 = std::max(0, -dx), x1 = std::min(wd, wd - dx);
            for (int xx = x0; xx < x1; ++xx) dst[xx] = src[xx + dx];
          }
        }
    double* o = out->v.data() + static_cast<std::size_t>(n) * cout * hw;
    matmul_acc(w->v.data(), col.data(), o, cout, ckk, hw);
    for (int co = 0; co < cout; ++co) {
      const double bias = b->v[static_cast<std::size_t>(co)];
      double* orow = o + static_cast<std::size_t>(co) * hw;
      for (int p = 0; p < hw; ++p) orow[p] += bias;
    }
  }

  Tensor* raw = out.get();
  out->backprop = [raw, x, w, b, cols, batch, cin, cout, h, wd, kh, kw, ph, pw, ckk, hw]() {
    x->ensure_grad();
    w->ensure_grad();
    b->ensure_grad();
    std::vector<double> dcol(static_cast<std::size_t>(ckk) * hw);
    for (int n = 0; n < batch; ++n) {
      const double* dout = raw->g.data() + static_cast<std::size_t>(n) * cout * hw;
      // dW += dout * col^T ; db += row sums
      matmul_tb_acc(dout, (*cols)[static_cast<std::size_t>(n)].data(), w->g.data(), cout, hw, ckk);
      for (int co = 0; co < cout; ++co) {
        double acc = 0.0;
        const double* drow = dout + static_cast<std::size_t>(co) * hw;
        for (int p = 0; p < hw; ++p) acc += drow[p];
        b->g[static_cast<std::size_t>(co)] += acc;
      }
      // dcol = W^T * dout, scattered back to x (col2im).
      std::fill(dcol.begin(), dcol.end(), 0.0);
      matmul_ta_acc(w->v.data(), dout, dcol.data(), ckk, cout, hw);
      double* dx = x->g.data() + static_cast<std::size_t>(n) * cin * hw;
      for (int c = 0; c < cin; ++c)
        for (int i = 0; i < kh; ++i)
          for (int j = 0; j < kw; ++j) {
            const double* crow = dcol.data() + (static_cast<std::size_t>((c * kh + i) * kw + j)) * hw;
            const int dy = i - ph, dxo = j - pw;
            for (int y = 0; y < h; ++y) {
              const int sy = y + dy;
              if (sy < 0 || sy >= h) continue;
              double* dst = dx + (static_cast<std::size_t>(c) * h + sy) * wd;
              const double* src = crow + static_cast<std::size_t>(y) * wd;
              const int x0 = std::max(0, -dxo), x1 = std::min(wd, wd - dxo);
              for (int xx = x0; xx < x1; ++xx) dst[xx + dxo] += src[xx];
            }
          }
    }
  };
  return out;
}

TensorPtr conv_transpose_freq2(const TensorPtr& x, const TensorPtr& w, const TensorPtr& b) {
  require_rank(x, 4, "conv_transpose input");
  require_rank(w, 3, "conv_transpose weight");
  require_rank(b, 1, "conv_transpose bias");
  const int batch = x->shape[0], cin = x->shape[1], h = x->shape[2], wd = x->shape[3];
  if (w->shape[0] != cin || w->shape[2] != 2)
    throw std::invalid_argument("conv_transpose: weight must be (Cin,Cout,2)");
  const int cout = w->shape[1];
  if (b->shape[0] != cout) throw std::invalid_argument("conv_transpose: bias mismatch");
  const int oh = 2 * h;

  auto out = op_output({batch, cout, oh, wd}, {x, w, b});
  for (int n = 0; n < batch; ++n)
    for (int co = 0; co < cout; ++co) {
      double* o = out->v.data() + (static_cast<std::size_t>(n) * cout + co) * oh * wd;
      for (int p = 0; p < oh * wd; ++p) o[p] = b->v[static_cast<std::size_t>(co)];
      for (int ci = 0; ci < cin; ++ci) {
        const double* xin = x->v.data() + (static_cast<std::size_t>(n) * cin + ci) * h * wd;
        const double w0 = w->v[(static_cast<std::size_t>(ci) * cout + co) * 2 + 0];
        const double w1 = w->v[(static_cast<std::size_t>(ci) * cout + co) * 2 + 1];
        for (int y = 0; y < h; ++y) {
          const double* src = xin + static_cast<std::size_t>(y) * wd;
          double* d0 = o + static_cast<std::size_t>(2 * y) * wd;
          double* d1 = o + static_cast<std::size_t>(2 * y + 1) * wd;
          for (int xx = 0; xx < wd; ++xx) {
            d0[xx] += w0 * src[xx];
            d1[xx] += w1 * src[xx];
          }
        }
      }
    }

  Tensor* raw = out.get();
  out->backprop = [raw, x, w, b, batch, cin, cout, h, wd, oh]() {
    x->ensure_grad();
    w->ensure_grad();
    b->ensure_grad();
    for (int n = 0; n < batch; ++n)
      for (int co = 0; co < cout; ++co) {
        const double* dout = raw->g.data() + (static_cast<std::size_t>(n) * cout + co) * oh * wd;
        double acc = 0.0;
        for (int p = 0; p < oh * wd; ++p) acc += dout[p];
        b->g[static_cast<std::size_t>(co)] += acc;
        for (int ci = 0; ci < cin; ++ci) {
          const double* xin = x->v.data() + (static_cast<std::size_t>(n) * cin + ci) * h * wd;
          double* dx = x->g.data() + (static_cast<std::size_t>(n) * cin + ci) * h * wd;
          const double w0 = w->v[(static_cast<std::size_t>(ci) * cout + co) * 2 + 0];
          const double w1 = w->v[(static_cast<std::size_t>(ci) * cout + co) * 2 + 1];
          double dw0 = 0.0, dw1 = 0.0;
          for (int y = 0; y < h; ++y) {
            const double* d0 = dout + static_cast<std::size_t>(2 * y) * wd;
            const double* d1 = dout + static_cast<std::size_t>(2 * y + 1) * wd;
            const double* src = xin + static_cast<std::size_t>(y) * wd;
            double* dst = dx + static_cast<std::size_t>(y) * wd;
            for (int xx = 0; xx < wd; ++xx) {
              dst[xx] += w0 * d0[xx] + w1 * d1[xx];
              dw0 += src[xx] * d0[xx];
              dw1 += src[xx] * d1[xx];
            }
          }
          w->g[(static_cast<std::size_t>(ci) * cout + co) * 2 + 0] += dw0;
          w->g[(static_cast<std::size_t>(ci) * cout + co) * 2 + 1] += dw1;
        }
      }
  };
  return out;
}

TensorPtr avg_pool_freq2(const TensorPtr& x) {
  require_rank(x, 4, "avg_pool input");
  const int batch = x->shape[0], c = x->shape[1], h = x->shape[2], wd = x->shape[3];
  if (h % 2 != 0) throw std::invalid_argument("avg_pool: frequency axis must be even");
  const int oh = h / 2;

  auto out = op_output({batch, c, oh, wd}, {x});
  for (int nc = 0; nc < batch * c; ++nc) {
    const double* xin = x->v.data() + static_cast<std::size_t>(nc) * h * wd;
    double* o = out->v.data() + static_cast<std::size_t>(nc) * oh * wd;
    for (int y = 0; y < oh; ++y)
      for (int xx = 0; xx < wd; ++xx)
        o[static_cast<std::size_t>(y) * wd + xx] =
            0.5 * (xin[static_cast<std::size_t>(2 * y) * wd + xx] +
                   xin[static_cast<std::size_t>(2 * y + 1) * wd + xx]);
  }

  Tensor* raw = out.get();
  out->backprop = [raw, x, batch, c, h, wd, oh]() {
    x->ensure_grad();
    for (int nc = 0; nc < batch * c; ++nc) {
      double* dx = x->g.data() + static_cast<std::size_t>(nc) * h * wd;
      const double* dout = raw->g.data() + static_cast<std::size_t>(nc) * oh * wd;
      for (int y = 0; y < oh; ++y)
        for (int xx = 0; xx < wd; ++xx) {
          const double gv = 0.5 * dout[static_cast<std::size_t>(y) * wd + xx];
          dx[static_cast<std::size_t>(2 * y) * wd + xx] += gv;
          dx[static_cast<std::size_t>(2 * y + 1) * wd + xx] += gv;
        }
    }
  };
  return out;
}

TensorPtr batch_norm(const TensorPtr& x, const TensorPtr& gamma, const TensorPtr& beta,
                     BnStats& running, bool training, double momentum, double eps) {
  require_rank(x, 4, "batch_norm input");
  require_rank(gamma, 1, "batch_norm gamma");
  require_rank(beta, 1, "batch_norm beta");
  const int batch = x->shape[0], c = x->shape[1], h = x->shape[2], wd = x->shape[3];
  if (gamma->shape[0] != c || beta->shape[0] != c ||
      running.mean.size() != static_cast<std::size_t>(c))
    throw std::invalid_argument("batch_norm: channel mismatch");
  const int hw = h * wd;
  const double m = static_cast<double>(batch) * hw;

  auto mu = std::make_shared<std::vector<double>>(static_cast<std::size_t>(c), 0.0);
  auto inv_std = std::make_shared<std::vector<double>>(static_cast<std::size_t>(c), 0.0);

  for (int ch = 0; ch < c; ++ch) {
    double mean, var;
    if (training) {
      double s = 0.0;
      for (int n = 0; n < batch; ++n) {
        const double* xin = x->v.data() + (static_cast<std::size_t>(n) * c + ch) * hw;
        for (int p = 0; p < hw; ++p) s += xin[p];
      }
      mean = s / m;
      double sq = 0.0;
      for (int n = 0; n < batch; ++n) {
        const double* xin = x->v.data() + (static_cast<std::size_t>(n) * c + ch) * hw;
        for (int p = 0; p < hw; ++p) sq += (xin[p] - mean) * (xin[p] - mean);
      }
      var = sq / m;
      running.mean[static_cast<std::size_t>(ch)] =
          momentum * running.mean[static_cast<std::size_t>(ch)] + (1.0 - momentum) * mean;
      running.var[static_cast<std::size_t>(ch)] =
          momentum * running.var[static_cast<std::size_t>(ch)] + (1.0 - momentum) * var;
    } else {
      mean = running.mean[static_cast<std::size_t>(ch)];
      var = running.var[static_cast<std::size_t>(ch)];
    }
    (*mu)[static_cast<std::size_t>(ch)] = mean;
    (*inv_std)[static_cast<std::size_t>(ch)] = 1.0 / std::sqrt(var + eps);
  }

  auto out = op_output(x->shape, {x, gamma, beta});
  for (int n = 0; n < batch; ++n)
    for (int ch = 0; ch < c; ++ch) {
      const double* xin = x->v.data() + (static_cast<std::size_t>(n) * c + ch) * hw;
      double* o = out->v.data() + (static_cast<std::size_t>(n) * c + ch) * hw;
      const double g = gamma->v[static_cast<std::size_t>(ch)];
      const double bt = beta->v[static_cast<std::size_t>(ch)];
      const double mean = (*mu)[static_cast<std::size_t>(ch)];
      const double is = (*inv_std)[static_cast<std::size_t>(ch)];
      for (int p = 0; p < hw; ++p) o[p] = g * (xin[p] - mean) * is + bt;
    }

  Tensor* raw = out.get();
  out->backprop = [raw, x, gamma, beta, mu, inv_std, training, batch, c, hw, m]() {
    x->ensure_grad();
    gamma->ensure_grad();
    beta->ensure_grad();
    for (int ch = 0; ch < c; ++ch) {
      const double g = gamma->v[static_cast<std::size_t>(ch)];
      const double mean = (*mu)[static_cast<std::size_t>(ch)];
      const double is = (*inv_std)[static_cast<std::size_t>(ch)];
      double s1 = 0.0, s2 = 0.0;
      for (int n = 0; n < batch; ++n) {
        const double* dout = raw->g.data() + (static_cast<std::size_t>(n) * c + ch) * hw;
        const double* xin = x->v.data() + (static_cast<std::size_t>(n) * c + ch) * hw;
        for (int p = 0; p < hw; ++p) {
          s1 += dout[p];
          s2 += dout[p] * (xin[p] - mean) * is;
        }
      }
      gamma->g[static_cast<std::size_t>(ch)] += s2;
      beta->g[static_cast<std::size_t>(ch)] += s1;
      for (int n = 0; n < batch; ++n) {
        const double* dout = raw->g.data() + (static_cast<std::size_t>(n) * c + ch) * hw;
        const double* xin = x->v.data() + (static_cast<std::size_t>(n) * c + ch) * hw;
        double* dx = x->g.data() + (static_cast<std::size_t>(n) * c + ch) * hw;
        if (training) {
          for (int p = 0; p < hw; ++p) {
            const double xhat = (xin[p] - mean) * is;
            dx[p] += (g * is / m) * (m * dout[p] - s1 - xhat * s2);
          }
        } else {
          for (int p = 0; p < hw; ++p) dx[p] += dout[p] * g * is;
        }
      }
    }
  };
  return out;
}

TensorPtr leaky_relu(const TensorPtr& x, double slope) {
  auto out = op_output(x->shape, {x});
  for (std::size_t i = 0; i < x->size(); ++i)
    out->v[i] = x->v[i] > 0.0 ? x->v[i] : slope * x->v[i];
  Tensor* raw = out.get();
  out->backprop = [raw, x, slope]() {
    x->ensure_grad();
    for (std::size_t i = 0; i < x->size(); ++i)
      x->g[i] += raw->g[i] * (x->v[i] > 0.0 ? 1.0 : slope);
  };
  return out;
}

TensorPtr softplus(const TensorPtr& x) {
  auto out = op_output(x->shape, {x});
  for (std::size_t i = 0; i < x->size(); ++i) {
    const double v = x->v[i];
    if (v > 30.0)
      out->v[i] = v;
    else if (v < -30.0)
      out->v[i] = std::exp(v);
    else
      out->v[i] = std::log1p(std::exp(v));
  }
  Tensor* raw = out.get();
  out->backprop = [raw, x]() {
    x->ensure_grad();
    for (std::size_t i = 0; i < x->size(); ++i)
      x->g[i] += raw->g[i] / (1.0 + std::exp(-x->v[i]));
  };
  return out;
}

TensorPtr add(const TensorPtr& a, const TensorPtr& b) {
  require_same_shape(a, b, "add");
  auto out = op_output(a->shape, {a, b});
  for (std::size_t i = 0; i < a->size(); ++i) out->v[i] = a->v[i] + b->v[i];
  Tensor* raw = out.get();
  out->backprop = [raw, a, b]() {
    a->ensure_grad();
    b->ensure_grad();
    for (std::size_t i = 0; i < a->size(); ++i) {
      a->g[i] += raw->g[i];
      b->g[i] += raw->g[i];
    }
  };
  return out;
}

TensorPtr mul(const TensorPtr& a, const TensorPtr& b) {
  require_same_shape(a, b, "mul");
  auto out = op_output(a->shape, {a, b});
  for (std::size_t i = 0; i < a->size(); ++i) out->v[i] = a->v[i] * b->v[i];
  Tensor* raw = out.get();
  out->backprop = [raw, a, b]() {
    a->ensure_grad();
    b->ensure_grad();
    for (std::size_t i = 0; i < a->size(); ++i) {
      a->g[i] += raw->g[i] * b->v[i];
      b->g[i] += raw->g[i] * a->v[i];
    }
  };
  return out;
}

TensorPtr concat_channels(const TensorPtr& a, const TensorPtr& b) {
  require_rank(a, 4, "concat");
  require_rank(b, 4, "concat");
  if (a->shape[0] != b->shape[0] || a->shape[2] != b->shape[2] || a->shape[3] != b->shape[3])
    throw std::invalid_argument("concat: non-channel dims must match");
  const int batch = a->shape[0], ca = a->shape[1], cb = b->shape[1];
  const int hw = a->shape[2] * a->shape[3];

  auto out = op_output({batch, ca + cb, a->shape[2], a->shape[3]}, {a, b});
  for (int n = 0; n < batch; ++n) {
    std::copy(a->v.begin() + static_cast<std::ptrdiff_t>(n) * ca * hw,
              a->v.begin() + static_cast<std::ptrdiff_t>(n + 1) * ca * hw,
              out->v.begin() + static_cast<std::ptrdiff_t>(n) * (ca + cb) * hw);
    std::copy(b->v.begin() + static_cast<std::ptrdiff_t>(n) * cb * hw,
              b->v.begin() + static_cast<std::ptrdiff_t>(n + 1) * cb * hw,
              out->v.begin() + static_cast<std::ptrdiff_t>(n) * (ca + cb) * hw + ca * hw);
  }
  Tensor* raw = out.get();
  out->backprop = [raw, a, b, batch, ca, cb, hw]() {
    a->ensure_grad();
    b->ensure_grad();
    for (int n = 0; n < batch; ++n) {
      const double* dout = raw->g.data() + static_cast<std::size_t>(n) * (ca + cb) * hw;
      double* da = a->g.data() + static_cast<std::size_t>(n) * ca * hw;
      double* db = b->g.data() + static_cast<std::size_t>(n) * cb * hw;
      for (int p = 0; p < ca * hw; ++p) da[p] += dout[p];
      for (int p = 0; p < cb * hw; ++p) db[p] += dout[ca * hw + p];
    }
  };
  return out;
}

TensorPtr mae_loss(const TensorPtr& a, const TensorPtr& b) {
  require_same_shape(a, b, "mae_loss");
  auto out = op_output({1}, {a, b});
  double acc = 0.0;
  for (std::size_t i = 0; i < a->size(); ++i) acc += std::abs(a->v[i] - b->v[i]);
  const double n = static_cast<double>(a->size());
  out->v[0] = acc / n;

  Tensor* raw = out.get();
  out->backprop = [raw, a, b, n]() {
    a->ensure_grad();
    b->ensure_grad();
    const double scale = raw->g[0] / n;
    for (std::size_t i = 0; i < a->size(); ++i) {
      const double d = a->v[i] - b->v[i];
      const double s = (d > 0.0) ? 1.0 : (d < 0.0 ? -1.0 : 0.0);
      a->g[i] += scale * s;
      b->g[i] -= scale * s;
    }
  };
  return out;
}

TensorPtr weighted_sum(const TensorPtr& t, const std::vector<double>& weights) {
  if (t->size() != weights.size()) throw std::invalid_argument("weighted_sum: size mismatch");
  auto out = op_output({1}, {t});
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) acc += t->v[i] * weights[i];
  out->v[0] = acc;
  Tensor* raw = out.get();
  auto w = std::make_shared<std::vector<double>>(weights);
  out->backprop = [raw, t, w]() {
    t->ensure_grad();
    for (std::size_t i = 0; i < w->size(); ++i) t->g[i] += raw->g[0] * (*w)[i];
  };
  return out;
}

}  // namespace speechfix::nn
