// Copyright 2026 The zolab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "zolab/transformer.h"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "zolab/errors.h"

namespace zolab {
namespace {

constexpr double kLayerNormEps = 1e-5;
constexpr double kGeluC = 0.7978845608028654;  // sqrt(2 / pi)
constexpr double kGeluK = 0.044715;

// Views into one block's activation arena, sized for `samples` samples.
template <typename T>
struct BlockBuffers {
  T* xhat1;
  T* rstd1;
  T* q;
  T* k;
  T* v;
  T* scores;
  T* probs;
  T* ctx;
  T* xhat2;
  T* rstd2;
  T* pre;
};

template <typename T>
BlockBuffers<T> Carve(T* base, const ModelConfig& c, int64_t samples) {
  const size_t n = samples * c.seq_len;
  const size_t nd = n * c.dim;
  const size_t att = samples * c.heads * c.seq_len * c.seq_len;
  BlockBuffers<T> b;
  b.xhat1 = base;
  base += nd;
  b.rstd1 = base;
  base += n;
  b.q = base;
  base += nd;
  b.k = base;
  base += nd;
  b.v = base;
  base += nd;
  b.scores = base;
  base += att;
  b.probs = base;
  base += att;
  b.ctx = base;
  base += nd;
  b.xhat2 = base;
  base += nd;
  b.rstd2 = base;
  base += n;
  b.pre = base;
  return b;
}

// Per-row temporaries. Size does not depend on batch size.
template <typename T>
struct Scratch {
  Scratch(AllocationLedger& ledger, const ModelConfig& c)
      : buffer(ledger, Category::kActivation,
               3 * c.dim + 2 * c.mlp_dim() + c.seq_len * c.head_dim() +
                   c.classes) {
    T* p = buffer.data();
    ln = p;
    p += c.dim;
    d1 = p;
    p += c.dim;
    d2 = p;
    p += c.dim;
    f1 = p;
    p += c.mlp_dim();
    f2 = p;
    p += c.mlp_dim();
    head = p;
    p += c.seq_len * c.head_dim();
    cls = p;
  }

  TrackedBuffer<T> buffer;
  T* ln;
  T* d1;
  T* d2;
  T* f1;
  T* f2;
  T* head;
  T* cls;
};

// y = x W + b with W stored [in, out].
template <typename T>
void LinearRow(const T* x, const T* w, const T* b, int64_t in, int64_t out,
               T* y) {
  for (int64_t j = 0; j < out; ++j) y[j] = b[j];
  for (int64_t k = 0; k < in; ++k) {
    const T xk = x[k];
    const T* wr = w + k * out;
    for (int64_t j = 0; j < out; ++j) y[j] += xk * wr[j];
  }
}

// dx = W dy.
template <typename T>
void LinearRowInputGrad(const T* dy, const T* w, int64_t in, int64_t out,
                        T* dx) {
  for (int64_t k = 0; k < in; ++k) {
    const T* wr = w + k * out;
    T acc = 0;
    for (int64_t j = 0; j < out; ++j) acc += wr[j] * dy[j];
    dx[k] = acc;
  }
}

// dW += x^T dy, db += dy.
template <typename T>
void LinearRowParamGrad(const T* x, const T* dy, int64_t in, int64_t out,
                        T* dw, T* db) {
  for (int64_t k = 0; k < in; ++k) {
    const T xk = x[k];
    T* dwr = dw + k * out;
    for (int64_t j = 0; j < out; ++j) dwr[j] += xk * dy[j];
  }
  for (int64_t j = 0; j < out; ++j) db[j] += dy[j];
}

template <typename T>
void LayerNormRow(const T* x, const T* gain, const T* bias, int64_t d,
                  T* xhat, T* rstd, T* y) {
  T mean = 0;
  for (int64_t i = 0; i < d; ++i) mean += x[i];
  mean /= static_cast<T>(d);
  T var = 0;
  for (int64_t i = 0; i < d; ++i) {
    const T diff = x[i] - mean;
    var += diff * diff;
  }
  var /= static_cast<T>(d);
  const T r = T(1) / std::sqrt(var + static_cast<T>(kLayerNormEps));
  *rstd = r;
  for (int64_t i = 0; i < d; ++i) {
    const T xh = (x[i] - mean) * r;
    xhat[i] = xh;
    y[i] = gain[i] * xh + bias[i];
  }
}

template <typename T>
void LayerNormOutput(const T* xhat, const T* gain, const T* bias, int64_t d,
                     T* y) {
  for (int64_t i = 0; i < d; ++i) y[i] = gain[i] * xhat[i] + bias[i];
}

// Accumulates the input gradient into dx.
template <typename T>
void LayerNormRowGrad(const T* dy, const T* gain, const T* xhat, T rstd,
                      int64_t d, T* dgain, T* dbias, T* dx) {
  T mean_g = 0;
  T mean_gx = 0;
  for (int64_t i = 0; i < d; ++i) {
    const T g = dy[i] * gain[i];
    mean_g += g;
    mean_gx += g * xhat[i];
    dgain[i] += dy[i] * xhat[i];
    dbias[i] += dy[i];
  }
  mean_g /= static_cast<T>(d);
  mean_gx /= static_cast<T>(d);
  for (int64_t i = 0; i < d; ++i) {
    dx[i] += rstd * (dy[i] * gain[i] - mean_g - xhat[i] * mean_gx);
  }
}

template <typename T>
T Gelu(T x) {
  const T u = static_cast<T>(kGeluC) * (x + static_cast<T>(kGeluK) * x * x * x);
  return T(0.5) * x * (T(1) + std::tanh(u));
}

template <typename T>
T GeluGrad(T x) {
  const T u = static_cast<T>(kGeluC) * (x + static_cast<T>(kGeluK) * x * x * x);
  const T t = std::tanh(u);
  const T du = static_cast<T>(kGeluC) *
               (T(1) + static_cast<T>(3 * kGeluK) * x * x);
  return T(0.5) * (T(1) + t) + T(0.5) * x * (T(1) - t * t) * du;
}

// One sample's self-attention. q, k, v, ctx point at the sample's first row
// (row stride d); scores and probs at its [heads, s, s] block.
template <typename T>
void AttentionForward(const ModelConfig& c, const T* q, const T* k, const T* v,
                      T* scores, T* probs, T* ctx) {
  const int64_t s = c.seq_len;
  const int64_t d = c.dim;
  const int64_t dh = c.head_dim();
  const T scale = T(1) / std::sqrt(static_cast<T>(dh));
  for (int64_t h = 0; h < c.heads; ++h) {
    const int64_t off = h * dh;
    T* sc = scores + h * s * s;
    T* pr = probs + h * s * s;
    for (int64_t i = 0; i < s; ++i) {
      const T* qi = q + i * d + off;
      for (int64_t j = 0; j < s; ++j) {
        const T* kj = k + j * d + off;
        T acc = 0;
        for (int64_t e = 0; e < dh; ++e) acc += qi[e] * kj[e];
        sc[i * s + j] = acc * scale;
      }
      T m = sc[i * s];
      for (int64_t j = 1; j < s; ++j) m = std::max(m, sc[i * s + j]);
      T sum = 0;
      for (int64_t j = 0; j < s; ++j) {
        const T e = std::exp(sc[i * s + j] - m);
        pr[i * s + j] = e;
        sum += e;
      }
      for (int64_t j = 0; j < s; ++j) pr[i * s + j] /= sum;
    }
    for (int64_t i = 0; i < s; ++i) {
      T* ci = ctx + i * d + off;
      for (int64_t e = 0; e < dh; ++e) ci[e] = 0;
      for (int64_t j = 0; j < s; ++j) {
        const T p = pr[i * s + j];
        const T* vj = v + j * d + off;
        for (int64_t e = 0; e < dh; ++e) ci[e] += p * vj[e];
      }
    }
  }
}

// On entry ctx holds d(ctx). On exit q, k, v hold dq, dk, dv and scores has
// been used as scratch for d(scores).
template <typename T>
void AttentionBackward(const ModelConfig& c, T* q, T* k, T* v, T* scores,
                       const T* probs, const T* dctx, T* tmp) {
  const int64_t s = c.seq_len;
  const int64_t d = c.dim;
  const int64_t dh = c.head_dim();
  const T scale = T(1) / std::sqrt(static_cast<T>(dh));
  for (int64_t h = 0; h < c.heads; ++h) {
    const int64_t off = h * dh;
    T* ds = scores + h * s * s;
    const T* pr = probs + h * s * s;
    for (int64_t i = 0; i < s; ++i) {
      const T* gi = dctx + i * d + off;
      for (int64_t j = 0; j < s; ++j) {
        const T* vj = v + j * d + off;
        T acc = 0;
        for (int64_t e = 0; e < dh; ++e) acc += gi[e] * vj[e];
        ds[i * s + j] = acc;
      }
    }
    // v is dead once d(probs) exists.
    for (int64_t j = 0; j < s; ++j) {
      T* vj = v + j * d + off;
      for (int64_t e = 0; e < dh; ++e) vj[e] = 0;
      for (int64_t i = 0; i < s; ++i) {
        const T p = pr[i * s + j];
        const T* gi = dctx + i * d + off;
        for (int64_t e = 0; e < dh; ++e) vj[e] += p * gi[e];
      }
    }
    for (int64_t i = 0; i < s; ++i) {
      T dot = 0;
      for (int64_t j = 0; j < s; ++j) dot += pr[i * s + j] * ds[i * s + j];
      for (int64_t j = 0; j < s; ++j) {
        ds[i * s + j] = pr[i * s + j] * (ds[i * s + j] - dot);
      }
    }
    for (int64_t i = 0; i < s; ++i) {
      T* ti = tmp + i * dh;
      for (int64_t e = 0; e < dh; ++e) ti[e] = 0;
      for (int64_t j = 0; j < s; ++j) {
        const T g = ds[i * s + j];
        const T* kj = k + j * d + off;
        for (int64_t e = 0; e < dh; ++e) ti[e] += g * kj[e];
      }
    }
    for (int64_t j = 0; j < s; ++j) {
      T* kj = k + j * d + off;
      for (int64_t e = 0; e < dh; ++e) kj[e] = 0;
      for (int64_t i = 0; i < s; ++i) {
        const T g = ds[i * s + j];
        const T* qi = q + i * d + off;
        for (int64_t e = 0; e < dh; ++e) kj[e] += g * qi[e];
      }
      for (int64_t e = 0; e < dh; ++e) kj[e] *= scale;
    }
    for (int64_t i = 0; i < s; ++i) {
      T* qi = q + i * d + off;
      for (int64_t e = 0; e < dh; ++e) qi[e] = tmp[i * dh + e] * scale;
    }
  }
}

// Runs one block over `samples` samples of the residual stream x, in place.
template <typename T>
void BlockForward(const ModelConfig& c, const T* p, const BlockOffsets& o,
                  int64_t samples, T* x, const BlockBuffers<T>& buf,
                  Scratch<T>& sc) {
  const int64_t n = samples * c.seq_len;
  const int64_t d = c.dim;
  const int64_t f = c.mlp_dim();
  const int64_t att = c.heads * c.seq_len * c.seq_len;
  const int64_t sd = c.seq_len * d;

  for (int64_t r = 0; r < n; ++r) {
    LayerNormRow(x + r * d, p + o.ln1_gain, p + o.ln1_bias, d,
                 buf.xhat1 + r * d, buf.rstd1 + r, sc.ln);
    LinearRow(sc.ln, p + o.wq, p + o.bq, d, d, buf.q + r * d);
    LinearRow(sc.ln, p + o.wk, p + o.bk, d, d, buf.k + r * d);
    LinearRow(sc.ln, p + o.wv, p + o.bv, d, d, buf.v + r * d);
  }
  for (int64_t b = 0; b < samples; ++b) {
    AttentionForward(c, buf.q + b * sd, buf.k + b * sd, buf.v + b * sd,
                     buf.scores + b * att, buf.probs + b * att,
                     buf.ctx + b * sd);
  }
  for (int64_t r = 0; r < n; ++r) {
    LinearRow(buf.ctx + r * d, p + o.wo, p + o.bo, d, d, sc.d1);
    T* xr = x + r * d;
    for (int64_t i = 0; i < d; ++i) xr[i] += sc.d1[i];
  }
  for (int64_t r = 0; r < n; ++r) {
    T* xr = x + r * d;
    T* pre = buf.pre + r * f;
    LayerNormRow(xr, p + o.ln2_gain, p + o.ln2_bias, d, buf.xhat2 + r * d,
                 buf.rstd2 + r, sc.ln);
    LinearRow(sc.ln, p + o.w1, p + o.b1, d, f, pre);
    for (int64_t i = 0; i < f; ++i) sc.f1[i] = Gelu(pre[i]);
    LinearRow(sc.f1, p + o.w2, p + o.b2, f, d, sc.d1);
    for (int64_t i = 0; i < d; ++i) xr[i] += sc.d1[i];
  }
}

// dx holds dL/d(block output) on entry and dL/d(block input) on exit.
// Consumes (overwrites) ctx, q, k, v and scores in the block's buffers.
template <typename T>
void BlockBackward(const ModelConfig& c, const T* p, T* g,
                   const BlockOffsets& o, int64_t samples, T* dx,
                   const BlockBuffers<T>& buf, Scratch<T>& sc) {
  const int64_t n = samples * c.seq_len;
  const int64_t d = c.dim;
  const int64_t f = c.mlp_dim();
  const int64_t att = c.heads * c.seq_len * c.seq_len;
  const int64_t sd = c.seq_len * d;

  for (int64_t r = 0; r < n; ++r) {
    const T* pre = buf.pre + r * f;
    T* dxr = dx + r * d;
    for (int64_t i = 0; i < f; ++i) sc.f1[i] = Gelu(pre[i]);
    LinearRowParamGrad(sc.f1, dxr, f, d, g + o.w2, g + o.b2);
    LinearRowInputGrad(dxr, p + o.w2, f, d, sc.f2);
    for (int64_t i = 0; i < f; ++i) sc.f2[i] *= GeluGrad(pre[i]);
    LayerNormOutput(buf.xhat2 + r * d, p + o.ln2_gain, p + o.ln2_bias, d,
                    sc.ln);
    LinearRowParamGrad(sc.ln, sc.f2, d, f, g + o.w1, g + o.b1);
    LinearRowInputGrad(sc.f2, p + o.w1, d, f, sc.d1);
    LayerNormRowGrad(sc.d1, p + o.ln2_gain, buf.xhat2 + r * d, buf.rstd2[r],
                     d, g + o.ln2_gain, g + o.ln2_bias, dxr);
  }
  for (int64_t r = 0; r < n; ++r) {
    T* ctx = buf.ctx + r * d;
    const T* dxr = dx + r * d;
    LinearRowParamGrad(ctx, dxr, d, d, g + o.wo, g + o.bo);
    LinearRowInputGrad(dxr, p + o.wo, d, d, sc.d1);
    std::copy(sc.d1, sc.d1 + d, ctx);
  }
  for (int64_t b = 0; b < samples; ++b) {
    AttentionBackward(c, buf.q + b * sd, buf.k + b * sd, buf.v + b * sd,
                      buf.scores + b * att, buf.probs + b * att,
                      buf.ctx + b * sd, sc.head);
  }
  for (int64_t r = 0; r < n; ++r) {
    const T* dq = buf.q + r * d;
    const T* dk = buf.k + r * d;
    const T* dv = buf.v + r * d;
    LayerNormOutput(buf.xhat1 + r * d, p + o.ln1_gain, p + o.ln1_bias, d,
                    sc.ln);
    LinearRowParamGrad(sc.ln, dq, d, d, g + o.wq, g + o.bq);
    LinearRowParamGrad(sc.ln, dk, d, d, g + o.wk, g + o.bk);
    LinearRowParamGrad(sc.ln, dv, d, d, g + o.wv, g + o.bv);
    LinearRowInputGrad(dq, p + o.wq, d, d, sc.d1);
    LinearRowInputGrad(dk, p + o.wk, d, d, sc.d2);
    for (int64_t i = 0; i < d; ++i) sc.d1[i] += sc.d2[i];
    LinearRowInputGrad(dv, p + o.wv, d, d, sc.d2);
    for (int64_t i = 0; i < d; ++i) sc.d1[i] += sc.d2[i];
    LayerNormRowGrad(sc.d1, p + o.ln1_gain, buf.xhat1 + r * d, buf.rstd1[r],
                     d, g + o.ln1_gain, g + o.ln1_bias, dx + r * d);
  }
}

template <typename T>
void Embed(const ModelLayout& layout, const T* p, const int32_t* tokens,
           T* x) {
  const ModelConfig& c = layout.config();
  const int64_t d = c.dim;
  for (int64_t t = 0; t < c.seq_len; ++t) {
    const T* tok = p + layout.tok_emb() + static_cast<int64_t>(tokens[t]) * d;
    const T* pos = p + layout.pos_emb() + t * d;
    T* xt = x + t * d;
    for (int64_t i = 0; i < d; ++i) xt[i] = tok[i] + pos[i];
  }
}

// Final layer norm of every position, then the mean over positions. On exit
// x holds the normalized rows (xhat) and rstd one value per position.
template <typename T>
void FinalNormPool(const ModelLayout& layout, const T* p, T* x, T* rstd,
                   T* row, T* pooled) {
  const ModelConfig& c = layout.config();
  const int64_t d = c.dim;
  for (int64_t i = 0; i < d; ++i) pooled[i] = 0;
  for (int64_t t = 0; t < c.seq_len; ++t) {
    T* xt = x + t * d;
    LayerNormRow(xt, p + layout.final_gain(), p + layout.final_bias(), d, xt,
                 rstd + t, row);
    for (int64_t i = 0; i < d; ++i) pooled[i] += row[i];
  }
  const T inv_s = T(1) / static_cast<T>(c.seq_len);
  for (int64_t i = 0; i < d; ++i) pooled[i] *= inv_s;
}

// Linear head and the sample's cross-entropy; logits are kept for backward.
template <typename T>
double HeadLoss(const ModelLayout& layout, const T* p, const T* pooled,
                int32_t label, T* logits) {
  const ModelConfig& c = layout.config();
  LinearRow(pooled, p + layout.head_w(), p + layout.head_b(), c.dim,
            c.classes, logits);
  double m = logits[0];
  for (int64_t j = 1; j < c.classes; ++j) {
    m = std::max(m, static_cast<double>(logits[j]));
  }
  double sum = 0.0;
  for (int64_t j = 0; j < c.classes; ++j) sum += std::exp(logits[j] - m);
  return m + std::log(sum) - static_cast<double>(logits[label]);
}

template <typename T>
void RequireFinite(const T* data, size_t n, const std::string& layer) {
  for (size_t i = 0; i < n; ++i) {
    if (!std::isfinite(data[i])) {
      throw NumericError(layer, "non-finite activation");
    }
  }
}

void RequireParams(const ModelLayout& layout, size_t n) {
  if (n != layout.param_count()) {
    throw PreconditionError("parameter count " + std::to_string(n) +
                            " does not match layout (" +
                            std::to_string(layout.param_count()) + ")");
  }
}

std::string BlockName(int64_t l) { return "block" + std::to_string(l); }

}  // namespace

uint64_t BlockActivationElements(const ModelConfig& c, int64_t batch) {
  const uint64_t n = batch * c.seq_len;
  return 10 * n * c.dim + 2 * batch * c.heads * c.seq_len * c.seq_len + 2 * n;
}

template <typename T>
double ForwardLoss(const ModelLayout& layout, std::span<const T> params,
                   const Batch& batch, AllocationLedger& ledger) {
  const ModelConfig& c = layout.config();
  ValidateBatch(c, batch);
  RequireParams(layout, params.size());
  const T* p = params.data();
  const int64_t sd = c.seq_len * c.dim;

  TrackedBuffer<T> arena(ledger, Category::kActivation,
                         BlockActivationElements(c, 1));
  TrackedBuffer<T> stream(ledger, Category::kActivation, sd);
  TrackedBuffer<T> head(ledger, Category::kActivation,
                        c.dim + c.classes + c.seq_len);
  Scratch<T> sc(ledger, c);
  const BlockBuffers<T> buf = Carve(arena.data(), c, 1);

  double total = 0.0;
  for (int64_t b = 0; b < batch.batch_size; ++b) {
    Embed(layout, p, batch.tokens.data() + b * c.seq_len, stream.data());
    RequireFinite(stream.data(), sd, "embedding");
    for (int64_t l = 0; l < c.layers; ++l) {
      BlockForward(c, p, layout.block(l), 1, stream.data(), buf, sc);
      RequireFinite(stream.data(), sd, BlockName(l));
    }
    T* pooled = head.data();
    T* logits = pooled + c.dim;
    T* rstd = logits + c.classes;
    FinalNormPool(layout, p, stream.data(), rstd, sc.d1, pooled);
    total += HeadLoss(layout, p, pooled, batch.labels[b], logits);
    RequireFinite(logits, c.classes, "head");
  }
  const double loss = total / static_cast<double>(batch.batch_size);
  if (!std::isfinite(loss)) throw NumericError("head", "non-finite loss");
  return loss;
}

template <typename T>
LossAndGradient<T> Backward(const ModelLayout& layout,
                            std::span<const T> params, const Batch& batch,
                            AllocationLedger& ledger) {
  const ModelConfig& c = layout.config();
  ValidateBatch(c, batch);
  RequireParams(layout, params.size());
  const T* p = params.data();
  const int64_t bsz = batch.batch_size;
  const int64_t s = c.seq_len;
  const int64_t d = c.dim;
  const int64_t sd = s * d;
  const size_t nd = static_cast<size_t>(bsz * sd);

  TrackedBuffer<T> x(ledger, Category::kActivation, nd);
  Scratch<T> sc(ledger, c);
  for (int64_t b = 0; b < bsz; ++b) {
    Embed(layout, p, batch.tokens.data() + b * s, x.data() + b * sd);
  }
  RequireFinite(x.data(), nd, "embedding");

  std::vector<TrackedBuffer<T>> caches;
  caches.reserve(c.layers);
  for (int64_t l = 0; l < c.layers; ++l) {
    caches.emplace_back(ledger, Category::kActivation,
                        BlockActivationElements(c, bsz));
    BlockForward(c, p, layout.block(l), bsz, x.data(),
                 Carve(caches.back().data(), c, bsz), sc);
    RequireFinite(x.data(), nd, BlockName(l));
  }

  // x becomes the final layer norm's xhat here and, during backward, the
  // gradient of the residual stream.
  TrackedBuffer<T> head(ledger, Category::kActivation,
                        bsz * (d + c.classes + s));
  T* pooled = head.data();
  T* logits = pooled + bsz * d;
  T* rstd = logits + bsz * c.classes;
  double total = 0.0;
  for (int64_t b = 0; b < bsz; ++b) {
    FinalNormPool(layout, p, x.data() + b * sd, rstd + b * s, sc.d1,
                  pooled + b * d);
    total += HeadLoss(layout, p, pooled + b * d, batch.labels[b],
                      logits + b * c.classes);
  }
  RequireFinite(logits, bsz * c.classes, "head");
  const double loss = total / static_cast<double>(bsz);
  if (!std::isfinite(loss)) throw NumericError("head", "non-finite loss");

  LossAndGradient<T> out{loss, TrackedBuffer<T>(ledger, Category::kGrads,
                                                layout.param_count())};
  T* g = out.grad.data();
  TrackedBuffer<T>& dx = x;

  const T inv_s = T(1) / static_cast<T>(s);
  for (int64_t b = 0; b < bsz; ++b) {
    const T* lg = logits + b * c.classes;
    double m = lg[0];
    for (int64_t j = 1; j < c.classes; ++j) {
      m = std::max(m, static_cast<double>(lg[j]));
    }
    double sum = 0.0;
    for (int64_t j = 0; j < c.classes; ++j) sum += std::exp(lg[j] - m);
    for (int64_t j = 0; j < c.classes; ++j) {
      const double prob = std::exp(lg[j] - m) / sum;
      const double target = j == batch.labels[b] ? 1.0 : 0.0;
      sc.cls[j] = static_cast<T>((prob - target) / static_cast<double>(bsz));
    }
    LinearRowParamGrad(pooled + b * d, sc.cls, d, c.classes,
                       g + layout.head_w(), g + layout.head_b());
    LinearRowInputGrad(sc.cls, p + layout.head_w(), d, c.classes, sc.d1);
    for (int64_t i = 0; i < d; ++i) sc.d1[i] *= inv_s;
    T* xb = x.data() + b * sd;
    for (int64_t t = 0; t < s; ++t) {
      T* row = xb + t * d;
      std::fill(sc.d2, sc.d2 + d, T(0));
      LayerNormRowGrad(sc.d1, p + layout.final_gain(), row, rstd[b * s + t],
                       d, g + layout.final_gain(), g + layout.final_bias(),
                       sc.d2);
      std::copy(sc.d2, sc.d2 + d, row);
    }
  }
  head.Reset();

  for (int64_t l = c.layers - 1; l >= 0; --l) {
    BlockBackward(c, p, g, layout.block(l), bsz, dx.data(),
                  Carve(caches[l].data(), c, bsz), sc);
    caches[l].Reset();
  }

  for (int64_t b = 0; b < bsz; ++b) {
    const int32_t* tokens = batch.tokens.data() + b * s;
    const T* dxb = dx.data() + b * sd;
    for (int64_t t = 0; t < s; ++t) {
      T* gt = g + layout.tok_emb() + static_cast<int64_t>(tokens[t]) * d;
      T* gp = g + layout.pos_emb() + t * d;
      for (int64_t i = 0; i < d; ++i) {
        gt[i] += dxb[t * d + i];
        gp[i] += dxb[t * d + i];
      }
    }
  }
  return out;
}

template double ForwardLoss<float>(const ModelLayout&, std::span<const float>,
                                   const Batch&, AllocationLedger&);
template double ForwardLoss<double>(const ModelLayout&,
                                    std::span<const double>, const Batch&,
                                    AllocationLedger&);
template LossAndGradient<float> Backward<float>(const ModelLayout&,
                                                std::span<const float>,
                                                const Batch&,
                                                AllocationLedger&);
template LossAndGradient<double> Backward<double>(const ModelLayout&,
                                                  std::span<const double>,
                                                  const Batch&,
                                                  AllocationLedger&);

}  // namespace zolab
