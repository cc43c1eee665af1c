#include "nn_ops.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"

namespace dcacrn {

Tensor conv_valid(const Tensor& input, const Tensor& kernels, std::size_t stride_h,
                  std::size_t stride_w, const Tensor& bias) {
    if (input.rank() != 3 || kernels.rank() != 4) {
        throw ConfigError("conv_valid expects input [Cin x H x W] and kernels [Cout x Cin x kh x kw], got " +
                          shape_string(input.shape()) + " and " + shape_string(kernels.shape()));
    }
    if (stride_h < 1 || stride_w < 1) throw ConfigError("conv_valid strides must be >= 1");
    const std::size_t cin = input.extent(0), h = input.extent(1), w = input.extent(2);
    const std::size_t cout = kernels.extent(0), kh = kernels.extent(2), kw = kernels.extent(3);
    if (kernels.extent(1) != cin) {
        throw ConfigError("conv_valid kernel channel count " + std::to_string(kernels.extent(1)) +
                          " does not match input channels " + std::to_string(cin));
    }
    if (kh > h || kw > w) {
        throw ConfigError("conv_valid kernel " + std::to_string(kh) + "x" + std::to_string(kw) +
                          " larger than input " + std::to_string(h) + "x" + std::to_string(w));
    }
    if (bias.rank() != 1 || bias.extent(0) != cout) {
        throw ConfigError("conv_valid bias must be [Cout]");
    }
    const std::size_t oh = (h - kh) / stride_h + 1;
    const std::size_t ow = (w - kw) / stride_w + 1;

    std::vector<double> v(cout * oh * ow);
    const double* in = input.data();
    const double* kn = kernels.data();
    for (std::size_t co = 0; co < cout; ++co) {
        const double b = bias.at(co);
        for (std::size_t y = 0; y < oh; ++y) {
            for (std::size_t x = 0; x < ow; ++x) {
                double acc = b;
                const std::size_t y0 = y * stride_h, x0 = x * stride_w;
                for (std::size_t ci = 0; ci < cin; ++ci) {
                    for (std::size_t ky = 0; ky < kh; ++ky) {
                        const double* irow = in + (ci * h + y0 + ky) * w + x0;
                        const double* krow = kn + ((co * cin + ci) * kh + ky) * kw;
                        for (std::size_t kx = 0; kx < kw; ++kx) acc += krow[kx] * irow[kx];
                    }
                }
                v[(co * oh + y) * ow + x] = acc;
            }
        }
    }
    bool rg = input.requires_grad() || kernels.requires_grad() || bias.requires_grad();
    Tensor out = Tensor::from_data({cout, oh, ow}, std::move(v), rg);
    if (Tape::active() && rg) {
        Tensor in_t = input, k_t = kernels, b_t = bias;
        Tape::active()->record("conv_valid", [in_t, k_t, b_t, out, cin, h, w, cout, kh, kw, oh, ow,
                                              stride_h, stride_w]() mutable {
            const double* go = out.grad();
            const double* inv = in_t.data();
            const double* knv = k_t.data();
            double* gin = in_t.requires_grad() ? in_t.grad() : nullptr;
            double* gkn = k_t.requires_grad() ? k_t.grad() : nullptr;
            double* gb = b_t.requires_grad() ? b_t.grad() : nullptr;
            for (std::size_t co = 0; co < cout; ++co) {
                for (std::size_t y = 0; y < oh; ++y) {
                    for (std::size_t x = 0; x < ow; ++x) {
                        const double g = go[(co * oh + y) * ow + x];
                        if (g == 0.0) continue;
                        if (gb) gb[co] += g;
                        const std::size_t y0 = y * stride_h, x0 = x * stride_w;
                        for (std::size_t ci = 0; ci < cin; ++ci) {
                            for (std::size_t ky = 0; ky < kh; ++ky) {
                                const std::size_t ibase = (ci * h + y0 + ky) * w + x0;
                                const std::size_t kbase = ((co * cin + ci) * kh + ky) * kw;
                                for (std::size_t kx = 0; kx < kw; ++kx) {
                                    if (gin) gin[ibase + kx] += g * knv[kbase + kx];
                                    if (gkn) gkn[kbase + kx] += g * inv[ibase + kx];
                                }
                            }
                        }
                    }
                }
            }
        });
    }
    return out;
}

Tensor softmax_rows(const Tensor& x) {
    if (x.rank() != 2) throw ConfigError("softmax_rows requires a 2-D tensor, got " + shape_string(x.shape()));
    const std::size_t p = x.extent(0), q = x.extent(1);
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!std::isfinite(x.at(i))) throw NumericError("softmax_rows: non-finite input");
    }
    std::vector<double> v(p * q);
    for (std::size_t i = 0; i < p; ++i) {
        const double* row = x.data() + i * q;
        double m = row[0];
        for (std::size_t j = 1; j < q; ++j) m = std::max(m, row[j]);
        double denom = 0.0;
        for (std::size_t j = 0; j < q; ++j) {
            const double e = std::exp(row[j] - m);
            v[i * q + j] = e;
            denom += e;
        }
        for (std::size_t j = 0; j < q; ++j) v[i * q + j] /= denom;
    }
    Tensor out = Tensor::from_data({p, q}, std::move(v), x.requires_grad());
    if (recording(x)) {
        Tensor xin = x;
        Tape::active()->record("softmax_rows", [xin, out, p, q]() mutable {
            double* gx = xin.grad();
            const double* go = out.grad();
            const double* y = out.data();
            for (std::size_t i = 0; i < p; ++i) {
                double dot = 0.0;
                for (std::size_t j = 0; j < q; ++j) dot += go[i * q + j] * y[i * q + j];
                for (std::size_t j = 0; j < q; ++j)
                    gx[i * q + j] += y[i * q + j] * (go[i * q + j] - dot);
            }
        });
    }
    return out;
}

namespace {

void check_affine_shape(const char* op, const Tensor& x, const Tensor& t) {
    if (t.size() != 1 && t.shape() != x.shape()) {
        throw ConfigError(std::string(op) + ": affine parameter must be scalar or match " +
                          shape_string(x.shape()) + ", got " + shape_string(t.shape()));
    }
}

} // namespace

Tensor layer_norm(const Tensor& x, const Tensor& gamma, const Tensor& beta, double eps) {
    check_affine_shape("layer_norm", x, gamma);
    check_affine_shape("layer_norm", x, beta);
    const std::size_t n = x.size();
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += x.at(i);
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = x.at(i) - mean;
        var += d * d;
    }
    var /= static_cast<double>(n);
    const double inv = 1.0 / std::sqrt(var + eps);

    const bool gamma_scalar = gamma.size() == 1;
    const bool beta_scalar = beta.size() == 1;
    std::vector<double> xhat(n), v(n);
    for (std::size_t i = 0; i < n; ++i) {
        xhat[i] = (x.at(i) - mean) * inv;
        const double g = gamma_scalar ? gamma.at(0) : gamma.at(i);
        const double b = beta_scalar ? beta.at(0) : beta.at(i);
        v[i] = g * xhat[i] + b;
    }
    bool rg = x.requires_grad() || gamma.requires_grad() || beta.requires_grad();
    Tensor out = Tensor::from_data(x.shape(), std::move(v), rg);
    if (Tape::active() && rg) {
        Tensor xin = x, gin = gamma, bin = beta;
        auto saved_xhat = std::make_shared<std::vector<double>>(std::move(xhat));
        Tape::active()->record("layer_norm", [xin, gin, bin, out, saved_xhat, inv, n,
                                              gamma_scalar, beta_scalar]() mutable {
            const double* go = out.grad();
            const std::vector<double>& xh = *saved_xhat;
            if (xin.requires_grad()) {
                // h = gamma .* go; dx = inv * (h - mean(h) - xhat * mean(h .* xhat))
                double hm = 0.0, hxm = 0.0;
                std::vector<double> h(n);
                for (std::size_t i = 0; i < n; ++i) {
                    const double g = gamma_scalar ? gin.at(0) : gin.at(i);
                    h[i] = g * go[i];
                    hm += h[i];
                    hxm += h[i] * xh[i];
                }
                hm /= static_cast<double>(n);
                hxm /= static_cast<double>(n);
                double* gx = xin.grad();
                for (std::size_t i = 0; i < n; ++i) gx[i] += inv * (h[i] - hm - xh[i] * hxm);
            }
            if (gin.requires_grad()) {
                double* gg = gin.grad();
                if (gamma_scalar) {
                    double acc = 0.0;
                    for (std::size_t i = 0; i < n; ++i) acc += go[i] * xh[i];
                    gg[0] += acc;
                } else {
                    for (std::size_t i = 0; i < n; ++i) gg[i] += go[i] * xh[i];
                }
            }
            if (bin.requires_grad()) {
                double* gb = bin.grad();
                if (beta_scalar) {
                    double acc = 0.0;
                    for (std::size_t i = 0; i < n; ++i) acc += go[i];
                    gb[0] += acc;
                } else {
                    for (std::size_t i = 0; i < n; ++i) gb[i] += go[i];
                }
            }
        });
    }
    return out;
}

BatchNormState BatchNormState::init(std::size_t channels) {
    BatchNormState s;
    s.running_mean = Tensor::zeros({channels});
    s.running_var = Tensor::full({channels}, 1.0);
    return s;
}

Tensor batch_norm(const Tensor& x, const Tensor& gamma, const Tensor& beta, BatchNormState& state,
                  bool training) {
    if (x.rank() < 2) throw ConfigError("batch_norm expects [B x C x ...], got " + shape_string(x.shape()));
    const std::size_t batch = x.extent(0), channels = x.extent(1);
    if (gamma.rank() != 1 || gamma.extent(0) != channels || beta.rank() != 1 || beta.extent(0) != channels) {
        throw ConfigError("batch_norm affine parameters must be [C]");
    }
    if (state.running_mean.extent(0) != channels) throw ConfigError("batch_norm state channel mismatch");
    const std::size_t block = x.size() / (batch * channels); // trailing spatial extent
    const std::size_t m = batch * block;                     // samples per channel
    const double eps = state.eps;

    std::vector<double> mean(channels), var(channels);
    if (training) {
        for (std::size_t c = 0; c < channels; ++c) {
            double acc = 0.0;
            for (std::size_t b = 0; b < batch; ++b) {
                const double* base = x.data() + (b * channels + c) * block;
                for (std::size_t i = 0; i < block; ++i) acc += base[i];
            }
            mean[c] = acc / static_cast<double>(m);
            double vacc = 0.0;
            for (std::size_t b = 0; b < batch; ++b) {
                const double* base = x.data() + (b * channels + c) * block;
                for (std::size_t i = 0; i < block; ++i) {
                    const double d = base[i] - mean[c];
                    vacc += d * d;
                }
            }
            var[c] = vacc / static_cast<double>(m);
        }
        // Fold batch statistics into the running buffers (population form).
        for (std::size_t c = 0; c < channels; ++c) {
            state.running_mean.at(c) = (1.0 - state.momentum) * state.running_mean.at(c) + state.momentum * mean[c];
            state.running_var.at(c) = (1.0 - state.momentum) * state.running_var.at(c) + state.momentum * var[c];
        }
    } else {
        for (std::size_t c = 0; c < channels; ++c) {
            mean[c] = state.running_mean.at(c);
            var[c] = state.running_var.at(c);
        }
    }

    std::vector<double> inv(channels);
    for (std::size_t c = 0; c < channels; ++c) inv[c] = 1.0 / std::sqrt(var[c] + eps);

    std::vector<double> xhat(x.size()), v(x.size());
    for (std::size_t b = 0; b < batch; ++b) {
        for (std::size_t c = 0; c < channels; ++c) {
            const std::size_t base = (b * channels + c) * block;
            for (std::size_t i = 0; i < block; ++i) {
                xhat[base + i] = (x.at(base + i) - mean[c]) * inv[c];
                v[base + i] = gamma.at(c) * xhat[base + i] + beta.at(c);
            }
        }
    }
    bool rg = x.requires_grad() || gamma.requires_grad() || beta.requires_grad();
    Tensor out = Tensor::from_data(x.shape(), std::move(v), rg);
    if (Tape::active() && rg) {
        Tensor xin = x, gin = gamma, bin = beta;
        auto saved_xhat = std::make_shared<std::vector<double>>(std::move(xhat));
        auto saved_inv = std::make_shared<std::vector<double>>(std::move(inv));
        Tape::active()->record("batch_norm", [xin, gin, bin, out, saved_xhat, saved_inv, batch,
                                              channels, block, m, training]() mutable {
            const double* go = out.grad();
            const std::vector<double>& xh = *saved_xhat;
            const std::vector<double>& iv = *saved_inv;
            if (xin.requires_grad()) {
                double* gx = xin.grad();
                for (std::size_t c = 0; c < channels; ++c) {
                    const double g = gin.at(c);
                    if (training) {
                        double hm = 0.0, hxm = 0.0;
                        for (std::size_t b = 0; b < batch; ++b) {
                            const std::size_t base = (b * channels + c) * block;
                            for (std::size_t i = 0; i < block; ++i) {
                                const double h = g * go[base + i];
                                hm += h;
                                hxm += h * xh[base + i];
                            }
                        }
                        hm /= static_cast<double>(m);
                        hxm /= static_cast<double>(m);
                        for (std::size_t b = 0; b < batch; ++b) {
                            const std::size_t base = (b * channels + c) * block;
                            for (std::size_t i = 0; i < block; ++i)
                                gx[base + i] += iv[c] * (g * go[base + i] - hm - xh[base + i] * hxm);
                        }
                    } else {
                        // Eval mode is a fixed per-channel affine map.
                        for (std::size_t b = 0; b < batch; ++b) {
                            const std::size_t base = (b * channels + c) * block;
                            for (std::size_t i = 0; i < block; ++i) gx[base + i] += iv[c] * g * go[base + i];
                        }
                    }
                }
            }
            if (gin.requires_grad() || bin.requires_grad()) {
                for (std::size_t c = 0; c < channels; ++c) {
                    double dg = 0.0, db = 0.0;
                    for (std::size_t b = 0; b < batch; ++b) {
                        const std::size_t base = (b * channels + c) * block;
                        for (std::size_t i = 0; i < block; ++i) {
                            dg += go[base + i] * xh[base + i];
                            db += go[base + i];
                        }
                    }
                    if (gin.requires_grad()) gin.grad()[c] += dg;
                    if (bin.requires_grad()) bin.grad()[c] += db;
                }
            }
        });
    }
    return out;
}

Tensor relu(const Tensor& x) {
    std::vector<double> v(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) v[i] = x.at(i) > 0.0 ? x.at(i) : 0.0;
    Tensor out = Tensor::from_data(x.shape(), std::move(v), x.requires_grad());
    if (recording(x)) {
        Tensor xin = x;
        Tape::active()->record("relu", [xin, out]() mutable {
            double* gx = xin.grad();
            const double* go = out.grad();
            const double* xv = xin.data();
            for (std::size_t i = 0; i < xin.size(); ++i)
                if (xv[i] > 0.0) gx[i] += go[i];
        });
    }
    return out;
}

Tensor sigmoid(const Tensor& x) {
    std::vector<double> v(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) v[i] = 1.0 / (1.0 + std::exp(-x.at(i)));
    Tensor out = Tensor::from_data(x.shape(), std::move(v), x.requires_grad());
    if (recording(x)) {
        Tensor xin = x;
        Tape::active()->record("sigmoid", [xin, out]() mutable {
            double* gx = xin.grad();
            const double* go = out.grad();
            const double* y = out.data();
            for (std::size_t i = 0; i < xin.size(); ++i) gx[i] += go[i] * y[i] * (1.0 - y[i]);
        });
    }
    return out;
}

Tensor tanh_op(const Tensor& x) {
    std::vector<double> v(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) v[i] = std::tanh(x.at(i));
    Tensor out = Tensor::from_data(x.shape(), std::move(v), x.requires_grad());
    if (recording(x)) {
        Tensor xin = x;
        Tape::active()->record("tanh", [xin, out]() mutable {
            double* gx = xin.grad();
            const double* go = out.grad();
            const double* y = out.data();
            for (std::size_t i = 0; i < xin.size(); ++i) gx[i] += go[i] * (1.0 - y[i] * y[i]);
        });
    }
    return out;
}

Tensor dropout(const Tensor& x, double p, bool training, std::mt19937_64& rng) {
    if (p < 0.0 || p >= 1.0) {
        throw ConfigError("dropout probability must be in [0, 1), got " + std::to_string(p));
    }
    if (!training || p == 0.0) return x;
    const double keep_scale = 1.0 / (1.0 - p);
    auto mask = std::make_shared<std::vector<double>>(x.size());
    std::vector<double> v(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        // 53-bit uniform in [0, 1); independent of library distribution details.
        const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        const double mi = (u < p) ? 0.0 : keep_scale;
        (*mask)[i] = mi;
        v[i] = x.at(i) * mi;
    }
    Tensor out = Tensor::from_data(x.shape(), std::move(v), x.requires_grad());
    if (recording(x)) {
        Tensor xin = x;
        Tape::active()->record("dropout", [xin, out, mask]() mutable {
            double* gx = xin.grad();
            const double* go = out.grad();
            for (std::size_t i = 0; i < xin.size(); ++i) gx[i] += go[i] * (*mask)[i];
        });
    }
    return out;
}

std::pair<Tensor, Tensor> lstm_step(const Tensor& x_t, const Tensor& h_prev, const Tensor& c_prev,
                                    const LstmWeights& weights) {
    const std::size_t hidden = h_prev.extent(0);
    if (weights.w_input.extent(0) != 4 * hidden || weights.w_hidden.extent(0) != 4 * hidden ||
        weights.bias.extent(0) != 4 * hidden) {
        throw ConfigError("lstm_step weights must have 4*H gate rows");
    }
    Tensor z = add(add(matmul(weights.w_input, x_t), matmul(weights.w_hidden, h_prev)), weights.bias);
    Tensor gate_i = sigmoid(slice_rows(z, 0, hidden));
    Tensor gate_f = sigmoid(slice_rows(z, hidden, 2 * hidden));
    Tensor gate_g = tanh_op(slice_rows(z, 2 * hidden, 3 * hidden));
    Tensor gate_o = sigmoid(slice_rows(z, 3 * hidden, 4 * hidden));
    Tensor c_t = add(mul(gate_f, c_prev), mul(gate_i, gate_g));
    Tensor h_t = mul(gate_o, tanh_op(c_t));
    return {h_t, c_t};
}

std::vector<double> softmax_vector(std::span<const double> logits) {
    std::vector<double> out(logits.size());
    double m = logits[0];
    for (double v : logits) m = std::max(m, v);
    double denom = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        out[i] = std::exp(logits[i] - m);
        denom += out[i];
    }
    for (double& v : out) v /= denom;
    return out;
}

Tensor cross_entropy_mean(const Tensor& logits, const std::vector<std::size_t>& labels) {
    if (logits.rank() != 2) throw ConfigError("cross_entropy expects logits [B x C]");
    const std::size_t batch = logits.extent(0), classes = logits.extent(1);
    if (labels.size() != batch) throw ConfigError("cross_entropy label count does not match batch");
    for (std::size_t b = 0; b < batch; ++b) {
        if (labels[b] >= classes) {
            throw DataError("label " + std::to_string(labels[b]) + " out of range for " +
                            std::to_string(classes) + " classes");
        }
    }
    auto probs = std::make_shared<std::vector<double>>(batch * classes);
    double loss = 0.0;
    for (std::size_t b = 0; b < batch; ++b) {
        const double* row = logits.data() + b * classes;
        double m = row[0];
        for (std::size_t j = 1; j < classes; ++j) m = std::max(m, row[j]);
        double denom = 0.0;
        for (std::size_t j = 0; j < classes; ++j) denom += std::exp(row[j] - m);
        const double lse = m + std::log(denom);
        loss += lse - row[labels[b]];
        for (std::size_t j = 0; j < classes; ++j)
            (*probs)[b * classes + j] = std::exp(row[j] - lse);
    }
    loss /= static_cast<double>(batch);
    Tensor out = Tensor::from_data({1}, {loss}, logits.requires_grad());
    if (recording(logits)) {
        Tensor lin = logits;
        auto lbl = std::make_shared<std::vector<std::size_t>>(labels);
        Tape::active()->record("cross_entropy", [lin, out, probs, lbl, batch, classes]() mutable {
            const double g = out.grad()[0] / static_cast<double>(batch);
            double* gl = lin.grad();
            for (std::size_t b = 0; b < batch; ++b) {
                for (std::size_t j = 0; j < classes; ++j) {
                    const double indicator = (j == (*lbl)[b]) ? 1.0 : 0.0;
                    gl[b * classes + j] += g * ((*probs)[b * classes + j] - indicator);
                }
            }
        });
    }
    return out;
}

Tensor cross_entropy_with_l2(const Tensor& logits, const std::vector<std::size_t>& labels,
                             double l2_lambda, const Tensor& last_fc_weights) {
    Tensor ce = cross_entropy_mean(logits, labels);
    if (l2_lambda == 0.0) return ce;
    return add(ce, scale(sum_squares(last_fc_weights), l2_lambda));
}

} // namespace dcacrn
