#include "tensor.hpp"

#include <cmath>
#include <sstream>

#include "error.hpp"

namespace dcacrn {

namespace {
thread_local Tape* g_active_tape = nullptr;
} // namespace

std::size_t shape_product(const std::vector<std::size_t>& shape) {
    std::size_t n = 1;
    for (std::size_t e : shape) n *= e;
    return n;
}

std::string shape_string(const std::vector<std::size_t>& shape) {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) os << "x";
        os << shape[i];
    }
    os << "]";
    return os.str();
}

Tensor Tensor::zeros(std::vector<std::size_t> shape, bool requires_grad) {
    return full(std::move(shape), 0.0, requires_grad);
}

Tensor Tensor::full(std::vector<std::size_t> shape, double v, bool requires_grad) {
    for (std::size_t e : shape) {
        if (e == 0) throw ConfigError("tensor extent must be positive, got shape " + shape_string(shape));
    }
    auto node = std::make_shared<detail::TensorNode>();
    node->shape = std::move(shape);
    node->value.assign(shape_product(node->shape), v);
    node->requires_grad = requires_grad;
    if (requires_grad) node->grad.assign(node->value.size(), 0.0);
    return Tensor(std::move(node));
}

Tensor Tensor::from_data(std::vector<std::size_t> shape, std::vector<double> data, bool requires_grad) {
    if (shape_product(shape) != data.size()) {
        throw ConfigError("tensor data length " + std::to_string(data.size()) +
                          " does not match shape " + shape_string(shape));
    }
    auto node = std::make_shared<detail::TensorNode>();
    node->shape = std::move(shape);
    node->value = std::move(data);
    node->requires_grad = requires_grad;
    if (requires_grad) node->grad.assign(node->value.size(), 0.0);
    return Tensor(std::move(node));
}

Tensor Tensor::scalar(double v, bool requires_grad) {
    return from_data({1}, {v}, requires_grad);
}

void Tensor::set_requires_grad(bool on) {
    node_->requires_grad = on;
    if (on) {
        node_->grad.assign(node_->value.size(), 0.0);
    } else {
        node_->grad.clear();
    }
}

void Tensor::zero_grad() {
    if (requires_grad()) node_->grad.assign(node_->value.size(), 0.0);
}

double Tensor::item() const {
    if (size() != 1) throw ConfigError("item() requires a scalar tensor, got " + shape_string(shape()));
    return node_->value[0];
}

Tensor Tensor::clone() const {
    return from_data(node_->shape, node_->value, false);
}

Tape::Tape() {
    previous_ = g_active_tape;
    g_active_tape = this;
}

Tape::~Tape() {
    g_active_tape = previous_;
}

Tape* Tape::active() { return g_active_tape; }

void Tape::record(const char* op_id, std::function<void()> backward) {
    nodes_.push_back({op_id, std::move(backward)});
}

void Tape::backward(const Tensor& loss) {
    if (loss.size() != 1) {
        throw ConfigError("backward() requires a scalar loss, got " + shape_string(loss.shape()));
    }
    if (!loss.requires_grad()) {
        throw ConfigError("backward() on a tensor that does not require grad");
    }
    loss.node()->grad[0] += 1.0;
    for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) {
        it->backward();
    }
    nodes_.clear();
}

bool recording(const Tensor& a) {
    return g_active_tape != nullptr && a.requires_grad();
}

bool recording(const Tensor& a, const Tensor& b) {
    return g_active_tape != nullptr && (a.requires_grad() || b.requires_grad());
}

namespace {

// Output tensors inherit requires_grad whenever any input requires it so
// intermediate grads exist for the backward sweep.
Tensor make_output(std::vector<std::size_t> shape, std::vector<double> value, bool requires_grad) {
    return Tensor::from_data(std::move(shape), std::move(value), requires_grad);
}

void accumulate(Tensor& t, const std::vector<double>& delta) {
    double* g = t.grad();
    for (std::size_t i = 0; i < delta.size(); ++i) g[i] += delta[i];
}

} // namespace

Tensor reshape(const Tensor& x, std::vector<std::size_t> shape) {
    if (shape_product(shape) != x.size()) {
        throw ConfigError("reshape from " + shape_string(x.shape()) + " to " + shape_string(shape) +
                          " changes element count");
    }
    bool rg = x.requires_grad();
    Tensor out = make_output(std::move(shape), {x.data(), x.data() + x.size()}, rg);
    if (recording(x)) {
        Tensor xin = x;
        Tape::active()->record("reshape", [xin, out]() mutable {
            accumulate(xin, out.node()->grad);
        });
    }
    return out;
}

Tensor transpose(const Tensor& x) {
    if (x.rank() != 2) throw ConfigError("transpose requires a 2-D tensor, got " + shape_string(x.shape()));
    const std::size_t p = x.extent(0), q = x.extent(1);
    std::vector<double> v(p * q);
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < q; ++j)
            v[j * p + i] = x.at(i, j);
    Tensor out = make_output({q, p}, std::move(v), x.requires_grad());
    if (recording(x)) {
        Tensor xin = x;
        Tape::active()->record("transpose", [xin, out, p, q]() mutable {
            double* gx = xin.grad();
            const double* go = out.grad();
            for (std::size_t i = 0; i < p; ++i)
                for (std::size_t j = 0; j < q; ++j)
                    gx[i * q + j] += go[j * p + i];
        });
    }
    return out;
}

Tensor concat0(const std::vector<Tensor>& parts) {
    if (parts.empty()) throw ConfigError("concat0 requires at least one part");
    const auto& inner = parts[0].shape();
    bool rg = false;
    for (const auto& p : parts) {
        if (p.shape() != inner) {
            throw ConfigError("concat0 parts disagree on shape: " + shape_string(inner) + " vs " +
                              shape_string(p.shape()));
        }
        rg = rg || p.requires_grad();
    }
    const std::size_t block = parts[0].size();
    std::vector<std::size_t> shape;
    shape.reserve(inner.size() + 1);
    shape.push_back(parts.size());
    shape.insert(shape.end(), inner.begin(), inner.end());
    std::vector<double> v(parts.size() * block);
    for (std::size_t k = 0; k < parts.size(); ++k) {
        const double* src = parts[k].data();
        std::copy(src, src + block, v.begin() + static_cast<std::ptrdiff_t>(k * block));
    }
    Tensor out = make_output(std::move(shape), std::move(v), rg);
    if (Tape::active() && rg) {
        std::vector<Tensor> ins = parts;
        Tape::active()->record("concat0", [ins, out, block]() mutable {
            const double* go = out.grad();
            for (std::size_t k = 0; k < ins.size(); ++k) {
                if (!ins[k].requires_grad()) continue;
                double* g = ins[k].grad();
                const double* src = go + k * block;
                for (std::size_t i = 0; i < block; ++i) g[i] += src[i];
            }
        });
    }
    return out;
}

Tensor slice0(const Tensor& x, std::size_t index) {
    if (x.rank() < 2) throw ConfigError("slice0 requires rank >= 2, got " + shape_string(x.shape()));
    if (index >= x.extent(0)) {
        throw ConfigError("slice0 index " + std::to_string(index) + " out of range for " +
                          shape_string(x.shape()));
    }
    std::vector<std::size_t> shape(x.shape().begin() + 1, x.shape().end());
    const std::size_t block = shape_product(shape);
    const double* src = x.data() + index * block;
    Tensor out = make_output(std::move(shape), {src, src + block}, x.requires_grad());
    if (recording(x)) {
        Tensor xin = x;
        Tape::active()->record("slice0", [xin, out, index, block]() mutable {
            double* gx = xin.grad() + index * block;
            const double* go = out.grad();
            for (std::size_t i = 0; i < block; ++i) gx[i] += go[i];
        });
    }
    return out;
}

Tensor slice_col(const Tensor& x, std::size_t col) {
    if (x.rank() != 2) throw ConfigError("slice_col requires a 2-D tensor");
    const std::size_t p = x.extent(0), q = x.extent(1);
    if (col >= q) throw ConfigError("slice_col index out of range");
    std::vector<double> v(p);
    for (std::size_t i = 0; i < p; ++i) v[i] = x.at(i, col);
    Tensor out = make_output({p, 1}, std::move(v), x.requires_grad());
    if (recording(x)) {
        Tensor xin = x;
        Tape::active()->record("slice_col", [xin, out, col, p, q]() mutable {
            double* gx = xin.grad();
            const double* go = out.grad();
            for (std::size_t i = 0; i < p; ++i) gx[i * q + col] += go[i];
        });
    }
    return out;
}

Tensor slice_rows(const Tensor& x, std::size_t row0, std::size_t row1) {
    if (x.rank() != 2) throw ConfigError("slice_rows requires a 2-D tensor");
    const std::size_t p = x.extent(0), q = x.extent(1);
    if (row0 >= row1 || row1 > p) throw ConfigError("slice_rows range invalid");
    const double* src = x.data() + row0 * q;
    Tensor out = make_output({row1 - row0, q}, {src, src + (row1 - row0) * q}, x.requires_grad());
    if (recording(x)) {
        Tensor xin = x;
        Tape::active()->record("slice_rows", [xin, out, row0, q]() mutable {
            double* gx = xin.grad() + row0 * q;
            const double* go = out.grad();
            for (std::size_t i = 0; i < out.size(); ++i) gx[i] += go[i];
        });
    }
    return out;
}

namespace {

void check_same_shape(const char* op, const Tensor& a, const Tensor& b) {
    if (a.shape() != b.shape()) {
        throw ConfigError(std::string(op) + " shape mismatch: " + shape_string(a.shape()) + " vs " +
                          shape_string(b.shape()));
    }
}

} // namespace

Tensor add(const Tensor& a, const Tensor& b) {
    check_same_shape("add", a, b);
    std::vector<double> v(a.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = a.at(i) + b.at(i);
    Tensor out = make_output(a.shape(), std::move(v), a.requires_grad() || b.requires_grad());
    if (recording(a, b)) {
        Tensor ain = a, bin = b;
        Tape::active()->record("add", [ain, bin, out]() mutable {
            if (ain.requires_grad()) accumulate(ain, out.node()->grad);
            if (bin.requires_grad()) accumulate(bin, out.node()->grad);
        });
    }
    return out;
}

Tensor sub(const Tensor& a, const Tensor& b) {
    check_same_shape("sub", a, b);
    std::vector<double> v(a.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = a.at(i) - b.at(i);
    Tensor out = make_output(a.shape(), std::move(v), a.requires_grad() || b.requires_grad());
    if (recording(a, b)) {
        Tensor ain = a, bin = b;
        Tape::active()->record("sub", [ain, bin, out]() mutable {
            const double* go = out.grad();
            if (ain.requires_grad()) accumulate(ain, out.node()->grad);
            if (bin.requires_grad()) {
                double* gb = bin.grad();
                for (std::size_t i = 0; i < bin.size(); ++i) gb[i] -= go[i];
            }
        });
    }
    return out;
}

Tensor mul(const Tensor& a, const Tensor& b) {
    check_same_shape("mul", a, b);
    std::vector<double> v(a.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = a.at(i) * b.at(i);
    Tensor out = make_output(a.shape(), std::move(v), a.requires_grad() || b.requires_grad());
    if (recording(a, b)) {
        Tensor ain = a, bin = b;
        Tape::active()->record("mul", [ain, bin, out]() mutable {
            const double* go = out.grad();
            if (ain.requires_grad()) {
                double* ga = ain.grad();
                const double* bv = bin.data();
                for (std::size_t i = 0; i < ain.size(); ++i) ga[i] += go[i] * bv[i];
            }
            if (bin.requires_grad()) {
                double* gb = bin.grad();
                const double* av = ain.data();
                for (std::size_t i = 0; i < bin.size(); ++i) gb[i] += go[i] * av[i];
            }
        });
    }
    return out;
}

Tensor scale(const Tensor& x, double c) {
    std::vector<double> v(x.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = x.at(i) * c;
    Tensor out = make_output(x.shape(), std::move(v), x.requires_grad());
    if (recording(x)) {
        Tensor xin = x;
        Tape::active()->record("scale", [xin, out, c]() mutable {
            double* gx = xin.grad();
            const double* go = out.grad();
            for (std::size_t i = 0; i < xin.size(); ++i) gx[i] += go[i] * c;
        });
    }
    return out;
}

Tensor matmul(const Tensor& a, const Tensor& b) {
    if (a.rank() != 2 || b.rank() != 2) {
        throw ConfigError("matmul requires 2-D tensors, got " + shape_string(a.shape()) + " and " +
                          shape_string(b.shape()));
    }
    const std::size_t p = a.extent(0), q = a.extent(1), r = b.extent(1);
    if (b.extent(0) != q) {
        throw ConfigError("matmul inner extents differ: " + shape_string(a.shape()) + " * " +
                          shape_string(b.shape()));
    }
    std::vector<double> v(p * r, 0.0);
    const double* av = a.data();
    const double* bv = b.data();
    for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t k = 0; k < q; ++k) {
            const double aik = av[i * q + k];
            if (aik == 0.0) continue;
            const double* brow = bv + k * r;
            double* vrow = v.data() + i * r;
            for (std::size_t j = 0; j < r; ++j) vrow[j] += aik * brow[j];
        }
    }
    Tensor out = make_output({p, r}, std::move(v), a.requires_grad() || b.requires_grad());
    if (recording(a, b)) {
        Tensor ain = a, bin = b;
        Tape::active()->record("matmul", [ain, bin, out, p, q, r]() mutable {
            const double* go = out.grad();
            if (ain.requires_grad()) {
                // dA = G * B^T
                double* ga = ain.grad();
                const double* bv2 = bin.data();
                for (std::size_t i = 0; i < p; ++i)
                    for (std::size_t k = 0; k < q; ++k) {
                        double acc = 0.0;
                        const double* grow = go + i * r;
                        const double* brow = bv2 + k * r;
                        for (std::size_t j = 0; j < r; ++j) acc += grow[j] * brow[j];
                        ga[i * q + k] += acc;
                    }
            }
            if (bin.requires_grad()) {
                // dB = A^T * G
                double* gb = bin.grad();
                const double* av2 = ain.data();
                for (std::size_t k = 0; k < q; ++k)
                    for (std::size_t j = 0; j < r; ++j) {
                        double acc = 0.0;
                        for (std::size_t i = 0; i < p; ++i) acc += av2[i * q + k] * go[i * r + j];
                        gb[k * r + j] += acc;
                    }
            }
        });
    }
    return out;
}

Tensor channel_scale(const Tensor& x, const Tensor& w) {
    if (x.rank() < 1 || w.rank() != 1 || w.extent(0) != x.extent(0)) {
        throw ConfigError("channel_scale needs x [C x ...] and w [C], got " + shape_string(x.shape()) +
                          " and " + shape_string(w.shape()));
    }
    const std::size_t channels = x.extent(0);
    const std::size_t block = x.size() / channels;
    std::vector<double> v(x.size());
    for (std::size_t c = 0; c < channels; ++c) {
        const double wc = w.at(c);
        const double* src = x.data() + c * block;
        double* dst = v.data() + c * block;
        for (std::size_t i = 0; i < block; ++i) dst[i] = src[i] * wc;
    }
    Tensor out = make_output(x.shape(), std::move(v), x.requires_grad() || w.requires_grad());
    if (recording(x, w)) {
        Tensor xin = x, win = w;
        Tape::active()->record("channel_scale", [xin, win, out, channels, block]() mutable {
            const double* go = out.grad();
            if (xin.requires_grad()) {
                double* gx = xin.grad();
                for (std::size_t c = 0; c < channels; ++c) {
                    const double wc = win.at(c);
                    for (std::size_t i = 0; i < block; ++i) gx[c * block + i] += go[c * block + i] * wc;
                }
            }
            if (win.requires_grad()) {
                double* gw = win.grad();
                const double* xv = xin.data();
                for (std::size_t c = 0; c < channels; ++c) {
                    double acc = 0.0;
                    for (std::size_t i = 0; i < block; ++i) acc += go[c * block + i] * xv[c * block + i];
                    gw[c] += acc;
                }
            }
        });
    }
    return out;
}

Tensor channel_bias(const Tensor& x, const Tensor& b) {
    if (x.rank() < 1 || b.rank() != 1 || b.extent(0) != x.extent(0)) {
        throw ConfigError("channel_bias needs x [C x ...] and b [C], got " + shape_string(x.shape()) +
                          " and " + shape_string(b.shape()));
    }
    const std::size_t channels = x.extent(0);
    const std::size_t block = x.size() / channels;
    std::vector<double> v(x.size());
    for (std::size_t c = 0; c < channels; ++c) {
        const double bc = b.at(c);
        const double* src = x.data() + c * block;
        double* dst = v.data() + c * block;
        for (std::size_t i = 0; i < block; ++i) dst[i] = src[i] + bc;
    }
    Tensor out = make_output(x.shape(), std::move(v), x.requires_grad() || b.requires_grad());
    if (recording(x, b)) {
        Tensor xin = x, bin = b;
        Tape::active()->record("channel_bias", [xin, bin, out, channels, block]() mutable {
            const double* go = out.grad();
            if (xin.requires_grad()) accumulate(xin, out.node()->grad);
            if (bin.requires_grad()) {
                double* gb = bin.grad();
                for (std::size_t c = 0; c < channels; ++c) {
                    double acc = 0.0;
                    for (std::size_t i = 0; i < block; ++i) acc += go[c * block + i];
                    gb[c] += acc;
                }
            }
        });
    }
    return out;
}

Tensor sum(const Tensor& x) {
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) acc += x.at(i);
    Tensor out = Tensor::from_data({1}, {acc}, x.requires_grad());
    if (recording(x)) {
        Tensor xin = x;
        Tape::active()->record("sum", [xin, out]() mutable {
            const double g = out.grad()[0];
            double* gx = xin.grad();
            for (std::size_t i = 0; i < xin.size(); ++i) gx[i] += g;
        });
    }
    return out;
}

Tensor sum_squares(const Tensor& x) {
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) acc += x.at(i) * x.at(i);
    Tensor out = Tensor::from_data({1}, {acc}, x.requires_grad());
    if (recording(x)) {
        Tensor xin = x;
        Tape::active()->record("sum_squares", [xin, out]() mutable {
            const double g = out.grad()[0];
            double* gx = xin.grad();
            const double* xv = xin.data();
            for (std::size_t i = 0; i < xin.size(); ++i) gx[i] += 2.0 * xv[i] * g;
        });
    }
    return out;
}

} // namespace dcacrn
