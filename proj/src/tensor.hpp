#ifndef DCACRN_TENSOR_HPP
#define DCACRN_TENSOR_HPP

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace dcacrn {

namespace detail {

struct TensorNode {
    std::vector<std::size_t> shape;
    std::vector<double> value;
    std::vector<double> grad; // same length as value when requires_grad
    bool requires_grad = false;
};

} // namespace detail

/// Dense row-major tensor of doubles. Copying a Tensor copies the handle,
/// not the storage; ops that need fresh storage allocate a new node.
class Tensor {
public:
    Tensor() = default;

    static Tensor zeros(std::vector<std::size_t> shape, bool requires_grad = false);
    static Tensor full(std::vector<std::size_t> shape, double v, bool requires_grad = false);
    static Tensor from_data(std::vector<std::size_t> shape, std::vector<double> data,
                            bool requires_grad = false);
    static Tensor scalar(double v, bool requires_grad = false);

    bool defined() const { return node_ != nullptr; }
    const std::vector<std::size_t>& shape() const { return node_->shape; }
    std::size_t rank() const { return node_->shape.size(); }
    std::size_t extent(std::size_t axis) const { return node_->shape[axis]; }
    std::size_t size() const { return node_->value.size(); }

    double* data() { return node_->value.data(); }
    const double* data() const { return node_->value.data(); }
    std::span<const double> values() const { return node_->value; }

    bool requires_grad() const { return node_ && node_->requires_grad; }
    /// Turns this tensor into a trainable leaf (allocates the grad buffer).
    void set_requires_grad(bool on);
    double* grad() { return node_->grad.data(); }
    const double* grad() const { return node_->grad.data(); }
    std::span<const double> grad_values() const { return node_->grad; }
    void zero_grad();

    /// Scalar convenience accessors (size() must be 1).
    double item() const;

    double& at(std::size_t i) { return node_->value[i]; }
    double at(std::size_t i) const { return node_->value[i]; }
    double& at(std::size_t i, std::size_t j) { return node_->value[i * extent(1) + j]; }
    double at(std::size_t i, std::size_t j) const { return node_->value[i * extent(1) + j]; }
    double& at(std::size_t i, std::size_t j, std::size_t k) {
        return node_->value[(i * extent(1) + j) * extent(2) + k];
    }
    double at(std::size_t i, std::size_t j, std::size_t k) const {
        return node_->value[(i * extent(1) + j) * extent(2) + k];
    }

    /// Deep copy with fresh storage; grad buffer is not copied.
    Tensor clone() const;

    bool same_node(const Tensor& other) const { return node_ == other.node_; }

    std::shared_ptr<detail::TensorNode> node() const { return node_; }

private:
    explicit Tensor(std::shared_ptr<detail::TensorNode> node) : node_(std::move(node)) {}
    std::shared_ptr<detail::TensorNode> node_;
};

/// Reverse-mode tape. Constructing a Tape makes it the active recorder for
/// the current thread; ops append nodes when an input requires grad. Eval
/// paths simply run without a live Tape.
class Tape {
public:
    Tape();
    ~Tape();
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    static Tape* active();

    void record(const char* op_id, std::function<void()> backward);
    std::size_t size() const { return nodes_.size(); }

    /// Seeds d(loss)/d(loss) = 1, replays the tape in reverse creation
    /// order accumulating into grad buffers, then clears the tape.
    void backward(const Tensor& loss);

private:
    struct TapeNode {
        const char* op_id;
        std::function<void()> backward;
    };
    std::vector<TapeNode> nodes_;
    Tape* previous_ = nullptr;
};

/// True when a tape is live and should record for these inputs.
bool recording(const Tensor& a);
bool recording(const Tensor& a, const Tensor& b);

// Structural ops (all differentiable).
Tensor reshape(const Tensor& x, std::vector<std::size_t> shape);
Tensor transpose(const Tensor& x);                      // 2-D only
Tensor concat0(const std::vector<Tensor>& parts);       // stacks along a new leading axis
Tensor slice0(const Tensor& x, std::size_t index);      // inverse of concat0
Tensor slice_col(const Tensor& x, std::size_t col);     // [p x q] -> [p x 1]
Tensor slice_rows(const Tensor& x, std::size_t row0, std::size_t row1); // [p x q] -> [row1-row0 x q]

// Arithmetic ops.
Tensor add(const Tensor& a, const Tensor& b);           // same shape
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);           // elementwise
Tensor scale(const Tensor& x, double c);                // constant scale
Tensor matmul(const Tensor& a, const Tensor& b);        // [p x q] * [q x r]

/// Per-channel scalar transforms over a [C x ...] tensor and a [C] vector:
/// out[c, ...] = x[c, ...] * w[c]   (channel_scale)
/// out[c, ...] = x[c, ...] + b[c]   (channel_bias)
Tensor channel_scale(const Tensor& x, const Tensor& w);
Tensor channel_bias(const Tensor& x, const Tensor& b);

// Reductions.
Tensor sum(const Tensor& x);                            // -> scalar
Tensor sum_squares(const Tensor& x);                    // -> scalar

std::size_t shape_product(const std::vector<std::size_t>& shape);
std::string shape_string(const std::vector<std::size_t>& shape);

} // namespace dcacrn

#endif // DCACRN_TENSOR_HPP
