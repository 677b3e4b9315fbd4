#pragma once

#include <cstddef>
#include <deque>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "canamrf/param_store.hpp"
#include "canamrf/tensor.hpp"

namespace canamrf {

class Tape;

/// Handle to a node on a Tape. Cheap to copy; only valid while its tape lives.
struct Var {
    Tape* tape = nullptr;
    std::size_t id = 0;

    const Tensor2& value() const;
    std::size_t rows() const { return value().rows(); }
    std::size_t cols() const { return value().cols(); }
};

/// Vector-Jacobian product of one primitive: given the adjoint of the output,
/// return one adjoint per input (same order and shapes as the inputs).
using Vjp = std::function<std::vector<Tensor2>(const Tensor2& grad_out,
                                               std::span<const Tensor2* const> inputs,
                                               const Tensor2& output)>;

/// Reverse-mode tape. Nodes are appended in evaluation order, so the record
/// is topologically sorted by construction and backward is a single reverse sweep.
class Tape {
public:
    Tape() = default;
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    /// Leaf that never receives a gradient (data, fixed inputs).
    Var constant(Tensor2 value);

    /// Leaf bound to a ParamStore entry. Repeated calls with the same path on
    /// one tape return the same node; backward() accumulates into store.grad(path).
    Var param(ParamStore& store, const std::string& path);

    /// Appends a primitive application. `tag` must outlive the tape (use a literal).
    Var record(std::string_view tag, std::vector<Var> inputs, Tensor2 value, Vjp vjp);

    const Tensor2& value(Var v) const;
    std::string_view tag(Var v) const;
    bool requires_grad(Var v) const;
    std::size_t size() const { return nodes_.size(); }

    /// Propagates d(loss)/d(node) backwards from a 1x1 loss and adds the
    /// parameter adjoints into their ParamStore slots. Intermediate adjoints are
    /// released afterwards. Throws ContractError for a non-scalar loss.
    void backward(Var loss);

    /// Number of nodes whose VJP ran during the most recent backward().
    std::size_t last_backward_visits() const { return last_visits_; }

private:
    struct Node {
        std::string_view tag;
        std::vector<std::size_t> inputs;
        Tensor2 value;
        Tensor2 grad;
        Vjp vjp;
        ParamStore* store = nullptr;
        std::string path;
        bool requires_grad = false;
    };

    const Node& node(Var v) const;

    std::deque<Node> nodes_;
    std::unordered_map<std::string, std::size_t> param_nodes_;
    const ParamStore* bound_store_ = nullptr;
    std::size_t last_visits_ = 0;
};

}  // namespace canamrf
