#include "canamrf/autodiff.hpp"

#include "canamrf/errors.hpp"

namespace canamrf {

const Tensor2& Var::value() const {
    if (tape == nullptr) throw ContractError("use of an unbound Var");
    return tape->value(*this);
}

const Tape::Node& Tape::node(Var v) const {
    if (v.tape != this || v.id >= nodes_.size()) throw ContractError("Var does not belong to this tape");
    return nodes_[v.id];
}

Var Tape::constant(Tensor2 value) {
    Node n;
    n.tag = "const";
    n.value = std::move(value);
    nodes_.push_back(std::move(n));
    return Var{this, nodes_.size() - 1};
}

Var Tape::param(ParamStore& store, const std::string& path) {
    if (bound_store_ != nullptr && bound_store_ != &store) {
        throw ContractError("a tape can bind parameters from a single ParamStore only");
    }
    bound_store_ = &store;
    if (auto it = param_nodes_.find(path); it != param_nodes_.end()) return Var{this, it->second};
    Node n;
    n.tag = "param";
    n.value = store.value(path);
    n.store = &store;
    n.path = path;
    n.requires_grad = true;
    nodes_.push_back(std::move(n));
    param_nodes_.emplace(path, nodes_.size() - 1);
    return Var{this, nodes_.size() - 1};
}

Var Tape::record(std::string_view tag, std::vector<Var> inputs, Tensor2 value, Vjp vjp) {
    Node n;
    n.tag = tag;
    n.value = std::move(value);
    n.inputs.reserve(inputs.size());
    for (const Var& in : inputs) {
        if (in.tape != this || in.id >= nodes_.size()) {
            throw ContractError(std::string(tag) + ": input does not belong to this tape");
        }
        n.inputs.push_back(in.id);
        n.requires_grad = n.requires_grad || nodes_[in.id].requires_grad;
    }
    if (n.requires_grad) n.vjp = std::move(vjp);
    nodes_.push_back(std::move(n));
    return Var{this, nodes_.size() - 1};
}

const Tensor2& Tape::value(Var v) const { return node(v).value; }
std::string_view Tape::tag(Var v) const { return node(v).tag; }
bool Tape::requires_grad(Var v) const { return node(v).requires_grad; }

void Tape::backward(Var loss) {
    const Node& root = node(loss);
    if (root.value.rows() != 1 || root.value.cols() != 1) {
        throw ContractError("backward: loss must be 1x1, got " + root.value.shape_string());
    }
    last_visits_ = 0;
    nodes_[loss.id].grad = Tensor2::ones(1, 1);

    std::vector<const Tensor2*> input_values;
    for (std::size_t id = loss.id + 1; id-- > 0;) {
        Node& n = nodes_[id];
        if (n.grad.empty() || !n.requires_grad) continue;
        ++last_visits_;
        if (n.store != nullptr) {
            add_inplace(n.store->grad(n.path), n.grad);
        } else if (n.vjp) {
            input_values.clear();
            for (std::size_t in : n.inputs) input_values.push_back(&nodes_[in].value);
            std::vector<Tensor2> adjoints = n.vjp(n.grad, input_values, n.value);
            if (adjoints.size() != n.inputs.size()) {
                throw ContractError(std::string(n.tag) + ": VJP returned " + std::to_string(adjoints.size()) +
                                    " adjoints for " + std::to_string(n.inputs.size()) + " inputs");
            }
            for (std::size_t k = 0; k < n.inputs.size(); ++k) {
                Node& in = nodes_[n.inputs[k]];
                if (!in.requires_grad) continue;
                if (!adjoints[k].same_shape(in.value)) {
                    throw DimensionError(std::string(n.tag) + ": VJP adjoint " + adjoints[k].shape_string() +
                                         " does not match input " + in.value.shape_string());
                }
                if (in.grad.empty()) {
                    in.grad = std::move(adjoints[k]);
                } else {
                    add_inplace(in.grad, adjoints[k]);
                }
            }
        }
        n.grad = Tensor2();
    }
}

}  // namespace canamrf
