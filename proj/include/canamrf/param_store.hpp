#pragma once

#include <map>
#include <string>
#include <vector>

#include "canamrf/tensor.hpp"

namespace canamrf {

/// Named parameters, each with a gradient slot of identical shape.
/// Iteration order is lexicographic by path, so anything that walks the
/// store (optimizers, checkpoints, gradient checks) is deterministic.
class ParamStore {
public:
    struct Entry {
        Tensor2 value;
        Tensor2 grad;
    };

    /// Registers a new parameter. Throws ContractError on a duplicate path.
    void add(const std::string& path, Tensor2 value);
    bool contains(const std::string& path) const { return entries_.count(path) != 0; }

    Tensor2& value(const std::string& path);
    const Tensor2& value(const std::string& path) const;
    Tensor2& grad(const std::string& path);
    const Tensor2& grad(const std::string& path) const;

    /// Replaces a parameter value; the shape must not change.
    void set(const std::string& path, Tensor2 value);

    void zero_grads();
    std::vector<std::string> paths() const;
    std::size_t size() const { return entries_.size(); }
    std::size_t scalar_count() const;

    auto begin() { return entries_.begin(); }
    auto end() { return entries_.end(); }
    auto begin() const { return entries_.begin(); }
    auto end() const { return entries_.end(); }

    friend bool operator==(const ParamStore& a, const ParamStore& b);

private:
    Entry& entry(const std::string& path);
    const Entry& entry(const std::string& path) const;

    std::map<std::string, Entry> entries_;
};

}  // namespace canamrf
