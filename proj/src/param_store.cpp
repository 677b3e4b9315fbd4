#include "canamrf/param_store.hpp"

#include <algorithm>

#include "canamrf/errors.hpp"

namespace canamrf {

void ParamStore::add(const std::string& path, Tensor2 value) {
    if (path.empty()) throw ContractError("parameter path must not be empty");
    Tensor2 grad(value.rows(), value.cols());
    const bool inserted = entries_.emplace(path, Entry{std::move(value), std::move(grad)}).second;
    if (!inserted) throw ContractError("duplicate parameter path '" + path + "'");
}

ParamStore::Entry& ParamStore::entry(const std::string& path) {
    auto it = entries_.find(path);
    if (it == entries_.end()) throw ContractError("unknown parameter path '" + path + "'");
    return it->second;
}

const ParamStore::Entry& ParamStore::entry(const std::string& path) const {
    auto it = entries_.find(path);
    if (it == entries_.end()) throw ContractError("unknown parameter path '" + path + "'");
    return it->second;
}

Tensor2& ParamStore::value(const std::string& path) { return entry(path).value; }
const Tensor2& ParamStore::value(const std::string& path) const { return entry(path).value; }
Tensor2& ParamStore::grad(const std::string& path) { return entry(path).grad; }
const Tensor2& ParamStore::grad(const std::string& path) const { return entry(path).grad; }

void ParamStore::set(const std::string& path, Tensor2 value) {
    Entry& e = entry(path);
    if (!e.value.same_shape(value)) {
        throw DimensionError("parameter '" + path + "' has shape " + e.value.shape_string() +
                             ", cannot assign " + value.shape_string());
    }
    e.value = std::move(value);
}

void ParamStore::zero_grads() {
    for (auto& [path, e] : entries_) std::fill(e.grad.data().begin(), e.grad.data().end(), 0.0);
}

std::vector<std::string> ParamStore::paths() const {
    std::vector<std::string> out;
    out.reserve(entries_.size());
    for (const auto& [path, e] : entries_) out.push_back(path);
    return out;
}

std::size_t ParamStore::scalar_count() const {
    std::size_t n = 0;
    for (const auto& [path, e] : entries_) n += e.value.size();
    return n;
}

bool operator==(const ParamStore& a, const ParamStore& b) {
    if (a.entries_.size() != b.entries_.size()) return false;
    auto ib = b.entries_.begin();
    for (const auto& [path, e] : a.entries_) {
        if (path != ib->first || !(e.value == ib->second.value)) return false;
        ++ib;
    }
    return true;
}

}  // namespace canamrf
