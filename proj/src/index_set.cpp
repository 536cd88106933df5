#include "qhist/index_set.hpp"

#include <algorithm>
#include <string>

#include "qhist/error.hpp"

namespace qhist {

IndexSet::IndexSet(std::size_t universe, std::initializer_list<std::size_t> members)
    : IndexSet(universe, std::vector<std::size_t>(members)) {}

IndexSet::IndexSet(std::size_t universe, const std::vector<std::size_t>& members)
    : bits_(universe, false) {
    for (auto m : members) {
        insert(m);
    }
}

IndexSet IndexSet::full(std::size_t universe) {
    IndexSet s(universe);
    s.bits_.assign(universe, true);
    return s;
}

std::size_t IndexSet::count() const noexcept {
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), true));
}

void IndexSet::insert(std::size_t i) {
    if (i >= bits_.size()) {
        throw InputError("index " + std::to_string(i) + " outside label set of size " +
                         std::to_string(bits_.size()));
    }
    bits_[i] = true;
}

std::vector<std::size_t> IndexSet::members() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < bits_.size(); ++i) {
        if (bits_[i]) {
            out.push_back(i);
        }
    }
    return out;
}

IndexSet IndexSet::complement() const {
    IndexSet out = *this;
    out.bits_.flip();
    return out;
}

void IndexSet::require_same_universe(const IndexSet& other) const {
    if (universe() != other.universe()) {
        throw InputError("index sets over different label sets");
    }
}

IndexSet IndexSet::intersection(const IndexSet& other) const {
    require_same_universe(other);
    IndexSet out(universe());
    for (std::size_t i = 0; i < bits_.size(); ++i) {
        out.bits_[i] = bits_[i] && other.bits_[i];
    }
    return out;
}

IndexSet IndexSet::union_with(const IndexSet& other) const {
    require_same_universe(other);
    IndexSet out(universe());
    for (std::size_t i = 0; i < bits_.size(); ++i) {
        out.bits_[i] = bits_[i] || other.bits_[i];
    }
    return out;
}

bool IndexSet::subset_of(const IndexSet& other) const {
    require_same_universe(other);
    for (std::size_t i = 0; i < bits_.size(); ++i) {
        if (bits_[i] && !other.bits_[i]) {
            return false;
        }
    }
    return true;
}

bool IndexSet::disjoint_from(const IndexSet& other) const {
    return intersection(other).empty();
}

MultiIndexSpace::MultiIndexSpace(std::vector<std::size_t> radices) : radices_(std::move(radices)) {
    size_ = radices_.empty() ? 0 : 1;
    for (auto r : radices_) {
        if (r == 0) {
            throw InputError("multi-index radix must be positive");
        }
        size_ *= r;
    }
}

std::size_t MultiIndexSpace::flatten(const std::vector<std::size_t>& k) const {
    if (k.size() != radices_.size()) {
        throw InputError("multi-index has " + std::to_string(k.size()) + " components, expected " +
                         std::to_string(radices_.size()));
    }
    std::size_t flat = 0;
    for (std::size_t i = 0; i < k.size(); ++i) {
        if (k[i] >= radices_[i]) {
            throw InputError("multi-index component " + std::to_string(i) + " = " +
                             std::to_string(k[i]) + " out of range");
        }
        flat = flat * radices_[i] + k[i];
    }
    return flat;
}

std::vector<std::size_t> MultiIndexSpace::unflatten(std::size_t flat) const {
    if (flat >= size_) {
        throw InputError("flat multi-index out of range");
    }
    std::vector<std::size_t> k(radices_.size());
    for (std::size_t i = radices_.size(); i-- > 0;) {
        k[i] = flat % radices_[i];
        flat /= radices_[i];
    }
    return k;
}

IndexSet MultiIndexSpace::cylinder(std::size_t position, const IndexSet& allowed) const {
    if (position >= radices_.size()) {
        throw InputError("multi-index position out of range");
    }
    if (allowed.universe() != radices_[position]) {
        throw InputError("cylinder label set does not match position radix");
    }
    IndexSet out(size_);
    for (std::size_t flat = 0; flat < size_; ++flat) {
        if (allowed.contains(unflatten(flat)[position])) {
            out.insert(flat);
        }
    }
    return out;
}

IndexSet MultiIndexSpace::product(const Pattern& pattern) const {
    if (pattern.size() != radices_.size()) {
        throw InputError("pattern has " + std::to_string(pattern.size()) +
                         " slots, expected " + std::to_string(radices_.size()));
    }
    IndexSet out = IndexSet::full(size_);
    for (std::size_t i = 0; i < pattern.size(); ++i) {
        if (pattern[i]) {
            out = out.intersection(cylinder(i, IndexSet(radices_[i], *pattern[i])));
        }
    }
    return out;
}

}  // namespace qhist
