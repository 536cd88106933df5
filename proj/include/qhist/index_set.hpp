#pragma once

#include <cstddef>
#include <initializer_list>
#include <optional>
#include <vector>

namespace qhist {

/// A subset of {0, …, universe−1}. Properties of a context are stored this way,
/// so meet/join/complement are exact set algebra.
class IndexSet {
public:
    IndexSet() = default;
    explicit IndexSet(std::size_t universe) : bits_(universe, false) {}
    /// Throws InputError if any index is out of range.
    IndexSet(std::size_t universe, std::initializer_list<std::size_t> members);
    IndexSet(std::size_t universe, const std::vector<std::size_t>& members);

    static IndexSet full(std::size_t universe);

    std::size_t universe() const noexcept { return bits_.size(); }
    std::size_t count() const noexcept;
    bool empty() const noexcept { return count() == 0; }
    bool contains(std::size_t i) const noexcept { return i < bits_.size() && bits_[i]; }
    void insert(std::size_t i);

    /// Members in increasing order.
    std::vector<std::size_t> members() const;

    IndexSet complement() const;
    /// Binary operations throw InputError when universes differ.
    IndexSet intersection(const IndexSet& other) const;
    IndexSet union_with(const IndexSet& other) const;
    bool subset_of(const IndexSet& other) const;
    bool disjoint_from(const IndexSet& other) const;

    bool operator==(const IndexSet&) const = default;

private:
    void require_same_universe(const IndexSet& other) const;

    std::vector<bool> bits_;
};

/// Mixed-radix addressing of σ₁×…×σ_n. Multi-indices are flattened in
/// lexicographic order (first position slowest).
class MultiIndexSpace {
public:
    MultiIndexSpace() = default;
    /// Throws InputError if any radix is zero.
    explicit MultiIndexSpace(std::vector<std::size_t> radices);

    const std::vector<std::size_t>& radices() const noexcept { return radices_; }
    std::size_t positions() const noexcept { return radices_.size(); }
    std::size_t size() const noexcept { return size_; }

    /// Throws InputError on wrong length or out-of-range component.
    std::size_t flatten(const std::vector<std::size_t>& k) const;
    std::vector<std::size_t> unflatten(std::size_t flat) const;

    /// {k : k_position ∈ allowed}
    IndexSet cylinder(std::size_t position, const IndexSet& allowed) const;
    /// {k : k_i ∈ pattern[i] for every i}; a disengaged slot means "any".
    using Pattern = std::vector<std::optional<std::vector<std::size_t>>>;
    IndexSet product(const Pattern& pattern) const;

    bool operator==(const MultiIndexSpace&) const = default;

private:
    std::vector<std::size_t> radices_;
    std::size_t size_ = 0;
};

}  // namespace qhist
