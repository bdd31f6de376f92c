#pragma once

#include "kinchain/errors.hpp"

#include <initializer_list>
#include <string>
#include <vector>

namespace kinchain {

// Kinematic orders label the coordinate hierarchy of generalized phase space:
// 1 = position, 2 = velocity, 3 = acceleration, 4 = its rate.  Gridded axes
// stop at 4; mean-value labels above 4 are allowed (they only appear as
// externally supplied fields, never as axes).
inline constexpr int kMaxAxisOrder = 4;

// A strictly increasing set of kinematic orders.  Rank 0 (empty set) denotes
// the scalar f^0.
class KinematicIndexSet {
public:
    KinematicIndexSet() = default;
    KinematicIndexSet(std::initializer_list<int> orders);
    explicit KinematicIndexSet(std::vector<int> orders);

    static KinematicIndexSet contiguous(int first, int rank);

    int rank() const { return static_cast<int>(orders_.size()); }
    bool empty() const { return orders_.empty(); }
    bool contains(int order) const;
    bool subset_of(const KinematicIndexSet& other) const;

    // Position of `order` inside the set; throws DomainError if absent.
    int axis_of(int order) const;

    KinematicIndexSet minus(const KinematicIndexSet& drop) const;
    KinematicIndexSet plus(int order) const;

    int operator[](int i) const { return orders_[static_cast<std::size_t>(i)]; }
    auto begin() const { return orders_.begin(); }
    auto end() const { return orders_.end(); }

    bool operator==(const KinematicIndexSet&) const = default;

    std::string to_string() const;

private:
    std::vector<int> orders_;
    void validate() const;
};

} // namespace kinchain
