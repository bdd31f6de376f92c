#include "kinchain/index_set.hpp"

#include <algorithm>
#include <sstream>

namespace kinchain {

KinematicIndexSet::KinematicIndexSet(std::initializer_list<int> orders) : orders_(orders) {
    validate();
}

KinematicIndexSet::KinematicIndexSet(std::vector<int> orders) : orders_(std::move(orders)) {
    validate();
}

KinematicIndexSet KinematicIndexSet::contiguous(int first, int rank) {
    std::vector<int> v(static_cast<std::size_t>(rank));
    for (int i = 0; i < rank; ++i) v[static_cast<std::size_t>(i)] = first + i;
    return KinematicIndexSet(std::move(v));
}

void KinematicIndexSet::validate() const {
    int prev = 0;
    for (int o : orders_) {
        if (o < 1) throw DomainError("kinematic order must be >= 1, got " + std::to_string(o));
        if (o <= prev)
            throw DomainError("kinematic index set must be strictly increasing: " + to_string());
        prev = o;
    }
}

bool KinematicIndexSet::contains(int order) const {
    return std::binary_search(orders_.begin(), orders_.end(), order);
}

bool KinematicIndexSet::subset_of(const KinematicIndexSet& other) const {
    return std::includes(other.orders_.begin(), other.orders_.end(), orders_.begin(),
                         orders_.end());
}

int KinematicIndexSet::axis_of(int order) const {
    auto it = std::lower_bound(orders_.begin(), orders_.end(), order);
    if (it == orders_.end() || *it != order)
        throw DomainError("order " + std::to_string(order) + " not in index set " + to_string());
    return static_cast<int>(it - orders_.begin());
}

KinematicIndexSet KinematicIndexSet::minus(const KinematicIndexSet& drop) const {
    if (!drop.subset_of(*this))
        throw DomainError("set difference requires " + drop.to_string() + " subset of " +
                          to_string());
    std::vector<int> out;
    std::set_difference(orders_.begin(), orders_.end(), drop.orders_.begin(), drop.orders_.end(),
                        std::back_inserter(out));
    return KinematicIndexSet(std::move(out));
}

KinematicIndexSet KinematicIndexSet::plus(int order) const {
    if (contains(order))
        throw DomainError("order " + std::to_string(order) + " already in " + to_string());
    std::vector<int> out = orders_;
    out.insert(std::upper_bound(out.begin(), out.end(), order), order);
    return KinematicIndexSet(std::move(out));
}

std::string KinematicIndexSet::to_string() const {
    std::ostringstream os;
    os << '{';
    for (std::size_t i = 0; i < orders_.size(); ++i) {
        if (i) os << ',';
        os << orders_[i];
    }
    os << '}';
    return os.str();
}

} // namespace kinchain
