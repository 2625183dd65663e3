#pragma once

#include <cstddef>
#include <random>
#include <vector>

#include "auxrl/transition.hpp"

namespace auxrl::agents {

// Fixed-capacity ring of transitions; once full the oldest entry is replaced.
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity);

    void add(Transition t);
    std::size_t size() const { return items_.size(); }
    std::size_t capacity() const { return capacity_; }
    bool empty() const { return items_.empty(); }

    const Transition& at(std::size_t i) const { return items_.at(i); }
    const std::vector<Transition>& items() const { return items_; }

    // Uniform with replacement.
    std::vector<std::size_t> sample_indices(std::size_t n, std::mt19937_64& rng) const;
    Batch gather(const std::vector<std::size_t>& indices) const;

private:
    std::size_t capacity_;
    std::size_t next_ = 0;
    std::vector<Transition> items_;
};

}  // namespace auxrl::agents
