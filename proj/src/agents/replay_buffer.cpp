#include "auxrl/agents/replay_buffer.hpp"

#include <algorithm>

#include "auxrl/errors.hpp"

namespace auxrl {

namespace {

template <typename Get>
Batch fill_batch(Eigen::Index n, Get get) {
    const Transition& first = get(0);
    const Eigen::Index od = first.obs.size(), ad = first.action.size();
    Batch b;
    b.obs.resize(od, n);
    b.action.resize(ad, n);
    b.reward.resize(1, n);
    b.next_obs.resize(od, n);
    b.done.resize(1, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Transition& t = get(i);
        if (t.obs.size() != od || t.next_obs.size() != od || t.action.size() != ad)
            throw ShapeError("batch: transitions have inconsistent shapes");
        b.obs.col(i) = t.obs;
        b.action.col(i) = t.action;
        b.reward(0, i) = t.reward;
        b.next_obs.col(i) = t.next_obs;
        b.done(0, i) = t.done ? 1.0f : 0.0f;
    }
    return b;
}

}  // namespace

Batch make_batch(const std::vector<Transition>& transitions) {
    if (transitions.empty()) throw InputError("make_batch: empty transition set");
    return fill_batch(static_cast<Eigen::Index>(transitions.size()),
                      [&](Eigen::Index i) -> const Transition& { return transitions[static_cast<std::size_t>(i)]; });
}

namespace agents {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw ConfigError("replay buffer capacity must be positive");
    items_.reserve(std::min<std::size_t>(capacity, 1 << 16));
}

void ReplayBuffer::add(Transition t) {
    if (items_.size() < capacity_) {
        items_.push_back(std::move(t));
    } else {
        items_[next_] = std::move(t);
    }
    next_ = (next_ + 1) % capacity_;
}

std::vector<std::size_t> ReplayBuffer::sample_indices(std::size_t n, std::mt19937_64& rng) const {
    if (items_.empty()) throw InputError("replay buffer: cannot sample from an empty buffer");
    std::uniform_int_distribution<std::size_t> pick(0, items_.size() - 1);
    std::vector<std::size_t> idx(n);
    for (auto& i : idx) i = pick(rng);
    return idx;
}

Batch ReplayBuffer::gather(const std::vector<std::size_t>& indices) const {
    if (indices.empty()) throw InputError("replay buffer: empty index set");
    Batch b = fill_batch(static_cast<Eigen::Index>(indices.size()),
                         [&](Eigen::Index i) -> const Transition& { return items_.at(indices[static_cast<std::size_t>(i)]); });
    b.indices = indices;
    return b;
}

}  // namespace agents
}  // namespace auxrl
