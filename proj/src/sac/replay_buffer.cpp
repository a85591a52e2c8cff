#include "agecharge/sac/replay_buffer.hpp"

#include <stdexcept>

namespace agecharge::sac {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity_ == 0) throw std::invalid_argument("ReplayBuffer capacity must be positive");
}

void ReplayBuffer::push(Transition t) {
    std::lock_guard lock(mu_);
    if (data_.size() < capacity_) {
        data_.push_back(std::move(t));
    } else {
        data_[next_] = std::move(t);
    }
    next_ = (next_ + 1) % capacity_;
    ++pushed_;
}

void ReplayBuffer::push(std::vector<Transition> ts) {
    for (auto& t : ts) push(std::move(t));
}

std::vector<std::size_t> ReplayBuffer::sample_indices(std::size_t n, std::mt19937_64& rng) const {
    std::lock_guard lock(mu_);
    if (data_.empty()) throw std::logic_error("sampling from an empty replay buffer");
    std::uniform_int_distribution<std::size_t> U(0, data_.size() - 1);
    std::vector<std::size_t> idx(n);
    for (auto& i : idx) i = U(rng);
    return idx;
}

std::vector<Transition> ReplayBuffer::sample(std::size_t n, std::mt19937_64& rng) const {
    std::lock_guard lock(mu_);
    if (data_.empty()) throw std::logic_error("sampling from an empty replay buffer");
    std::uniform_int_distribution<std::size_t> U(0, data_.size() - 1);
    std::vector<Transition> out;
    out.reserve(n);
    for (std::size_t k = 0; k < n; ++k) out.push_back(data_[U(rng)]);
    return out;
}

std::size_t ReplayBuffer::size() const {
    std::lock_guard lock(mu_);
    return data_.size();
}

std::size_t ReplayBuffer::total_pushed() const {
    std::lock_guard lock(mu_);
    return pushed_;
}

Transition ReplayBuffer::at(std::size_t i) const {
    std::lock_guard lock(mu_);
    return data_.at(i);
}

void ReplayBuffer::clear() {
    std::lock_guard lock(mu_);
    data_.clear();
    next_ = 0;
    pushed_ = 0;
}

}  // namespace agecharge::sac
