#pragma once

#include <cstddef>
#include <mutex>
#include <random>
#include <vector>

namespace agecharge::sac {

struct Transition {
    std::vector<double> s;
    double a = 0.0;  // normalised action in [0, 1]
    double r = 0.0;
    std::vector<double> s2;
    bool done = false;
    int episode = 0;
    int step = 0;
    double t_given = 0.0;  // goal this transition was scored against
    double soc_given = 0.0;
};

/// Ring buffer of transitions. push and sample may be called from several threads.
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity);

    void push(Transition t);
    void push(std::vector<Transition> ts);
    /// Uniform draw with replacement.
    std::vector<Transition> sample(std::size_t n, std::mt19937_64& rng) const;
    std::vector<std::size_t> sample_indices(std::size_t n, std::mt19937_64& rng) const;

    std::size_t size() const;
    std::size_t capacity() const { return capacity_; }
    std::size_t total_pushed() const;
    /// Copy of slot i (0 <= i < size()).
    Transition at(std::size_t i) const;
    void clear();

private:
    std::size_t capacity_;
    std::vector<Transition> data_;
    std::size_t next_ = 0;
    std::size_t pushed_ = 0;
    mutable std::mutex mu_;
};

}  // namespace agecharge::sac
