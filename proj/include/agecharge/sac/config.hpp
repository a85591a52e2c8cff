#pragma once

#include <cstddef>

namespace agecharge::sac {

struct SacConfig {
    int hidden_layers = 4;
    int hidden_width = 256;
    double gamma = 0.999;
    double learning_rate = 1.0e-4;
    double tau = 0.005;
    int batch_size = 256;
    double updates_per_step = 1.0;      // gradient updates per collected control step
    int max_updates_per_episode = 0;    // 0 = unlimited
    double entropy_scale = 1.0;         // temperature on the entropy term
    int her_relabels = 1;
    std::size_t buffer_capacity = 2000000;
    std::size_t warmup_transitions = 1000;
    int eval_every = 60;
    int eval_episodes = 30;
    bool stochastic_eval = false;
    int episodes = 1000;
    int checkpoint_every = 60;
    double log_std_min = -20.0;
    double log_std_max = 2.0;

    void validate() const;
};

}  // namespace agecharge::sac
