#include "agecharge/sac/config.hpp"

#include "agecharge/common/errors.hpp"

namespace agecharge::sac {

void SacConfig::validate() const {
    if (hidden_layers < 1) throw ConfigError("hidden_layers", "must be at least 1");
    if (hidden_width < 1) throw ConfigError("hidden_width", "must be at least 1");
    if (!(gamma > 0.0 && gamma <= 1.0)) throw ConfigError("gamma", "must lie in (0, 1]");
    if (!(learning_rate > 0.0)) throw ConfigError("learning_rate", "must be positive");
    if (!(tau > 0.0 && tau <= 1.0)) throw ConfigError("tau", "must lie in (0, 1]");
    if (batch_size < 1) throw ConfigError("batch_size", "must be at least 1");
    if (!(updates_per_step >= 0.0)) throw ConfigError("updates_per_step", "must be non-negative");
    if (max_updates_per_episode < 0) throw ConfigError("max_updates_per_episode", "must be non-negative");
    if (!(entropy_scale >= 0.0)) throw ConfigError("entropy_scale", "must be non-negative");
    if (her_relabels < 0) throw ConfigError("her_relabels", "must be non-negative");
    if (buffer_capacity < static_cast<std::size_t>(batch_size)) {
        throw ConfigError("buffer_capacity", "must hold at least one batch");
    }
    if (eval_every < 1) throw ConfigError("eval_every", "must be at least 1");
    if (eval_episodes < 1) throw ConfigError("eval_episodes", "must be at least 1");
    if (episodes < 0) throw ConfigError("episodes", "must be non-negative");
    if (checkpoint_every < 1) throw ConfigError("checkpoint_every", "must be at least 1");
    if (!(log_std_min < log_std_max)) throw ConfigError("log_std_max", "need log_std_min < log_std_max");
}

}  // namespace agecharge::sac
