#include "microgrid/mppt.hpp"

#include <algorithm>
#include <cmath>

#include "microgrid/errors.hpp"

namespace microgrid::mppt {

void validate(const MpptConfig& c) {
    if (!(c.d_min >= 0.0)) throw ConfigError("mppt.d_min must be non-negative");
    if (!(c.d_min <= c.d_init)) throw ConfigError("mppt.d_init must not be below d_min");
    if (!(c.d_init <= c.d_max)) throw ConfigError("mppt.d_init must not exceed d_max");
    if (!(c.d_max < 1.0)) throw ConfigError("mppt.d_max must be below 1");
    if (!(c.delta_d > 0.0)) throw ConfigError("mppt.delta_d must be positive");
    if (!(c.sample_period > 0.0)) throw ConfigError("mppt.sample_period must be positive");
}

MpptState mppt_step(const MpptState& state, const MpptConfig& config, double v_k, double i_k, double t) {
    if (!config.enabled) return state;

    MpptState next = state;
    const double p_k = v_k * i_k;
    next.last_sample_time = t;

    if (!state.initialized) {
        next.initialized = true;
        next.perturbed = false;
        next.direction = +1;
        next.duty = config.d_init;
        next.prev_p = p_k;
        next.prev_v = v_k;
        return next;
    }

    const double dp = p_k - state.prev_p;
    const double dv = v_k - state.prev_v;
    next.prev_p = p_k;
    next.prev_v = v_k;
    if (std::abs(dp) < kPowerDeadBand) return next;

    int direction = +1;
    if (state.perturbed) {
        // Sign of the duty move that most plausibly produced dv.
        const int last = dv < 0.0 ? +1 : dv > 0.0 ? -1 : state.direction;
        direction = dp > 0.0 ? last : -last;
    }
    next.perturbed = true;
    next.direction = direction;
    next.duty = std::clamp(state.duty + direction * config.delta_d, config.d_min, config.d_max);
    return next;
}

}  // namespace microgrid::mppt
