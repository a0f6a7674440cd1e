#include "microgrid/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>

#include "microgrid/errors.hpp"

namespace microgrid::grid {
namespace {

constexpr double kDarkPower = 1e-9;  // W

[[noreturn]] void fail(long long step, double t, const std::string& component, const std::exception& e) {
    std::ostringstream os;
    os << "step " << step << " (t=" << t << " s): " << component << ": " << e.what();
    throw SimulationError(os.str(), step, component);
}

void reserve(SimResult& r, std::size_t n, std::size_t pmus) {
    for (auto* ch : {&r.t, &r.g, &r.pv_v, &r.pv_i, &r.pv_p, &r.duty, &r.v_bus, &r.i_dc, &r.src_p}) {
        ch->reserve(n);
    }
    r.pmus.resize(pmus);
    for (auto& p : r.pmus) {
        for (auto* ch : {&p.v, &p.i, &p.p, &p.soc, &p.i_bus}) ch->reserve(n);
    }
}

}  // namespace

double SteadyState::total_pmu_power() const {
    return std::accumulate(pmus.begin(), pmus.end(), 0.0,
                           [](double acc, const PmuMeans& m) { return acc + m.p; });
}

double mean(const std::vector<double>& channel, std::size_t first, std::size_t last) {
    if (first >= last || last > channel.size()) throw DomainError("mean: empty or out-of-range window");
    double sum = 0.0;
    for (std::size_t k = first; k < last; ++k) sum += channel[k];
    return sum / static_cast<double>(last - first);
}

SteadyState steady_state_summary(const SimResult& result, double window) {
    const std::size_t n = result.size();
    if (n == 0) throw DomainError("steady_state_summary: result has no samples");
    if (!(window > 0.0)) throw DomainError("steady_state_summary: window must be positive");
    if (window > result.run_length() * (1.0 + 1e-12)) {
        throw DomainError("steady_state_summary: window longer than the run");
    }
    const auto count = std::clamp<std::size_t>(static_cast<std::size_t>(std::llround(window / result.dt)), 1, n);
    const std::size_t first = n - count;

    SteadyState s;
    s.window = static_cast<double>(count) * result.dt;
    s.g = mean(result.g, first, n);
    s.pv_v = mean(result.pv_v, first, n);
    s.pv_i = mean(result.pv_i, first, n);
    s.pv_p = mean(result.pv_p, first, n);
    s.duty = mean(result.duty, first, n);
    s.v_bus = mean(result.v_bus, first, n);
    s.i_dc = mean(result.i_dc, first, n);
    s.src_p = mean(result.src_p, first, n);
    for (const auto& trace : result.pmus) {
        s.pmus.push_back(PmuMeans{mean(trace.v, first, n), mean(trace.i, first, n), mean(trace.p, first, n),
                                  mean(trace.soc, first, n)});
    }
    if (s.pv_p > kDarkPower) s.efficiency = s.total_pmu_power() / s.pv_p;
    return s;
}

SimResult simulate(const Scenario& scenario) {
    validate(scenario);

    const pv::PvParams pv_params = scenario.pv == pv::PvDatasheet{} ? pv::spr315e_params()
                                                                    : pv::fit_pv_params(scenario.pv);
    const SourceSettings& src = scenario.source;
    const double dt = src.dt;
    const auto steps = static_cast<long long>(std::llround(scenario.resolved_duration() / dt));
    const long long mppt_every = std::max<long long>(1, std::llround(scenario.mppt.sample_period / dt));
    const std::size_t pmu_count = scenario.pmus.size();

    SimResult r;
    r.dt = dt;
    reserve(r, static_cast<std::size_t>(steps), pmu_count);

    converters::BoostState boost = converters::BoostState::seeded(src.v_bus_init, src.epsilon);
    BusState bus{src.v_bus_init, src.c_bus};
    mppt::MpptState controller;
    controller.duty = scenario.mppt.d_init;
    double duty = scenario.mppt.d_init;

    std::vector<storage::BatteryState> batteries;
    std::vector<double> prev_charge(pmu_count, 0.0);
    for (const auto& setup : scenario.pmus) batteries.push_back(storage::battery_initial_state(setup.battery));

    double cached_g = -1.0;
    pv::SingleDiodeParams sd{};
    std::vector<converters::PmuState> pmu_states(pmu_count);

    for (long long k = 0; k < steps; ++k) {
        const double t = static_cast<double>(k) * dt;
        const double g = scenario.profile.at(t);
        if (g != cached_g) {
            sd = pv::operating_parameters(pv_params, g, scenario.profile.t_cell);
            cached_g = g;
        }

        const double v_a = converters::boost_input_voltage(boost, duty);
        double i_a = 0.0;
        try {
            i_a = pv::pv_current(sd, std::max(v_a, 0.0), g, scenario.profile.t_cell);
        } catch (const Error& e) {
            fail(k, t, "pv", e);
        }

        if (k % mppt_every == 0 && scenario.mppt.enabled) {
            controller = mppt::mppt_step(controller, scenario.mppt, v_a, i_a, t);
            duty = controller.duty;
        }

        const double i_dc = converters::boost_output_current(boost, duty);

        double bus_draw = 0.0;
        for (std::size_t j = 0; j < pmu_count; ++j) {
            const auto& setup = scenario.pmus[j];
            try {
                if (bus.v_bus > 0.0) {
                    pmu_states[j] = converters::pmu_solve_current(
                        setup.pmu, bus.v_bus, storage::battery_ocv(setup.battery, batteries[j].soc),
                        setup.battery.r_internal);
                } else {
                    pmu_states[j] = converters::PmuState{};
                    pmu_states[j].v_out = storage::battery_ocv(setup.battery, batteries[j].soc);
                }
            } catch (const Error& e) {
                fail(k, t, "pmu" + std::to_string(j + 1), e);
            }
            bus_draw += pmu_states[j].i_bus;
        }

        r.t.push_back(t);
        r.g.push_back(g);
        r.pv_v.push_back(v_a);
        r.pv_i.push_back(i_a);
        r.pv_p.push_back(v_a * i_a);
        r.duty.push_back(duty);
        r.v_bus.push_back(bus.v_bus);
        r.i_dc.push_back(i_dc);
        r.src_p.push_back(bus.v_bus * i_dc);

        bus.v_bus = std::max(0.0, bus.v_bus + dt * (i_dc - bus_draw) / bus.c_bus);

        for (std::size_t j = 0; j < pmu_count; ++j) {
            const double i_now = pmu_states[j].i2;
            if (k > 0) {
                batteries[j] = storage::battery_step(batteries[j], scenario.pmus[j].battery,
                                                     0.5 * (prev_charge[j] + i_now), dt);
            }
            prev_charge[j] = i_now;
            auto& trace = r.pmus[j];
            trace.v.push_back(pmu_states[j].v_out);
            trace.i.push_back(i_now);
            trace.p.push_back(pmu_states[j].p_out);
            trace.soc.push_back(batteries[j].soc);
            trace.i_bus.push_back(pmu_states[j].i_bus);
        }

        converters::push_history(boost, bus.v_bus, i_a);
    }

    if (!r.t.empty()) r.summary = steady_state_summary(r, scenario.resolved_window());
    return r;
}

}  // namespace microgrid::grid
