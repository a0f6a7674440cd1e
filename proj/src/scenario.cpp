#include "microgrid/scenario.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "config_text.hpp"
#include "microgrid/errors.hpp"

namespace microgrid {
namespace {

using config::Entry;
using config::Table;

[[noreturn]] void bad_entry(const Entry& e, const std::string& section, const std::string& msg) {
    throw ConfigError("line " + std::to_string(e.line) + ": " + section + "." + e.key + ": " + msg);
}

double as_number(const Entry& e, const std::string& section) {
    if (const auto* v = std::get_if<double>(&e.value)) return *v;
    bad_entry(e, section, "expected a number");
}

int as_integer(const Entry& e, const std::string& section) {
    const double v = as_number(e, section);
    if (v != std::floor(v) || std::abs(v) > 1e9) bad_entry(e, section, "expected an integer");
    return static_cast<int>(v);
}

bool as_bool(const Entry& e, const std::string& section) {
    if (const auto* v = std::get_if<bool>(&e.value)) return *v;
    bad_entry(e, section, "expected true or false");
}

std::string as_string(const Entry& e, const std::string& section) {
    if (const auto* v = std::get_if<std::string>(&e.value)) return *v;
    bad_entry(e, section, "expected a quoted string");
}

std::vector<double> as_list(const Entry& e, const std::string& section) {
    if (const auto* v = std::get_if<std::vector<double>>(&e.value)) return *v;
    bad_entry(e, section, "expected a list of numbers");
}

// Binds keys of one table to setters; anything else is rejected.
class KeyMap {
public:
    using Setter = std::function<void(const Entry&)>;

    KeyMap(std::string section) : section_(std::move(section)) {}

    KeyMap& number(const std::string& key, double& target) {
        setters_[key] = [this, &target](const Entry& e) { target = as_number(e, section_); };
        return *this;
    }
    KeyMap& custom(const std::string& key, Setter s) {
        setters_[key] = std::move(s);
        return *this;
    }

    void apply(const Table& table) const {
        for (const auto& e : table.entries) {
            auto it = setters_.find(e.key);
            if (it == setters_.end()) bad_entry(e, section_, "unknown key");
            it->second(e);
        }
    }

    const std::string& section() const { return section_; }

private:
    std::string section_;
    std::map<std::string, Setter> setters_;
};

const Entry* find(const Table& t, std::string_view key) {
    for (const auto& e : t.entries) {
        if (e.key == key) return &e;
    }
    return nullptr;
}

enum class Preset { V12, V36 };

Preset preset_of(const Table& pmu_table) {
    const Entry* e = find(pmu_table, "preset");
    if (!e) return Preset::V12;
    const std::string p = as_string(*e, "pmu");
    if (p == "12V") return Preset::V12;
    if (p == "36V") return Preset::V36;
    bad_entry(*e, "pmu", "preset must be \"12V\" or \"36V\"");
}

PmuSetup preset_setup(Preset p, double capacity) {
    return p == Preset::V12 ? pmu_preset_12v(capacity) : pmu_preset_36v(capacity);
}

void apply_pv(const Table& t, pv::PvDatasheet& ds) {
    KeyMap("pv")
        .number("i_sc", ds.i_sc)
        .number("v_oc", ds.v_oc)
        .number("v_mp", ds.v_mp)
        .number("i_mp", ds.i_mp)
        .number("alpha_isc", ds.alpha_isc)
        .number("beta_voc", ds.beta_voc)
        .custom("n_s", [&](const Entry& e) { ds.n_s = as_integer(e, "pv"); })
        .apply(t);
}

void apply_mppt(const Table& t, mppt::MpptConfig& m) {
    KeyMap("mppt")
        .number("d_init", m.d_init)
        .number("d_min", m.d_min)
        .number("d_max", m.d_max)
        .number("delta_d", m.delta_d)
        .number("sample_period", m.sample_period)
        .custom("enabled", [&](const Entry& e) { m.enabled = as_bool(e, "mppt"); })
        .apply(t);
}

void apply_source(const Table& t, SourceSettings& s) {
    KeyMap("source_converter")
        .number("epsilon", s.epsilon)
        .number("c_bus", s.c_bus)
        .number("v_bus_init", s.v_bus_init)
        .number("dt", s.dt)
        .custom("duration", [&](const Entry& e) { s.duration = as_number(e, "source_converter"); })
        .custom("window", [&](const Entry& e) { s.window = as_number(e, "source_converter"); })
        .apply(t);
}

void apply_profile(const Table& t, IrradianceProfile& p) {
    std::vector<double> times;
    std::vector<double> levels;
    const Entry* times_entry = nullptr;
    KeyMap("profile")
        .number("t_cell", p.t_cell)
        .custom("times", [&](const Entry& e) { times = as_list(e, "profile"); times_entry = &e; })
        .custom("irradiance", [&](const Entry& e) { levels = as_list(e, "profile"); })
        .apply(t);
    const bool has_times = find(t, "times") != nullptr;
    const bool has_levels = find(t, "irradiance") != nullptr;
    if (has_times != has_levels) {
        throw ConfigError("line " + std::to_string(t.line) + ": profile: times and irradiance must be given together");
    }
    if (!has_times) return;
    if (times.size() != levels.size()) bad_entry(*times_entry, "profile", "times and irradiance differ in length");
    p.steps.clear();
    for (std::size_t i = 0; i < times.size(); ++i) p.steps.push_back({times[i], levels[i]});
}

void apply_pmu(const Table& t, converters::PmuConfig& c) {
    KeyMap("pmu")
        .custom("preset", [](const Entry&) {})
        .number("n", c.n)
        .number("duty", c.duty)
        .number("r_on", c.r_on)
        .number("r_d", c.r_d)
        .number("v_d", c.v_d)
        .number("f_sw", c.f_sw)
        .number("l_lk", c.l_lk)
        .number("l_out", c.l_out)
        .number("c_out", c.c_out)
        .number("rated_va", c.rated_va)
        .apply(t);
}

void apply_battery(const Table& t, storage::BatteryConfig& b) {
    KeyMap("pmu.battery")
        .number("v_nominal", b.v_nominal)
        .number("capacity", b.capacity)
        .number("soc_init", b.soc_init)
        .number("r_internal", b.r_internal)
        .number("ocv_at_0", b.ocv_at_0)
        .number("ocv_at_1", b.ocv_at_1)
        .number("response_time", b.response_time)
        .apply(t);
}

std::string format_capacity(double ah) {
    std::ostringstream os;
    os << ah;
    return os.str();
}

}  // namespace

double IrradianceProfile::at(double t) const {
    double g = steps.empty() ? 0.0 : steps.front().g;
    for (const auto& s : steps) {
        if (s.start <= t) {
            g = s.g;
        } else {
            break;
        }
    }
    return g;
}

PmuSetup pmu_preset_12v(double capacity) {
    PmuSetup s;
    s.pmu.n = 4.5;
    s.pmu.v_d = 0.29;
    s.battery = storage::battery_12v(capacity);
    return s;
}

PmuSetup pmu_preset_36v(double capacity) {
    PmuSetup s;
    s.pmu.n = 1.8;
    s.pmu.v_d = 1.05;
    s.battery = storage::battery_36v(capacity);
    return s;
}

double Scenario::resolved_duration() const {
    if (source.duration) return *source.duration;
    const double last = profile.steps.empty() ? 0.0 : profile.steps.back().start;
    return last + kSecondsPerProfileStep;
}

double Scenario::resolved_window() const {
    if (source.window) return *source.window;
    return kDefaultWindowFraction * resolved_duration();
}

void validate(const Scenario& s) {
    if (!(s.pv == pv::PvDatasheet{})) pv::fit_pv_params(s.pv);
    mppt::validate(s.mppt);

    const SourceSettings& src = s.source;
    if (!(src.epsilon > 0.0)) throw ConfigError("source_converter.epsilon must be positive");
    if (!(src.c_bus > 0.0)) throw ConfigError("source_converter.c_bus must be positive");
    if (!(src.v_bus_init >= 0.0)) throw ConfigError("source_converter.v_bus_init must be non-negative");
    if (!(src.dt > 0.0)) throw ConfigError("source_converter.dt must be positive");
    if (src.duration && !(*src.duration >= src.dt)) {
        throw ConfigError("source_converter.duration must be at least one timestep");
    }
    if (src.window && !(*src.window > 0.0)) throw ConfigError("source_converter.window must be positive");
    if (!(s.resolved_window() <= s.resolved_duration())) {
        throw ConfigError("source_converter.window must not exceed the run duration");
    }
    if (!(s.log_interval > 0.0)) throw ConfigError("output.log_interval must be positive");

    const auto& steps = s.profile.steps;
    if (steps.empty()) throw ConfigError("profile.times must not be empty");
    if (steps.front().start != 0.0) throw ConfigError("profile.times must start at 0");
    for (std::size_t i = 0; i < steps.size(); ++i) {
        if (i > 0 && !(steps[i].start > steps[i - 1].start)) {
            throw ConfigError("profile.times must be strictly increasing");
        }
        if (!(steps[i].g >= 0.0)) throw ConfigError("profile.irradiance must be non-negative");
    }

    if (s.pmus.empty()) throw ConfigError("at least one [[pmu]] is required");
    for (std::size_t i = 0; i < s.pmus.size(); ++i) {
        try {
            converters::validate(s.pmus[i].pmu);
            storage::validate(s.pmus[i].battery);
        } catch (const ConfigError& e) {
            throw ConfigError("pmu #" + std::to_string(i + 1) + ": " + e.what());
        }
    }
}

Scenario parse_scenario_text(std::string_view text) {
    const std::vector<Table> tables = config::parse(text);
    Scenario s;
    std::vector<PmuSetup> pmus;
    std::vector<Preset> presets;
    std::vector<bool> has_battery;
    std::map<std::string, int> seen;

    for (const Table& t : tables) {
        const std::string where = "line " + std::to_string(t.line) + ": ";
        if (t.name.empty()) {
            KeyMap("scenario").custom("label", [&](const Entry& e) { s.label = as_string(e, "scenario"); }).apply(t);
            continue;
        }
        if (t.repeated) {
            if (t.name == "pmu") {
                presets.push_back(preset_of(t));
                pmus.push_back(preset_setup(presets.back(), storage::kReferenceCapacity));
                has_battery.push_back(false);
                apply_pmu(t, pmus.back().pmu);
            } else if (t.name == "pmu.battery") {
                if (pmus.empty()) throw ConfigError(where + "[[pmu.battery]] must follow a [[pmu]]");
                if (has_battery.back()) throw ConfigError(where + "a [[pmu]] takes a single [[pmu.battery]]");
                has_battery.back() = true;
                double capacity = storage::kReferenceCapacity;
                if (const Entry* e = find(t, "capacity")) capacity = as_number(*e, "pmu.battery");
                if (!(capacity > 0.0)) throw ConfigError(where + "pmu.battery.capacity must be positive");
                storage::BatteryConfig battery = preset_setup(presets.back(), capacity).battery;
                apply_battery(t, battery);
                pmus.back().battery = battery;
            } else {
                throw ConfigError(where + "unknown table [[" + t.name + "]]");
            }
            continue;
        }
        if (++seen[t.name] > 1) throw ConfigError(where + "duplicate table [" + t.name + "]");
        if (t.name == "pv") {
            apply_pv(t, s.pv);
        } else if (t.name == "mppt") {
            apply_mppt(t, s.mppt);
        } else if (t.name == "source_converter") {
            apply_source(t, s.source);
        } else if (t.name == "profile") {
            apply_profile(t, s.profile);
        } else if (t.name == "output") {
            KeyMap("output").number("log_interval", s.log_interval).apply(t);
        } else {
            throw ConfigError(where + "unknown table [" + t.name + "]");
        }
    }
    if (!pmus.empty()) s.pmus = std::move(pmus);
    validate(s);
    return s;
}

Scenario parse_scenario(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open scenario file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_scenario_text(buf.str());
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

std::string dump_scenario(const Scenario& s) {
    using config::format_number;
    std::ostringstream os;
    auto kv = [&](const char* key, double v) { os << key << " = " << format_number(v) << "\n"; };
    auto list = [&](const char* key, const std::vector<double>& v) {
        os << key << " = [";
        for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << format_number(v[i]);
        os << "]\n";
    };

    os << "label = " << config::quote(s.label) << "\n";

    os << "\n[pv]\n";
    kv("i_sc", s.pv.i_sc);
    kv("v_oc", s.pv.v_oc);
    kv("v_mp", s.pv.v_mp);
    kv("i_mp", s.pv.i_mp);
    kv("alpha_isc", s.pv.alpha_isc);
    kv("beta_voc", s.pv.beta_voc);
    os << "n_s = " << s.pv.n_s << "\n";

    os << "\n[mppt]\n";
    kv("d_init", s.mppt.d_init);
    kv("d_min", s.mppt.d_min);
    kv("d_max", s.mppt.d_max);
    kv("delta_d", s.mppt.delta_d);
    kv("sample_period", s.mppt.sample_period);
    os << "enabled = " << (s.mppt.enabled ? "true" : "false") << "\n";

    os << "\n[source_converter]\n";
    kv("epsilon", s.source.epsilon);
    kv("c_bus", s.source.c_bus);
    kv("v_bus_init", s.source.v_bus_init);
    kv("dt", s.source.dt);
    if (s.source.duration) {
        kv("duration", *s.source.duration);
    } else {
        os << "# duration (derived) = " << format_number(s.resolved_duration()) << "\n";
    }
    if (s.source.window) {
        kv("window", *s.source.window);
    } else {
        os << "# window (derived) = " << format_number(s.resolved_window()) << "\n";
    }

    os << "\n[profile]\n";
    std::vector<double> times;
    std::vector<double> levels;
    for (const auto& st : s.profile.steps) {
        times.push_back(st.start);
        levels.push_back(st.g);
    }
    list("times", times);
    list("irradiance", levels);
    kv("t_cell", s.profile.t_cell);

    os << "\n[output]\n";
    kv("log_interval", s.log_interval);

    for (const auto& p : s.pmus) {
        os << "\n[[pmu]]\n";
        kv("n", p.pmu.n);
        kv("duty", p.pmu.duty);
        kv("r_on", p.pmu.r_on);
        kv("r_d", p.pmu.r_d);
        kv("v_d", p.pmu.v_d);
        kv("f_sw", p.pmu.f_sw);
        kv("l_lk", p.pmu.l_lk);
        kv("l_out", p.pmu.l_out);
        kv("c_out", p.pmu.c_out);
        kv("rated_va", p.pmu.rated_va);
        os << "[[pmu.battery]]\n";
        kv("v_nominal", p.battery.v_nominal);
        kv("capacity", p.battery.capacity);
        kv("soc_init", p.battery.soc_init);
        kv("r_internal", p.battery.r_internal);
        kv("ocv_at_0", p.battery.ocv_at_0);
        kv("ocv_at_1", p.battery.ocv_at_1);
        kv("response_time", p.battery.response_time);
    }
    return os.str();
}

std::string battery_description(const Scenario& s) {
    std::string out;
    for (std::size_t i = 0; i < s.pmus.size(); ++i) {
        const auto& b = s.pmus[i].battery;
        if (i) out += " + ";
        out += format_capacity(b.v_nominal) + "V " + format_capacity(b.capacity) + "Ah";
    }
    return out;
}

}  // namespace microgrid
