#include "microgrid/pv.hpp"

#include <array>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>

namespace microgrid::pv {
namespace {

constexpr double kBoltzmannEv = 8.617333262e-5;  // eV/K
constexpr double kKelvin = 273.15;
constexpr double kBandGapRef = 1.121;            // eV, crystalline silicon
constexpr double kBandGapTempCoeff = -0.0002677; // 1/K

constexpr double kCurrentTol = 1e-9;  // A
constexpr int kMaxIterations = 200;

constexpr double kMinIdeality = 1.0;
constexpr double kMaxIdeality = 2.5;

std::string describe(double v, double g, double t_cell) {
    std::ostringstream os;
    os << "pv current solve did not converge at v=" << v << " V, g=" << g
       << " W/m^2, t_cell=" << t_cell << " degC";
    return os.str();
}

double thermal_voltage(double t_kelvin) { return kBoltzmannEv * t_kelvin; }

// Solves the 3x3 system given by the short-circuit, open-circuit and
// maximum-power points for (I_L, I_0, G_sh), with a and R_s held fixed.
std::optional<SingleDiodeParams> solve_linear_part(const PvDatasheet& ds, double a, double rs) {
    const std::array<std::array<double, 2>, 3> points{{
        {0.0, ds.i_sc},
        {ds.v_oc, 0.0},
        {ds.v_mp, ds.i_mp},
    }};
    // Rows: I_L - E*I_0 - U*G_sh = I
    double m[3][4];
    for (int r = 0; r < 3; ++r) {
        const double u = points[r][0] + points[r][1] * rs;
        m[r][0] = 1.0;
        m[r][1] = -std::expm1(u / a);
        m[r][2] = -u;
        m[r][3] = points[r][1];
    }
    for (int c = 0; c < 3; ++c) {
        int pivot = c;
        for (int r = c + 1; r < 3; ++r) {
            if (std::abs(m[r][c]) > std::abs(m[pivot][c])) pivot = r;
        }
        if (m[pivot][c] == 0.0) return std::nullopt;
        if (pivot != c) {
            for (int k = 0; k < 4; ++k) std::swap(m[c][k], m[pivot][k]);
        }
        for (int r = 0; r < 3; ++r) {
            if (r == c) continue;
            const double f = m[r][c] / m[c][c];
            for (int k = c; k < 4; ++k) m[r][k] -= f * m[c][k];
        }
    }
    SingleDiodeParams sd;
    sd.photocurrent = m[0][3] / m[0][0];
    sd.saturation_current = m[1][3] / m[1][1];
    sd.shunt_conductance = m[2][3] / m[2][2];
    sd.modified_ideality = a;
    sd.series_resistance = rs;
    if (!(sd.saturation_current > 0.0) || !(sd.shunt_conductance > 0.0)) return std::nullopt;
    return sd;
}

// dP/dV at the datasheet maximum-power point, scaled by 1/V_mp.
double mpp_slope(const PvDatasheet& ds, const SingleDiodeParams& sd) {
    const double u = ds.v_mp + ds.i_mp * sd.series_resistance;
    const double gd = sd.saturation_current / sd.modified_ideality * std::exp(u / sd.modified_ideality) +
                      sd.shunt_conductance;
    const double di_dv = -gd / (1.0 + sd.series_resistance * gd);
    return ds.i_mp + ds.v_mp * di_dv;
}

// Series resistance that makes the maximum-power point stationary.
std::optional<SingleDiodeParams> fit_at_ideality(const PvDatasheet& ds, double ideality) {
    const double a = ideality * ds.n_s * thermal_voltage(kReferenceCellTemp + kKelvin);
    // Upper bound: R_s cannot exceed the voltage drop budget (V_oc - V_mp)/I_mp.
    const double rs_max = (ds.v_oc - ds.v_mp) / ds.i_mp;
    constexpr int kScan = 400;

    std::optional<SingleDiodeParams> prev;
    double prev_rs = 0.0;
    for (int j = 0; j <= kScan; ++j) {
        const double rs = rs_max * j / kScan;
        auto sd = solve_linear_part(ds, a, rs);
        if (!sd) {
            prev.reset();
            continue;
        }
        if (prev && (mpp_slope(ds, *prev) > 0.0) != (mpp_slope(ds, *sd) > 0.0)) {
            double lo = prev_rs;
            double hi = rs;
            const bool lo_positive = mpp_slope(ds, *prev) > 0.0;
            for (int it = 0; it < kMaxIterations && hi - lo > 1e-13; ++it) {
                const double mid = 0.5 * (lo + hi);
                auto mid_sd = solve_linear_part(ds, a, mid);
                if (!mid_sd) return std::nullopt;
                if ((mpp_slope(ds, *mid_sd) > 0.0) == lo_positive) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return solve_linear_part(ds, a, 0.5 * (lo + hi));
        }
        prev = sd;
        prev_rs = rs;
    }
    return std::nullopt;
}

double open_circuit_voltage(const SingleDiodeParams& sd) {
    if (!(sd.photocurrent > 0.0)) return 0.0;
    auto residual = [&](double v) {
        return sd.photocurrent - sd.saturation_current * std::expm1(v / sd.modified_ideality) -
               v * sd.shunt_conductance;
    };
    double lo = 0.0;
    double hi = sd.modified_ideality * std::log1p(sd.photocurrent / sd.saturation_current);
    for (int it = 0; it < kMaxIterations && hi - lo > 1e-12 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (residual(mid) > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return lo;
}

double temperature_coefficient_error(const PvParams& params) {
    constexpr double kDelta = 1.0;
    const double hot = open_circuit_voltage(
        operating_parameters(params, kReferenceIrradiance, kReferenceCellTemp + kDelta));
    const double cold = open_circuit_voltage(
        operating_parameters(params, kReferenceIrradiance, kReferenceCellTemp - kDelta));
    return (hot - cold) / (2.0 * kDelta) - params.datasheet.beta_voc;
}

std::optional<PvParams> candidate(const PvDatasheet& ds, double ideality) {
    auto sd = fit_at_ideality(ds, ideality);
    if (!sd) return std::nullopt;
    return PvParams{ds, *sd, ideality};
}

}  // namespace

PvSolverError::PvSolverError(double v, double g, double t_cell)
    : SolverError(describe(v, g, t_cell)), v_(v), g_(g), t_cell_(t_cell) {}

PvParams fit_pv_params(const PvDatasheet& ds) {
    if (!(ds.i_sc > 0.0) || !(ds.v_oc > 0.0) || !(ds.v_mp > 0.0) || !(ds.i_mp > 0.0)) {
        throw ConfigError("pv: datasheet currents and voltages must be positive");
    }
    if (!(ds.v_mp < ds.v_oc)) throw ConfigError("pv: v_mp must be below v_oc");
    if (!(ds.i_mp < ds.i_sc)) throw ConfigError("pv: i_mp must be below i_sc");
    if (ds.n_s < 1) throw ConfigError("pv: n_s must be at least 1");

    // Scan the admissible ideality interval for a sign change of the Voc
    // temperature-coefficient error; fall back to the best endpoint.
    constexpr int kSteps = 150;
    std::optional<PvParams> best;
    double best_err = 0.0;
    std::optional<PvParams> prev;
    double prev_err = 0.0;
    for (int j = 0; j <= kSteps; ++j) {
        const double n = kMinIdeality + (kMaxIdeality - kMinIdeality) * j / kSteps;
        auto p = candidate(ds, n);
        if (!p) {
            prev.reset();
            continue;
        }
        const double err = temperature_coefficient_error(*p);
        if (prev && (prev_err > 0.0) != (err > 0.0)) {
            double lo = prev->ideality_factor;
            double hi = n;
            const bool lo_positive = prev_err > 0.0;
            for (int it = 0; it < 100 && hi - lo > 1e-10; ++it) {
                const double mid = 0.5 * (lo + hi);
                auto pm = candidate(ds, mid);
                if (!pm) break;
                if ((temperature_coefficient_error(*pm) > 0.0) == lo_positive) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            if (auto fitted = candidate(ds, 0.5 * (lo + hi))) {
                best = fitted;
                break;
            }
        }
        if (!best || std::abs(err) < std::abs(best_err)) {
            best = p;
            best_err = err;
        }
        prev = p;
        prev_err = err;
    }
    if (!best) throw ConfigError("pv: no single-diode parameter set matches the datasheet");
    if (!(best->reference.series_resistance > 0.0) || !(best->reference.shunt_conductance > 0.0)) {
        throw ConfigError("pv: fitted series and shunt resistances must be positive");
    }
    return *best;
}

const PvParams& spr315e_params() {
    static const PvParams params = fit_pv_params(PvDatasheet{});
    return params;
}

SingleDiodeParams operating_parameters(const PvParams& params, double g, double t_cell) {
    const double t_ref = kReferenceCellTemp + kKelvin;
    const double t = t_cell + kKelvin;
    const double ratio = g / kReferenceIrradiance;
    const double eg_ref = kBandGapRef;
    const double eg = kBandGapRef * (1.0 + kBandGapTempCoeff * (t - t_ref));

    const SingleDiodeParams& ref = params.reference;
    SingleDiodeParams sd;
    sd.photocurrent = ratio * (ref.photocurrent + params.datasheet.alpha_isc * (t - t_ref));
    sd.saturation_current = ref.saturation_current * std::pow(t / t_ref, 3) *
                            std::exp(eg_ref / (kBoltzmannEv * t_ref) - eg / (kBoltzmannEv * t));
    sd.modified_ideality = ref.modified_ideality * t / t_ref;
    sd.series_resistance = ref.series_resistance;
    sd.shunt_conductance = ref.shunt_conductance * ratio;
    return sd;
}

double pv_current(const SingleDiodeParams& sd, double v, double g, double t_cell) {
    auto residual = [&](double i) {
        const double u = v + i * sd.series_resistance;
        return sd.photocurrent - sd.saturation_current * std::expm1(u / sd.modified_ideality) -
               u * sd.shunt_conductance - i;
    };
    if (!(residual(0.0) > 0.0)) return 0.0;

    // residual is strictly decreasing in i and non-positive at i = I_L.
    double lo = 0.0;
    double hi = sd.photocurrent;
    for (int it = 0; it < kMaxIterations; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (residual(mid) > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo < kCurrentTol) return 0.5 * (lo + hi);
    }
    throw PvSolverError(v, g, t_cell);
}

double pv_current(const PvParams& params, double v, double g, double t_cell) {
    if (!(v >= 0.0)) throw DomainError("pv_current: voltage must be non-negative");
    if (!(g >= 0.0)) throw DomainError("pv_current: irradiance must be non-negative");
    return pv_current(operating_parameters(params, g, t_cell), v, g, t_cell);
}

double pv_open_circuit_voltage(const PvParams& params, double g, double t_cell) {
    if (!(g >= 0.0)) throw DomainError("pv_open_circuit_voltage: irradiance must be non-negative");
    return open_circuit_voltage(operating_parameters(params, g, t_cell));
}

PvOperatingPoint pv_mpp(const PvParams& params, double g, double t_cell) {
    if (!(g >= 0.0)) throw DomainError("pv_mpp: irradiance must be non-negative");
    PvOperatingPoint point{0.0, 0.0, 0.0, g, t_cell};
    if (g == 0.0) return point;

    const SingleDiodeParams sd = operating_parameters(params, g, t_cell);
    auto power = [&](double v) { return v * pv_current(sd, v, g, t_cell); };

    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = 0.0;
    double hi = open_circuit_voltage(sd);
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    double f1 = power(x1);
    double f2 = power(x2);
    while (hi - lo > 1e-7) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = power(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = power(x1);
        }
    }
    point.v = 0.5 * (lo + hi);
    point.i = pv_current(sd, point.v, g, t_cell);
    point.p = point.v * point.i;
    return point;
}

}  // namespace microgrid::pv
