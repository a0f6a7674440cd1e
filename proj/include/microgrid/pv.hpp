#pragma once

// Five-parameter single-diode photovoltaic module model.
//
// The reference-condition parameters are fitted from datasheet values and
// translated to operating irradiance and cell temperature with the usual
// De Soto relations: photocurrent scales with irradiance and the current
// temperature coefficient, saturation current follows the silicon band-gap
// law, the modified ideality factor scales with absolute temperature and the
// shunt resistance scales inversely with irradiance.

#include "microgrid/errors.hpp"

namespace microgrid::pv {

inline constexpr double kReferenceIrradiance = 1000.0;  // W/m^2
inline constexpr double kReferenceCellTemp = 25.0;      // degC

/// Manufacturer datasheet values at standard test conditions.
struct PvDatasheet {
    double i_sc = 6.14;        // A
    double v_oc = 64.6;        // V
    double v_mp = 54.7;        // V
    double i_mp = 5.76;        // A
    double alpha_isc = 0.0035; // A/degC
    double beta_voc = -0.1766; // V/degC
    int n_s = 96;              // series cells

    bool operator==(const PvDatasheet&) const = default;
};

/// Single-diode equation parameters at one operating condition.
///
///   I = I_L - I_0 * (exp((V + I*R_s) / a) - 1) - (V + I*R_s) * G_sh
///
/// `modified_ideality` is a = n * N_s * k * T / q in volts. The shunt path is
/// stored as a conductance so that the dark (zero irradiance) case stays
/// finite.
struct SingleDiodeParams {
    double photocurrent = 0.0;        // A
    double saturation_current = 0.0;  // A
    double modified_ideality = 0.0;   // V
    double series_resistance = 0.0;   // ohm
    double shunt_conductance = 0.0;   // S

    double shunt_resistance() const { return 1.0 / shunt_conductance; }
};

/// Datasheet plus the fitted reference parameters.
struct PvParams {
    PvDatasheet datasheet;
    SingleDiodeParams reference;
    double ideality_factor = 1.0;  // dimensionless diode ideality n
};

struct PvOperatingPoint {
    double v = 0.0;       // V
    double i = 0.0;       // A
    double p = 0.0;       // W, always v * i
    double g = 0.0;       // W/m^2
    double t_cell = 0.0;  // degC
};

/// Raised when the bracketed current solve does not converge.
class PvSolverError : public SolverError {
public:
    PvSolverError(double v, double g, double t_cell);

    double voltage() const noexcept { return v_; }
    double irradiance() const noexcept { return g_; }
    double cell_temperature() const noexcept { return t_cell_; }

private:
    double v_;
    double g_;
    double t_cell_;
};

/// Fits the five reference parameters to a datasheet.
///
/// For each trial ideality factor the photocurrent, saturation current and
/// shunt conductance follow linearly from the short-circuit, open-circuit and
/// maximum-power points; the series resistance is then chosen so that the
/// maximum-power point is a stationary point of the power curve. The ideality
/// factor is finally picked in [1, 2.5] to reproduce the open-circuit voltage
/// temperature coefficient, or clamped to the closest bound when that
/// coefficient is not reachable inside the interval.
///
/// Throws ConfigError when the datasheet is inconsistent or the fit leaves a
/// non-positive resistance.
PvParams fit_pv_params(const PvDatasheet& datasheet);

/// Fitted SunPower SPR-315E-WHT-D parameters (the default module).
const PvParams& spr315e_params();

/// Translates the reference parameters to irradiance `g` and cell temperature
/// `t_cell`.
SingleDiodeParams operating_parameters(const PvParams& params, double g, double t_cell);

/// Terminal current at terminal voltage `v`. Voltages at or above the open
/// circuit voltage return 0 (the array never sinks current).
double pv_current(const PvParams& params, double v, double g, double t_cell);

/// Same solve with already translated parameters; `g` and `t_cell` are only
/// used for error reporting.
double pv_current(const SingleDiodeParams& sd, double v, double g, double t_cell);

double pv_open_circuit_voltage(const PvParams& params, double g, double t_cell);

/// Maximum power point found by golden-section search over [0, v_oc].
/// Zero irradiance yields the all-zero point.
PvOperatingPoint pv_mpp(const PvParams& params, double g, double t_cell);

}  // namespace microgrid::pv
