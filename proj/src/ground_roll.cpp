#include "elfkit/ground_roll.hpp"

#include <cmath>
#include <stdexcept>

namespace elfkit {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_inputs(const AircraftConfig& c, const Atmosphere& atm, double alpha) {
    if (!(c.mass_kg > 0.0) || !(c.wing_area_m2 > 0.0) || !(c.wing_span_m > 0.0) ||
        !(c.ld_max > 0.0) || !(c.reaction_time_s > 0.0)) {
        throw std::invalid_argument("ground roll: aircraft parameters must be positive");
    }
    if (!(c.mu > 0.0) || c.mu > 1.0) {
        throw std::invalid_argument("ground roll: mu must lie in (0, 1]");
    }
    if (!(c.touchdown_speed_ms > 0.0)) {
        throw std::invalid_argument("ground roll: touchdown speed must be positive");
    }
    if (c.thrust_n < 0.0) {
        throw std::invalid_argument("ground roll: thrust must be non-negative");
    }
    if (!(atm.rho > 0.0) || !(atm.g > 0.0)) {
        throw std::invalid_argument("ground roll: atmosphere parameters must be positive");
    }
    if (!(std::abs(alpha) < kPi / 2.0)) {
        throw std::invalid_argument("ground roll: |alpha| must be below pi/2");
    }
}

}  // namespace

AircraftConfig da20_c1() {
    AircraftConfig c;
    c.mass_kg = 800.0;
    c.wing_area_m2 = 11.6;
    c.wing_span_m = 10.89;
    c.ld_max = 11.0;
    c.mu = 0.2;  // soft turf, brakes on
    c.reaction_time_s = 3.0;
    c.touchdown_speed_ms = 21.298;  // 1.15 * V_stall at zero bank
    c.thrust_n = 0.0;
    return c;
}

AeroConstants derive_aero(const AircraftConfig& config, const Atmosphere& atm, double alpha) {
    check_inputs(config, atm, alpha);
    AeroConstants k;
    k.aspect_ratio = config.wing_span_m * config.wing_span_m / config.wing_area_m2;
    k.oswald_e = 1.78 * (1.0 - 0.045 * std::pow(k.aspect_ratio, 0.68)) - 0.64;
    if (!(k.oswald_e > 0.0)) {
        throw std::invalid_argument("ground roll: Oswald factor is non-positive for this wing");
    }
    k.drag_due_to_lift_k = 1.0 / (kPi * k.aspect_ratio * k.oswald_e);
    k.cd0 = 1.0 / ((2.0 * config.ld_max) * (2.0 * config.ld_max) * k.drag_due_to_lift_k);
    k.dynamic_pressure_pa =
        0.5 * atm.rho * config.touchdown_speed_ms * config.touchdown_speed_ms;
    const double weight = config.mass_kg * atm.g;
    k.cl = weight / (k.dynamic_pressure_pa * config.wing_area_m2);
    k.kt = config.thrust_n / weight - std::sin(alpha) - config.mu * std::cos(alpha);
    k.ka = atm.rho * config.wing_area_m2 / (2.0 * weight) *
           (config.mu * k.cl - k.cd0 - k.drag_due_to_lift_k * k.cl * k.cl);
    return k;
}

namespace {

// Deceleration at every speed up to touchdown needs both the V = 0 term
// and the V = V_td term of a(V) = g * (K_T + K_A V^2) negative; that also
// keeps the log argument positive. A steep downslope (K_T >= 0) or lift
// unloading the wheels faster than drag brakes fails here.
void check_stopping(const AeroConstants& k, double v2) {
    if (k.ka == 0.0) {
        throw std::domain_error("ground roll: K_A is zero");
    }
    const double log_arg = k.kt / (k.kt + k.ka * v2);
    if (!(k.kt < 0.0) || !(k.kt + k.ka * v2 < 0.0) || !std::isfinite(log_arg)) {
        throw std::domain_error("non-stopping configuration");
    }
}

}  // namespace

double ground_roll_distance(const AircraftConfig& config, const Atmosphere& atm, double alpha) {
    const AeroConstants k = derive_aero(config, atm, alpha);
    const double v2 = config.touchdown_speed_ms * config.touchdown_speed_ms;
    check_stopping(k, v2);
    const double free_roll = config.touchdown_speed_ms * config.reaction_time_s;
    return free_roll + std::log(k.kt / (k.kt + k.ka * v2)) / (2.0 * atm.g * k.ka);
}

double ground_roll_alpha_gradient(const AircraftConfig& config, const Atmosphere& atm,
                                  double alpha) {
    const AeroConstants k = derive_aero(config, atm, alpha);
    const double v2 = config.touchdown_speed_ms * config.touchdown_speed_ms;
    check_stopping(k, v2);
    const double dkt = -std::cos(alpha) + config.mu * std::sin(alpha);
    return dkt * (1.0 / k.kt - 1.0 / (k.kt + k.ka * v2)) / (2.0 * atm.g * k.ka);
}

double required_length(double ground_roll_m, double surface_factor, double slope_pct) {
    if (!(ground_roll_m > 0.0)) {
        throw std::invalid_argument("required length: ground roll must be positive");
    }
    if (surface_factor < 1.0) {
        throw std::invalid_argument("required length: surface factor must be at least 1");
    }
    const double downslope_factor = slope_pct < 0.0 ? 1.0 + 0.05 * std::abs(slope_pct) : 1.0;
    return ground_roll_m * surface_factor * downslope_factor;
}

}  // namespace elfkit
