#pragma once

namespace elfkit {

/// Aircraft and landing assumptions for the ground-roll model.
struct AircraftConfig {
    double mass_kg = 0.0;
    double wing_area_m2 = 0.0;
    double wing_span_m = 0.0;
    double ld_max = 0.0;           // best lift-to-drag ratio
    double mu = 0.0;               // rolling friction, brakes applied
    double reaction_time_s = 0.0;  // free roll before braking
    double touchdown_speed_ms = 0.0;
    double thrust_n = 0.0;         // 0 in an emergency
};

struct Atmosphere {
    double rho = 1.225;  // kg/m^3
    double g = 9.807;    // m/s^2
};

/// Constants of the deceleration model a(V) = g * (K_T + K_A * V^2),
/// derived from the aircraft geometry and the touchdown state.
struct AeroConstants {
    double aspect_ratio = 0.0;
    double oswald_e = 0.0;
    double drag_due_to_lift_k = 0.0;
    double cd0 = 0.0;
    double dynamic_pressure_pa = 0.0;
    double cl = 0.0;
    double kt = 0.0;  // thrust/slope/friction term
    double ka = 0.0;  // aerodynamic term, 1/(m^2/s^2)
};

/// EASA surface-condition runway factors: grass on firm soil, and very
/// short wet grass on firm subsoil.
inline constexpr double kGrassFirmFactor = 1.15;
inline constexpr double kWetShortGrassFactor = 1.6;

/// The Diamond DA20-C1 assumption set used throughout.
AircraftConfig da20_c1();

/// Derives the aerodynamic constants for a field inclined by alpha
/// (radians, uphill positive in the landing direction).
AeroConstants derive_aero(const AircraftConfig& config, const Atmosphere& atm, double alpha);

/// Ground roll from touchdown to standstill: free roll V_td * t_r plus the
/// braked roll 1/(2 g K_A) * ln(K_T / (K_T + K_A V_td^2)). Throws
/// std::domain_error("non-stopping configuration") when the deceleration
/// model never brings the aircraft to rest.
double ground_roll_distance(const AircraftConfig& config, const Atmosphere& atm, double alpha);

/// Analytic d s_g / d alpha of the expression above.
double ground_roll_alpha_gradient(const AircraftConfig& config, const Atmosphere& atm,
                                  double alpha);

/// Minimum required field length: ground roll times the surface factor,
/// further stretched by 5% per 1% of downslope. slope_pct must be the
/// landing-direction slope that alpha was computed from.
double required_length(double ground_roll_m, double surface_factor, double slope_pct);

}  // namespace elfkit
