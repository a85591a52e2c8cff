#pragma once

#include "agecharge/battery/interp.hpp"

namespace agecharge::battery {

/// Activation energies (J/mol) for the Arrhenius-corrected parameters.
struct ActivationEnergies {
    double D_s_pos = 0.0;
    double D_s_neg = 0.0;
    double kappa_eff = 0.0;
    double k_pos = 0.0;
    double k_neg = 0.0;
    double k_SEI = 0.0;
    double D_EC = 0.0;
    double k_LP = 0.0;
};

/// Physical, geometric and kinetic constants of the SPMeT + aging model.
/// All values are per unit electrode cross-section area where applicable (SI units).
struct BatteryParams {
    // geometry
    double R_s_pos = 0.0, R_s_neg = 0.0;              // particle radius, m
    double L_pos = 0.0, L_neg = 0.0, L_sep = 0.0;     // region thickness, m

    // transport and volume fractions
    double D_s_pos = 0.0, D_s_neg = 0.0;              // m^2/s at T_ref
    double eps_e_pos = 0.0, eps_e_neg = 0.0, eps_e_sep = 0.0;
    double eps_s_pos = 0.0, eps_s_neg = 0.0;          // active material volume fraction
    double t_c0 = 0.0;
    double brugg = 1.5;

    // intercalation kinetics
    double k_pos = 0.0, k_neg = 0.0;
    double alpha = 0.5, alpha_a = 0.5, alpha_c = 0.5;
    double R_f_pos = 0.0, R_f_neg = 0.0;              // Ohm m^2

    // concentrations
    double c_s_max_pos = 0.0, c_s_max_neg = 0.0;      // mol/m^3
    double c_e0 = 0.0;                                // nominal electrolyte concentration
    double n_li = 0.0;                                // cyclable lithium in both solids, mol/m^2

    double F = 96485.33212;
    double R_gas = 8.314462618;

    // lumped thermal
    double rho_jel = 0.0, rho_can = 0.0;              // kg/m^2
    double cp_jel = 0.0, cp_can = 0.0;                // J/(kg K)
    double h_jel_can = 0.0, h_can_amb = 0.0;          // W/(m^2 K)
    double T_amb = 298.15, T_ref = 298.15;

    // side reactions
    double c_EC0 = 0.0;
    double D_EC = 0.0;
    double k_SEI = 0.0;                               // zero disables SEI growth
    double k_LP = 0.0;                                // zero disables plating
    double alpha_c_SEI = 0.5, alpha_a_LP = 0.5, alpha_c_LP = 0.5;
    double U_SEI = 0.4;
    double c_e_ref = 1.0;
    double M_SEI = 0.0, rho_SEI = 0.0, M_Li = 0.0, rho_Li = 0.0;
    double delta_film0 = 0.0;                         // m

    ActivationEnergies E_act;

    double ocv_soc0 = 3.0, ocv_soc100 = 4.2;

    /// Specific interfacial area 3 eps_s / R_s, 1/m.
    double a_pos() const { return 3.0 * eps_s_pos / R_s_pos; }
    double a_neg() const { return 3.0 * eps_s_neg / R_s_neg; }

    /// Throws ConfigError naming the first violated invariant.
    void validate() const;
};

/// Property functions supplied as tables.
struct FunctionTable {
    MonotoneCubic U_pos;      // V vs cathode stoichiometry
    MonotoneCubic U_neg;      // V vs anode stoichiometry
    MonotoneCubic dU_dT_pos;  // V/K vs stoichiometry
    MonotoneCubic dU_dT_neg;
    MonotoneCubic D_e;        // m^2/s vs c_e
    MonotoneCubic kappa;      // S/m vs c_e
    MonotoneCubic activity;   // 1 + dln f / dln c, vs c_e

    /// Checks OCP monotonicity (both decreasing in stoichiometry, so OCV rises with SOC)
    /// and positivity of the electrolyte property tables.
    void validate() const;
};

/// x_ref * exp(E_act / R * (1/T_ref - 1/T)).
double arrhenius_correct(double x_ref, double E_act, double T, double T_ref, double R_gas = 8.314462618);

}  // namespace agecharge::battery
