#pragma once

#include <array>
#include <utility>
#include <vector>

#include "agecharge/battery/params.hpp"

namespace agecharge::battery {

/// Discretisation controls. Solid particles use n_r uniform radial shells; the
/// electrolyte uses n_x finite-volume cells in each of anode, separator and cathode.
struct SimOptions {
    int n_r = 16;
    int n_x = 16;
    double substep_max = 1.0;  // s, upper bound on the internal substep
};

/// Solid concentrations bounding the SOC window, mol/m^3.
struct SocWindow {
    double c_pos_soc0 = 0.0;
    double c_pos_soc100 = 0.0;
    double c_neg_soc0 = 0.0;
    double c_neg_soc100 = 0.0;
};

struct BatteryState {
    std::vector<double> c_s_pos;  // shell averages, centre to surface
    std::vector<double> c_s_neg;
    std::vector<double> c_e;      // anode collector -> separator -> cathode collector
    double T_jel = 0.0;
    double T_can = 0.0;
    double delta_film = 0.0;
    double q_SEI = 0.0;           // cumulative, mol/m^2, non-increasing
    double q_LP = 0.0;
    double t_elapsed = 0.0;
};

/// Outputs of one control interval. V, soc and temperatures are taken at the end of
/// the interval; the fluxes are integrated over it.
struct StepOutput {
    double V = 0.0;
    double soc = 0.0;
    double J_SEI_int = 0.0;  // mol/m^2
    double J_LP_int = 0.0;
    double T_jel = 0.0;
    double T_can = 0.0;
};

/// Electrolyte concentrations at region boundaries plus region means.
struct ElectrolyteProfile {
    double c_neg_cc = 0.0;    // c_e(0-)
    double c_neg_sep = 0.0;   // c_e(L-) = c_e(0sep)
    double c_sep_pos = 0.0;   // c_e(Lsep) = c_e(L+)
    double c_pos_cc = 0.0;    // c_e(0+)
    std::array<double, 3> mean{};  // anode, separator, cathode
};

/// Everything the voltage and side-reaction expressions need at one instant.
struct Kinetics {
    double T = 0.0;
    double D_s_pos = 0.0, D_s_neg = 0.0;
    double css_pos = 0.0, css_neg = 0.0;
    double i0_pos = 0.0, i0_neg = 0.0;
    double eta_pos = 0.0;
    double eta_int_neg = 0.0;
    double U_pos_surf = 0.0, U_neg_surf = 0.0;
    double kappa_eff_pos = 0.0, kappa_eff_sep = 0.0, kappa_eff_neg = 0.0;
    ElectrolyteProfile electrolyte;
    double V = 0.0;
    double J_SEI = 0.0;
    double J_LP = 0.0;
};

/// Concentration endpoints where U_pos - U_neg hits the two OCV limits, with the two
/// stoichiometries tied by the cyclable lithium inventory n_li. Throws NoRootError when
/// an endpoint is outside the achievable OCV range.
SocWindow soc_window(const BatteryParams& p, const FunctionTable& f);

/// Stoichiometries (theta_neg, theta_pos) at which the equilibrium OCV equals `ocv`.
std::pair<double, double> equilibrium_stoichiometry(const BatteryParams& p, const FunctionTable& f, double ocv);

/// Areal current that moves the full SOC window in one hour, A/m^2, from the anode side.
/// Throws ConfigError if the anode and cathode expressions disagree by more than 1%.
double i_1crate(const BatteryParams& p, const SocWindow& w);

/// SPMeT with SEI growth and lithium plating. Immutable after construction; every
/// method is a pure function of its arguments, so one model can serve many threads.
class BatteryModel {
public:
    BatteryModel(BatteryParams params, FunctionTable funcs, SimOptions opts = {});

    const BatteryParams& params() const { return p_; }
    const FunctionTable& functions() const { return f_; }
    const SimOptions& options() const { return opts_; }
    const SocWindow& window() const { return window_; }
    double i_1c() const { return i_1c_; }

    BatteryState init_equilibrium(double ocv0, double T0) const;

    /// Advances one control interval of length dt at constant current density I
    /// (positive = charge). Throws NumericalError on blow-up.
    std::pair<BatteryState, StepOutput> step(const BatteryState& s, double I, double dt) const;

    Kinetics kinetics(const BatteryState& s, double I) const;
    double voltage(const BatteryState& s, double I) const;
    double sei_flux(const BatteryState& s, double I) const;
    double lp_flux(const BatteryState& s, double I) const;

    double soc(const BatteryState& s) const;
    double soc_cathode(const BatteryState& s) const;
    /// U_pos - U_neg at the volume-averaged stoichiometries.
    double ocv_bulk(const BatteryState& s) const;

    double mean_c_s_pos(const BatteryState& s) const;
    double mean_c_s_neg(const BatteryState& s) const;
    /// eps_s * L * mean concentration, mol/m^2.
    double anode_lithium(const BatteryState& s) const;
    double cathode_lithium(const BatteryState& s) const;
    /// Porosity-weighted integral of c_e over all three regions, mol/m^2.
    double electrolyte_lithium(const BatteryState& s) const;
    ElectrolyteProfile electrolyte_profile(const BatteryState& s) const;

    /// Throws NumericalError if the state is non-finite or out of physical bounds.
    void check_state(const BatteryState& s) const;

private:
    void substep(BatteryState& s, double I, double h, double& J_SEI_int, double& J_LP_int) const;
    double surface_conc(const std::vector<double>& c, double flux, double D, double R) const;

    BatteryParams p_;
    FunctionTable f_;
    SimOptions opts_;
    SocWindow window_;
    double i_1c_ = 0.0;

    // radial shell geometry in units of dr: volumes and outer-face areas
    std::vector<double> shell_vol_;
    std::vector<double> shell_area_;
    // electrolyte cell widths and porosities
    std::vector<double> cell_w_;
    std::vector<double> cell_eps_;
    std::vector<double> cell_src_;  // source per unit current, mol/(m^2 s) per A/m^2
};

}  // namespace agecharge::battery
