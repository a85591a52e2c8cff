#include "agecharge/battery/params.hpp"

#include <cmath>
#include <string>

#include "agecharge/common/errors.hpp"

namespace agecharge::battery {

namespace {

void require_positive(double v, const char* key) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(key, "must be strictly positive, got " + std::to_string(v));
}

void require_nonneg(double v, const char* key) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError(key, "must be non-negative, got " + std::to_string(v));
}

void require_open_unit(double v, const char* key) {
    if (!(v > 0.0 && v < 1.0)) throw ConfigError(key, "must lie in (0, 1), got " + std::to_string(v));
}

void require_transfer(double v, const char* key) {
    if (!(v > 0.0 && v <= 1.0)) throw ConfigError(key, "transfer coefficient must lie in (0, 1], got " + std::to_string(v));
}

void require_decreasing(const MonotoneCubic& f, const char* key) {
    auto y = f.ys();
    for (std::size_t i = 0; i + 1 < y.size(); ++i) {
        if (!(y[i + 1] < y[i])) throw ConfigError(key, "open-circuit potential must be strictly decreasing in stoichiometry");
    }
}

void require_positive_table(const MonotoneCubic& f, const char* key) {
    if (f.empty()) throw ConfigError(key, "table missing");
    for (double v : f.ys()) {
        if (!(v > 0.0)) throw ConfigError(key, "table values must be strictly positive");
    }
}

}  // namespace

void BatteryParams::validate() const {
    require_positive(R_s_pos, "R_s_pos");
    require_positive(R_s_neg, "R_s_neg");
    require_positive(L_pos, "L_pos");
    require_positive(L_neg, "L_neg");
    require_positive(L_sep, "L_sep");
    require_positive(D_s_pos, "D_s_pos");
    require_positive(D_s_neg, "D_s_neg");
    require_open_unit(eps_e_pos, "eps_e_pos");
    require_open_unit(eps_e_neg, "eps_e_neg");
    require_open_unit(eps_e_sep, "eps_e_sep");
    require_open_unit(eps_s_pos, "eps_s_pos");
    require_open_unit(eps_s_neg, "eps_s_neg");
    if (eps_e_pos + eps_s_pos > 1.0 + 1e-12) throw ConfigError("eps_s_pos", "eps_e_pos + eps_s_pos must not exceed 1");
    if (eps_e_neg + eps_s_neg > 1.0 + 1e-12) throw ConfigError("eps_s_neg", "eps_e_neg + eps_s_neg must not exceed 1");
    require_open_unit(t_c0, "t_c0");
    require_positive(brugg, "brugg");
    require_positive(k_pos, "k_pos");
    require_positive(k_neg, "k_neg");
    require_transfer(alpha, "alpha");
    require_transfer(alpha_a, "alpha_a");
    require_transfer(alpha_c, "alpha_c");
    require_nonneg(R_f_pos, "R_f_pos");
    require_nonneg(R_f_neg, "R_f_neg");
    require_positive(c_s_max_pos, "c_s_max_pos");
    require_positive(c_s_max_neg, "c_s_max_neg");
    require_positive(c_e0, "c_e0");
    require_positive(n_li, "n_li");
    require_positive(F, "F");
    require_positive(R_gas, "R_gas");
    require_positive(rho_jel, "rho_jel");
    require_positive(rho_can, "rho_can");
    require_positive(cp_jel, "cp_jel");
    require_positive(cp_can, "cp_can");
    require_positive(h_jel_can, "h_jel_can");
    require_positive(h_can_amb, "h_can_amb");
    require_positive(T_amb, "T_amb");
    require_positive(T_ref, "T_ref");
    require_positive(c_EC0, "c_EC0");
    require_positive(D_EC, "D_EC");
    require_nonneg(k_SEI, "k_SEI");
    require_nonneg(k_LP, "k_LP");
    require_transfer(alpha_c_SEI, "alpha_c_SEI");
    require_transfer(alpha_a_LP, "alpha_a_LP");
    require_transfer(alpha_c_LP, "alpha_c_LP");
    require_positive(c_e_ref, "c_e_ref");
    require_positive(M_SEI, "M_SEI");
    require_positive(rho_SEI, "rho_SEI");
    require_positive(M_Li, "M_Li");
    require_positive(rho_Li, "rho_Li");
    require_positive(delta_film0, "delta_film0");
    if (!(ocv_soc0 < ocv_soc100)) throw ConfigError("ocv_soc100", "ocv_soc0 must be below ocv_soc100");
    const double li_cap = eps_s_neg * L_neg * c_s_max_neg + eps_s_pos * L_pos * c_s_max_pos;
    if (n_li >= li_cap) throw ConfigError("n_li", "cyclable lithium exceeds the combined solid capacity");
}

void FunctionTable::validate() const {
    if (U_pos.empty()) throw ConfigError("U_pos", "table missing");
    if (U_neg.empty()) throw ConfigError("U_neg", "table missing");
    if (dU_dT_pos.empty()) throw ConfigError("dU_dT_pos", "table missing");
    if (dU_dT_neg.empty()) throw ConfigError("dU_dT_neg", "table missing");
    require_decreasing(U_pos, "U_pos");
    require_decreasing(U_neg, "U_neg");
    require_positive_table(D_e, "D_e");
    require_positive_table(kappa, "kappa");
    require_positive_table(activity, "activity");
}

double arrhenius_correct(double x_ref, double E_act, double T, double T_ref, double R_gas) {
    return x_ref * std::exp(E_act / R_gas * (1.0 / T_ref - 1.0 / T));
}

}  // namespace agecharge::battery
