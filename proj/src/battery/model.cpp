#include "agecharge/battery/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/tools/roots.hpp>

#include "agecharge/common/errors.hpp"

namespace agecharge::battery {

namespace {

// Solves a tridiagonal system in place. lower[0] and upper[n-1] are ignored.
void thomas(std::vector<double>& lower, std::vector<double>& diag, std::vector<double>& upper,
            std::vector<double>& rhs) {
    const std::size_t n = diag.size();
    for (std::size_t i = 1; i < n; ++i) {
        const double m = lower[i] / diag[i - 1];
        diag[i] -= m * upper[i - 1];
        rhs[i] -= m * rhs[i - 1];
    }
    rhs[n - 1] /= diag[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) rhs[i] = (rhs[i] - upper[i] * rhs[i + 1]) / diag[i];
}

double mean_over_shells(const std::vector<double>& c, const std::vector<double>& vol) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        num += vol[i] * c[i];
        den += vol[i];
    }
    return num / den;
}

struct StoichRange {
    double lo, hi;
};

// theta_pos as a function of theta_neg at fixed lithium inventory
double theta_pos_of(const BatteryParams& p, double theta_neg) {
    const double q_neg = p.eps_s_neg * p.L_neg * p.c_s_max_neg;
    const double q_pos = p.eps_s_pos * p.L_pos * p.c_s_max_pos;
    return (p.n_li - q_neg * theta_neg) / q_pos;
}

StoichRange admissible_theta_neg(const BatteryParams& p, const FunctionTable& f) {
    const double q_neg = p.eps_s_neg * p.L_neg * p.c_s_max_neg;
    const double q_pos = p.eps_s_pos * p.L_pos * p.c_s_max_pos;
    // theta_pos within the U_pos table maps to a theta_neg interval
    double lo = std::max(f.U_neg.x_min(), (p.n_li - q_pos * f.U_pos.x_max()) / q_neg);
    double hi = std::min(f.U_neg.x_max(), (p.n_li - q_pos * f.U_pos.x_min()) / q_neg);
    return {lo, hi};
}

}  // namespace

std::pair<double, double> equilibrium_stoichiometry(const BatteryParams& p, const FunctionTable& f, double ocv) {
    const auto range = admissible_theta_neg(p, f);
    if (!(range.hi > range.lo)) throw NoRootError("no admissible stoichiometry range for the lithium inventory");
    auto resid = [&](double th) { return f.U_pos(theta_pos_of(p, th)) - f.U_neg(th) - ocv; };
    const double r_lo = resid(range.lo);
    const double r_hi = resid(range.hi);
    if (r_lo > 0.0 || r_hi < 0.0) {
        throw NoRootError("OCV " + std::to_string(ocv) + " V outside achievable range [" +
                          std::to_string(r_lo + ocv) + ", " + std::to_string(r_hi + ocv) + "] V");
    }
    std::uintmax_t iters = 200;
    auto [a, b] = boost::math::tools::toms748_solve(resid, range.lo, range.hi, r_lo, r_hi,
                                                    boost::math::tools::eps_tolerance<double>(52), iters);
    double th = 0.5 * (a + b);
    if (std::abs(resid(th)) >= 1e-6) {
        th = std::abs(resid(a)) < std::abs(resid(b)) ? a : b;
        if (std::abs(resid(th)) >= 1e-6) throw NoRootError("OCV root did not converge");
    }
    return {th, theta_pos_of(p, th)};
}

SocWindow soc_window(const BatteryParams& p, const FunctionTable& f) {
    const auto [n0, p0] = equilibrium_stoichiometry(p, f, p.ocv_soc0);
    const auto [n1, p1] = equilibrium_stoichiometry(p, f, p.ocv_soc100);
    return {p0 * p.c_s_max_pos, p1 * p.c_s_max_pos, n0 * p.c_s_max_neg, n1 * p.c_s_max_neg};
}

double i_1crate(const BatteryParams& p, const SocWindow& w) {
    const double neg = p.F * p.eps_s_neg * p.L_neg * (w.c_neg_soc100 - w.c_neg_soc0) / 3600.0;
    const double pos = p.F * p.eps_s_pos * p.L_pos * (w.c_pos_soc0 - w.c_pos_soc100) / 3600.0;
    if (!(neg > 0.0)) throw ConfigError("n_li", "SOC window has non-positive anode span");
    if (std::abs(neg - pos) > 0.01 * std::abs(neg)) {
        throw ConfigError("eps_s_pos", "anode (" + std::to_string(neg) + ") and cathode (" + std::to_string(pos) +
                                           ") 1C current densities disagree by more than 1%");
    }
    return neg;
}

BatteryModel::BatteryModel(BatteryParams params, FunctionTable funcs, SimOptions opts)
    : p_(std::move(params)), f_(std::move(funcs)), opts_(opts) {
    p_.validate();
    f_.validate();
    if (opts_.n_r < 2) throw ConfigError("n_r", "need at least 2 radial shells");
    if (opts_.n_x < 2) throw ConfigError("n_x", "need at least 2 cells per region");
    if (!(opts_.substep_max > 0.0)) throw ConfigError("substep_max", "must be positive");
    window_ = soc_window(p_, f_);
    i_1c_ = i_1crate(p_, window_);

    const auto nr = static_cast<std::size_t>(opts_.n_r);
    shell_vol_.resize(nr);
    shell_area_.resize(nr);
    for (std::size_t i = 0; i < nr; ++i) {
        const double lo = static_cast<double>(i);
        const double hi = lo + 1.0;
        shell_vol_[i] = (hi * hi * hi - lo * lo * lo) / 3.0;
        shell_area_[i] = hi * hi;
    }

    const auto nx = static_cast<std::size_t>(opts_.n_x);
    const double src = (1.0 - p_.t_c0) / p_.F;
    for (int region = 0; region < 3; ++region) {
        const double L = region == 0 ? p_.L_neg : region == 1 ? p_.L_sep : p_.L_pos;
        const double eps = region == 0 ? p_.eps_e_neg : region == 1 ? p_.eps_e_sep : p_.eps_e_pos;
        const double sign = region == 0 ? -1.0 : region == 1 ? 0.0 : 1.0;
        for (std::size_t k = 0; k < nx; ++k) {
            cell_w_.push_back(L / static_cast<double>(nx));
            cell_eps_.push_back(eps);
            cell_src_.push_back(sign * src / L);
        }
    }
}

BatteryState BatteryModel::init_equilibrium(double ocv0, double T0) const {
    if (!(ocv0 >= p_.ocv_soc0 && ocv0 <= p_.ocv_soc100)) {
        throw NoRootError("initial OCV " + std::to_string(ocv0) + " V outside the SOC window");
    }
    if (!(T0 > 0.0)) throw ConfigError("T0", "initial temperature must be positive");
    const auto [th_n, th_p] = equilibrium_stoichiometry(p_, f_, ocv0);
    BatteryState s;
    s.c_s_pos.assign(static_cast<std::size_t>(opts_.n_r), th_p * p_.c_s_max_pos);
    s.c_s_neg.assign(static_cast<std::size_t>(opts_.n_r), th_n * p_.c_s_max_neg);
    s.c_e.assign(cell_w_.size(), p_.c_e0);
    s.T_jel = T0;
    s.T_can = T0;
    s.delta_film = p_.delta_film0;
    return s;
}

double BatteryModel::surface_conc(const std::vector<double>& c, double flux, double D, double R) const {
    const double dr = R / static_cast<double>(opts_.n_r);
    return c.back() + 0.5 * dr * flux / D;
}

ElectrolyteProfile BatteryModel::electrolyte_profile(const BatteryState& s) const {
    const auto nx = static_cast<std::size_t>(opts_.n_x);
    const auto& c = s.c_e;
    const std::size_t N = c.size();
    ElectrolyteProfile e;
    // zero-gradient quadratic extrapolation to the collectors
    e.c_neg_cc = c[0] - (c[1] - c[0]) / 8.0;
    e.c_pos_cc = c[N - 1] - (c[N - 2] - c[N - 1]) / 8.0;
    auto interface = [&](std::size_t a, std::size_t b) {
        const double ga = 2.0 * cell_eps_[a] * f_.D_e(c[a]) / cell_w_[a];
        const double gb = 2.0 * cell_eps_[b] * f_.D_e(c[b]) / cell_w_[b];
        return (ga * c[a] + gb * c[b]) / (ga + gb);
    };
    e.c_neg_sep = interface(nx - 1, nx);
    e.c_sep_pos = interface(2 * nx - 1, 2 * nx);
    for (std::size_t r = 0; r < 3; ++r) {
        double sum = 0.0;
        for (std::size_t k = 0; k < nx; ++k) sum += c[r * nx + k];
        e.mean[r] = sum / static_cast<double>(nx);
    }
    return e;
}

Kinetics BatteryModel::kinetics(const BatteryState& s, double I) const {
    const auto& p = p_;
    Kinetics k;
    k.T = s.T_jel;
    const double T = s.T_jel;
    const double RT_F = p.R_gas * T / p.F;
    k.D_s_pos = arrhenius_correct(p.D_s_pos, p.E_act.D_s_pos, T, p.T_ref, p.R_gas);
    k.D_s_neg = arrhenius_correct(p.D_s_neg, p.E_act.D_s_neg, T, p.T_ref, p.R_gas);
    const double k_pos = arrhenius_correct(p.k_pos, p.E_act.k_pos, T, p.T_ref, p.R_gas);
    const double k_neg = arrhenius_correct(p.k_neg, p.E_act.k_neg, T, p.T_ref, p.R_gas);
    const double a_pos = p.a_pos();
    const double a_neg = p.a_neg();

    // solid surface flux D dc/dr at R: cathode loses lithium on charge, anode gains
    k.css_pos = surface_conc(s.c_s_pos, -I / (p.F * a_pos * p.L_pos), k.D_s_pos, p.R_s_pos);
    k.css_neg = surface_conc(s.c_s_neg, I / (p.F * a_neg * p.L_neg), k.D_s_neg, p.R_s_neg);
    if (!(k.css_pos > 0.0 && k.css_pos < p.c_s_max_pos) || !(k.css_neg > 0.0 && k.css_neg < p.c_s_max_neg)) {
        throw DomainError("surface concentration outside (0, c_s_max)");
    }

    k.electrolyte = electrolyte_profile(s);
    const auto& e = k.electrolyte;
    if (!(e.c_neg_cc > 0.0 && e.c_neg_sep > 0.0 && e.c_sep_pos > 0.0 && e.c_pos_cc > 0.0)) {
        throw DomainError("non-positive electrolyte concentration in log term");
    }
    const double ce_neg = e.mean[0], ce_sep = e.mean[1], ce_pos = e.mean[2];

    k.i0_pos = k_pos * std::pow(k.css_pos, p.alpha_c) * std::pow(ce_pos * (p.c_s_max_pos - k.css_pos), p.alpha_a);
    k.i0_neg = k_neg * std::pow(k.css_neg, p.alpha_c) * std::pow(ce_neg * (p.c_s_max_neg - k.css_neg), p.alpha_a);

    const double kin = RT_F / p.alpha;
    k.eta_pos = kin * std::asinh(I / (2.0 * a_pos * p.L_pos * k.i0_pos));
    k.eta_int_neg = kin * std::asinh(-I / (2.0 * a_neg * p.L_neg * k.i0_neg));

    k.U_pos_surf = f_.U_pos(k.css_pos / p.c_s_max_pos);
    k.U_neg_surf = f_.U_neg(k.css_neg / p.c_s_max_neg);

    const double kap_arr = arrhenius_correct(1.0, p.E_act.kappa_eff, T, p.T_ref, p.R_gas);
    k.kappa_eff_pos = f_.kappa(ce_pos) * std::pow(p.eps_e_pos, p.brugg) * kap_arr;
    k.kappa_eff_sep = f_.kappa(ce_sep) * std::pow(p.eps_e_sep, p.brugg) * kap_arr;
    k.kappa_eff_neg = f_.kappa(ce_neg) * std::pow(p.eps_e_neg, p.brugg) * kap_arr;

    auto nu = [&](double c) { return 2.0 * RT_F * (1.0 - p.t_c0) * f_.activity(c); };

    k.V = k.eta_pos - k.eta_int_neg + k.U_pos_surf - k.U_neg_surf +
          (p.R_f_pos / (a_pos * p.L_pos) + p.R_f_neg / (a_neg * p.L_neg)) * I -
          (p.L_pos / (2.0 * k.kappa_eff_pos) + p.L_sep / k.kappa_eff_sep + p.L_neg / (2.0 * k.kappa_eff_neg)) * I +
          nu(ce_pos) * (std::log(e.c_pos_cc) - std::log(e.c_sep_pos)) +
          nu(ce_sep) * (std::log(e.c_sep_pos) - std::log(e.c_neg_sep)) +
          nu(ce_neg) * (std::log(e.c_neg_sep) - std::log(e.c_neg_cc));

    // SEI growth, Tafel form
    if (p.k_SEI > 0.0) {
        const double k_sei = arrhenius_correct(p.k_SEI, p.E_act.k_SEI, T, p.T_ref, p.R_gas);
        const double d_ec = arrhenius_correct(p.D_EC, p.E_act.D_EC, T, p.T_ref, p.R_gas);
        const double eta_sei = k.eta_int_neg + k.U_neg_surf - p.U_SEI;
        const double kinetic_resistance = std::exp(p.alpha_c_SEI * eta_sei / RT_F) / k_sei;
        k.J_SEI = -p.c_EC0 / (s.delta_film / d_ec + kinetic_resistance);
    }

    // lithium plating, Butler-Volmer clipped at zero
    if (p.k_LP > 0.0) {
        const double k_lp = arrhenius_correct(p.k_LP, p.E_act.k_LP, T, p.T_ref, p.R_gas);
        const double eta_lp = k.eta_int_neg + k.U_neg_surf;
        const double bv = std::exp(p.alpha_a_LP * eta_lp / RT_F) - std::exp(-p.alpha_c_LP * eta_lp / RT_F);
        k.J_LP = std::min(0.0, k_lp * std::pow(ce_neg / p.c_e_ref, p.alpha_a_LP) * bv);
    }
    return k;
}

double BatteryModel::voltage(const BatteryState& s, double I) const { return kinetics(s, I).V; }
double BatteryModel::sei_flux(const BatteryState& s, double I) const { return kinetics(s, I).J_SEI; }
double BatteryModel::lp_flux(const BatteryState& s, double I) const { return kinetics(s, I).J_LP; }

double BatteryModel::mean_c_s_pos(const BatteryState& s) const { return mean_over_shells(s.c_s_pos, shell_vol_); }
double BatteryModel::mean_c_s_neg(const BatteryState& s) const { return mean_over_shells(s.c_s_neg, shell_vol_); }

double BatteryModel::soc(const BatteryState& s) const {
    return (mean_c_s_neg(s) - window_.c_neg_soc0) / (window_.c_neg_soc100 - window_.c_neg_soc0);
}

double BatteryModel::soc_cathode(const BatteryState& s) const {
    return (window_.c_pos_soc0 - mean_c_s_pos(s)) / (window_.c_pos_soc0 - window_.c_pos_soc100);
}

double BatteryModel::ocv_bulk(const BatteryState& s) const {
    return f_.U_pos(mean_c_s_pos(s) / p_.c_s_max_pos) - f_.U_neg(mean_c_s_neg(s) / p_.c_s_max_neg);
}

double BatteryModel::anode_lithium(const BatteryState& s) const {
    return p_.eps_s_neg * p_.L_neg * mean_c_s_neg(s);
}

double BatteryModel::cathode_lithium(const BatteryState& s) const {
    return p_.eps_s_pos * p_.L_pos * mean_c_s_pos(s);
}

double BatteryModel::electrolyte_lithium(const BatteryState& s) const {
    double total = 0.0;
    for (std::size_t i = 0; i < s.c_e.size(); ++i) total += cell_eps_[i] * cell_w_[i] * s.c_e[i];
    return total;
}

void BatteryModel::check_state(const BatteryState& s) const {
    auto bad = [](const std::string& what) { throw NumericalError("simulation blow-up: " + what); };
    for (double c : s.c_s_pos) {
        if (!std::isfinite(c) || c < 0.0 || c > p_.c_s_max_pos) bad("cathode solid concentration out of bounds");
    }
    for (double c : s.c_s_neg) {
        if (!std::isfinite(c) || c < 0.0 || c > p_.c_s_max_neg) bad("anode solid concentration out of bounds");
    }
    for (double c : s.c_e) {
        if (!std::isfinite(c) || !(c > 0.0)) bad("electrolyte concentration non-positive");
    }
    if (!std::isfinite(s.T_jel) || !(s.T_jel > 0.0) || !std::isfinite(s.T_can) || !(s.T_can > 0.0)) {
        bad("temperature non-finite");
    }
    if (!std::isfinite(s.delta_film) || !std::isfinite(s.q_SEI) || !std::isfinite(s.q_LP)) bad("film state non-finite");
}

void BatteryModel::substep(BatteryState& s, double I, double h, double& J_SEI_int, double& J_LP_int) const {
    const auto& p = p_;
    Kinetics k;
    try {
        k = kinetics(s, I);
    } catch (const DomainError& e) {
        throw NumericalError(std::string("simulation blow-up: ") + e.what());
    }

    // heat source from the state at the start of the substep
    const double th_pos = mean_c_s_pos(s) / p.c_s_max_pos;
    const double th_neg = mean_c_s_neg(s) / p.c_s_max_neg;
    const double q_gen = I * (k.V - (f_.U_pos(th_pos) - f_.U_neg(th_neg))) +
                         I * s.T_jel * (f_.dU_dT_pos(th_pos) - f_.dU_dT_neg(th_neg));

    // solid diffusion, backward Euler on shells
    const auto nr = static_cast<std::size_t>(opts_.n_r);
    std::vector<double> lo(nr), di(nr), up(nr);
    auto solid = [&](std::vector<double>& c, double D, double R, double flux) {
        const double dr = R / static_cast<double>(nr);
        const double coef = D / (dr * dr);
        for (std::size_t i = 0; i < nr; ++i) {
            const double inner = i == 0 ? 0.0 : coef * shell_area_[i - 1];
            const double outer = i + 1 == nr ? 0.0 : coef * shell_area_[i];
            const double v = shell_vol_[i] / h;
            lo[i] = -inner;
            up[i] = -outer;
            di[i] = v + inner + outer;
            c[i] *= v;
        }
        c[nr - 1] += shell_area_[nr - 1] * flux / dr;
        thomas(lo, di, up, c);
    };
    solid(s.c_s_pos, k.D_s_pos, p.R_s_pos, -I / (p.F * p.a_pos() * p.L_pos));
    solid(s.c_s_neg, k.D_s_neg, p.R_s_neg, I / (p.F * p.a_neg() * p.L_neg));

    // electrolyte diffusion, backward Euler with D_e frozen at the start of the substep
    const std::size_t N = s.c_e.size();
    std::vector<double> g(N), elo(N), edi(N), eup(N);
    for (std::size_t i = 0; i < N; ++i) g[i] = 2.0 * cell_eps_[i] * f_.D_e(s.c_e[i]) / cell_w_[i];
    for (std::size_t i = 0; i < N; ++i) {
        const double left = i == 0 ? 0.0 : 1.0 / (1.0 / g[i - 1] + 1.0 / g[i]);
        const double right = i + 1 == N ? 0.0 : 1.0 / (1.0 / g[i] + 1.0 / g[i + 1]);
        const double v = cell_eps_[i] * cell_w_[i] / h;
        elo[i] = -left;
        eup[i] = -right;
        edi[i] = v + left + right;
        s.c_e[i] = v * s.c_e[i] + cell_w_[i] * cell_src_[i] * I;
    }
    thomas(elo, edi, eup, s.c_e);

    // lumped thermal, implicit in the exchange terms
    {
        const double cj = p.rho_jel * p.cp_jel / h;
        const double cc = p.rho_can * p.cp_can / h;
        const double a11 = cj + p.h_jel_can, a12 = -p.h_jel_can;
        const double a21 = -p.h_jel_can, a22 = cc + p.h_jel_can + p.h_can_amb;
        const double b1 = cj * s.T_jel + q_gen;
        const double b2 = cc * s.T_can + p.h_can_amb * p.T_amb;
        const double det = a11 * a22 - a12 * a21;
        s.T_jel = (b1 * a22 - a12 * b2) / det;
        s.T_can = (a11 * b2 - a21 * b1) / det;
    }

    // film growth from SEI and plated lithium molar volumes
    s.delta_film -= h * (k.J_SEI * p.M_SEI / p.rho_SEI + k.J_LP * p.M_Li / p.rho_Li);
    s.q_SEI += h * k.J_SEI;
    s.q_LP += h * k.J_LP;
    J_SEI_int += h * k.J_SEI;
    J_LP_int += h * k.J_LP;
    s.t_elapsed += h;

    check_state(s);
}

std::pair<BatteryState, StepOutput> BatteryModel::step(const BatteryState& s0, double I, double dt) const {
    if (!(dt > 0.0)) throw ConfigError("dt", "step length must be positive");
    if (!std::isfinite(I)) throw NumericalError("non-finite current");
    const int n = std::max(1, static_cast<int>(std::ceil(dt / opts_.substep_max - 1e-9)));
    const double h = dt / n;
    BatteryState s = s0;
    StepOutput out;
    for (int i = 0; i < n; ++i) substep(s, I, h, out.J_SEI_int, out.J_LP_int);
    try {
        out.V = voltage(s, I);
    } catch (const DomainError& e) {
        throw NumericalError(std::string("simulation blow-up: ") + e.what());
    }
    out.soc = soc(s);
    out.T_jel = s.T_jel;
    out.T_can = s.T_can;
    return {std::move(s), out};
}

}  // namespace agecharge::battery
