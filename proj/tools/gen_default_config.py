#!/usr/bin/env python3
"""Regenerate data/default_config.json and data/desk_config.json.

Graphite / NMC811-class cell. OCP curves, porosities, particle radii and
electrolyte property fits follow the open LG M50 parameterisation (Chen et
al. 2020), with electrodes at about half the LG M50 thickness and the cathode
solid diffusivity at 10x the LG M50 value. Arrhenius energies follow the
SPMeT reference code of Moura et al. Thermal values are per unit electrode
area. k_SEI puts w_SEI * sum(J_SEI) near 10 for a 1C charge.
"""
import json
import math
import pathlib


def u_neg(x):
    return (1.9793 * math.exp(-39.3631 * x) + 0.2482
            - 0.0909 * math.tanh(29.8538 * (x - 0.1234))
            - 0.04478 * math.tanh(14.9159 * (x - 0.2769))
            - 0.0205 * math.tanh(30.4444 * (x - 0.6103)))


def u_pos(x):
    return (-0.8090 * x + 4.4875
            - 0.0428 * math.tanh(18.5138 * (x - 0.5542))
            - 17.7326 * math.tanh(15.7890 * (x - 0.3117))
            + 17.5842 * math.tanh(15.9308 * (x - 0.3120)))


def d_e(c):
    x = c / 1000.0
    return 8.794e-11 * x * x - 3.972e-10 * x + 4.862e-10


def kappa(c):
    x = c / 1000.0
    return 0.1297 * x ** 3 - 2.51 * x ** 1.5 + 3.329 * x


def table(f, lo, hi, n):
    xs = [lo + (hi - lo) * i / (n - 1) for i in range(n)]
    return {"x": xs, "y": [f(x) for x in xs]}


eps_s_neg, L_neg, cmax_neg = 0.75, 40.0e-6, 33133.0
eps_s_pos, L_pos, cmax_pos = 0.665, 35.5e-6, 63104.0
n_li = eps_s_neg * L_neg * cmax_neg * 0.9014 + eps_s_pos * L_pos * cmax_pos * 0.2661

battery = {
    "R_s_pos": 5.22e-6, "R_s_neg": 5.86e-6,
    "L_pos": L_pos, "L_neg": L_neg, "L_sep": 12.0e-6,
    "D_s_pos": 4.0e-14, "D_s_neg": 3.3e-14,
    "eps_e_pos": 0.335, "eps_e_neg": 0.25, "eps_e_sep": 0.47,
    "eps_s_pos": eps_s_pos, "eps_s_neg": eps_s_neg,
    "t_c0": 0.2594, "brugg": 1.5,
    "k_pos": 3.42e-6, "k_neg": 6.48e-7,
    "alpha": 0.5, "alpha_a": 0.5, "alpha_c": 0.5,
    "R_f_pos": 1.0e-4, "R_f_neg": 1.0e-3,
    "c_s_max_pos": cmax_pos, "c_s_max_neg": cmax_neg,
    "c_e0": 1000.0, "n_li": n_li,
    "F": 96485.33212, "R_gas": 8.314462618,
    "rho_jel": 0.55, "rho_can": 0.08,
    "cp_jel": 1100.0, "cp_can": 500.0,
    "h_jel_can": 15.0, "h_can_amb": 3.0,
    "T_amb": 298.15, "T_ref": 298.15,
    "c_EC0": 4541.0, "D_EC": 2.0e-18, "k_SEI": 5.0e-20, "k_LP": 1.0e-10,
    "alpha_c_SEI": 0.5, "alpha_a_LP": 0.5, "alpha_c_LP": 0.5,
    "U_SEI": 0.4, "c_e_ref": 1.0,
    "M_SEI": 0.162, "rho_SEI": 1690.0, "M_Li": 6.94e-3, "rho_Li": 534.0,
    "delta_film0": 5.0e-9,
    "E_act": {
        "D_s_pos": 18550.0, "D_s_neg": 42770.0,
        "kappa_eff": 34700.0,
        "k_pos": 39570.0, "k_neg": 37480.0,
        "k_SEI": 55500.0, "D_EC": 18000.0, "k_LP": 35000.0,
    },
    "ocv_soc0": 3.0, "ocv_soc100": 4.2,
}

functions = {
    "U_pos": table(u_pos, 0.0, 1.0, 401),
    "U_neg": table(u_neg, 0.0, 1.0, 401),
    "dU_dT_pos": table(lambda x: -1.0e-4, 0.0, 1.0, 3),
    "dU_dT_neg": table(lambda x: -5.0e-5, 0.0, 1.0, 3),
    "D_e": table(d_e, 1.0, 6000.0, 121),
    "kappa": table(kappa, 1.0, 6000.0, 121),
    "activity": table(lambda c: 1.0, 1.0, 6000.0, 3),
}

config = {
    "battery": battery,
    "functions": functions,
    "sim": {"n_r": 16, "n_x": 16, "substep_max": 1.0},
    "env": {
        "dt": 5.0, "window": 12, "soc_given": 0.8,
        "t_given_min": 720.0, "t_given_max": 7200.0,
        "i_min_crate": 0.0, "i_max_crate": 5.0,
        "V_min": 2.8, "V_max": 4.5,
        "T_min": 273.15, "T_max": 318.15,
        "omega_SEI": 2.0e10, "omega_SAF": 1.0e2,
        "ocv0": 3.3, "T0": 298.15,
        "temperature_window": "jel",
    },
    "sac": {
        "hidden_layers": 4, "hidden_width": 256,
        "gamma": 0.999, "learning_rate": 1.0e-4, "tau": 0.005,
        "batch_size": 256, "updates_per_step": 1.0, "max_updates_per_episode": 0,
        "entropy_scale": 1.0, "her_relabels": 1,
        "buffer_capacity": 2000000, "warmup_transitions": 1000,
        "eval_every": 60, "eval_episodes": 30, "stochastic_eval": False,
        "episodes": 1000, "checkpoint_every": 60,
    },
    "compare": {"V_cv": 4.5},
}

# reduced grids and a small network for single-machine training runs
desk = json.loads(json.dumps(config))
desk["sim"].update({"n_r": 8, "n_x": 8})
desk["sac"].update({
    "hidden_layers": 2, "hidden_width": 64,
    "learning_rate": 1.0e-3, "batch_size": 64,
    "max_updates_per_episode": 0, "her_relabels": 4, "episodes": 960,
})

data = pathlib.Path(__file__).resolve().parent.parent / "data"
for name, cfg in (("default_config.json", config), ("desk_config.json", desk)):
    out = data / name
    out.write_text(json.dumps(cfg, indent=1) + "\n")
    print(out)
