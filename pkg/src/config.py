"""Module with the named training presets used by the experiments"""

# Simulation protocol (Table 1 cells)
FULL_PRESET = {
    "lam": 2.0,
    "batch_size": 512,
    "lr": 1e-3,
    "weight_decay": 1e-4,
    "max_epochs": 1000,
    "patience": 200,
    "restarts": 10,
    "r_widths": (32, 16, 8),
    "d_widths": (16, 8),
    "q_widths": (16, 8),
    "es_metric": "distance_correlation",
}
DESK_PRESET = {
    **FULL_PRESET,
    "restarts": 3,
}

# Learning rate and intrinsic dimension per simulation model
MODEL_PRESETS = {
    "I": {"lr": 1e-3, "d0": 1},
    "II": {"lr": 1e-3, "d0": 1},
    "III": {"lr": 3e-4, "d0": 2},
    "IV": {"lr": 1e-3, "d0": 2},
}

# Per-probe training inside the dimension selection
DIM_SELECT_PRESET = {
    "lam": 2.0,
    "batch_size": 512,
    "lr": 1e-3,
    "weight_decay": 1e-4,
    "max_epochs": 500,
    "patience": 200,
    "restarts": 3,
    "r_widths": (128,),
    "d_widths": (64,),
    "q_widths": (64,),
}
DIM_SELECT_FULL_PRESET = {
    **DIM_SELECT_PRESET,
    "max_epochs": 2000,
    "patience": 200,
    "restarts": 10,
}

# Toy model with two references, no early stopping
TOY_PRESET = {
    "lam": 2.0,
    "d0": 2,
    "batch_size": 512,
    "lr": 3e-3,
    "weight_decay": 0.0,
    "max_epochs": 3000,
    "patience": 3000,
    "restarts": 1,
    "r_widths": (64, 64),
    "d_widths": (32, 32),
    "q_widths": (32, 32),
    "es_metric": "none",
}
# Toy model against the sin(Z) reference, deeper representer
TOY_SINE_PRESET = {
    **TOY_PRESET,
    "reference": "sine_gaussian",
    "r_widths": (64, 64, 64),
}

# Real data
SUPERCONDUCTIVITY_PRESET = {
    "lam": 2.0,
    "batch_size": 512,
    "lr": 1e-4,
    "weight_decay": 1e-3,
    "max_epochs": 2000,
    "patience": 400,
    "restarts": 10,
    "r_widths": (128, 128, 128),
    "d_widths": (64, 64),
    "q_widths": (64, 64),
}
POLE_PRESET = {
    "lam": 2.0,
    "batch_size": 512,
    "lr": 1e-3,
    "weight_decay": 1e-4,
    "max_epochs": 1000,
    "patience": 200,
    "restarts": 10,
    "r_widths": (30, 25),
    "d_widths": (16, 8),
    "q_widths": (16, 8),
}

PRESETS = {
    "full": FULL_PRESET,
    "desk": DESK_PRESET,
    "dim-select": DIM_SELECT_PRESET,
    "dim-select-full": DIM_SELECT_FULL_PRESET,
    "toy": TOY_PRESET,
    "toy-sine": TOY_SINE_PRESET,
    "superconductivity": SUPERCONDUCTIVITY_PRESET,
    "pole": POLE_PRESET,
}
