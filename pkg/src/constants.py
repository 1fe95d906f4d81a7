"""Constants for the application."""

# Numerics
EXP_CLAMP = 30.0
LEAKY_SLOPE = 0.01
EXACT_U_STAT_MAX_BATCH = 128
DERANGEMENT_RETRIES = 20
RIDGE_FALLBACK = 1e-8
DC_MAX_ROWS = 5000
MI_CHUNK_ROWS = 256

# Defaults from the experiment protocol
LAMBDA_DEFAULT = 2.0
SLICE_CANDIDATES = [5, 10, 15, 20, 25, 30]
N_SAMPLES_SIMULATION = 6000
SPLIT_COUNTS_SIMULATION = (4000, 1000, 1000)
N_FOLDS_FULL = 6
N_FOLDS_DESK = 2

# Model file format
MODEL_FORMAT = "msrl-model"
MODEL_FORMAT_VERSION = 1

# Exit codes
EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DIVERGENCE = 3
EXIT_UNRELIABLE = 4

PATH_ROOT = "./data/"

# Paths
PATH_RESULTS = PATH_ROOT + "results/"
PATH_RESULTS_TRAIN = PATH_RESULTS + "train/"
PATH_RESULTS_TABLE1 = PATH_RESULTS + "table1/"
PATH_RESULTS_TABLE3 = PATH_RESULTS + "table3/"
PATH_SIMULATIONS = PATH_ROOT + "simulations/"
