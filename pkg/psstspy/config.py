# version stamped into every result envelope
VERSION = "0.1.0"

# Wigner values follow the half-normalised convention of the (1/pi) displaced-parity operator
WIGNER_CONVENTION = "W = (1/pi) <displaced parity>, ∫W d²α = 1/2"

# state parameter bounds
R_MAX = 3.0
# r below this is routed to the thermal (r = 0) formulas
R_ZERO_THRESHOLD = 1e-12
# kappa*t below this is treated as t = 0; evolved coefficients diverge like 1/T
KAPPA_T_EPS = 1e-9
ALPHA_MAX = 20.0

# defaults mirror the single-photon-subtracted state of the Wigner figures
DEFAULT_NBAR = 0.1
DEFAULT_R = 0.5
DEFAULT_M = 1
DEFAULT_NTH = 0.0
DEFAULT_GRID = (-3.0, 3.0, -3.0, 3.0, 101, 101)
GRID_MAX_POINTS = 4_000_000

# sweeps
DEFAULT_PND_N_MAX = 30
MANDEL_SWEEP_NBAR = 0.01
MANDEL_SWEEP_R_RANGE = (0.0, 1.5, 31)
MANDEL_SWEEP_M_LIST = (0, 1, 2, 3, 4, 19, 20)
FIDELITY_SWEEP_NBAR = 0.2
FIDELITY_SWEEP_R_RANGE = (0.0, 1.0, 21)
FIDELITY_SWEEP_M_LIST = (0, 1, 2, 3, 4, 19, 20)

# polynomial kernels
POLY_MAX_DEGREE = 40
IMAG_RESIDUE_TOL = 1e-10
PND_TAIL = 1e-10

# Fock-space oracle
ORACLE_INITIAL_DIM_FACTOR = 4
ORACLE_MIN_DIM = 8
ORACLE_GROWTH = 1.5
ORACLE_TOLERANCE = 1e-10
ORACLE_MAX_DIM = 512
SQUEEZE_PAD_FACTOR = 1.25
# grid points per batch of displacement matrices
PARITY_BATCH = 32
UNITARITY_TOL = 1e-8
THERMAL_SUPPORT_EPS = 1e-18
HERMITIAN_TOL = 1e-12
EIGEN_FLOOR = -1e-10
PURITY_TOL = 1e-8

# master equation (time in units of 1/kappa)
MASTER_DT = 5e-3
MASTER_MAX_HALVINGS = 6
MASTER_HALVING_TOL = 1e-7
MASTER_TRACE_TOL = 1e-8

# Gaussian-kernel quadrature
CONVOLUTION_TAIL_TOL = 1e-8

# oracle-equivalence suite
COMPARE_RTOL = 1e-7
COMPARE_ATOL = 1e-9
COMPARE_PND_N_MAX = 40
COMPARE_GRID = (-3.0, 3.0, -3.0, 3.0, 21, 21)
COMPARE_MAX_DIM = 256
# C_m change between successive dims that ends truncation growth in the suite
COMPARE_TRUNCATION_TOL = 1e-8
EVOLVED_ATOL = 1e-4
