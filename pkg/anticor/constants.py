# Window defaults.
DEFAULT_MAX_WINDOW = 30
MIN_WINDOW = 2

# Exponentiated gradient learning rate.
DEFAULT_ETA = 0.01

# Proportional commission (fraction paid is gamma/2 per side).
DEFAULT_GAMMA = 0.0
COMMISSION_SWEEP = tuple(round(0.001 * k, 3) for k in range(0, 11))

# Annualization.
TRADING_DAYS = 252
RISK_FREE_RATE = 0.04

# Universal portfolio Monte-Carlo.
DIRICHLET_ALPHA = 0.5
DEFAULT_SAMPLES = 10000
DEFAULT_SEED = 20030
BAND_SEEDS = 10

# CBAL* optimizer.
CBAL_STAR_TOL = 1e-10
CBAL_STAR_MAX_ITER = 10000

# Simplex tolerance for weights summing to one.
SIMPLEX_TOL = 1e-9

# Input formats.
FORMAT_PRICES = 'csv-prices'
FORMAT_RELATIVES = 'csv-relatives'
INPUT_FORMATS = (FORMAT_PRICES, FORMAT_RELATIVES)

# Output formats.
REPORT_FORMATS = ('tsv', 'csv', 'svg-lines')

# Header names treated as a day-label column instead of an asset.
DAY_LABEL_HEADERS = {'date', 'day', 'time'}

# Error codes double as CLI exit codes.
CODE_UNKNOWN = 1
CODE_USAGE = 2
CODE_ARGUMENT = 3
CODE_INPUT = 4
CODE_DATA = 5
CODE_NUMERIC = 6

# Exit code → REASON token of the `error: <REASON>: <message>` line.
ERROR_CODES = {
    CODE_UNKNOWN: 'UNKNOWN',
    CODE_USAGE: 'USAGE',
    CODE_ARGUMENT: 'BADPARAM',
    CODE_INPUT: 'NOINPUT',
    CODE_DATA: 'BADDATA',
    CODE_NUMERIC: 'NOCONV',
}
