"""
SWEEP TYPES

Purpose:
- Name the sweep modes, verified identities and CSV column layouts
- Shared by the engines, the CSV writer and the CLI

Rules:
- No numerics
- No IO operations
- Only type definitions
"""

from typing import Dict, List, Literal

# ==================================================
# SWEEP MODES
# ==================================================

MODE_SELFADJOINT: Literal["sa"] = "sa"
MODE_DISSIPATIVE: Literal["dissipative"] = "dissipative"
MODE_COUPLED: Literal["coupled"] = "coupled"

ALL_MODES: List[str] = [
    MODE_SELFADJOINT,
    MODE_DISSIPATIVE,
    MODE_COUPLED,
]


# ==================================================
# PARAMETER DOCUMENT KINDS
# ==================================================

PARAM_THETA: Literal["theta"] = "theta"
PARAM_RELATION: Literal["relation"] = "relation"
PARAM_DISSIPATIVE: Literal["dissipative"] = "dissipative"
PARAM_COUPLED: Literal["coupled"] = "coupled"

# Parameter kinds accepted by each mode
MODE_PARAM_KINDS: Dict[str, List[str]] = {
    MODE_SELFADJOINT: [PARAM_THETA, PARAM_RELATION],
    MODE_DISSIPATIVE: [PARAM_DISSIPATIVE],
    MODE_COUPLED: [PARAM_COUPLED],
}


# ==================================================
# CSV COLUMNS
# ==================================================

SKIPPED_COLUMN = "skipped"
LAMBDA_COLUMN = "lambda"

SELFADJOINT_COLUMNS: List[str] = [
    LAMBDA_COLUMN,
    "rank",
    "det_re",
    "det_im",
    "ssf",
    "residual_bk",
    "residual_det_ratio",
    "unitarity",
    SKIPPED_COLUMN,
]

DISSIPATIVE_COLUMNS: List[str] = [
    LAMBDA_COLUMN,
    "rank_m",
    "rank_d",
    "det_sd_re",
    "det_sd_im",
    "det_slp_re",
    "det_slp_im",
    "eta",
    "xi_dilation",
    "residual_bk",
    "residual_mbk",
    "residual_polk",
    "residual_adamyan_arov",
    "unitarity",
    "contraction",
    SKIPPED_COLUMN,
]

COUPLED_COLUMNS: List[str] = [
    LAMBDA_COLUMN,
    "rank_h",
    "rank_g",
    "det_sh_re",
    "det_sh_im",
    "det_sg_re",
    "det_sg_im",
    "xi",
    "residual_bk",
    "residual_mbk_h",
    "residual_mbk_g",
    "residual_eta",
    "unitarity",
    "contraction",
    SKIPPED_COLUMN,
]

COLUMNS_BY_MODE: Dict[str, List[str]] = {
    MODE_SELFADJOINT: SELFADJOINT_COLUMNS,
    MODE_DISSIPATIVE: DISSIPATIVE_COLUMNS,
    MODE_COUPLED: COUPLED_COLUMNS,
}


# ==================================================
# VERIFIED IDENTITIES
# ==================================================

TOL_KIND_BK: Literal["bk"] = "bk"
TOL_KIND_TRACE: Literal["trace"] = "trace"
TOL_KIND_UNITARITY: Literal["unitarity"] = "unitarity"

# identity name -> (residual column, tolerance kind), in report order
IDENTITIES_BY_MODE: Dict[str, Dict[str, tuple]] = {
    MODE_SELFADJOINT: {
        "birman_krein": ("residual_bk", TOL_KIND_BK),
        "determinant_ratio": ("residual_det_ratio", TOL_KIND_BK),
        "unitarity": ("unitarity", TOL_KIND_UNITARITY),
    },
    MODE_DISSIPATIVE: {
        "modified_bk": ("residual_mbk", TOL_KIND_BK),
        "modified_bk_lp": ("residual_polk", TOL_KIND_BK),
        "dilation_bk": ("residual_bk", TOL_KIND_BK),
        "adamyan_arov": ("residual_adamyan_arov", TOL_KIND_UNITARITY),
        "unitarity": ("unitarity", TOL_KIND_UNITARITY),
        "contraction": ("contraction", TOL_KIND_UNITARITY),
    },
    MODE_COUPLED: {
        "coupled_bk_h": ("residual_mbk_h", TOL_KIND_BK),
        "coupled_bk_g": ("residual_mbk_g", TOL_KIND_BK),
        "full_bk": ("residual_bk", TOL_KIND_BK),
        "eta_channel": ("residual_eta", TOL_KIND_BK),
        "unitarity": ("unitarity", TOL_KIND_UNITARITY),
        "contraction": ("contraction", TOL_KIND_UNITARITY),
    },
}

TRACE_IDENTITY = "trace_formula"
