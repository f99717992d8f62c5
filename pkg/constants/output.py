METRICS_COLUMNS = [
    "t",
    "sup_norm",
    "u1_holds",
    "m_arc_count",
    "largest_arc_deg",
    "axis_deg",
    "axial_deficit",
    "mono_deficit",
    "dist_to_omega",
]

SNAPSHOT_FLOAT_FORMAT = "%.17g"

PGM_MAX_VALUE = 255
PGM_DEGENERATE_VALUE = 127
PGM_OUTSIDE_VALUE = 0


class ExitCode:
    SUCCESS = 0
    VALIDATION_ERROR = 1
    SOLVER_ABORT = 2
    CERTIFICATION_FAILURE = 3
