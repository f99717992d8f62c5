from typing import Optional


class RotasymError(Exception):
    pass


class ConfigError(RotasymError, ValueError):
    def __init__(self, message: str, line: Optional[int] = None, field: Optional[str] = None):
        self.line = line
        self.field = field
        prefix = ""
        if line is not None:
            prefix += f"line {line}: "
        if field:
            prefix += f"{field}: "
        super().__init__(prefix + message)


class SolverAbortError(RotasymError, RuntimeError):
    def __init__(self, message: str, t: float):
        self.t = t
        super().__init__(f"{message} (t={t:.6g})")


class LinearSolveError(SolverAbortError):
    def __init__(self, t: float, residual: float, iterations: int):
        self.residual = residual
        self.iterations = iterations
        super().__init__(f"Linear solve did not converge after {iterations} iterations, residual={residual:.3e}", t)


class BlowUpError(SolverAbortError):
    def __init__(self, t: float, sup_norm: float, guard: float):
        self.sup_norm = sup_norm
        self.guard = guard
        super().__init__(f"Sup-norm {sup_norm:.3e} exceeded blow-up guard {guard:.3e}", t)
