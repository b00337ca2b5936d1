from __future__ import annotations

from collections.abc import Callable

from domain.errors import NumericError

Func = Callable[[float], float]


def expand_bracket(func: Func, lo: float, hi: float, max_doublings: int = 60) -> tuple[float, float]:
    """Grow ``hi`` away from ``lo`` until ``func`` changes sign on [lo, hi]."""
    f_lo = func(lo)
    width = hi - lo
    for _ in range(max_doublings):
        if f_lo * func(hi) <= 0.0:
            return lo, hi
        width *= 2.0
        hi = lo + width
    raise NumericError(f"No sign change found in [{lo}, {hi}]")


def newton_bisect(
    func: Func,
    dfunc: Func,
    lo: float,
    hi: float,
    tol: float = 1e-12,
    max_iter: int = 200,
) -> float:
    """Root of ``func`` in the bracket [lo, hi].

    Newton steps are taken while they stay inside the bracket and shrink fast
    enough; otherwise the step falls back to bisection.
    """
    f_lo, f_hi = func(lo), func(hi)
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if f_lo * f_hi > 0.0:
        raise NumericError(f"Root not bracketed by [{lo}, {hi}]")
    # orient so that func(xl) < 0
    xl, xh = (lo, hi) if f_lo < 0.0 else (hi, lo)

    rts = 0.5 * (lo + hi)
    dx_old = abs(hi - lo)
    dx = dx_old
    f, df = func(rts), dfunc(rts)
    for _ in range(max_iter):
        out_of_bracket = ((rts - xh) * df - f) * ((rts - xl) * df - f) > 0.0
        if out_of_bracket or abs(2.0 * f) > abs(dx_old * df):
            dx_old = dx
            dx = 0.5 * (xh - xl)
            rts = xl + dx
        else:
            dx_old = dx
            dx = f / df
            rts -= dx
        if abs(dx) < tol * max(1.0, abs(rts)):
            return rts
        f, df = func(rts), dfunc(rts)
        if f < 0.0:
            xl = rts
        else:
            xh = rts
    raise NumericError(f"Newton/bisection did not converge in {max_iter} iterations")
