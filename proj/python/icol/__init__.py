"""Incentive-compatible online learning from expert forecasts."""

from ._icol import (
    ForecastPanel,
    IcolError,
    TraceEnsemble,
    builtin_audits,
    ingest_panel,
    render_svg,
    run_benchmark,
    run_monte_carlo,
    wsu_update,
    wswm_payoffs,
)

__all__ = [
    "ForecastPanel",
    "IcolError",
    "TraceEnsemble",
    "builtin_audits",
    "ingest_panel",
    "render_svg",
    "run_benchmark",
    "run_monte_carlo",
    "wsu_update",
    "wswm_payoffs",
]
