"""Reflection positivity toolkit: Python front end to the C++ core."""

from ._reflectlab import (
    __version__,
    Error,
    cayley_table,
    escape_time,
    jform_eigenvalues,
    kernel_J,
    list_scenarios,
    q_from_mu,
    qfield_residuals,
    run_scenario,
    sublaplacian_F,
    set_thread_count,
)

__all__ = [
    "__version__",
    "Error",
    "cayley_table",
    "escape_time",
    "jform_eigenvalues",
    "kernel_J",
    "list_scenarios",
    "q_from_mu",
    "qfield_residuals",
    "run_scenario",
    "sublaplacian_F",
    "set_thread_count",
]
