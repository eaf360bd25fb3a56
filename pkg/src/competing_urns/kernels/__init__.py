"""Hot loops. Compiled with numba unless ``COMPETING_URNS_DISABLE_NUMBA`` is set."""
