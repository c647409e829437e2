"""TOML loader shim (``tomllib`` on 3.11+, ``tomli`` before)."""
try:
    from tomllib import loads  # type: ignore[import-not-found]
except ModuleNotFoundError:  # pragma: no cover - depends on interpreter
    from tomli import loads

__all__ = ["loads"]
