from typing import Callable, Optional, Type

# library-level debugging flag
_lc_debug: Optional[bool] = None


def reset_lc_debug(debug: Optional[bool] = None) -> bool:
    """Sets the library-wide debugging boolean."""
    global _lc_debug
    _lc_debug = debug if debug is not None else __debug__
    return _lc_debug


def lc_debug() -> bool:
    """Gets the library-wide debugging boolean.

    Used to bypass expensive invariant checks at runtime (e.g. posterior
    normalization after every update).  By default (if
    :py:func:`~lconsistency.debugging.reset_lc_debug` was not called), the
    value of `__debug__` is used.
    """
    return reset_lc_debug() if _lc_debug is None else _lc_debug


def checkraise(
    condition_f: Callable[[], bool],
    error_type: Type[Exception],
    error_message_fmt: str,
    *args,
    **kwargs,
):
    if lc_debug() and not condition_f():
        raise error_type(error_message_fmt.format(*args, **kwargs))
