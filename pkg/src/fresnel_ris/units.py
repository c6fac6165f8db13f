"""Physical constants and decibel conversions used across the package."""

import numpy as np

C0 = 299_792_458.0          # m/s
ETA0 = 376.730313668        # ohm, free-space impedance


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


def wavelength(frequency_hz):
    if frequency_hz <= 0:
        raise ValueError(f"frequency must be positive, got {frequency_hz}")
    return C0 / frequency_hz


def db_to_lin(x_db):
    return _out(np.power(10.0, np.asarray(x_db, dtype=float) / 10.0))


def lin_to_db(x):
    with np.errstate(divide="ignore"):
        return _out(10.0 * np.log10(np.asarray(x, dtype=float)))


def dbm_to_w(p_dbm):
    # -90 dBm -> 1e-12 W
    return _out(np.power(10.0, (np.asarray(p_dbm, dtype=float) - 30.0) / 10.0))


def w_to_dbm(p_w):
    with np.errstate(divide="ignore"):
        return _out(10.0 * np.log10(np.asarray(p_w, dtype=float)) + 30.0)
