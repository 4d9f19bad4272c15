"""The frozen reference file must match a fresh run of the oracle script."""

import numpy as np


def _flatten(x):
    if isinstance(x, dict):
        return [v for k in sorted(x) for v in _flatten(x[k])]
    if isinstance(x, list):
        return [v for item in x for v in _flatten(item)]
    return [x]


def test_frozen_file_is_current(frozen, oracle_module):
    fresh = {
        "scalar": oracle_module.scalar_values(),
        "tridiag_eigs_8": oracle_module.tridiag_eigs(8),
        "circulant_psi_d8_gamma2": oracle_module.circulant_psi(8, 2),
        "decay_row_d200_r100": oracle_module.decay_row(),
        "dms_k1_rho6_m1": oracle_module.dms(),
        "bvp_scalar": oracle_module.bvp_scalar(),
    }
    assert sorted(fresh) == sorted(frozen)
    for key in fresh:
        a, b = np.array(_flatten(fresh[key])), np.array(_flatten(frozen[key]))
        np.testing.assert_array_equal(a, b, err_msg=key)


def test_oracle_does_not_import_library(oracle_module):
    import inspect
    assert "phimf" not in inspect.getsource(oracle_module).split('"""', 2)[2]
