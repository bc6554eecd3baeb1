"""Frozen moments of the log kernel on the unit square.

``_LOG_MOMENTS[p][q]`` holds the value of the double integral of
``s**p * t**q * ln|s - t|`` over ``[0,1] x [0,1]``.  The table was
generated once with mpmath at 40 digits (closed-form inner integral,
adaptive outer quadrature) and is frozen here; tests cross-check the
low-order entries against their exact rational values.
"""

import numpy as np
_LOG_MOMENTS = [
    [-1.5, -0.75, -0.486111111111111111, -0.354166666666666667, -0.276111111111111111, -0.225, -0.189158163265306122, -0.162748015873015873, -0.142544091710758377, -0.126626984126984127, -0.113786949582404128, -0.103225709475709476],
    [-0.75, -0.4375, -0.305555555555555556, -0.232638888888888889, -0.186666666666666667, -0.155208333333333333, -0.132426303854875283, -0.115223214285714286, -0.101807760141093474, -0.0910747354497354497, -0.0823068345795618523, -0.0750191111798254655],
    [-0.486111111111111111, -0.305555555555555556, -0.222222222222222222, -0.173611111111111111, -0.141805555555555556, -0.119444444444444444, -0.102913832199546485, -0.0902281746031746032, -0.0802064961787184009, -0.0721031746031746032, -0.0654248889638500028, -0.0598326519159852493],
    [-0.354166666666666667, -0.232638888888888889, -0.173611111111111111, -0.138020833333333333, -0.114166666666666667, -0.0970833333333333333, -0.0842687074829931973, -0.0743179563492063492, -0.0663800705467372134, -0.059909297052154195, -0.0545396606760243124, -0.0500167222823472823],
    [-0.276111111111111111, -0.186666666666666667, -0.141805555555555556, -0.114166666666666667, -0.0953333333333333333, -0.0816666666666666667, -0.0713038548752834467, -0.0631845238095238095, -0.0566584782060972537, -0.0513042328042328042, -0.0468364243080152171, -0.043054954304954305],
    [-0.225, -0.155208333333333333, -0.119444444444444444, -0.0970833333333333333, -0.0816666666666666667, -0.0703703703703703704, -0.0617346938775510204, -0.054921343537414966, -0.0494121105232216343, -0.0448685515873015873, -0.0410599501508592418, -0.0378235062262840041],
    [-0.189158163265306122, -0.132426303854875283, -0.102913832199546485, -0.0842687074829931973, -0.0713038548752834467, -0.0617346938775510204, -0.0543731778425655977, -0.0485331632653061224, -0.0437881865709246662, -0.0398582766439909297, -0.0365516377962265408, -0.0337323060537346252],
    [-0.162748015873015873, -0.115223214285714286, -0.0902281746031746032, -0.0743179563492063492, -0.0631845238095238095, -0.054921343537414966, -0.0485331632653061224, -0.0434430803571428571, -0.0392912257495590829, -0.0358404982363315697, -0.0329278991210809393, -0.0304374849687349687],
    [-0.142544091710758377, -0.101807760141093474, -0.0802064961787184009, -0.0663800705467372134, -0.0566584782060972537, -0.0494121105232216343, -0.0437881865709246662, -0.0392912257495590829, -0.0356114050558495003, -0.0325440917107583774, -0.0299482560088620695, -0.0277233311955534178],
    [-0.126626984126984127, -0.0910747354497354497, -0.0721031746031746032, -0.059909297052154195, -0.0513042328042328042, -0.0448685515873015873, -0.0398582766439909297, -0.0358404982363315697, -0.0325440917107583774, -0.0297896825396825397, -0.0274534304079758625, -0.0254468658445931173],
    [-0.113786949582404128, -0.0823068345795618523, -0.0654248889638500028, -0.0545396606760243124, -0.0468364243080152171, -0.0410599501508592418, -0.0365516377962265408, -0.0329278991210809393, -0.0299482560088620695, -0.0274534304079758625, -0.025333321407701573, -0.0235091718046263501],
    [-0.103225709475709476, -0.0750191111798254655, -0.0598326519159852493, -0.0500167222823472823, -0.043054954304954305, -0.0378235062262840041, -0.0337323060537346252, -0.0304374849687349687, -0.0277233311955534178, -0.0254468658445931173, -0.0235091718046263501, -0.0218394260060926728],
]


def log_weight_matrix(nodes: np.ndarray) -> np.ndarray:
    """Quadrature weights for the kernel ln|s-t| on the unit square.

    Given 1D interpolation nodes in (0, 1), returns the matrix ``Lam``
    such that for a smooth function q,

        integral of q(s, t) * ln|s - t| over the unit square
            ~= sum_ij Lam[i, j] * q(nodes[i], nodes[j]),

    exact whenever q is a polynomial of degree < len(nodes) per axis.
    """
    n = len(nodes)
    if n > len(_LOG_MOMENTS):
        raise ValueError(f"moment table only supports up to {len(_LOG_MOMENTS)} nodes")
    vand = np.vander(np.asarray(nodes, dtype=float), n, increasing=True)
    coeff = np.linalg.inv(vand)  # coeff[p, i]: s^p coefficient of the i-th Lagrange poly
    moments = np.array(_LOG_MOMENTS, dtype=float)[:n, :n]
    return coeff.T @ moments @ coeff
