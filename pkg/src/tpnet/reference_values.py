"""Published L-infinity errors used as a side-by-side column in table sweeps.

Keys are ``(architecture, M)`` for the M-sweep tables, ``(architecture, d)``
for the high-dimensional Poisson table (``hlconc`` at M=2500, tensor-product
variants at M=10000) and ``(architecture, "on"|"off")`` for the time-block
table (M=10000).  Values are transcribed verbatim.
"""

REFERENCE_L_INF = {
    1: {
        ('hlconc', 100): 8.77e-01,
        ('tp-elm', 100): 9.22e-01,
        ('tp-mlp', 100): 8.60e-01,
        ('tp-resnet', 100): 8.77e-01,
        ('hlconc', 400): 3.05e-04,
        ('tp-elm', 400): 9.16e-05,
        ('tp-mlp', 400): 5.37e-04,
        ('tp-resnet', 400): 2.75e-03,
        ('hlconc', 900): 2.07e-06,
        ('tp-elm', 900): 4.86e-06,
        ('tp-mlp', 900): 5.18e-07,
        ('tp-resnet', 900): 1.66e-04,
        ('hlconc', 1600): 8.16e-08,
        ('tp-elm', 1600): 1.55e-06,
        ('tp-mlp', 1600): 8.52e-08,
        ('tp-resnet', 1600): 9.95e-08,
        ('hlconc', 2500): 1.72e-08,
        ('tp-elm', 2500): 8.94e-06,
        ('tp-mlp', 2500): 4.82e-07,
        ('tp-resnet', 2500): 2.31e-09,
        ('hlconc', 3600): 7.74e-08,
        ('tp-elm', 3600): 4.88e-06,
        ('tp-mlp', 3600): 2.03e-08,
        ('tp-resnet', 3600): 8.55e-11,
        ('hlconc', 4900): 1.75e-08,
        ('tp-elm', 4900): 8.34e-07,
        ('tp-mlp', 4900): 4.28e-08,
        ('tp-resnet', 4900): 1.93e-10,
        ('hlconc', 6400): 1.65e-08,
        ('tp-elm', 6400): 1.87e-07,
        ('tp-mlp', 6400): 2.50e-08,
        ('tp-resnet', 6400): 6.32e-11,
        ('hlconc', 8100): 4.55e-08,
        ('tp-elm', 8100): 7.17e-07,
        ('tp-mlp', 8100): 4.15e-08,
        ('tp-resnet', 8100): 6.11e-10,
        ('hlconc', 10000): 4.62e-08,
        ('tp-elm', 10000): 7.66e-07,
        ('tp-mlp', 10000): 4.80e-08,
        ('tp-resnet', 10000): 1.43e-10,
    },
    2: {
        ('hlconc', 100): 1.39e+02,
        ('tp-elm', 100): 5.34e+01,
        ('tp-mlp', 100): 7.15e+01,
        ('tp-resnet', 100): 8.78e+01,
        ('hlconc', 400): 1.93e-02,
        ('tp-elm', 400): 8.21e-03,
        ('tp-mlp', 400): 1.75e-01,
        ('tp-resnet', 400): 1.26e+00,
        ('hlconc', 900): 3.06e-05,
        ('tp-elm', 900): 1.04e-05,
        ('tp-mlp', 900): 2.59e-05,
        ('tp-resnet', 900): 4.54e-02,
        ('hlconc', 1600): 3.05e-07,
        ('tp-elm', 1600): 8.97e-06,
        ('tp-mlp', 1600): 2.29e-07,
        ('tp-resnet', 1600): 1.02e-04,
        ('hlconc', 2500): 1.72e-08,
        ('tp-elm', 2500): 3.24e-06,
        ('tp-mlp', 2500): 1.03e-07,
        ('tp-resnet', 2500): 3.27e-07,
        ('hlconc', 3600): 2.01e-08,
        ('tp-elm', 3600): 2.51e-06,
        ('tp-mlp', 3600): 6.66e-08,
        ('tp-resnet', 3600): 1.51e-10,
        ('hlconc', 4900): 9.02e-09,
        ('tp-elm', 4900): 8.64e-07,
        ('tp-mlp', 4900): 1.67e-08,
        ('tp-resnet', 4900): 1.86e-10,
        ('hlconc', 6400): 9.05e-09,
        ('tp-elm', 6400): 6.37e-07,
        ('tp-mlp', 6400): 4.09e-08,
        ('tp-resnet', 6400): 4.93e-11,
        ('hlconc', 8100): 9.12e-09,
        ('tp-elm', 8100): 5.34e-07,
        ('tp-mlp', 8100): 1.11e-08,
        ('tp-resnet', 8100): 6.22e-10,
        ('hlconc', 10000): 2.56e-08,
        ('tp-elm', 10000): 2.58e-07,
        ('tp-mlp', 10000): 1.79e-08,
        ('tp-resnet', 10000): 1.66e-10,
    },
    4: {
        ('hlconc', 100): 1.83e-02,
        ('tp-elm', 100): 4.86e-02,
        ('tp-mlp', 100): 3.63e-01,
        ('tp-resnet', 100): 4.54e-01,
        ('hlconc', 400): 1.05e-06,
        ('tp-elm', 400): 2.35e-05,
        ('tp-mlp', 400): 2.40e-03,
        ('tp-resnet', 400): 5.89e-02,
        ('hlconc', 900): 1.11e-09,
        ('tp-elm', 900): 1.22e-08,
        ('tp-mlp', 900): 6.25e-06,
        ('tp-resnet', 900): 5.23e-03,
        ('hlconc', 1600): 1.08e-09,
        ('tp-elm', 1600): 2.40e-11,
        ('tp-mlp', 1600): 4.01e-08,
        ('tp-resnet', 1600): 2.45e-04,
        ('hlconc', 2500): 7.14e-09,
        ('tp-elm', 2500): 2.56e-12,
        ('tp-mlp', 2500): 2.06e-10,
        ('tp-resnet', 2500): 3.18e-06,
        ('hlconc', 3600): 9.20e-09,
        ('tp-elm', 3600): 2.78e-12,
        ('tp-mlp', 3600): 2.38e-12,
        ('tp-resnet', 3600): 1.10e-07,
        ('hlconc', 4900): 8.48e-08,
        ('tp-elm', 4900): 1.83e-12,
        ('tp-mlp', 4900): 9.35e-13,
        ('tp-resnet', 4900): 9.97e-09,
        ('hlconc', 6400): 2.09e-07,
        ('tp-elm', 6400): 1.41e-12,
        ('tp-mlp', 6400): 9.31e-13,
        ('tp-resnet', 6400): 2.06e-10,
        ('hlconc', 8100): 8.46e-07,
        ('tp-elm', 8100): 2.37e-12,
        ('tp-mlp', 8100): 5.26e-13,
        ('tp-resnet', 8100): 1.16e-11,
        ('hlconc', 10000): 1.12e-06,
        ('tp-elm', 10000): 2.35e-12,
        ('tp-mlp', 10000): 6.68e-13,
        ('tp-resnet', 10000): 1.73e-12,
    },
    5: {
        ('hlconc', 100): 3.32e-02,
        ('tp-elm', 100): 7.62e-02,
        ('tp-mlp', 100): 1.46e-01,
        ('tp-resnet', 100): 6.04e-01,
        ('hlconc', 400): 5.99e-07,
        ('tp-elm', 400): 3.38e-05,
        ('tp-mlp', 400): 3.82e-03,
        ('tp-resnet', 400): 1.20e-01,
        ('hlconc', 900): 6.37e-10,
        ('tp-elm', 900): 9.34e-09,
        ('tp-mlp', 900): 1.56e-05,
        ('tp-resnet', 900): 5.09e-03,
        ('hlconc', 1600): 6.55e-10,
        ('tp-elm', 1600): 2.24e-11,
        ('tp-mlp', 1600): 8.03e-08,
        ('tp-resnet', 1600): 3.02e-04,
        ('hlconc', 2500): 2.88e-09,
        ('tp-elm', 2500): 4.55e-12,
        ('tp-mlp', 2500): 1.29e-10,
        ('tp-resnet', 2500): 4.77e-06,
        ('hlconc', 3600): 5.55e-09,
        ('tp-elm', 3600): 1.48e-12,
        ('tp-mlp', 3600): 2.51e-12,
        ('tp-resnet', 3600): 1.35e-07,
        ('hlconc', 4900): 5.34e-08,
        ('tp-elm', 4900): 3.47e-12,
        ('tp-mlp', 4900): 9.01e-13,
        ('tp-resnet', 4900): 5.67e-09,
        ('hlconc', 6400): 2.40e-07,
        ('tp-elm', 6400): 1.76e-12,
        ('tp-mlp', 6400): 6.98e-13,
        ('tp-resnet', 6400): 1.93e-10,
        ('hlconc', 8100): 5.19e-07,
        ('tp-elm', 8100): 2.05e-12,
        ('tp-mlp', 8100): 5.96e-13,
        ('tp-resnet', 8100): 1.20e-11,
        ('hlconc', 10000): 3.01e-06,
        ('tp-elm', 10000): 2.33e-12,
        ('tp-mlp', 10000): 2.02e-13,
        ('tp-resnet', 10000): 1.51e-12,
    },
    6: {
        ('hlconc', 100): 6.66e-04,
        ('tp-elm', 100): 1.79e-03,
        ('tp-mlp', 100): 2.34e-02,
        ('tp-resnet', 100): 4.70e-01,
        ('hlconc', 400): 6.50e-10,
        ('tp-elm', 400): 1.46e-07,
        ('tp-mlp', 400): 1.66e-04,
        ('tp-resnet', 400): 2.53e-02,
        ('hlconc', 900): 2.45e-14,
        ('tp-elm', 900): 2.08e-11,
        ('tp-mlp', 900): 1.28e-07,
        ('tp-resnet', 900): 8.77e-04,
        ('hlconc', 1600): 3.76e-14,
        ('tp-elm', 1600): 1.48e-14,
        ('tp-mlp', 1600): 5.69e-10,
        ('tp-resnet', 1600): 2.99e-05,
        ('hlconc', 2500): 6.95e-13,
        ('tp-elm', 2500): 1.11e-15,
        ('tp-mlp', 2500): 4.90e-13,
        ('tp-resnet', 2500): 1.78e-07,
        ('hlconc', 3600): 2.04e-12,
        ('tp-elm', 3600): 1.78e-15,
        ('tp-mlp', 3600): 6.33e-15,
        ('tp-resnet', 3600): 3.15e-09,
        ('hlconc', 4900): 7.65e-12,
        ('tp-elm', 4900): 1.22e-15,
        ('tp-mlp', 4900): 3.77e-15,
        ('tp-resnet', 4900): 2.76e-10,
        ('hlconc', 6400): 1.96e-11,
        ('tp-elm', 6400): 1.33e-15,
        ('tp-mlp', 6400): 3.55e-15,
        ('tp-resnet', 6400): 8.38e-12,
        ('hlconc', 8100): 7.64e-11,
        ('tp-elm', 8100): 3.22e-15,
        ('tp-mlp', 8100): 1.11e-15,
        ('tp-resnet', 8100): 2.67e-13,
        ('hlconc', 10000): 1.45e-10,
        ('tp-elm', 10000): 2.33e-15,
        ('tp-mlp', 10000): 1.11e-15,
        ('tp-resnet', 10000): 4.09e-14,
    },
    7: {
        ('hlconc', 5): 2.13e-08,
        ('tp-elm', 5): 2.24e-07,
        ('tp-mlp', 5): 2.37e-09,
        ('tp-resnet', 5): 7.28e-09,
        ('hlconc', 7): 1.32e-05,
        ('tp-elm', 7): 1.10e-04,
        ('tp-mlp', 7): 3.48e-06,
        ('tp-resnet', 7): 3.93e-06,
        ('hlconc', 10): 1.57e-03,
        ('tp-elm', 10): 1.99e-03,
        ('tp-mlp', 10): 1.24e-04,
        ('tp-resnet', 10): 2.02e-04,
        ('hlconc', 15): 3.87e-03,
        ('tp-elm', 15): 1.79e-02,
        ('tp-mlp', 15): 7.56e-03,
        ('tp-resnet', 15): 6.30e-03,
    },
    8: {
        ('hlconc', 'off'): 1.05e+00,
        ('hlconc', 'on'): 1.29e-06,
        ('tp-elm', 'off'): 2.49e+02,
        ('tp-elm', 'on'): 1.19e-04,
        ('tp-mlp', 'off'): 6.10e-01,
        ('tp-mlp', 'on'): 1.22e-06,
        ('tp-resnet', 'off'): 3.35e-04,
        ('tp-resnet', 'on'): 1.92e-08,
    },
}


def reference_l_inf(table, architecture, key):
    """Published value for one cell, or ``None`` when the table has no such cell."""
    return REFERENCE_L_INF.get(int(table), {}).get((architecture, key))
