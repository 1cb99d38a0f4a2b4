"""Independent oracles used by the tests.

Everything here is computed from first principles with numpy/stdlib only,
deliberately NOT reusing the package's formulas, so the tests check the
implementation against a second route.
"""

import math

import numpy as np

SQRT3 = math.sqrt(3.0)
# the two-group precoding vectors, written out literally
V1 = np.array([0.5, SQRT3 / 2.0])
V2 = np.array([-SQRT3 / 2.0, 0.5])


def matrix_rate_oracle(distances, exponent, total_power, sigma2, h, noise_sets, group_vectors):
    """Brute-force per-user hybrid rates via explicit T x T matrices.

    Builds H_k = sqrt(gamma_k) h_k I literally, evaluates the projected
    signal gain |v^T H v|^2 and the interference gain |H v|^2 with dense
    linear algebra, and assembles the SINR exactly as written.
    """
    distances = np.asarray(distances, dtype=float)
    slots = len(group_vectors[0])
    d_sq_total = float(np.sum(distances**2))
    rates = []
    for k in range(len(distances)):
        gamma = 1.0 / distances[k] ** exponent
        channel = math.sqrt(gamma) * h[k] * np.eye(slots)
        v = group_vectors[k]
        signal_gain = abs(v @ channel @ v) ** 2
        numerator = total_power * (distances[k] ** 2 / d_sq_total) * signal_gain
        interference = 0.0
        for j in noise_sets[k]:
            power_j = total_power * distances[j] ** 2 / d_sq_total
            interference += float(np.linalg.norm(channel @ v) ** 2) * power_j
        rates.append(math.log2(1.0 + numerator / (interference + sigma2)) / slots)
    return np.array(rates)


def reference_noise_sets():
    """Uncancelled same-group users for the 5-user cell in distance order."""
    return {0: [], 1: [], 2: [0], 3: [1], 4: [0, 2]}


def reference_group_vectors():
    return {0: V1, 1: V2, 2: V1, 3: V2, 4: V1}


def qfunc(x: float) -> float:
    """Gaussian tail probability."""
    return 0.5 * math.erfc(x / math.sqrt(2.0))


def awgn_qpsk_ber(es_over_sigma2: float) -> float:
    """Per-bit error rate of Gray QPSK on pure AWGN at symbol SNR Es/sigma^2."""
    return qfunc(math.sqrt(es_over_sigma2))


def rayleigh_qpsk_ber(mean_bit_snr: float) -> float:
    """Gray QPSK per-bit error rate averaged over unit Rayleigh fading."""
    return 0.5 * (1.0 - math.sqrt(mean_bit_snr / (1.0 + mean_bit_snr)))
