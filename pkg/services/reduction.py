import numpy as np


def tree_sum(values):
    """Pairwise sum in fixed index order; identical inputs give bit-identical results"""
    values = [v for v in values]
    if not values:
        return 0.0
    while len(values) > 1:
        paired = [values[i] + values[i + 1] for i in range(0, len(values) - 1, 2)]
        if len(values) % 2:
            paired.append(values[-1])
        values = paired
    return values[0]


def tree_sum_array(values):
    """Pairwise sum along axis 0 of an array, vectorized per level"""
    values = np.asarray(values)
    if values.shape[0] == 0:
        return np.zeros(values.shape[1:], dtype=values.dtype)
    while values.shape[0] > 1:
        half = values.shape[0] // 2
        paired = values[0 : 2 * half : 2] + values[1 : 2 * half : 2]
        if values.shape[0] % 2:
            paired = np.concatenate([paired, values[-1:]], axis=0)
        values = paired
    return values[0]
