"""Independent Gaussian-state builders used as test oracles."""

import numpy as np


def rotation(theta):
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


def local_rotations(theta1, theta2):
    R = np.zeros((4, 4))
    R[:2, :2] = rotation(theta1)
    R[2:, 2:] = rotation(theta2)
    return R


def single_mode_squeezers(r1, r2):
    return np.diag([np.exp(-r1), np.exp(r1), np.exp(-r2), np.exp(r2)])


def beam_splitter(theta):
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, 0, s, 0], [0, c, 0, s], [-s, 0, c, 0], [0, -s, 0, c]])


def two_mode_squeezer(r):
    c, s = np.cosh(r), np.sinh(r)
    Z = np.diag([1.0, -1.0])
    S = np.zeros((4, 4))
    S[:2, :2] = c * np.eye(2)
    S[2:, 2:] = c * np.eye(2)
    S[:2, 2:] = s * Z
    S[2:, :2] = s * Z
    return S


def two_mode_squeezed_vacuum(r):
    S = two_mode_squeezer(r)
    return 0.5 * S @ S.T


def random_symplectic(rng):
    S = local_rotations(*rng.uniform(0, 2 * np.pi, 2))
    S = single_mode_squeezers(*rng.uniform(-1, 1, 2)) @ S
    S = beam_splitter(rng.uniform(0, np.pi)) @ S
    S = two_mode_squeezer(rng.uniform(-1, 1)) @ S
    S = local_rotations(*rng.uniform(0, 2 * np.pi, 2)) @ S
    return S
