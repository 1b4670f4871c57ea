"""Brute-force state-vector evaluation of the qubit-qubit Jaynes-Cummings sweep.

Independent of the Rust code path: builds U with scipy's expm, works with
state vectors, and evaluates the conditional values from their definitions.
Prints: phi, outcome, probability, delta_coherent, delta_decohered, difference.
"""
import sys
import numpy as np
from scipy.linalg import expm

ket0 = np.array([1, 0], dtype=complex)
ket1 = np.array([0, 1], dtype=complex)
raise_op = np.outer(ket1, ket0)
h_int = np.kron(raise_op, raise_op.conj().T) + np.kron(raise_op.conj().T, raise_op)
u = expm(-1j * (np.pi / 3) * h_int)
xi = np.cos(np.pi / 6) * ket1 + np.sin(np.pi / 6) * ket0
obs = np.outer(ket1, ket1) - np.outer(ket0, ket0)
pointer = {"+": np.outer(ket1, ket1), "-": np.outer(ket0, ket0)}
eye = np.eye(2)


def values(rho, proj):
    joint = u @ np.kron(rho, np.outer(xi, xi.conj())) @ u.conj().T
    big_p = np.kron(eye, proj)
    p = np.trace(big_p @ joint).real
    after = np.trace(np.kron(obs, proj) @ joint).real / p
    sym = 0.5 * (obs @ rho + rho @ obs)
    before = np.trace(big_p @ u @ np.kron(sym, np.outer(xi, xi.conj())) @ u.conj().T).real / p
    return p, after - before


steps = int(sys.argv[1]) if len(sys.argv) > 1 else 201
for k in range(steps):
    phi = 2 * np.pi * k / (steps - 1)
    psi = np.cos(np.pi / 8) * ket1 + np.exp(1j * phi) * np.sin(np.pi / 8) * ket0
    rho = np.outer(psi, psi.conj())
    rho_dec = np.diag(np.diag(rho))
    for label, proj in pointer.items():
        p, d = values(rho, proj)
        _, dd = values(rho_dec, proj)
        print(f"{phi:.17e},{label},{p:.17e},{d:.17e},{dd:.17e},{d - dd:.17e}")
