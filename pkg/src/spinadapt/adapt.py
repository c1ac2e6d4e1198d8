"""Statevector ADAPT-VQE over excitation pools on a symmetry sector.

Unitaries e^{theta A} are applied with the generator's closed-form
trigonometric polynomial: the interpolating polynomial of e^{theta z} on
the generator's distinct eigenvalues, evaluated by sparse matrix-vector
products.  A dense exponential on the generator's support doubles as the
cross-checking fallback.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .expm import AntiHermitianEigen, require_anti_hermitian
from .fermiops import OperatorSum, to_matrix
from .pools import SpinAdaptedGenerator

EIGENVALUE_CLUSTER_TOL = 1e-10
PATH_AGREEMENT_TOL = 1e-10


class PreparedGenerator:
    """A pool operator bound to a sector basis, ready for repeated use."""

    def __init__(self, op, basis, label=""):
        body = op.body if isinstance(op, SpinAdaptedGenerator) else op
        if not isinstance(body, OperatorSum):
            raise TypeError("expected an OperatorSum or SpinAdaptedGenerator")
        self.label = label or getattr(op, "label", "")
        self.source = op
        mat = to_matrix(body, basis, check_closure=True).tocsr()
        self.sparse = mat
        dim = mat.shape[0]
        rows = mat.tocoo()
        touched = np.union1d(np.unique(rows.row), np.unique(rows.col))
        self.support = touched
        if len(touched) == 0:
            # operator vanishes on this sector: e^{theta A} = identity
            self.eigen = None
            self.nodes = np.zeros(1, dtype=complex)
            return
        block = np.asarray(mat[np.ix_(touched, touched)].todense())
        require_anti_hermitian(block, tol=1e-10)
        self.eigen = AntiHermitianEigen(block)
        mu = self.eigen.mu
        if len(touched) < dim:
            mu = np.concatenate([mu, [0.0]])
        self.nodes = 1j * _distinct(mu)

    def expm_apply(self, theta, vec):
        """Fast path: closed-form polynomial in the sparse generator."""
        nodes = self.nodes
        vand = nodes[:, None] ** np.arange(len(nodes))[None, :]
        coeffs = np.linalg.solve(vand, np.exp(theta * nodes))
        out = coeffs[-1] * vec
        for c in coeffs[-2::-1]:
            out = self.sparse @ out + c * vec
        return out

    def expm_apply_exact(self, theta, vec):
        """Fallback: dense exponential on the generator's support."""
        out = np.array(vec, dtype=complex)
        if self.eigen is not None:
            out[self.support] = self.eigen.expm(theta) @ out[self.support]
        return out


def _distinct(values, tol=EIGENVALUE_CLUSTER_TOL):
    ordered = np.sort(np.asarray(values, dtype=float))
    keep = [ordered[0]]
    for v in ordered[1:]:
        if v - keep[-1] > tol:
            keep.append(v)
    return np.array(keep)


def apply_unitary(prep: PreparedGenerator, theta, vec, method="fast"):
    """Apply e^{theta A} for a prepared generator to a statevector."""
    if method == "fast":
        return prep.expm_apply(theta, vec)
    if method == "exact":
        return prep.expm_apply_exact(theta, vec)
    raise ValueError(f"unknown method {method!r}")


@dataclass
class AnsatzState:
    """Ordered product ansatz applied to a reference determinant."""

    generators: list
    thetas: np.ndarray
    reference_index: int
    vector: np.ndarray

    def check_norm(self, tol=1e-10):
        norm = np.linalg.norm(self.vector)
        if abs(norm - 1.0) > tol:
            raise ValueError(f"statevector norm drifted to {norm}")
        return norm


def _forward_states(generators, thetas, ref_vec):
    states = [ref_vec]
    for prep, theta in zip(generators, thetas):
        states.append(prep.expm_apply(theta, states[-1]))
    return states


def ansatz_vector(generators, thetas, ref_vec):
    return _forward_states(generators, thetas, ref_vec)[-1]


def energy_and_gradient(Hmat, generators, thetas, ref_vec):
    """E = <psi|H|psi> and dE/dtheta_k = 2 Re <b_k|A_k psi_k> via one
    forward pass and one reverse sweep."""
    states = _forward_states(generators, thetas, ref_vec)
    psi = states[-1]
    hpsi = Hmat @ psi
    energy = float(np.real(np.vdot(psi, hpsi)))
    grads = np.zeros(len(thetas))
    b = hpsi
    for k in range(len(thetas) - 1, -1, -1):
        prep = generators[k]
        grads[k] = 2.0 * float(np.real(np.vdot(b, prep.sparse @ states[k + 1])))
        b = prep.expm_apply(-thetas[k], b)
    return energy, grads


@dataclass
class AdaptResult:
    trajectory: list = field(default_factory=list)
    status: str = "running"
    ansatz: AnsatzState = None

    @property
    def energies(self):
        return [row["energy"] for row in self.trajectory]


def adapt_vqe(
    Hmat,
    pool,
    reference_index,
    grad_tol=1e-9,
    energy_tol=0.0,
    max_iters=250,
    fci_energy=None,
    s2_mat=None,
):
    """Grow the ansatz greedily by largest energy-gradient pool operator.

    Per macro-iteration: screen g_i = <psi|[H, A_i]|psi> over the pool,
    append the largest-|g| operator (ties to the lowest pool index), and
    re-optimize every amplitude by warm-started quasi-Newton with analytic
    gradients.  Stops when max|g| < grad_tol, when the energy improvement
    drops below energy_tol, or after max_iters additions; an optimization
    step that fails to lower the energy terminates with status "stagnated".
    """
    dim = Hmat.shape[0]
    ref_vec = np.zeros(dim, dtype=complex)
    ref_vec[reference_index] = 1.0
    if fci_energy is None:
        fci_energy = float(np.linalg.eigvalsh(Hmat)[0])

    chosen = []
    thetas = np.zeros(0)
    result = AdaptResult()
    psi = ref_vec
    prev_energy = float(np.real(np.vdot(psi, Hmat @ psi)))

    for it in range(1, max_iters + 1):
        hpsi = Hmat @ psi
        grads = np.array(
            [2.0 * float(np.real(np.vdot(hpsi, p.sparse @ psi))) for p in pool]
        )
        best = int(np.argmax(np.abs(grads)))
        max_grad = abs(grads[best])
        if max_grad < grad_tol:
            result.status = "gradient_converged"
            break

        chosen.append(pool[best])
        thetas = np.append(thetas, 0.0)

        def objective(x):
            return energy_and_gradient(Hmat, chosen, x, ref_vec)

        opt = minimize(
            objective,
            thetas,
            jac=True,
            method="BFGS",
            options={"gtol": 1e-10, "maxiter": 600},
        )
        thetas = opt.x
        psi = ansatz_vector(chosen, thetas, ref_vec)
        energy = float(np.real(np.vdot(psi, Hmat @ psi)))
        s2_expval = (
            float(np.real(np.vdot(psi, s2_mat @ psi))) if s2_mat is not None else 0.0
        )
        result.trajectory.append(
            {
                "iter": it,
                "n_params": len(thetas),
                "energy": energy,
                "error_vs_fci": energy - fci_energy,
                "max_grad": max_grad,
                "s2_expval": s2_expval,
            }
        )
        if energy > prev_energy + 1e-12:
            result.status = "stagnated"
            break
        if abs(energy - prev_energy) < energy_tol:
            prev_energy = energy
            result.status = "energy_converged"
            break
        prev_energy = energy
    else:
        result.status = "max_iters"

    result.ansatz = AnsatzState(chosen, thetas, reference_index, psi)
    result.ansatz.check_norm()
    return result
