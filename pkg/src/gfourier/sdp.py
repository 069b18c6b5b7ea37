"""A small structured SDP solver: bisection over alternating projections.

The problem family: a list of Hermitian blocks whose entries are either fixed
complex data or shared affine variables; a designated subset of variables
("objective" variables, all sitting on block diagonals) whose common bound t
is minimized subject to every block being positive semidefinite.

Feasibility at a fixed t pins the objective variables to t (raising a
diagonal entry preserves feasibility, so this loses nothing) and is decided
by averaged alternating reflections between the affine structure subspace
and the product of PSD cones.  Bisection on t then brackets the optimum; the
returned value always carries a verified feasible witness.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEFAULT_REL_GAP = 1e-7
DEFAULT_CONV_TOL = 1e-9
DEFAULT_MAX_ITER = 50_000


class DiagBoundSdp:
    """Block problem builder.

    Entries are declared once per oriented position; the Hermitian mirror is
    implied.  Variables are named by arbitrary hashable keys; declaring an
    entry with ``conj=True`` stores the conjugate of the variable there.
    """

    def __init__(self):
        self.block_sizes: list[int] = []
        self._fixed: list[tuple[int, int, int, complex]] = []
        self._var_occ: dict[object, list[tuple[int, int, int, bool]]] = {}
        self._objective: list[object] = []

    def add_block(self, size: int) -> int:
        self.block_sizes.append(int(size))
        return len(self.block_sizes) - 1

    def entry_fixed(self, block: int, i: int, j: int, value: complex) -> None:
        self._fixed.append((block, i, j, complex(value)))

    def entry_var(self, block: int, i: int, j: int, key, conj: bool = False) -> None:
        self._var_occ.setdefault(key, []).append((block, i, j, conj))

    def objective_var(self, key) -> None:
        if key not in self._objective:
            self._objective.append(key)

    def var_keys(self) -> list[object]:
        return list(self._var_occ.keys())

    def validate(self) -> None:
        for key in self._objective:
            if key not in self._var_occ:
                raise ValueError(f"objective variable {key!r} never occurs")
            for b, i, j, conj in self._var_occ[key]:
                if i != j:
                    raise ValueError(
                        f"objective variable {key!r} occurs off the diagonal at {(b, i, j)}"
                    )
        for b, i, j, _ in self._fixed:
            if not (0 <= i < self.block_sizes[b] and 0 <= j < self.block_sizes[b]):
                raise ValueError("fixed entry out of range")

    # -- assembly -----------------------------------------------------------

    def blocks_for(self, values: dict, t: float | None = None) -> list[np.ndarray]:
        """Dense Hermitian blocks for a full variable assignment.

        Objective variables may be supplied in ``values`` or pinned to ``t``.
        """
        mats = [np.zeros((s, s), dtype=complex) for s in self.block_sizes]
        for b, i, j, v in self._fixed:
            mats[b][i, j] = v
            mats[b][j, i] = np.conj(v)
        for key, occs in self._var_occ.items():
            if key in values:
                v = complex(values[key])
            elif t is not None and key in self._objective:
                v = complex(t)
            else:
                raise KeyError(f"no value for variable {key!r}")
            for b, i, j, conj in occs:
                z = np.conj(v) if conj else v
                mats[b][i, j] = z
                mats[b][j, i] = np.conj(z)
        return mats

    def min_eigenvalue(self, values: dict, t: float | None = None) -> float:
        worst = np.inf
        for m in self.blocks_for(values, t):
            if m.size:
                worst = min(worst, float(np.linalg.eigvalsh(m)[0]))
        return 0.0 if worst is np.inf else worst

    def data_scale(self) -> float:
        return max(1.0, max((abs(v) for *_, v in self._fixed), default=0.0))


@dataclass
class SdpSolution:
    value: float
    variables: dict
    status: str
    probes: int = 0
    iterations: int = 0


class SdpInfeasibleError(RuntimeError):
    pass


class _Projector:
    """Precomputed index machinery for the affine/PSD alternating projections."""

    def __init__(self, problem: DiagBoundSdp):
        problem.validate()
        self.problem = problem
        self.sizes = problem.block_sizes
        self.offsets = np.concatenate([[0], np.cumsum([s * s for s in self.sizes])]).astype(int)
        self.total = int(self.offsets[-1])

        def flat(b, i, j):
            return int(self.offsets[b] + i * self.sizes[b] + j)

        fixed_idx, fixed_val = [], []
        for b, i, j, v in problem._fixed:
            fixed_idx += [flat(b, i, j), flat(b, j, i)]
            fixed_val += [v, np.conj(v)]
        self.fixed_idx = np.array(fixed_idx, dtype=int)
        self.fixed_val = np.array(fixed_val, dtype=complex)

        self.var_keys = [k for k in problem.var_keys() if k not in problem._objective]
        self.obj_keys = list(problem._objective)
        gather_idx, gather_conj, gather_var = [], [], []
        scatter_idx, scatter_conj, scatter_var = [], [], []
        for vi, key in enumerate(self.var_keys):
            for b, i, j, conj in problem._var_occ[key]:
                gather_idx.append(flat(b, i, j))
                gather_conj.append(conj)
                gather_var.append(vi)
                scatter_idx.append(flat(b, i, j))
                scatter_conj.append(conj)
                scatter_var.append(vi)
                if i != j:
                    gather_idx.append(flat(b, j, i))
                    gather_conj.append(not conj)
                    gather_var.append(vi)
                    scatter_idx.append(flat(b, j, i))
                    scatter_conj.append(not conj)
                    scatter_var.append(vi)
        self.gather_idx = np.array(gather_idx, dtype=int)
        self.gather_conj = np.array(gather_conj, dtype=bool)
        self.gather_var = np.array(gather_var, dtype=int)
        self.scatter_idx = np.array(scatter_idx, dtype=int)
        self.scatter_conj = np.array(scatter_conj, dtype=bool)
        self.scatter_var = np.array(scatter_var, dtype=int)
        self.var_counts = np.bincount(self.gather_var, minlength=len(self.var_keys)).astype(float)

        obj_idx = []
        for key in self.obj_keys:
            for b, i, j, conj in problem._var_occ[key]:
                obj_idx.append(flat(b, i, j))
        self.obj_idx = np.array(obj_idx, dtype=int)

        # blocks grouped by size so eigendecompositions run batched
        self.groups: list[tuple[int, np.ndarray]] = []
        by_size: dict[int, list[int]] = {}
        for b, s in enumerate(self.sizes):
            by_size.setdefault(s, []).append(b)
        for s, blocks in sorted(by_size.items()):
            idx = np.concatenate(
                [np.arange(self.offsets[b], self.offsets[b + 1]) for b in blocks]
            )
            self.groups.append((s, idx))

    def hermitianize(self, buf: np.ndarray) -> np.ndarray:
        out = buf.copy()
        for s, idx in self.groups:
            m = out[idx].reshape(-1, s, s)
            out[idx] = ((m + np.conj(np.swapaxes(m, 1, 2))) / 2).ravel()
        return out

    def project_affine(self, buf: np.ndarray, t: float) -> tuple[np.ndarray, np.ndarray]:
        """Orthogonal projection onto the structure subspace at objective level t."""
        out = self.hermitianize(buf)
        if len(self.var_keys):
            vals = out[self.gather_idx]
            vals = np.where(self.gather_conj, np.conj(vals), vals)
            sums = np.zeros(len(self.var_keys), dtype=complex)
            np.add.at(sums, self.gather_var, vals)
            means = sums / self.var_counts
            write = means[self.scatter_var]
            write = np.where(self.scatter_conj, np.conj(write), write)
            out[self.scatter_idx] = write
        else:
            means = np.zeros(0, dtype=complex)
        if self.fixed_idx.size:
            out[self.fixed_idx] = self.fixed_val
        if self.obj_idx.size:
            out[self.obj_idx] = t
        return out, means

    def project_psd(self, buf: np.ndarray) -> tuple[np.ndarray, float]:
        """Blockwise PSD projection; also returns the root-mean-square distance
        moved per block, so convergence thresholds are block-count invariant."""
        out = buf.copy()
        dist2 = 0.0
        for s, idx in self.groups:
            m = out[idx].reshape(-1, s, s)
            vals, vecs = np.linalg.eigh(m)
            if vals.size == 0 or vals.min() >= 0:
                continue
            clipped = np.clip(vals, 0.0, None)
            proj = np.einsum("bik,bk,bjk->bij", vecs, clipped, np.conj(vecs))
            dist2 += float(np.sum(np.abs(proj - m) ** 2))
            out[idx] = proj.ravel()
        return out, float(np.sqrt(dist2 / max(1, len(self.sizes))))

    def variables_from(self, buf: np.ndarray, t: float) -> dict:
        _, means = self.project_affine(buf, t)
        values = {k: complex(means[i]) for i, k in enumerate(self.var_keys)}
        for k in self.obj_keys:
            values[k] = complex(t)
        return values


def _feasible(
    proj: _Projector, t: float, x0: np.ndarray, conv_tol: float, max_iter: int,
    budget: int | None = None,
):
    """Feasibility by averaged alternating reflections of the two projections.

    The governing sequence reflects through the affine structure set and the
    PSD product cone; its affine shadow converges into the intersection when
    one exists, while for inconsistent problems the iterates drift at a rate
    equal to the gap between the sets, which is used to stop early.  Returns
    (feasible, affine_point, iterations).
    """
    scale = proj.problem.data_scale() + abs(t)
    z = x0.copy()
    drift_best = np.inf
    drift_best_at = 0
    check_every = 10
    slow_ok = 30 * conv_tol * scale
    relax = 1.7
    budget = min(max_iter, 6000 if budget is None else budget)
    nb = np.sqrt(max(1, len(proj.sizes)))
    for k in range(1, budget + 1):
        xa, _ = proj.project_affine(z, t)
        if k <= 4 or k % check_every == 0:
            _, dist = proj.project_psd(xa)
            if dist <= conv_tol * scale:
                return True, xa, k
            # slow tail inside a thin feasible set: accept with a slack the
            # final witness lift absorbs
            if k > 800 and dist <= slow_ok:
                return True, xa, k
        reflected, _ = proj.project_psd(2 * xa - z)
        step = reflected - xa
        z = z + relax * step
        drift = float(np.linalg.norm(step)) / nb
        if drift < drift_best * (1 - 1e-4):
            drift_best, drift_best_at = drift, k
        # drift stabilized above the convergence band: the sets do not meet
        if k > 120 and k - drift_best_at > 120 and drift_best > 40 * conv_tol * scale:
            return False, xa, k
    return False, proj.project_affine(z, t)[0], budget


def solve_diag_bound_sdp(
    problem: DiagBoundSdp,
    lower: float = 0.0,
    seeds: tuple[dict, ...] = (),
    rel_gap: float = DEFAULT_REL_GAP,
    conv_tol: float = DEFAULT_CONV_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    cap: float | None = None,
) -> SdpSolution:
    """Minimize the common bound t on the objective entries subject to PSD blocks.

    ``lower`` must be a sound lower bound for the optimum (0 works whenever
    the objective entries are diagonal).  ``seeds`` are candidate variable
    assignments; any that verify as feasible initialize the upper bracket.
    The returned value is always backed by a witness whose blocks are PSD.
    """
    proj = _Projector(problem)
    scale = problem.data_scale()
    psd_slack = 1e-10 * scale

    best_t = np.inf
    best_values: dict | None = None
    for seed in seeds:
        t_seed = max(
            [abs(complex(seed[k]).real) for k in problem._objective if k in seed] or [0.0]
        )
        t_seed = max(t_seed, lower)
        mu = problem.min_eigenvalue(seed, t=t_seed)
        if mu >= -psd_slack and t_seed < best_t:
            best_t = t_seed
            best_values = dict(seed)
            for k in problem._objective:
                best_values[k] = t_seed

    probes = 0
    iters = 0
    if best_values is not None and best_t <= lower + rel_gap * max(1.0, abs(lower)):
        return SdpSolution(float(best_t), best_values, "seeded", probes, iters)

    if best_values is None:
        hi = max(lower, 1.0, 2.0 * scale)
        limit = cap if cap is not None else 1e6 * max(1.0, scale)
        x = np.zeros(proj.total, dtype=complex)
        while True:
            ok, xa, k = _feasible(proj, hi, x, conv_tol, max_iter)
            probes += 1
            iters += k
            if ok:
                best_t = hi
                best_values = proj.variables_from(xa, hi)
                break
            if hi > limit:
                raise SdpInfeasibleError(
                    f"no feasible point found below the cap {limit:.3e}"
                )
            hi *= 4.0
    lo = lower
    hi = best_t
    x_warm = np.zeros(proj.total, dtype=complex)
    witness_buf = None
    # the optimum frequently sits exactly at the lower bound; probe it first
    if hi - lo > max(1e-12, rel_gap * max(1.0, hi)):
        ok, xa, k = _feasible(proj, lo, x_warm, conv_tol, max_iter)
        probes += 1
        iters += k
        if ok:
            hi = lo
            witness_buf = xa
    while hi - lo > max(1e-12, rel_gap * max(1.0, hi)):
        mid = 0.5 * (lo + hi)
        # misclassifying a probe inside a narrow bracket costs at most the
        # bracket, so the endgame runs on a reduced iteration budget
        narrow = hi - lo <= 2e-6 * max(1.0, hi)
        ok, xa, k = _feasible(
            proj, mid, x_warm, conv_tol, max_iter, budget=700 if narrow else None
        )
        probes += 1
        iters += k
        if ok:
            hi = mid
            witness_buf = xa
            x_warm = xa
        else:
            lo = mid
    if witness_buf is not None:
        values = proj.variables_from(witness_buf, hi)
        for _ in range(5):
            mu = problem.min_eigenvalue(values, t=hi)
            if mu >= 0:
                break
            lift = -mu * (1 + 1e-3)
            hi = hi + lift
            values = {k: (complex(v) + lift if k in problem._objective else v)
                      for k, v in values.items()}
        best_t, best_values = hi, values
    return SdpSolution(float(best_t), best_values, "optimal", probes, iters)
