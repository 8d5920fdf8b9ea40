"""Schur multipliers of odd-p class-2 groups with elementary quotient and
derived subgroup, by the Blackburn-Evens tensor construction.

Write V = G/G' and W = G' as GF(p) spaces, with the commutator pairing
(v1, v2) = [g1, g2] and the power map f(gG') = g^p (linear for odd p at
class 2 with exp(G') = p, since the class-2 expansion of (xy)^p leaves a
commutator factor with exponent p(p-1)/2, a multiple of p).  Inside V (x) W
sit two subspaces:

  X1 = span of  v1 (x) (v2,v3) + v2 (x) (v3,v1) + v3 (x) (v1,v2)
  X2 = span of  v (x) f(v)

and X = X1 + X2.  With N = V (x) W / X and rho(v1 ^ v2) = (v1, v2), the
multiplier is an extension of ker(rho) by N whose p-th power map is induced
by sigma(v1 ^ v2) = v1 (x) f(v2) + binom(p,2) v2 (x) (v1,v2) + X.  So
|M(G)| = |N| * |V ^ V| / |W|, the p-torsion count |ker(sigma-bar)| * |N|
fixes the number of Z_{p^2} factors, and everything reduces to GF(p)
echelon algebra in dimension dim(V) * dim(W).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb

import numpy as np

from .abelian import AbelianGroup
from .pcgroup import (
    NormalWord,
    PcPresentation,
    Subgroup,
    _central_quotient_map,
    structure_report,
)
from .results import METHOD_BE, MultiplierResult


class BePreconditionError(ValueError):
    """The construction's hypotheses fail; `reason` carries which one."""

    def __init__(self, reason: str, detail: str = ""):
        self.reason = reason
        super().__init__(f"{reason}" + (f": {detail}" if detail else ""))


# -- GF(p) echelon helpers ----------------------------------------------------


def _rref(rows: np.ndarray, p: int) -> np.ndarray:
    """Reduced row echelon form over GF(p); zero rows dropped."""
    a = np.array(rows, dtype=np.int64) % p
    m, n = a.shape if a.ndim == 2 else (0, 0)
    r = 0
    for c in range(n):
        if r == m:
            break
        piv = None
        for i in range(r, m):
            if a[i, c] % p:
                piv = i
                break
        if piv is None:
            continue
        a[[r, piv]] = a[[piv, r]]
        a[r] = (a[r] * pow(int(a[r, c]), -1, p)) % p
        for i in range(m):
            if i != r and a[i, c]:
                a[i] = (a[i] - a[i, c] * a[r]) % p
        r += 1
    return a[:r] if m else a.reshape(0, n)


def _in_span(basis: np.ndarray, v: np.ndarray, p: int) -> bool:
    if basis.shape[0] == 0:
        return not np.any(v % p)
    stacked = _rref(np.vstack([basis, v % p]), p)
    return stacked.shape[0] == basis.shape[0]


def _nullspace(a: np.ndarray, p: int) -> np.ndarray:
    """Columns form a basis of the right nullspace over GF(p)."""
    a = np.array(a, dtype=np.int64) % p
    m, n = a.shape
    r = _rref(a, p)
    pivots = []
    j = 0
    for i in range(r.shape[0]):
        while j < n and r[i, j] % p == 0:
            j += 1
        pivots.append(j)
    free = [c for c in range(n) if c not in pivots]
    basis = np.zeros((n, len(free)), dtype=np.int64)
    for idx, c in enumerate(free):
        basis[c, idx] = 1
        for i, pc in enumerate(pivots):
            basis[pc, idx] = (-r[i, c]) % p
    return basis


# -- construction data ---------------------------------------------------------


@dataclass
class BeData:
    p: int
    dim_v: int
    dim_w: int
    reps: list[NormalWord]            # coset representatives of the V-basis
    pairing: np.ndarray               # (dV, dV, dW): (v_i, v_j) in W coordinates
    power_map: np.ndarray             # (dW, dV): f on the basis
    x_basis: np.ndarray               # echelon basis of X inside V (x) W
    derived: Subgroup

    def tensor_dim(self) -> int:
        return self.dim_v * self.dim_w

    def x_dim(self) -> int:
        return self.x_basis.shape[0]

    def jacobi_element(self, u: np.ndarray, v: np.ndarray, w: np.ndarray) -> np.ndarray:
        """u (x) (v,w) + v (x) (w,u) + w (x) (u,v) for arbitrary V-vectors."""
        p = self.p
        pair = lambda x, y: np.einsum("i,j,ijk->k", x, y, self.pairing) % p
        out = (np.outer(u, pair(v, w)) + np.outer(v, pair(w, u))
               + np.outer(w, pair(u, v))) % p
        return out.reshape(-1)

    def power_element(self, v: np.ndarray) -> np.ndarray:
        """v (x) f(v) for an arbitrary V-vector."""
        fv = (self.power_map @ v) % self.p
        return np.outer(v, fv).reshape(-1) % self.p

    def in_x(self, vec: np.ndarray) -> bool:
        return _in_span(self.x_basis, vec % self.p, self.p)


@dataclass
class BeExtensionData:
    ker_rho: np.ndarray               # (C(dV,2), dK) basis of ker rho in wedge coords
    sigma_bar: np.ndarray             # (dN-codim... ) image coords of sigma on ker rho
    dim_n: int
    dim_ker_rho: int
    dim_ker_sigma_bar: int


def _w_coordinates(pres: PcPresentation, derived: Subgroup, x: NormalWord, p: int) -> np.ndarray:
    """Coordinates of x in the elementary abelian G' w.r.t. its echelon basis."""
    coords = []
    y = tuple(x)
    for l, u in derived.igs.items():
        e = y[l] % p
        coords.append(e)
        if e:
            y = pres.mul(pres.pow_el(u, -e), y)
    if y != pres.identity:
        raise ValueError("element not in the derived subgroup")
    return np.array(coords, dtype=np.int64)


def build_be_data(pres: PcPresentation, reps: list[NormalWord] | None = None) -> BeData:
    """Assemble pairing, power map, and X for an applicable presentation.

    Preconditions are reported individually: odd p, nilpotency class exactly
    2, and both G/G' and G' elementary abelian.
    """
    p = pres.p
    if p == 2:
        raise BePreconditionError("even prime", "the construction needs p odd")
    st = structure_report(pres)
    if st.nilpotency_class != 2:
        raise BePreconditionError("wrong class", f"class is {st.nilpotency_class}, need 2")
    if not st.quotient_is_elementary():
        raise BePreconditionError("quotient not elementary abelian")
    if not st.derived_is_elementary():
        raise BePreconditionError("derived subgroup not elementary abelian")
    derived = st.derived
    quotient, survivors = _central_quotient_map(pres, derived)
    dim_v = quotient.order_exponent
    dim_w = derived.order_exponent

    def v_coords(x: NormalWord) -> np.ndarray:
        # image of x in G/G' as a GF(p) vector over the surviving generators;
        # igs leading entries are 1 here (elementary abelian, normalized)
        y = tuple(x)
        for l in sorted(derived.igs):
            if y[l]:
                y = pres.mul(pres.pow_el(derived.igs[l], -y[l]), y)
        return np.array([y[i] % p for i in survivors], dtype=np.int64)

    if reps is None:
        reps = [pres.gen(i) for i in survivors]
    else:
        reps = [tuple(r) for r in reps]
        mat = np.array([v_coords(r) for r in reps], dtype=np.int64)
        if len(reps) != dim_v or _rref(mat, p).shape[0] != dim_v:
            raise ValueError("representatives do not project to a V-basis")

    pairing = np.zeros((dim_v, dim_v, dim_w), dtype=np.int64)
    for i in range(dim_v):
        for j in range(dim_v):
            if i == j:
                continue
            c = pres.comm_el(reps[i], reps[j])
            pairing[i, j] = _w_coordinates(pres, derived, c, p)
    power_map = np.zeros((dim_w, dim_v), dtype=np.int64)
    for i in range(dim_v):
        power_map[:, i] = _w_coordinates(pres, derived, pres.pow_el(reps[i], p), p)

    if not np.array_equal(pairing, (-pairing.transpose(1, 0, 2)) % p):
        raise BePreconditionError("pairing not alternating")

    data = BeData(p, dim_v, dim_w, reps, pairing, power_map,
                  np.zeros((0, dim_v * dim_w), dtype=np.int64), derived)
    rows = []
    eye = np.eye(dim_v, dtype=np.int64)
    for a, b, c in combinations(range(dim_v), 3):
        rows.append(data.jacobi_element(eye[a], eye[b], eye[c]))
    for a in range(dim_v):
        rows.append(data.power_element(eye[a]))
    for a, b in combinations(range(dim_v), 2):
        rows.append(data.power_element((eye[a] + eye[b]) % p))
    if rows:
        data.x_basis = _rref(np.array(rows), p)
    return data


def _wedge_pairs(dim_v: int) -> list[tuple[int, int]]:
    return list(combinations(range(dim_v), 2))


def extension_data(data: BeData) -> BeExtensionData:
    """ker(rho), and sigma-bar on that kernel, in exterior-square coordinates."""
    p = data.p
    pairs = _wedge_pairs(data.dim_v)
    rho = np.zeros((data.dim_w, len(pairs)), dtype=np.int64)
    for c, (i, j) in enumerate(pairs):
        rho[:, c] = data.pairing[i, j]
    rank_rho = _rref(rho, p).shape[0]
    if rank_rho != data.dim_w:
        raise BePreconditionError("commutators do not span the derived subgroup")
    ker = _nullspace(rho, p)

    # sigma(e_i ^ e_j) = e_i (x) f(e_j) + binom(p,2) e_j (x) (e_i, e_j) + X
    half = comb(p, 2) % p  # vanishes for odd p; kept for the formula's shape
    sigma_cols = np.zeros((data.tensor_dim(), len(pairs)), dtype=np.int64)
    eye = np.eye(data.dim_v, dtype=np.int64)
    for c, (i, j) in enumerate(pairs):
        fj = (data.power_map @ eye[j]) % p
        vec = np.outer(eye[i], fj) + half * np.outer(eye[j], data.pairing[i, j])
        sigma_cols[:, c] = vec.reshape(-1) % p
    sigma_on_ker = (sigma_cols @ ker) % p

    # reduce the image modulo X; the rank of what survives counts Z_{p^2}'s
    if data.x_dim():
        reduced = []
        for col in sigma_on_ker.T:
            v = col.copy() % p
            for row in data.x_basis:
                lead = np.nonzero(row)[0][0]
                if v[lead]:
                    v = (v - v[lead] * row) % p
            reduced.append(v)
        sigma_bar = np.array(reduced).T if reduced else sigma_on_ker
    else:
        sigma_bar = sigma_on_ker
    rank_sigma = _rref(sigma_bar.T, p).shape[0] if sigma_bar.size else 0
    dim_ker_rho = ker.shape[1]
    dim_n = data.tensor_dim() - data.x_dim()
    return BeExtensionData(
        ker_rho=ker,
        sigma_bar=sigma_bar,
        dim_n=dim_n,
        dim_ker_rho=dim_ker_rho,
        dim_ker_sigma_bar=dim_ker_rho - rank_sigma,
    )


def multiplier_via_be(pres: PcPresentation,
                      reps: list[NormalWord] | None = None) -> MultiplierResult:
    """M(G): order p^{dim N + dim ker rho}, structure Z_{p^2}^a x Z_p^b with
    a determined by the p-torsion count |ker sigma-bar| * |N|."""
    data = build_be_data(pres, reps=reps)
    ext = extension_data(data)
    mu = ext.dim_n + ext.dim_ker_rho                  # log_p |M|
    nu = ext.dim_n + ext.dim_ker_sigma_bar            # log_p #{m : m^p = 1}
    a = mu - nu
    b = mu - 2 * a
    if a < 0 or b < 0:
        raise RuntimeError(f"impossible multiplier shape: mu={mu}, nu={nu}")
    invs = AbelianGroup.from_primary({pres.p: [2] * a + [1] * b})
    trace = (
        f"blackburn_evens: dimV={data.dim_v}, dimW={data.dim_w}, "
        f"dimX={data.x_dim()}, dimN={ext.dim_n}, ker_rho={ext.dim_ker_rho}, "
        f"ker_sigma={ext.dim_ker_sigma_bar}",
    )
    return MultiplierResult(pres.p, invs, METHOD_BE, trace=trace)
