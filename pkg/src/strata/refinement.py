"""Chain maps between the complexes of a stratification and a refinement."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .arrangement import Cell, Stratification, coarse_map, common_refinement, face, is_refinement
from .cochain import AtM, GradedComplex, build_complex, in_closed_star
from .linalg import Infeasible, RatMatrix, rank, solve_particular
from .orientation import orientation_sign


class InfeasibleLift(RuntimeError):
    def __init__(self, degree: int, detail: str = ""):
        super().__init__(f"no admissible lift in degree {degree}" + (f": {detail}" if detail else ""))
        self.degree = degree


def choose_psi(coarse: Stratification, fine: Stratification, pick: str = "first") -> dict[Cell, Cell]:
    """Pick one top cell of ``fine`` inside each top cell of ``coarse``.

    ``pick="first"`` takes the lexicographically smallest sign string,
    ``"last"`` the largest; the latter exists to exercise independence.
    """
    if not is_refinement(coarse, fine):
        raise ValueError("second stratification does not refine the first")
    parent = coarse_map(coarse, fine)
    psi = {}
    for sigma in coarse.top:
        inside = sorted((c for c in fine.top if parent[c] == sigma), key=lambda c: c.label)
        psi[sigma] = inside[0] if pick == "first" else inside[-1]
    return psi


def build_theta0(psi: dict[Cell, Cell], coarse: Stratification, fine: Stratification) -> RatMatrix:
    cols = coarse.top
    rows = {c: i for i, c in enumerate(fine.top)}
    entries = [[0] * len(cols) for _ in rows]
    for j, sigma in enumerate(cols):
        entries[rows[psi[sigma]]][j] = orientation_sign(sigma.frame, psi[sigma].frame)
    return RatMatrix(entries, cols=len(cols))


def _closed_star_bits(cell: Cell, fine: Stratification, parent: dict | None) -> int:
    """Bitmask over ``fine`` cells of the closed star of ``cell``.

    With ``parent`` given, ``cell`` belongs to the coarse stratification and
    membership is decided on the coarse cell containing each fine cell.
    """
    bits = 0
    for i, c in enumerate(fine.cells):
        probe = parent[c] if parent is not None else c
        if in_closed_star(probe, cell):
            bits |= 1 << i
    return bits


def admissible_mask(
    coarse: Stratification, fine: Stratification, rows: tuple, cols: tuple
) -> list[list[bool]]:
    """Entry (tau', sigma) is allowed iff cl St(tau') lies in cl St(sigma)."""
    parent = coarse_map(coarse, fine)
    everything = (1 << len(fine.cells)) - 1

    def fine_bits(t):
        return everything if not isinstance(t, Cell) else _closed_star_bits(t, fine, None)

    def coarse_bits(s):
        return everything if not isinstance(s, Cell) else _closed_star_bits(s, fine, parent)

    rb = [fine_bits(t) for t in rows]
    cb = [coarse_bits(s) for s in cols]
    return [[r & ~c == 0 for c in cb] for r in rb]


@dataclass
class RefinementChainMap:
    coarse: Stratification
    fine: Stratification
    psi: dict
    source: GradedComplex
    target: GradedComplex
    theta: dict[int, RatMatrix]
    masks: dict[int, list[list[bool]]]

    def residuals(self) -> dict[int, RatMatrix]:
        """``d' Theta^j - Theta^{j+1} d`` per degree, top square included."""
        out = {}
        m = self.coarse.m
        for j in range(-m, 0):
            out[j] = self.target.d[j] @ self.theta[j] - self.theta[j + 1] @ self.source.d[j]
        out[0] = self.target.d[0] @ self.theta[0] - self.source.d[0]
        return out

    def commutes(self) -> bool:
        return all(r.is_zero() for r in self.residuals().values())

    def respects_masks(self) -> bool:
        for j, th in self.theta.items():
            for i, k, _ in th.nonzero():
                if not self.masks[j][i][k]:
                    return False
        return True

    def to_json(self) -> dict:
        return {
            "psi": {s.label: t.label for s, t in self.psi.items()},
            "theta_shapes": {str(j): list(t.shape) for j, t in sorted(self.theta.items())},
            "residual_nonzeros": sum(1 for r in self.residuals().values() for _ in r.nonzero()),
        }


def extend_theta(
    coarse: Stratification,
    fine: Stratification,
    psi: dict | None = None,
    free_value=0,
    mask_override=None,
) -> RefinementChainMap:
    """Lift Theta^0 through all degrees by descending linear solves.

    ``mask_override(degree, mask)`` may edit masks; used by negative controls.
    """
    if psi is None:
        psi = choose_psi(coarse, fine)
    src = build_complex(coarse, AtM())
    tgt = build_complex(fine, AtM())
    m = coarse.m
    theta = {0: build_theta0(psi, coarse, fine)}
    masks = {0: admissible_mask(coarse, fine, tgt.bases[0], src.bases[0])}
    for j in range(-1, -m - 1, -1):
        mask = admissible_mask(coarse, fine, tgt.bases[j], src.bases[j])
        if mask_override is not None:
            mask = mask_override(j, mask)
        masks[j] = mask
        try:
            theta[j] = solve_particular(tgt.d[j], theta[j + 1] @ src.d[j], mask, free_value)
        except Infeasible as exc:
            raise InfeasibleLift(j, str(exc)) from exc
    return RefinementChainMap(coarse, fine, psi, src, tgt, theta, masks)


@lru_cache(maxsize=4096)
def _reduced_homology_of_poset(cells: tuple[Cell, ...]) -> list[int]:
    """Reduced rational homology of the order complex of the face poset.

    Entry ``p + 1`` of the result is the dimension in degree ``p``.
    """
    if not cells:
        return []
    below = {c: [d for d in cells if d != c and face(d, c)] for c in cells}
    chains: list[list[tuple]] = [[(c,) for c in cells]]
    while True:
        nxt = [ch + (c,) for ch in chains[-1] for c in cells if ch[-1] in below[c]]
        if not nxt:
            break
        chains.append(nxt)
    # mats[p] is the boundary out of p-simplices; mats[0] is the augmentation
    prev_index = None
    mats = []
    for p, simplices in enumerate(chains):
        if p == 0:
            mats.append(RatMatrix([[1] * len(simplices)], cols=len(simplices)))
        else:
            idx = prev_index
            rows = [[0] * len(simplices) for _ in range(len(idx))]
            for j, s in enumerate(simplices):
                for i in range(len(s)):
                    rows[idx[s[:i] + s[i + 1:]]][j] += (-1) ** i
            mats.append(RatMatrix(rows, cols=len(simplices)))
        prev_index = {s: i for i, s in enumerate(simplices)}
    ranks = [rank(mm) for mm in mats] + [0]
    return [1 - ranks[0]] + [len(chains[p]) - ranks[p] - ranks[p + 1] for p in range(len(chains))]


def star_difference(a: Stratification, b: Stratification, sigma: Cell, tau: Cell) -> list[Cell]:
    """St_b(tau) minus St_a(sigma), cut into cells of the common refinement."""
    ref = common_refinement(a, b)
    in_a = coarse_map(a, ref)
    in_b = coarse_map(b, ref)
    st_a = set(a.cells) if sigma.is_empty else set(a.cofaces[sigma])
    st_b = set(b.cells) if tau.is_empty else set(b.cofaces[tau])
    return [c for c in ref.cells if in_b[c] in st_b and in_a[c] not in st_a]


def difference_homology(a: Stratification, b: Stratification, sigma: Cell, tau: Cell) -> list[int]:
    return _reduced_homology_of_poset(tuple(star_difference(a, b, sigma, tau)))


@lru_cache(maxsize=4096)
def check_difference_acyclic(a: Stratification, b: Stratification, sigma: Cell, tau: Cell) -> bool:
    """Whether St_b(tau) minus St_a(sigma) is empty or has no reduced homology."""
    return not any(difference_homology(a, b, sigma, tau))


def all_pairs_acyclic(coarse: Stratification, fine: Stratification) -> list[tuple[str, str]]:
    """Pairs (sigma, tau) whose difference fails to be acyclic."""
    bad = []
    for sigma in (coarse.empty,) + coarse.cells:
        for tau in (fine.empty,) + fine.cells:
            if not check_difference_acyclic(coarse, fine, sigma, tau):
                bad.append((sigma.label, tau.label))
    return bad
