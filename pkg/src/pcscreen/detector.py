"""Detection of near-constant relationships from low-variance components.

A component with eigenvalue near zero is an almost-exact linear constraint
on the standardized returns: the assets carrying large loadings in it move
together. Two conventions follow from the constraint 0 ~ a1*x1 + a2*x2:
for a positively correlated pair the two loadings have opposite signs, for
a negatively correlated pair the same sign.

Pipeline implemented here, per scanned trailing component:

1. significance: asset i is significant when
       |loading_i| >= max(abs_threshold, rel_threshold * max_j |loading_j|)
2. eligibility: the component only counts as relationship-bearing when its
   eigenvalue is small (<= max_eigenvalue: a large eigenvalue is not a
   near-constant relationship no matter how its loadings look) and the
   squared-loading mass sitting on near-zero entries (|loading| below
   abs_threshold) is at most residual_ceiling -- the "remainder of the
   variables" must genuinely be near zero, otherwise the component is a
   diffuse noise direction and every sample matrix has those.
3. grouping: assets co-significant in at least one eligible component are
   connected; connected components of size >= min_group_size are candidates.
4. splitting: within a candidate, each member's loading profile across the
   detecting components is compared pairwise by absolute cosine. True
   partners have profiles equal up to one overall sign flip (|cos| ~ 1,
   magnitudes included), unrelated members mixed into the same components
   by eigenvector rotation are near-orthogonal (|cos| ~ 0), and members of
   one larger mutually-correlated clique sit in between (cos = -1/(m-1)
   structurally). The candidate is split into the cosine-match classes only
   when that yields at least two classes, all of size >= 2; otherwise the
   patterns do not separate anything and the candidate is emitted whole.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass
from itertools import combinations
from typing import Optional

import numpy as np

from .errors import ConfigError
from .returns import ReturnPanel
from .spectra import EigenDecomposition, correlation_from_matrix, eigendecompose


@dataclass(frozen=True)
class DetectorConfig:
    """Thresholds steering the scan of trailing components.

    trailing_count: how many smallest-eigenvalue components to scan.
    eigenvalue_ceiling: when set, scan every component with eigenvalue below
        it instead of a fixed count.
    abs_threshold: loading magnitude floor for significance; also the
        boundary below which a loading counts as "near zero".
    rel_threshold: significance floor as a fraction of the component's
        largest absolute loading.
    min_group_size: smallest reported group.
    max_eigenvalue: largest eigenvalue a component may have and still count
        as a near-constant relationship.
    residual_ceiling: largest squared-loading mass allowed on near-zero
        entries of a detecting component.
    pattern_cos_threshold: |cosine| between loading profiles above which two
        members are treated as pattern partners when splitting a group.
    """

    trailing_count: int = 6
    eigenvalue_ceiling: Optional[float] = None
    abs_threshold: float = 0.2
    rel_threshold: float = 0.5
    min_group_size: int = 2
    max_eigenvalue: float = 0.3
    residual_ceiling: float = 0.25
    pattern_cos_threshold: float = 0.85

    def validate(self) -> None:
        if self.trailing_count < 1:
            raise ConfigError("trailing_count must be >= 1")
        if not 0.0 < self.abs_threshold <= 1.0:
            raise ConfigError("abs_threshold must be in (0, 1]")
        if not 0.0 < self.rel_threshold <= 1.0:
            raise ConfigError("rel_threshold must be in (0, 1]")
        if self.min_group_size < 2:
            raise ConfigError("min_group_size must be >= 2")
        if self.eigenvalue_ceiling is not None and self.eigenvalue_ceiling <= 0.0:
            raise ConfigError("eigenvalue_ceiling must be positive")
        if self.max_eigenvalue <= 0.0:
            raise ConfigError("max_eigenvalue must be positive")
        if not 0.0 <= self.residual_ceiling < 1.0:
            raise ConfigError("residual_ceiling must be in [0, 1)")
        if not 0.0 < self.pattern_cos_threshold <= 1.0:
            raise ConfigError("pattern_cos_threshold must be in (0, 1]")

    def to_dict(self) -> dict:
        return {
            "trailing_count": self.trailing_count,
            "eigenvalue_ceiling": self.eigenvalue_ceiling,
            "abs_threshold": self.abs_threshold,
            "rel_threshold": self.rel_threshold,
            "min_group_size": self.min_group_size,
            "max_eigenvalue": self.max_eigenvalue,
            "residual_ceiling": self.residual_ceiling,
            "pattern_cos_threshold": self.pattern_cos_threshold,
        }


@dataclass(frozen=True)
class RelationshipGroup:
    """A detected set of assets tied together by trailing components.

    detecting_pcs are 1-based ranks from the top (so p is the last
    component), ordered by eigenvalue ascending. sign_pattern holds, per
    member, the loading sign in each detecting component (0 when the member
    is not significant there); within a group the members' sign patterns
    agree up to one overall flip per member. implied_signs maps each member
    pair to +1 (positively correlated) or -1 (negatively correlated);
    inconsistent is set when some pair's per-component readings disagree.
    """

    members: tuple[str, ...]
    detecting_pcs: tuple[int, ...]
    eigenvalues: tuple[float, ...]
    loadings: dict[str, tuple[float, ...]]
    sign_pattern: dict[str, tuple[int, ...]]
    implied_signs: dict[tuple[str, str], int]
    max_abs_loading: dict[str, float]
    inconsistent: bool = False

    def __post_init__(self):
        if len(self.members) < 2:
            raise ValueError("a relationship group needs at least 2 members")

    def to_dict(self) -> dict:
        return {
            "members": list(self.members),
            "detecting_pcs": list(self.detecting_pcs),
            "eigenvalues": [float(x) for x in self.eigenvalues],
            "loadings": {m: [float(x) for x in v] for m, v in self.loadings.items()},
            "sign_pattern": {m: list(v) for m, v in self.sign_pattern.items()},
            "implied_signs": [
                {"pair": list(pair), "sign": sign}
                for pair, sign in sorted(self.implied_signs.items())
            ],
            "max_abs_loading": {m: float(v) for m, v in self.max_abs_loading.items()},
            "flags": {"inconsistent": self.inconsistent},
        }


@dataclass(frozen=True)
class WindowResult:
    """Detection output for one rolling window."""

    start_date: dt.date
    end_date: dt.date
    groups: tuple[RelationshipGroup, ...]
    dropped_tickers: tuple[str, ...] = ()
    rank_deficient: bool = False
    skipped_reason: Optional[str] = None


def significant_loadings(
    ed: EigenDecomposition, pc_rank: int, cfg: DetectorConfig
) -> list[tuple[str, float]]:
    """Assets whose loading in the given component clears the dual threshold.

    Returns (ticker, loading) pairs in ticker-index order. The threshold is
    max(abs_threshold, rel_threshold * max |loading|): the absolute floor
    rejects components where everything is small, the relative one adapts
    within a concentrated component.
    """
    cfg.validate()
    vec = ed.component(pc_rank)
    cut = max(cfg.abs_threshold, cfg.rel_threshold * float(np.max(np.abs(vec))))
    return [
        (ed.tickers[i], float(vec[i]))
        for i in range(ed.p)
        if abs(vec[i]) >= cut
    ]


def _scanned_ranks(ed: EigenDecomposition, cfg: DetectorConfig) -> list[int]:
    p = ed.p
    if cfg.eigenvalue_ceiling is not None:
        return [k for k in range(1, p + 1) if ed.eigenvalue(k) < cfg.eigenvalue_ceiling]
    if cfg.trailing_count >= p:
        raise ConfigError(
            f"trailing_count {cfg.trailing_count} must be smaller than the "
            f"number of assets {p}"
        )
    return list(range(p - cfg.trailing_count + 1, p + 1))


def _eligible_components(ed, cfg, ranks):
    """Map rank -> significant index set, for relationship-bearing components."""
    eligible = {}
    for rank in ranks:
        vec = ed.component(rank)
        absvec = np.abs(vec)
        cut = max(cfg.abs_threshold, cfg.rel_threshold * float(absvec.max()))
        sig = np.flatnonzero(absvec >= cut)
        if len(sig) < 2:
            continue
        if ed.eigenvalue(rank) > cfg.max_eigenvalue:
            continue
        near_zero_mass = float(np.sum(vec[absvec < cfg.abs_threshold] ** 2))
        if near_zero_mass > cfg.residual_ceiling:
            continue
        eligible[rank] = set(int(i) for i in sig)
    return eligible


def _connected_components(nodes, edges):
    adj = {n: set() for n in nodes}
    for a, b in edges:
        adj[a].add(b)
        adj[b].add(a)
    seen, comps = set(), []
    for n in sorted(nodes):
        if n in seen:
            continue
        stack, comp = [n], set()
        while stack:
            x = stack.pop()
            if x in comp:
                continue
            comp.add(x)
            seen.add(x)
            stack.extend(adj[x] - comp)
        comps.append(comp)
    return comps


def _pattern_classes(members, profiles, cos_threshold):
    """Union-find over pairs whose profiles match up to an overall sign flip."""
    parent = {m: m for m in members}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    norms = {m: float(np.linalg.norm(profiles[m])) for m in members}
    for a, b in combinations(members, 2):
        if norms[a] == 0.0 or norms[b] == 0.0:
            continue
        cos = float(np.dot(profiles[a], profiles[b])) / (norms[a] * norms[b])
        if abs(cos) >= cos_threshold:
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[ra] = rb
    classes: dict[int, list[int]] = {}
    for m in members:
        classes.setdefault(find(m), []).append(m)
    return sorted(classes.values())


def _build_group(ed, cfg, member_idx, eligible) -> Optional[RelationshipGroup]:
    """Assemble a RelationshipGroup for a fixed member set, or None if the
    set is not actually detected by any component (fewer than 2 significant)."""
    member_idx = sorted(member_idx)
    ranks = sorted(
        (r for r, sig in eligible.items() if len(sig.intersection(member_idx)) >= 2),
        key=lambda r: ed.eigenvalue(r),
    )
    if not ranks:
        return None
    tickers = tuple(ed.tickers[i] for i in member_idx)
    loadings = {}
    signs = {}
    max_abs = {}
    for i, name in zip(member_idx, tickers):
        row = tuple(float(ed.component(r)[i]) for r in ranks)
        loadings[name] = row
        signs[name] = tuple(
            int(np.sign(x)) if i in eligible[r] else 0
            for x, r in zip(row, ranks)
        )
        max_abs[name] = max(abs(x) for x in row)
    implied = {}
    inconsistent = False
    for a, b in combinations(tickers, 2):
        readings = [
            -signs[a][k] * signs[b][k]
            for k in range(len(ranks))
            if signs[a][k] != 0 and signs[b][k] != 0
        ]
        if readings:
            if any(r != readings[0] for r in readings):
                inconsistent = True
            implied[(a, b)] = readings[0]
        else:
            # never co-significant: fall back to the profile dot product
            dot = float(np.dot(loadings[a], loadings[b]))
            implied[(a, b)] = -1 if dot > 0 else 1
    return RelationshipGroup(
        members=tickers,
        detecting_pcs=tuple(ranks),
        eigenvalues=tuple(float(ed.eigenvalue(r)) for r in ranks),
        loadings=loadings,
        sign_pattern=signs,
        implied_signs=implied,
        max_abs_loading=max_abs,
        inconsistent=inconsistent,
    )


def detect(ed: EigenDecomposition, cfg: DetectorConfig = DetectorConfig()) -> list[RelationshipGroup]:
    """Scan the trailing components and report relationship groups.

    Groups are sorted by the smallest eigenvalue among their detecting
    components, tightest relationship first.

    Raises:
        ConfigError: invalid configuration, or trailing_count >= p.
    """
    cfg.validate()
    if ed.p < 2:
        raise ConfigError("detection needs at least 2 assets")
    eligible = _eligible_components(ed, cfg, _scanned_ranks(ed, cfg))
    edges = set()
    nodes = set()
    for sig in eligible.values():
        nodes.update(sig)
        edges.update(combinations(sorted(sig), 2))
    groups: list[RelationshipGroup] = []
    for comp in _connected_components(nodes, edges):
        if len(comp) < cfg.min_group_size:
            continue
        comp_ranks = [r for r, sig in eligible.items() if len(sig & comp) >= 2]
        members = sorted(comp)
        profiles = {m: np.array([ed.component(r)[m] for r in comp_ranks]) for m in members}
        classes = _pattern_classes(members, profiles, cfg.pattern_cos_threshold)
        split = len(classes) >= 2 and all(len(c) >= 2 for c in classes)
        if split:
            built = [_build_group(ed, cfg, cls, eligible) for cls in classes]
            if any(g is None for g in built):
                split = False  # a class lost its detecting components; keep whole
            else:
                groups.extend(g for g in built if len(g.members) >= cfg.min_group_size)
        if not split:
            g = _build_group(ed, cfg, comp, eligible)
            if g is not None and len(g.members) >= cfg.min_group_size:
                groups.append(g)
    groups.sort(key=lambda g: (min(g.eigenvalues), g.members))
    return groups


def rolling_detect(
    rp: ReturnPanel,
    window: int,
    step: int,
    cfg: DetectorConfig = DetectorConfig(),
) -> list[WindowResult]:
    """Re-run correlation, eigendecomposition and detection on sliding windows.

    Tickers with zero variance inside a window are dropped for that window
    and recorded; windows shorter than p+1 observations are flagged
    rank-deficient but still analyzed. Windows where detection is impossible
    (fewer than trailing_count+1 valid tickers) are reported with empty
    groups and a skipped_reason instead of aborting the whole roll.

    Raises:
        ConfigError: window < 3, window > number of observations, or step < 1.
    """
    cfg.validate()
    if window < 3:
        raise ConfigError("window must be at least 3 observations")
    if window > rp.n_obs:
        raise ConfigError(f"window {window} exceeds the {rp.n_obs} available observations")
    if step < 1:
        raise ConfigError("step must be >= 1")
    results = []
    for start in range(0, rp.n_obs - window + 1, step):
        sub = rp.returns[:, start : start + window]
        start_date = rp.dates[start]
        end_date = rp.dates[start + window - 1]
        variances = sub.var(axis=1)
        keep = np.flatnonzero(variances > 0.0)
        dropped = tuple(rp.tickers[i] for i in np.flatnonzero(variances == 0.0))
        tickers = tuple(rp.tickers[i] for i in keep)
        rank_deficient = window < len(tickers) + 1
        needed = 2 if cfg.eigenvalue_ceiling is not None else cfg.trailing_count + 1
        if len(tickers) < needed:
            results.append(
                WindowResult(
                    start_date=start_date,
                    end_date=end_date,
                    groups=(),
                    dropped_tickers=dropped,
                    rank_deficient=rank_deficient,
                    skipped_reason=f"only {len(tickers)} tickers with nonzero variance",
                )
            )
            continue
        cm = correlation_from_matrix(sub[keep], tickers)
        groups = detect(eigendecompose(cm), cfg)
        results.append(
            WindowResult(
                start_date=start_date,
                end_date=end_date,
                groups=tuple(groups),
                dropped_tickers=dropped,
                rank_deficient=rank_deficient,
            )
        )
    return results
