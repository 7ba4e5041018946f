"""Exhaustive scans of GL_n(F_p) for violations of the Z/F_p implication.

Matrices are enumerated row by row: the first row is the most significant,
each row runs over the group in index order, and rows already in the span of
the previous ones are skipped.  Every matrix therefore has a deterministic
position (its *counter*), and shard ``k`` of ``m`` owns the counters that are
``k`` mod ``m``.

All matrices sharing the first n-1 rows are tested in one vectorised batch:
the F_p identity in both the truncated model and the dense group ring, and
the existence of a nowhere-zero x with Mx nowhere-zero.  Only matrices that
satisfy the F_p identity or lack such an x go through the per-matrix
:func:`ajtlab.ajt.verdict` and the dense re-verification.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np

from .ajt import (
    Monomial,
    nowhere_zero_vectors,
    random_nonsingular,
    monomial_invariant,
    verdict,
)
from .binomial import dense_product, fp_identity_test, standard_product, truncated_factor
from .group_ring import GroupContext, is_prime
from .matrix import MatrixFp
from .report import write_atomic

log = logging.getLogger(__name__)

CHECKPOINT_VERSION = 1
SCHEMA_VERSION = 1
_MASK64 = (1 << 64) - 1


class ScanError(ValueError):
    pass


class CheckpointError(ScanError):
    pass


def check_scan_feasible(p: int, n: int, canonicalize: bool) -> None:
    if not is_prime(p):
        raise ScanError(f"{p} is not prime")
    if n < 1 or n > 3 or p > 7:
        raise ScanError(f"(p={p}, n={n}) is outside the supported range p <= 7, n <= 3")
    if p == 7 and n == 3 and not canonicalize:
        raise ScanError("(p=7, n=3) is only supported with --canonicalize")


def gl_order(p: int, n: int) -> int:
    N = p**n
    out = 1
    for s in range(n):
        out *= N - p**s
    return out


@dataclass(frozen=True)
class ScanConfig:
    p: int
    n: int
    canonicalize: bool = False
    shard: tuple[int, int] = (0, 1)
    max_seconds: float | None = None
    max_matrices: int | None = None
    checkpoint_path: str | None = None
    checkpoint_every: int = 1 << 16
    crosscheck_full: bool = True
    invariance_cases: int = 50
    seed: int = 20240611

    def __post_init__(self) -> None:
        k, m = self.shard
        if not (m >= 1 and 0 <= k < m):
            raise ScanError(f"invalid shard {k}/{m}")
        check_scan_feasible(self.p, self.n, self.canonicalize)

    def digest(self) -> str:
        """Hash of everything that determines the report (budgets excluded)."""
        key = {
            "p": self.p,
            "n": self.n,
            "canonicalize": self.canonicalize,
            "shard": list(self.shard),
            "crosscheck_full": self.crosscheck_full,
            "invariance_cases": self.invariance_cases,
            "seed": self.seed,
        }
        return hashlib.sha256(json.dumps(key, sort_keys=True).encode()).hexdigest()


@dataclass
class ScanReport:
    p: int
    n: int
    canonicalize: bool
    shard: tuple[int, int] = (0, 1)
    counter: int = 0
    classes: int = 0
    fp_identity: int = 0
    z_identity: int = 0
    counterexamples: int = 0
    violations: list[dict] = field(default_factory=list)
    inconsistencies: list[dict] = field(default_factory=list)
    counterexample_classes: list[list[list[int]]] = field(default_factory=list)
    violation_classes: list[list[list[int]]] = field(default_factory=list)
    digest: int = 0
    partial: bool = False
    notes: list[str] = field(default_factory=list)
    seconds: float = 0.0

    @property
    def matrices(self) -> int:
        k, m = self.shard
        return len(range(k, self.counter, m))

    def to_dict(self) -> dict:
        """The deterministic payload; wall-clock time is deliberately left out."""
        return {
            "kind": "scan",
            "schema_version": SCHEMA_VERSION,
            "p": self.p,
            "n": self.n,
            "canonicalize": self.canonicalize,
            "shard": list(self.shard),
            "counter": self.counter,
            "totals": {
                "matrices": self.matrices,
                "classes": self.classes,
                "fp_identity": self.fp_identity,
                "z_identity": self.z_identity,
                "counterexamples": self.counterexamples,
                "violations": len(self.violations),
                "inconsistencies": len(self.inconsistencies),
            },
            "violations": self.violations,
            "inconsistencies": self.inconsistencies,
            "counterexample_classes": self.counterexample_classes,
            "violation_classes": self.violation_classes,
            "digest": f"{self.digest:016x}",
            "partial": self.partial,
            "notes": self.notes,
        }

    @classmethod
    def from_dict(cls, d: dict) -> ScanReport:
        t = d["totals"]
        return cls(
            p=d["p"],
            n=d["n"],
            canonicalize=d["canonicalize"],
            shard=tuple(d["shard"]),
            counter=d["counter"],
            classes=t["classes"],
            fp_identity=t["fp_identity"],
            z_identity=t["z_identity"],
            counterexamples=t["counterexamples"],
            violations=list(d["violations"]),
            inconsistencies=list(d["inconsistencies"]),
            counterexample_classes=[list(map(list, c)) for c in d["counterexample_classes"]],
            violation_classes=[list(map(list, c)) for c in d["violation_classes"]],
            digest=int(d["digest"], 16),
            partial=d["partial"],
            notes=list(d["notes"]),
        )

    def payload_bytes(self) -> bytes:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":")).encode()

    @property
    def clean(self) -> bool:
        return not self.violations and not self.inconsistencies


# --- canonical forms under monomial equivalence -------------------------------


def _residue_rank(a: np.ndarray, p: int) -> np.ndarray:
    """Order residues as 1 < 2 < ... < p-1 < 0."""
    return (a - 1) % p


@lru_cache(maxsize=None)
def _column_transforms(p: int, n: int) -> np.ndarray:
    """Every monomial matrix phi, shape (T, n, n); M -> M phi^T."""
    mats = []
    for perm in itertools.permutations(range(n)):
        for scales in itertools.product(range(1, p), repeat=n):
            mats.append(Monomial(perm, scales).matrix(p))
    return np.array(mats, dtype=np.int64)


def _normalize_rows(A: np.ndarray, p: int) -> np.ndarray:
    """Scale each row of a (..., n, n) stack so its first nonzero entry is 1."""
    nz = A != 0
    first = np.argmax(nz, axis=-1)
    lead = np.take_along_axis(A, first[..., None], axis=-1)[..., 0]
    inv = np.array([0] + [pow(c, -1, p) for c in range(1, p)], dtype=np.int64)
    return (A * inv[lead][..., None]) % p


def _row_keys(A: np.ndarray, p: int) -> np.ndarray:
    n = A.shape[-1]
    weights = p ** np.arange(n - 1, -1, -1, dtype=np.int64)
    return _residue_rank(A, p) @ weights


def matrix_key(rows: Sequence[Sequence[int]], p: int) -> int:
    A = np.array(rows, dtype=np.int64)
    n = A.shape[0]
    keys = _row_keys(A, p)
    return int(sum(int(k) * (p**n) ** (n - 1 - r) for r, k in enumerate(keys)))


def canonical_form(M: MatrixFp) -> MatrixFp:
    """Lexicographically smallest matrix in the monomial orbit of M.

    The orbit is D P M phi^T over monomial D P (rows) and phi (coordinates);
    entries compare with 1 < 2 < ... < p-1 < 0.  For a fixed phi the row
    action is minimised by normalising and sorting the rows, so only the
    n! (p-1)^n coordinate transforms are explored.
    """
    p, n = M.p, M.n
    phis = _column_transforms(p, n)
    stack = np.einsum("rk,tjk->trj", M.array, phis) % p
    stack = _normalize_rows(stack, p)
    keys = _row_keys(stack, p)
    order = np.argsort(keys, axis=1)
    keys = np.take_along_axis(keys, order, axis=1)
    stack = np.take_along_axis(stack, order[..., None], axis=1)
    N = p**n
    total = np.zeros(len(stack), dtype=object)
    for r in range(n):
        total = total * N + keys[:, r].astype(object)
    best = int(np.argmin(total))
    return MatrixFp.from_rows(p, stack[best].tolist())


def is_canonical(M: MatrixFp) -> bool:
    return canonical_form(M) == M


def monomial_invariance_suite(p: int, n: int, cases: int, seed: int) -> tuple[int, int]:
    """(passed, total) over seeded random (matrix, transform) pairs."""
    rng = np.random.default_rng(seed)
    passed = 0
    for _ in range(cases):
        M = random_nonsingular(p, n, rng)
        left, right = Monomial.random(p, n, rng), Monomial.random(p, n, rng)
        passed += monomial_invariant(M, left, right)
    return passed, cases


# --- vectorised kernels ---------------------------------------------------------


class _Tables:
    """Precomputed lookups for batched tests at fixed (p, n)."""

    def __init__(self, p: int, n: int):
        self.p, self.n = p, n
        ctx = GroupContext(p, n)
        self.ctx = ctx
        self.N = ctx.order
        self.coords = np.asarray(ctx.coords)
        d = p - 1
        self.d = d
        self.D = d**n
        self.trunc = np.array(
            [truncated_factor(self.coords[a], p, d).reshape(-1) for a in range(self.N)],
            dtype=np.int64,
        )
        # diff[o, w] = flat index of o - w in the truncated grid, or D when o - w < 0
        tgrid = np.array(list(itertools.product(range(d), repeat=n)), dtype=np.int64).reshape(-1, n)
        diff = tgrid[:, None, :] - tgrid[None, :, :]
        valid = np.all(diff >= 0, axis=-1)
        tw = d ** np.arange(n - 1, -1, -1, dtype=np.int64)
        flat = np.where(valid, (np.clip(diff, 0, None) @ tw), self.D)
        self.diff = flat
        # sub[a, v] = index(v - a)
        self.sub = ctx.indices_of(self.coords[None, :, :] - self.coords[:, None, :])
        self.X = nowhere_zero_vectors(p, n)
        # float copies for BLAS products; every entry stays far below 2^53
        self.trunc_f = self.trunc.astype(np.float64)
        self.coords_f = self.coords.astype(np.float64)
        self.Xt_f = self.X.T.astype(np.float64)
        one = np.zeros(self.N, dtype=np.int64)
        one[0] = 1
        P = one
        for k in range(n):
            P = (P - P[self.sub[ctx.index(ctx.basis(k))]]) % p
        self.P_basis = P
        self.rank_keys = _row_keys(self.coords, p)
        lead = np.argmax(self.coords != 0, axis=1)
        self.normalized = self.coords[np.arange(self.N), lead] == 1
        self.normalized[0] = False

    def trunc_mult_matrix(self, g: np.ndarray) -> np.ndarray:
        padded = np.append(g, 0)
        return padded[self.diff]


@dataclass
class _Prefix:
    rows: list[int]
    span: np.ndarray
    trunc: np.ndarray
    dense: np.ndarray
    good: np.ndarray


def _extend(t: _Tables, pre: _Prefix, a: int) -> _Prefix:
    p = t.p
    coeff = np.arange(p, dtype=np.int64)
    span = t.ctx.indices_of(
        t.coords[pre.span][:, None, :] + coeff[None, :, None] * t.coords[a][None, None, :]
    ).reshape(-1)
    trunc = (t.trunc_mult_matrix(pre.trunc) @ t.trunc[a]) % p
    dense = (pre.dense - pre.dense[t.sub[a]]) % p
    good = pre.good & ((t.X @ t.coords[a]) % p != 0)
    return _Prefix(pre.rows + [a], span, trunc, dense, good)


def _splitmix64(x: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore"):
        z = x.astype(np.uint64) + np.uint64(0x9E3779B97F4A7C15)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
        return z ^ (z >> np.uint64(31))


def _digest_terms(counters: np.ndarray, fp: np.ndarray, cex: np.ndarray) -> int:
    vals = counters.astype(np.uint64) * np.uint64(4)
    vals += fp.astype(np.uint64) * np.uint64(2) + cex.astype(np.uint64)
    # uint64 sums wrap, which is exactly addition mod 2^64
    return int(np.sum(_splitmix64(vals), dtype=np.uint64))


# --- the scan itself -------------------------------------------------------------


class _Scan:
    def __init__(self, cfg: ScanConfig, report: ScanReport):
        self.cfg = cfg
        self.t = _Tables(cfg.p, cfg.n)
        self.report = report
        self.canonical = report.canonicalize
        self.cex_classes: set[tuple] = {tuple(map(tuple, c)) for c in report.counterexample_classes}
        self.viol_classes: set[tuple] = {tuple(map(tuple, c)) for c in report.violation_classes}

    # subtree sizes: level r means r rows already fixed
    def subtree(self, r: int) -> int:
        N, p = self.t.N, self.t.p
        out = 1
        for s in range(r, self.cfg.n):
            out *= N - p**s
        return out

    def leaves(self, resume_from: int) -> Iterator[tuple[int, _Prefix, np.ndarray]]:
        """Yield (first counter, prefix, last-row candidates) in enumeration order."""
        t, n = self.t, self.cfg.n
        root = _Prefix([], np.zeros(1, dtype=np.int64), np.eye(1, t.D, dtype=np.int64)[0], t.P_basis, np.ones(len(t.X), dtype=bool))

        def walk(base: int, pre: _Prefix) -> Iterator[tuple[int, _Prefix, np.ndarray]]:
            r = len(pre.rows)
            mask = np.ones(t.N, dtype=bool)
            mask[pre.span] = False
            cands = np.flatnonzero(mask)
            if r == n - 1:
                yield base, pre, cands
                return
            size = self.subtree(r + 1)
            for pos, a in enumerate(cands):
                start = base + pos * size
                if start + size <= resume_from:
                    continue
                if self.canonical and not self._row_admissible(pre, int(a)):
                    continue
                yield from walk(start, _extend(t, pre, int(a)))

        yield from walk(0, root)

    def _row_admissible(self, pre: _Prefix, a: int) -> bool:
        t = self.t
        if not t.normalized[a]:
            return False
        return not pre.rows or t.rank_keys[a] > t.rank_keys[pre.rows[-1]]

    def rows_of(self, pre: _Prefix, a: int) -> list[list[int]]:
        return [self.t.coords[r].tolist() for r in pre.rows + [a]]

    def run(self, resume_from: int, deadline: float | None, limit: int | None, on_progress) -> bool:
        """Process leaves; returns True if the enumeration finished."""
        cfg, t, rep = self.cfg, self.t, self.report
        k, m = cfg.shard
        for base, pre, cands in self.leaves(resume_from):
            end = base + len(cands)
            if end <= resume_from:
                continue
            if (limit is not None and rep.counter >= limit) or (
                deadline is not None and time.monotonic() > deadline
            ):
                return False
            counters = base + np.arange(len(cands))
            sel = counters % m == k
            if self.canonical:
                sel &= t.normalized[cands]
                if pre.rows:
                    sel &= t.rank_keys[cands] > t.rank_keys[pre.rows[-1]]
            if sel.any():
                self._leaf(pre, cands[sel], counters[sel])
            rep.counter = end
            on_progress()
        rep.counter = self.subtree(0)
        return True

    def _leaf(self, pre: _Prefix, cands: np.ndarray, counters: np.ndarray) -> None:
        t, rep, p = self.t, self.report, self.t.p
        if self.canonical:
            keep = [
                j for j, a in enumerate(cands)
                if is_canonical(MatrixFp.from_rows(p, self.rows_of(pre, int(a))))
            ]
            if not keep:
                return
            cands, counters = cands[keep], counters[keep]
        mult = t.trunc_mult_matrix(pre.trunc).astype(np.float64)
        fp_red = ~np.fmod(t.trunc_f[cands] @ mult.T, p).any(axis=1)
        has_wit = ((np.fmod(t.coords_f[cands] @ t.Xt_f, p) != 0) & pre.good[None, :]).any(axis=1)
        if self.cfg.crosscheck_full:
            fp_full = ~((pre.dense[None, :] - pre.dense[t.sub[cands]]) % p).any(axis=1)
        else:
            fp_full = fp_red
        rep.classes += len(cands)
        rep.fp_identity += int(fp_red.sum())
        rep.counterexamples += int((~has_wit).sum())
        rep.digest = (rep.digest + _digest_terms(counters, fp_red, ~has_wit)) & _MASK64
        for j in np.flatnonzero(fp_red | fp_full | ~has_wit):
            self._examine(pre, int(cands[j]), int(counters[j]), bool(fp_red[j]), bool(fp_full[j]), bool(has_wit[j]))

    def _examine(self, pre: _Prefix, a: int, counter: int, fp_red: bool, fp_full: bool, has_wit: bool) -> None:
        rep, p = self.report, self.t.p
        rows = self.rows_of(pre, a)
        M = MatrixFp.from_rows(p, rows)
        v = verdict(M, "full")
        problems = []
        if fp_red != fp_full:
            problems.append("fp_mode_mismatch")
        if v.fp_identity != fp_full:
            problems.append("fp_batch_mismatch")
        if v.counterexample == has_wit:
            problems.append("witness_batch_mismatch")
        if not v.consistent:
            problems.append("z_vs_witness")
        if v.z_identity and not v.fp_identity:
            problems.append("z_without_fp")
        if v.z_identity:
            rep.z_identity += 1
        entry = {"counter": counter, "rows": rows, **v.to_dict()}
        if v.violates_conjecture and not problems:
            # re-verify with the dense Z product before reporting
            if dense_product(standard_product(M), "Z").is_zero():
                problems.append("dense_z_disagrees")
            elif not fp_identity_test(M, "full") or not fp_identity_test(M, "reduced"):
                problems.append("dense_fp_disagrees")
        if problems:
            rep.inconsistencies.append({**entry, "kind": ",".join(problems)})
            log.error("inconsistency at counter %d: %s %s", counter, rows, problems)
            return
        if v.violates_conjecture:
            rep.violations.append(entry)
            self.viol_classes.add(tuple(map(tuple, canonical_form(M).tolist())))
        if v.counterexample:
            self.cex_classes.add(tuple(map(tuple, canonical_form(M).tolist())))

    def finalize(self) -> None:
        self.report.counterexample_classes = [list(map(list, c)) for c in sorted(self.cex_classes)]
        self.report.violation_classes = [list(map(list, c)) for c in sorted(self.viol_classes)]


# --- checkpoints --------------------------------------------------------------------


def save_checkpoint(path: str, cfg: ScanConfig, report: ScanReport) -> None:
    state = report.to_dict()
    body = json.dumps(state, sort_keys=True, separators=(",", ":"))
    record = {
        "version": CHECKPOINT_VERSION,
        "config_hash": cfg.digest(),
        "counter": report.counter,
        "state": state,
        "state_sha256": hashlib.sha256(body.encode()).hexdigest(),
    }
    write_atomic(path, json.dumps(record, sort_keys=True) + "\n")


def load_checkpoint(path: str, cfg: ScanConfig) -> ScanReport:
    try:
        with open(path) as fh:
            record = json.loads(fh.readline())
        state = record["state"]
        body = json.dumps(state, sort_keys=True, separators=(",", ":"))
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise CheckpointError(f"checkpoint {path} is unreadable: {exc}") from exc
    if record.get("version") != CHECKPOINT_VERSION:
        raise CheckpointError(f"checkpoint version {record.get('version')} is not supported")
    if hashlib.sha256(body.encode()).hexdigest() != record.get("state_sha256"):
        raise CheckpointError(f"checkpoint {path} is corrupt (checksum mismatch)")
    if record.get("config_hash") != cfg.digest():
        raise CheckpointError(f"checkpoint {path} was written for a different configuration")
    report = ScanReport.from_dict(state)
    if report.counter != record["counter"]:
        raise CheckpointError(f"checkpoint {path} is inconsistent")
    return report


# --- entry points -------------------------------------------------------------------


def _fresh_report(cfg: ScanConfig) -> ScanReport:
    report = ScanReport(cfg.p, cfg.n, cfg.canonicalize, cfg.shard)
    if cfg.canonicalize:
        passed, total = monomial_invariance_suite(cfg.p, cfg.n, cfg.invariance_cases, cfg.seed)
        if passed != total:
            report.canonicalize = False
            report.notes.append(
                f"canonicalization disabled: monomial invariance failed on {total - passed}/{total} cases"
            )
    return report


def scan(cfg: ScanConfig) -> ScanReport:
    """Run (or resume) one shard of the scan described by ``cfg``."""
    t0 = time.monotonic()
    report = None
    if cfg.checkpoint_path and os.path.exists(cfg.checkpoint_path):
        report = load_checkpoint(cfg.checkpoint_path, cfg)
        log.info("resuming %s at counter %d", cfg.checkpoint_path, report.counter)
    if report is None:
        report = _fresh_report(cfg)
    if report.canonicalize != cfg.canonicalize and cfg.p == 7 and cfg.n == 3:
        raise ScanError("canonicalization was disabled and (7, 3) is infeasible without it")
    report.partial = False
    runner = _Scan(cfg, report)
    resume_from = report.counter
    last_saved = [report.counter]

    def progress() -> None:
        if cfg.checkpoint_path and report.counter - last_saved[0] >= cfg.checkpoint_every:
            runner.finalize()
            save_checkpoint(cfg.checkpoint_path, cfg, report)
            last_saved[0] = report.counter

    deadline = t0 + cfg.max_seconds if cfg.max_seconds is not None else None
    finished = runner.run(resume_from, deadline, cfg.max_matrices, progress)
    runner.finalize()
    report.partial = not finished
    if cfg.checkpoint_path:
        save_checkpoint(cfg.checkpoint_path, cfg, report)
    report.seconds = time.monotonic() - t0
    return report


def merge(reports: Sequence[ScanReport]) -> ScanReport:
    """Combine the shards 0..m-1 of one scan into the unsharded report."""
    if not reports:
        raise ScanError("nothing to merge")
    first = reports[0]
    m = first.shard[1]
    if sorted(r.shard[0] for r in reports) != list(range(m)) or any(r.shard[1] != m for r in reports):
        raise ScanError(f"shards do not cover 0..{m - 1} exactly once")
    for r in reports:
        if (r.p, r.n, r.canonicalize) != (first.p, first.n, first.canonicalize):
            raise ScanError("cannot merge reports of different scans")
    if len({r.counter for r in reports}) != 1:
        raise ScanError("shards stopped at different counters")
    out = ScanReport(first.p, first.n, first.canonicalize, (0, 1), counter=first.counter)
    for r in reports:
        out.classes += r.classes
        out.fp_identity += r.fp_identity
        out.z_identity += r.z_identity
        out.counterexamples += r.counterexamples
        out.violations.extend(r.violations)
        out.inconsistencies.extend(r.inconsistencies)
        out.digest = (out.digest + r.digest) & _MASK64
        out.partial = out.partial or r.partial
        out.seconds = max(out.seconds, r.seconds)
    out.violations.sort(key=lambda e: e["counter"])
    out.inconsistencies.sort(key=lambda e: e["counter"])
    out.counterexample_classes = sorted({tuple(map(tuple, c)) for r in reports for c in r.counterexample_classes})
    out.counterexample_classes = [list(map(list, c)) for c in out.counterexample_classes]
    out.violation_classes = sorted({tuple(map(tuple, c)) for r in reports for c in r.violation_classes})
    out.violation_classes = [list(map(list, c)) for c in out.violation_classes]
    out.notes = sorted({note for r in reports for note in r.notes})
    return out


def _scan_shard(cfg: ScanConfig) -> ScanReport:
    return scan(cfg)


def scan_parallel(cfg: ScanConfig, workers: int) -> ScanReport:
    """Split ``cfg`` into ``workers`` shards, run them in processes and merge."""
    if cfg.shard != (0, 1):
        raise ScanError("scan_parallel splits an unsharded configuration")
    shards = []
    for k in range(workers):
        path = f"{cfg.checkpoint_path}.shard{k}of{workers}" if cfg.checkpoint_path else None
        shards.append(replace(cfg, shard=(k, workers), checkpoint_path=path))
    if workers == 1:
        return merge([scan(shards[0])])
    with ProcessPoolExecutor(max_workers=workers) as pool:
        reports = list(pool.map(_scan_shard, shards))
    return merge(reports)


def enumerate_invertible(p: int, n: int, shard: tuple[int, int] = (0, 1)) -> Iterator[MatrixFp]:
    """Every matrix of GL_n(F_p) owned by ``shard``, in enumeration order."""
    check_scan_feasible(p, n, canonicalize=True)
    k, m = shard
    cfg = ScanConfig(p, n, canonicalize=(p, n) == (7, 3))
    runner = _Scan(cfg, ScanReport(p, n, canonicalize=False))
    for base, pre, cands in runner.leaves(0):
        for j, a in enumerate(cands):
            if (base + j) % m == k:
                yield MatrixFp.from_rows(p, runner.rows_of(pre, int(a)))
