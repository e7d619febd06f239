"""Seeded Monte Carlo and exact computation of random binning with a
threshold erasure/list decoder.

Per trial: a source block (x, y) of length n is drawn i.i.d., every block
x' is independently assigned a uniform bin, and the decoder inspects the
bin of x given y.  A block xh in that bin is a *candidate* when its
probability ratio against the rest of the bin strictly exceeds e^(nT)::

    P(xh, y)  >  e^(nT) * sum_{x' in bin, x' != xh} P(x', y)

(an empty denominator reads as ratio +inf, so a lone xh is always a
candidate).  Strict inequality makes the claim "T >= 0 implies at most one
candidate" exact even in the discrete setting, where distinct blocks of
equal probability are common; with >= the two members of an equal-weight
pair would both pass at T = 0.

Recorded events per trial:

    correct_unique : the only candidate is the true x
    erasure        : no candidates
    e1             : the true x is not a candidate
    e2             : at least one incorrect candidate (undetected error /
                     nonempty incorrect list)

erasure + correct_unique + e2 partition the trials; e1 overlaps the first
two... it equals erasure plus the trials whose candidates are all incorrect.

Engines.  For binary pairs, blocks with the same disagreement pattern
counts (a flips on the y=1 positions, b flips on the y=0 positions) share
one conditional probability and one rate, so the bin content reduces to
per-group binomial counts Bin(group size, 1/M) -- an exact-law shortcut
that handles 10^6 trials at n = 20.  General sources use the literal
per-sequence engine (all |X|^n bin indices drawn and compared), capped at
|X|^n <= 2^24.  Trials are processed in fixed-size chunks with one
counter-derived RNG stream per chunk, so results are bit-identical for any
worker count.

Variable-rate mode follows the per-letter assignment: block x' lives in a
bin range of size M(x') = max(2, round(exp(sum_i r(x'_i)))) and collides
with x exactly when f(x') = f(x) < M(x'), implemented literally by drawing
each block's bin uniformly in its own range and comparing indices.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import stats as _scipy_stats

from .errors import DegenerateData, DomainError, ResourceError
from .source_model import as_joint_source, conditional_x_given_y, marginal_x, marginal_y

__all__ = [
    "SimConfig",
    "TrialBatch",
    "OracleResult",
    "SlopeFit",
    "run_trials",
    "exact_oracle",
    "empirical_exponent",
    "write_batch_csv",
    "SIM_CSV_SCHEMA",
]

SEQ_CAP = 2 ** 24  # largest |X|^n the per-sequence decoder will enumerate
MAP_CAP = 2 ** 20  # largest M^(|X|^n) for full binning-map enumeration
SUBSET_CAP = 2 ** 22  # largest 2^(|X|^n - 1) for the independence method
CHUNK = 16384

SIM_CSV_SCHEMA = "n,R_nominal,R_actual,T,trials,seed,e1_count,e2_count,erasure_count,mean_list_size"


@dataclass(frozen=True)
class SimConfig:
    """One simulation setting.

    ``rates`` (variable mode only) is a per-letter rate vector aligned with
    the x-alphabet, in nats.  ``engine`` is "auto" (grouped for binary
    sources, per-sequence otherwise), "grouped", or "exhaustive".
    """

    source: object
    n: int
    R: float
    T: float
    trials: int
    master_seed: int
    mode: str = "fixed"
    rates: tuple = None
    engine: str = "auto"

    def __post_init__(self):
        src = as_joint_source(self.source)
        if self.n < 1:
            raise DomainError(f"n must be >= 1, got {self.n}")
        if self.trials < 1:
            raise DomainError(f"trials must be >= 1, got {self.trials}")
        if self.mode not in ("fixed", "variable"):
            raise DomainError(f"mode must be 'fixed' or 'variable', got {self.mode!r}")
        if self.engine not in ("auto", "grouped", "exhaustive"):
            raise DomainError(f"unknown engine {self.engine!r}")
        if src.nx ** self.n > SEQ_CAP:
            raise ResourceError(
                f"|X|^n = {src.nx}^{self.n} exceeds the enumerable cap 2^24"
            )
        if self.mode == "variable":
            if self.rates is None:
                raise DomainError("variable mode requires a rates vector")
            r = np.asarray(self.rates, dtype=float)
            if r.shape != (src.nx,) or np.any(r < 0):
                raise DomainError("rates must be nonnegative, one per x-symbol")
            object.__setattr__(self, "rates", tuple(float(v) for v in r))

    @property
    def bins(self) -> int:
        """Fixed-mode bin count M = round(e^(nR)), at least 2."""
        return max(2, int(np.round(np.exp(self.n * self.R))))

    @property
    def r_actual(self) -> float:
        """ln(M)/n for fixed mode; the nominal mean of the rate vector for
        variable mode (per-block rounding makes the realized value vary)."""
        if self.mode == "fixed":
            return math.log(self.bins) / self.n
        px = marginal_x(as_joint_source(self.source))
        return float(px @ np.asarray(self.rates))


@dataclass
class TrialBatch:
    """Aggregated event counts with the seed that reproduces them."""

    trials: int
    n: int
    r_nominal: float
    r_actual: float
    T: float
    seed: int
    correct_unique: int = 0
    erasure: int = 0
    e1_events: int = 0
    e2_events: int = 0
    incorrect_sum: int = 0
    incorrect_hist: dict = field(default_factory=dict)
    details: list = None

    @property
    def mean_list_size(self) -> float:
        return self.incorrect_sum / self.trials

    def merge(self, other: "TrialBatch") -> None:
        self.correct_unique += other.correct_unique
        self.erasure += other.erasure
        self.e1_events += other.e1_events
        self.e2_events += other.e2_events
        self.incorrect_sum += other.incorrect_sum
        for k, v in other.incorrect_hist.items():
            self.incorrect_hist[k] = self.incorrect_hist.get(k, 0) + v
        if other.details:
            if self.details is None:
                self.details = []
            self.details.extend(other.details)


def _chunk_rng(master_seed: int, chunk_index: int) -> np.random.Generator:
    return np.random.default_rng([master_seed, chunk_index])


def _binary_group_tables(cond: np.ndarray, n: int, wy: int):
    """Group sizes, conditional probabilities and x'-weights for binary
    blocks at fixed y-weight wy.

    Groups are indexed by (a, b): a disagreements on the wy positions with
    y = 1, b on the rest.  Probability powers are built by cumulative
    products so that equal-probability groups compare exactly equal.
    Returns (m, w, ones_count) flattened over a-major order.
    """
    c00, c10 = cond[0, 0], cond[1, 0]
    c01, c11 = cond[0, 1], cond[1, 1]
    a = np.arange(wy + 1)
    b = np.arange(n - wy + 1)
    comb_a = np.array([math.comb(wy, int(i)) for i in a], dtype=float)
    comb_b = np.array([math.comb(n - wy, int(j)) for j in b], dtype=float)

    def powers(base, kmax):
        out = np.ones(kmax + 1)
        if kmax > 0:
            out[1:] = np.cumprod(np.full(kmax, base))
        return out

    w_a = powers(c11, wy)[::-1] * powers(c01, wy)  # index a
    w_b = powers(c00, n - wy)[::-1] * powers(c10, n - wy)  # index b
    m = np.outer(comb_a, comb_b).ravel()
    w = np.outer(w_a, w_b).ravel()
    ones = (wy - a)[:, None] + b[None, :]  # weight (number of 1s) of x'
    return m, w, ones.ravel()


def _events_from_bins(w_true, s_other, weights, counts, ent):
    """Decide events from the bin content.

    ``weights``/``counts`` describe the incorrect bin members of one trial
    (value and multiplicity); denominators are formed as
    (s_other - w_g) + w_true so that the common two-member tie at T = 0
    resolves exactly.
    """
    cand_true = (s_other <= 0.0) or (w_true > ent * s_other)
    n_inc = 0
    for wg, kg in zip(weights, counts):
        if kg <= 0:
            continue
        denom = (s_other - wg) + w_true
        if wg > ent * denom:
            n_inc += int(kg)
    return cand_true, n_inc


def _grouped_chunk(cfg: SimConfig, rng: np.random.Generator, n_trials: int,
                   keep_details: bool) -> TrialBatch:
    src = as_joint_source(cfg.source)
    cond = conditional_x_given_y(src)
    py1 = marginal_y(src)[1]
    n = cfg.n
    ent = np.exp(n * cfg.T)
    batch = TrialBatch(
        trials=n_trials, n=n, r_nominal=cfg.R, r_actual=cfg.r_actual, T=cfg.T,
        seed=cfg.master_seed, details=[] if keep_details else None,
    )
    wy = rng.binomial(n, py1, size=n_trials)
    a0 = rng.binomial(wy, cond[0, 1])  # flips on y=1 positions
    b0 = rng.binomial(n - wy, cond[1, 0])  # flips on y=0 positions
    if cfg.mode == "variable":
        r_vec = np.asarray(cfg.rates)
    hist = {}
    for w_val in np.unique(wy):
        rows = np.where(wy == w_val)[0]
        m, w, ones = _binary_group_tables(cond, n, int(w_val))
        g = len(m)
        cols = np.arange(w_val + 1)[:, None] * (n - w_val + 1)
        true_col = (a0[rows] * (n - int(w_val) + 1) + b0[rows]).astype(int)
        m_mat = np.broadcast_to(m, (len(rows), g)).copy()
        m_mat[np.arange(len(rows)), true_col] -= 1
        if cfg.mode == "fixed":
            K = rng.binomial(m_mat.astype(np.int64), 1.0 / cfg.bins)
        else:
            mg = np.maximum(
                2, np.round(np.exp(ones * r_vec[1] + (n - ones) * r_vec[0]))
            ).astype(np.int64)
            mx = mg[true_col]
            z = rng.integers(0, mx)
            K = rng.binomial(m_mat.astype(np.int64), 1.0 / mg[None, :])
            K *= (z[:, None] < mg[None, :])
        s_other = K @ w
        w_true = w[true_col]
        cand_true = (s_other <= 0.0) | (w_true > ent * s_other)
        denom = (s_other[:, None] - w[None, :]) + w_true[:, None]
        inc_mask = w[None, :] > ent * denom
        n_inc = (K * inc_mask).sum(axis=1)
        batch.e1_events += int((~cand_true).sum())
        batch.e2_events += int((n_inc >= 1).sum())
        batch.erasure += int(((~cand_true) & (n_inc == 0)).sum())
        batch.correct_unique += int((cand_true & (n_inc == 0)).sum())
        batch.incorrect_sum += int(n_inc.sum())
        bc = np.bincount(n_inc.astype(int))
        for k in np.nonzero(bc)[0]:
            hist[int(k)] = hist.get(int(k), 0) + int(bc[k])
        if keep_details:
            for i, row in enumerate(rows):
                batch.details.append(
                    {
                        "wy": int(w_val),
                        "a0": int(a0[row]),
                        "b0": int(b0[row]),
                        "K": K[i].copy(),
                        "group_weights": w,
                        "w_true": float(w_true[i]),
                        "s_other": float(s_other[i]),
                        "cand_true": bool(cand_true[i]),
                        "n_incorrect": int(n_inc[i]),
                    }
                )
    batch.incorrect_hist = hist
    return batch


def _seq_cond_probs(cond: np.ndarray, y_seq: np.ndarray) -> np.ndarray:
    """P(x'|y) for every block x', ordered by the base-|X| index of x'.

    Built position by position (Kronecker products), so any two blocks with
    the same per-position factor multiset in the same order compare exactly.
    """
    v = np.ones(1)
    for yi in y_seq:
        v = np.kron(v, cond[:, yi])
    return v


def _seq_rate_sums(rates: np.ndarray, nx: int, n: int) -> np.ndarray:
    v = np.zeros(1)
    for _ in range(n):
        v = (v[:, None] + rates[None, :]).ravel()
    return v


def _exhaustive_chunk(cfg: SimConfig, rng: np.random.Generator, n_trials: int,
                      keep_details: bool) -> TrialBatch:
    src = as_joint_source(cfg.source)
    cond = conditional_x_given_y(src)
    nx, ny, n = src.nx, src.ny, cfg.n
    nseq = nx ** n
    ent = np.exp(n * cfg.T)
    flat = src.pmf.ravel()
    batch = TrialBatch(
        trials=n_trials, n=n, r_nominal=cfg.R, r_actual=cfg.r_actual, T=cfg.T,
        seed=cfg.master_seed, details=[] if keep_details else None,
    )
    if cfg.mode == "variable":
        m_arr = np.maximum(
            2, np.round(np.exp(_seq_rate_sums(np.asarray(cfg.rates), nx, n)))
        ).astype(np.int64)
    else:
        m_arr = np.full(nseq, cfg.bins, dtype=np.int64)
    pairs = rng.choice(nx * ny, p=flat, size=(n_trials, n))
    x_seqs, y_seqs = pairs // ny, pairs % ny
    hist = {}
    binary = nx == 2 and ny == 2
    for t in range(n_trials):
        y_seq = y_seqs[t]
        if binary:
            # same group-table probabilities as the grouped engine
            wyv = int(y_seq.sum())
            _, wtab, _ = _binary_group_tables(cond, n, wyv)
            a_cnt = np.zeros(nseq, dtype=int)
            b_cnt = np.zeros(nseq, dtype=int)
            idx = np.arange(nseq)
            for pos in range(n):
                bit = (idx >> (n - 1 - pos)) & 1
                if y_seq[pos] == 1:
                    a_cnt += bit == 0
                else:
                    b_cnt += bit == 1
            w = wtab[a_cnt * (n - wyv + 1) + b_cnt]
        else:
            w = _seq_cond_probs(cond, y_seq)
        x_idx = 0
        for xi in x_seqs[t]:
            x_idx = x_idx * nx + int(xi)
        z_all = rng.integers(0, m_arr)
        members = z_all == z_all[x_idx]
        members[x_idx] = False
        w_true = float(w[x_idx])
        s_other = float(w[members].sum())
        cand_true = (s_other <= 0.0) or (w_true > ent * s_other)
        wm = w[members]
        denom = (s_other - wm) + w_true
        n_inc = int((wm > ent * denom).sum())
        batch.e1_events += int(not cand_true)
        batch.e2_events += int(n_inc >= 1)
        batch.erasure += int((not cand_true) and n_inc == 0)
        batch.correct_unique += int(cand_true and n_inc == 0)
        batch.incorrect_sum += n_inc
        hist[n_inc] = hist.get(n_inc, 0) + 1
        if keep_details:
            batch.details.append(
                {
                    "y_seq": y_seq.copy(),
                    "x_idx": x_idx,
                    "member_weights": wm.copy(),
                    "w_true": w_true,
                    "s_other": s_other,
                    "cand_true": bool(cand_true),
                    "n_incorrect": n_inc,
                }
            )
    batch.incorrect_hist = hist
    return batch


def _pick_engine(cfg: SimConfig) -> str:
    if cfg.engine != "auto":
        return cfg.engine
    src = as_joint_source(cfg.source)
    return "grouped" if (src.nx == 2 and src.ny == 2) else "exhaustive"


def run_trials(cfg: SimConfig, workers: int = 1, keep_details: bool = False) -> TrialBatch:
    """Run the configured trials; deterministic in (master_seed, trials).

    Trials are split into fixed chunks, each with its own RNG stream
    derived from (master_seed, chunk index); chunk results are merged by
    pure counting, so any ``workers`` value produces the same TrialBatch.
    """
    engine = _pick_engine(cfg)
    if engine == "grouped":
        src = as_joint_source(cfg.source)
        if not (src.nx == 2 and src.ny == 2):
            raise DomainError("grouped engine requires binary alphabets")
        worker_fn = _grouped_chunk
    else:
        worker_fn = _exhaustive_chunk
    if keep_details and cfg.trials > 20000:
        raise ResourceError("keep_details is limited to 20000 trials")
    sizes = [CHUNK] * (cfg.trials // CHUNK)
    if cfg.trials % CHUNK:
        sizes.append(cfg.trials % CHUNK)

    def one(args):
        c, size = args
        return worker_fn(cfg, _chunk_rng(cfg.master_seed, c), size, keep_details)

    jobs = list(enumerate(sizes))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(one, jobs))
    else:
        parts = [one(j) for j in jobs]
    total = TrialBatch(
        trials=cfg.trials, n=cfg.n, r_nominal=cfg.R, r_actual=cfg.r_actual,
        T=cfg.T, seed=cfg.master_seed, details=[] if keep_details else None,
    )
    for p in parts:
        total.merge(p)
    return total


@dataclass
class OracleResult:
    """Exact event probabilities over source and binning ensembles."""

    p_e1: float
    p_e2: float
    p_erasure: float
    p_correct_unique: float
    mean_incorrect: float
    method: str


def _oracle_common(cfg: SimConfig):
    src = as_joint_source(cfg.source)
    if cfg.mode != "fixed":
        raise DomainError("exact_oracle supports fixed-rate mode only")
    nx, ny, n = src.nx, src.ny, cfg.n
    nseq = nx ** n
    cond = conditional_x_given_y(src)
    # every (x, y) block pair with its probability
    ys = [np.array(t) for t in np.ndindex(*([ny] * n))]
    weights_for_y = {}
    binary = nx == 2 and ny == 2
    for yi, y_seq in enumerate(ys):
        if binary:
            wyv = int(y_seq.sum())
            _, wtab, _ = _binary_group_tables(cond, n, wyv)
            idx = np.arange(nseq)
            a_cnt = np.zeros(nseq, dtype=int)
            b_cnt = np.zeros(nseq, dtype=int)
            for pos in range(n):
                bit = (idx >> (n - 1 - pos)) & 1
                if y_seq[pos] == 1:
                    a_cnt += bit == 0
                else:
                    b_cnt += bit == 1
            weights_for_y[yi] = wtab[a_cnt * (n - wyv + 1) + b_cnt]
        else:
            weights_for_y[yi] = _seq_cond_probs(cond, y_seq)
    py = marginal_y(src)
    py_seq = np.array([np.prod(py[y_seq]) for y_seq in ys])
    return src, nseq, ys, weights_for_y, py_seq


def exact_oracle(cfg: SimConfig, method: str = "auto") -> OracleResult:
    """Exact event probabilities for tiny block lengths.

    ``method='enumeration'`` averages over every binning map f (requires
    M^(|X|^n) <= 2^20); ``method='independence'`` conditions on (x, y) and
    enumerates the 2^(|X|^n - 1) subsets of other blocks sharing x's bin
    (requires that count <= 2^22).  'auto' prefers enumeration when it
    fits.  The two must agree to ~1e-12 (regression-tested).
    """
    src, nseq, ys, weights_for_y, py_seq = _oracle_common(cfg)
    m = cfg.bins
    n = cfg.n
    ent = np.exp(n * cfg.T)
    if method == "auto":
        method = "enumeration" if m ** nseq <= MAP_CAP else "independence"
    if method == "enumeration":
        n_maps = m ** nseq
        if n_maps > MAP_CAP:
            raise ResourceError(f"M^(|X|^n) = {n_maps} exceeds the map cap 2^20")
        digits = np.empty((n_maps, nseq), dtype=np.int64)
        v = np.arange(n_maps)
        for j in range(nseq):
            digits[:, j] = v % m
            v = v // m
        bins = digits
    elif method == "independence":
        if 2 ** (nseq - 1) > SUBSET_CAP:
            raise ResourceError(f"2^(|X|^n - 1) exceeds the subset cap 2^22")
        masks = np.arange(2 ** (nseq - 1))
        member_bits = ((masks[:, None] >> np.arange(nseq - 1)[None, :]) & 1).astype(bool)
        sizes = member_bits.sum(axis=1)
        q = 1.0 / m
        subset_prob = (q ** sizes) * ((1 - q) ** (nseq - 1 - sizes))
    else:
        raise DomainError(f"unknown oracle method {method!r}")

    cond_x_probs = {}
    totals = np.zeros(5)  # e1, e2, erasure, correct_unique, mean_incorrect
    for yi, y_seq in enumerate(ys):
        w = weights_for_y[yi]
        for x_idx in range(nseq):
            p_xy = py_seq[yi] * w[x_idx]
            if p_xy <= 0:
                continue
            w_true = float(w[x_idx])
            others = np.delete(np.arange(nseq), x_idx)
            wo = w[others]
            if method == "enumeration":
                membership = bins[:, others] == bins[:, x_idx][:, None]
                weight_rows = 1.0 / len(bins)
            else:
                membership = member_bits
                weight_rows = subset_prob
            s_other = membership @ wo
            cand_true = (s_other <= 0.0) | (w_true > ent * s_other)
            denom = (s_other[:, None] - wo[None, :]) + w_true
            inc = membership & (wo[None, :] > ent * denom)
            n_inc = inc.sum(axis=1)
            p_e1 = float(np.sum(weight_rows * (~cand_true)))
            p_e2 = float(np.sum(weight_rows * (n_inc >= 1)))
            p_er = float(np.sum(weight_rows * ((~cand_true) & (n_inc == 0))))
            p_cu = float(np.sum(weight_rows * (cand_true & (n_inc == 0))))
            mean_inc = float(np.sum(weight_rows * n_inc))
            totals += p_xy * np.array([p_e1, p_e2, p_er, p_cu, mean_inc])
    return OracleResult(
        p_e1=totals[0], p_e2=totals[1], p_erasure=totals[2],
        p_correct_unique=totals[3], mean_incorrect=totals[4], method=method,
    )


@dataclass
class SlopeFit:
    """Least-squares exponent fit of -ln(rate) against n."""

    slope: float
    intercept: float
    stderr: float
    ci_half_width: float
    n_points: int


def empirical_exponent(points) -> SlopeFit:
    """Fit -ln(rate) = a + E n by least squares; E estimates the exponent.

    ``points`` is a sequence of (n, event_rate) with at least 3 distinct
    block lengths.  The intercept absorbs the subexponential prefactor
    (equivalently the fit is -ln(rate)/n = E + a/n).  The confidence half
    width is t(0.975, k-2) times the slope standard error.  Raises
    DegenerateData when any rate is zero; the exception carries a fallback
    slope fitted to the positive points when at least two remain.
    """
    pts = [(float(n), float(r)) for n, r in points]
    if len(pts) < 3:
        raise DegenerateData(f"need at least 3 block lengths, got {len(pts)}")
    zeros = [n for n, r in pts if r <= 0.0]
    if zeros:
        pos = [(n, r) for n, r in pts if r > 0.0]
        fallback = None
        if len(pos) >= 2:
            xs = np.array([n for n, _ in pos])
            ys = -np.log([r for _, r in pos])
            fallback = float(np.polyfit(xs, ys, 1)[0])
        raise DegenerateData(
            f"zero event rate at n = {zeros}; exponent unbounded from the data "
            f"(one-sided bound from positive points: {fallback})",
            one_sided_slope=fallback,
        )
    xs = np.array([n for n, _ in pts])
    ys = -np.log(np.array([r for _, r in pts]))
    k = len(pts)
    xbar = xs.mean()
    sxx = float(((xs - xbar) ** 2).sum())
    slope = float(((xs - xbar) * (ys - ys.mean())).sum() / sxx)
    intercept = float(ys.mean() - slope * xbar)
    resid = ys - (intercept + slope * xs)
    if k > 2:
        s2 = float((resid ** 2).sum() / (k - 2))
    else:
        s2 = 0.0
    stderr = math.sqrt(s2 / sxx)
    tval = float(_scipy_stats.t.ppf(0.975, k - 2)) if k > 2 else 0.0
    return SlopeFit(
        slope=slope, intercept=intercept, stderr=stderr,
        ci_half_width=tval * stderr, n_points=k,
    )


def write_batch_csv(batches, path) -> None:
    """One CSV row per TrialBatch (schema swexp.sim.v1)."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# schema=swexp.sim.v1\n")
        fh.write(SIM_CSV_SCHEMA + "\n")
        for b in batches:
            fh.write(
                f"{b.n},{b.r_nominal!r},{b.r_actual!r},{b.T!r},{b.trials},{b.seed},"
                f"{b.e1_events},{b.e2_events},{b.erasure},{b.mean_list_size!r}\n"
            )
