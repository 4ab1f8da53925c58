"""Checkpointed, parallel segmented-sieve census of primes in [x, x**2].

One cumulative pass over 2..n_max**2 records pi at every square boundary;
subtracting pi(x-1) from a base sieve turns that into the per-x range
count.  Segments may be sieved concurrently, but results are always
reduced in ascending order, so the emitted stream does not depend on the
worker count or the segment length.
"""

from __future__ import annotations

import bisect
import hashlib
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from math import isqrt
from pathlib import Path
from typing import Iterator, NamedTuple, Optional

import numpy as np

from .errors import (
    CheckpointError,
    CheckpointIntegrityError,
    DomainError,
    RangeTooLargeError,
)

DEFAULT_SEGMENT_LEN = 1 << 22  # numbers per segment; half that many odd slots
DEFAULT_CHECKPOINT_EVERY = 1000
# isqrt(2**63 - 1): largest base whose square fits in a signed 64-bit integer.
MAX_SQUARE_BASE = 3_037_000_499

CENSUS_HEADER = "x,x_squared,prime_count"
CHECKPOINT_VERSION = "primecensus-checkpoint-v1"


class CensusRecord(NamedTuple):
    x: int
    x_squared: int
    prime_count: int


@dataclass
class SweepCheckpoint:
    """Resumable state of a census sweep.

    ``digest`` is the SHA-256 over the CSV row bytes emitted so far;
    ``segment_cursor`` is the first integer not yet sieved, which for a
    checkpoint taken after x is always x**2 + 1.
    """

    n_max: int
    last_completed_x: int
    cumulative_pi_at_square: int
    segment_cursor: int
    digest: str
    census_path: str = ""


def encode_census_row(record) -> bytes:
    x, x_squared, prime_count = record
    return f"{x},{x_squared},{prime_count}\n".encode("ascii")


def sieve_flags(n: int) -> np.ndarray:
    """Primality flags for 0..n (plain Eratosthenes, used as the base sieve)."""
    flags = np.ones(n + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, isqrt(n) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    return flags


def _odd_sieve_basis(n_max: int):
    """Odd base primes <= n_max as a plain list plus their squares."""
    flags = sieve_flags(n_max)
    odd = np.flatnonzero(flags)[1:]  # drop 2; odd multiples only in segments
    return odd.tolist(), (odd.astype(np.int64) ** 2).tolist()


def _sieve_odd_segment(lo: int, hi: int, primes: list, prime_squares: list) -> np.ndarray:
    """Primality mask for the odd values lo, lo+2, ..., < hi (lo odd).

    Odd multiples of an odd prime p are 2p apart, i.e. p slots apart in
    odd-index space, so one strided store per prime marks the segment.
    """
    mask = np.ones((hi - lo) // 2, dtype=bool)
    cut = bisect.bisect_left(prime_squares, hi)
    for i in range(cut):
        p = primes[i]
        start = prime_squares[i]
        if start < lo:
            start = ((lo + p - 1) // p) * p
            if start % 2 == 0:
                start += p
            if start >= hi:
                continue
        mask[(start - lo) >> 1 :: p] = False
    return mask


def _segment_counts(lo, hi, squares, primes, prime_squares):
    """Sieve one segment; report its total odd-prime count and, for every
    square boundary b inside it, the count of odd primes in [lo, b]."""
    mask = _sieve_odd_segment(lo, hi, primes, prime_squares)
    boundary_counts = []
    prev_off = 0
    running = 0
    for x, b in squares:
        off = (b - lo) // 2 + 1
        running += int(np.count_nonzero(mask[prev_off:off]))
        prev_off = off
        boundary_counts.append((x, running))
    total = running + int(np.count_nonzero(mask[prev_off:]))
    return total, boundary_counts


_WORKER_BASIS = None


def _init_segment_worker(primes, prime_squares):
    global _WORKER_BASIS
    _WORKER_BASIS = (primes, prime_squares)


def _segment_job(task):
    lo, hi, squares = task
    primes, prime_squares = _WORKER_BASIS
    return _segment_counts(lo, hi, squares, primes, prime_squares)


def _segment_tasks(cursor: int, limit: int, segment_len: int, start_x: int, n_max: int):
    """Yield (lo, hi, [(x, x*x) boundaries]) covering odd values cursor..limit."""
    lo = cursor if cursor % 2 == 1 else cursor + 1
    x = start_x
    while lo <= limit:
        hi = min(lo + segment_len, limit + 1)
        if hi % 2 == 0:
            hi += 1  # keep segment bounds odd-aligned
        squares = []
        while x <= n_max and x * x < hi:
            squares.append((x, x * x))
            x += 1
        yield lo, hi, squares
        lo = hi


def count_in_range(x: int) -> int:
    """Exact number of primes p with x <= p <= x*x (both ends inclusive)."""
    if x < 1:
        raise ValueError("x must be positive")
    if x > MAX_SQUARE_BASE:
        raise RangeTooLargeError(f"x={x}: x**2 exceeds the 64-bit guard")
    if x == 1:
        return 0  # [1, 1] holds no primes
    primes, prime_squares = _odd_sieve_basis(x)
    limit = x * x
    count = 1 if x == 2 else 0  # the prime 2 is in range only for x <= 2
    lo = max(x, 3)
    if lo % 2 == 0:
        lo += 1
    for seg_lo, seg_hi, _ in _segment_tasks(lo, limit, DEFAULT_SEGMENT_LEN, x, 1):
        count += int(np.count_nonzero(_sieve_odd_segment(seg_lo, seg_hi, primes, prime_squares)))
    return count


def census_sweep(
    n_max: int,
    *,
    workers: int = 1,
    segment_len: int = DEFAULT_SEGMENT_LEN,
    start_x: int = 2,
    cum_pi_start: Optional[int] = None,
) -> Iterator[CensusRecord]:
    """Yield CensusRecord for x = start_x..n_max in ascending order.

    ``start_x > 2`` resumes a sweep mid-way and requires ``cum_pi_start``,
    the value of pi((start_x - 1)**2).  Output is independent of both
    ``workers`` and ``segment_len``.
    """
    if n_max < 2:
        raise DomainError("n_max must be >= 2")
    if n_max > MAX_SQUARE_BASE:
        raise RangeTooLargeError(f"n_max={n_max}: n_max**2 exceeds the 64-bit guard")
    if start_x < 2:
        raise ValueError("start_x must be >= 2")
    if start_x > 2 and cum_pi_start is None:
        raise ValueError("resuming mid-sweep requires cum_pi_start = pi((start_x-1)**2)")
    if start_x > n_max:
        return
    workers = max(1, int(workers))
    segment_len = max(1024, int(segment_len))
    if segment_len % 2:
        segment_len += 1

    flags = sieve_flags(n_max)
    pi_below = np.cumsum(flags, dtype=np.int64)  # pi_below[v] = pi(v)
    primes = np.flatnonzero(flags)[1:].tolist()
    prime_squares = [p * p for p in primes]

    limit = n_max * n_max
    cursor = 3 if start_x == 2 else (start_x - 1) ** 2 + 1
    cum_odd = 0 if start_x == 2 else int(cum_pi_start) - 1  # strip the prime 2
    tasks = _segment_tasks(cursor, limit, segment_len, start_x, n_max)

    pool = None
    try:
        if workers == 1:
            results = (_segment_counts(lo, hi, sq, primes, prime_squares) for lo, hi, sq in tasks)
        else:
            pool = ProcessPoolExecutor(
                max_workers=workers,
                initializer=_init_segment_worker,
                initargs=(primes, prime_squares),
            )
            results = pool.map(_segment_job, tasks)
        for total, boundary_counts in results:
            for x, upto_square in boundary_counts:
                pi_x2 = 1 + cum_odd + upto_square
                yield CensusRecord(x, x * x, pi_x2 - int(pi_below[x - 1]))
            cum_odd += total
    finally:
        if pool is not None:
            pool.shutdown(cancel_futures=True)


# ---------------------------------------------------------------------------
# Checkpoint files
# ---------------------------------------------------------------------------

_CHECKPOINT_INT_FIELDS = ("n_max", "last_completed_x", "cumulative_pi_at_square", "segment_cursor")


def write_checkpoint(path, checkpoint: SweepCheckpoint) -> None:
    """Atomically persist a checkpoint (tmp file + rename)."""
    lines = [CHECKPOINT_VERSION]
    lines.append(f"n_max={checkpoint.n_max}")
    lines.append(f"census_path={checkpoint.census_path}")
    lines.append(f"last_completed_x={checkpoint.last_completed_x}")
    lines.append(f"cumulative_pi_at_square={checkpoint.cumulative_pi_at_square}")
    lines.append(f"segment_cursor={checkpoint.segment_cursor}")
    lines.append(f"digest={checkpoint.digest}")
    tmp = str(path) + ".tmp"
    with open(tmp, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")
        fh.flush()
        os.fsync(fh.fileno())
    os.replace(tmp, path)


def read_checkpoint(path) -> SweepCheckpoint:
    with open(path, "r", encoding="ascii") as fh:
        content = fh.read().splitlines()
    if not content or content[0] != CHECKPOINT_VERSION:
        raise CheckpointError(f"{path}: not a {CHECKPOINT_VERSION} file")
    fields = {}
    for line in content[1:]:
        if not line.strip():
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise CheckpointError(f"{path}: malformed line {line!r}")
        fields[key] = value
    try:
        ints = {name: int(fields[name]) for name in _CHECKPOINT_INT_FIELDS}
        digest = fields["digest"]
    except KeyError as exc:
        raise CheckpointError(f"{path}: missing field {exc}") from None
    except ValueError as exc:
        raise CheckpointError(f"{path}: {exc}") from None
    if len(digest) != 64 or any(c not in "0123456789abcdef" for c in digest):
        raise CheckpointError(f"{path}: digest is not a sha256 hex string")
    checkpoint = SweepCheckpoint(digest=digest, census_path=fields.get("census_path", ""), **ints)
    expected_cursor = checkpoint.last_completed_x**2 + 1
    if checkpoint.segment_cursor != expected_cursor:
        raise CheckpointError(
            f"{path}: segment_cursor={checkpoint.segment_cursor} does not match "
            f"last_completed_x={checkpoint.last_completed_x}"
        )
    return checkpoint


def _hash_existing_rows(census_path, last_completed_x: int):
    """Re-hash rows x=2..last_completed_x of an existing census file.

    Returns (hasher, byte offset just past the last kept row).  Raises
    CheckpointIntegrityError when rows are missing or out of place.
    """
    hasher = hashlib.sha256()
    with open(census_path, "rb") as fh:
        header = fh.readline()
        if header.rstrip(b"\r\n").decode("ascii", "replace") != CENSUS_HEADER:
            raise CheckpointIntegrityError(f"{census_path}: census header missing or wrong")
        for x in range(2, last_completed_x + 1):
            line = fh.readline()
            if not line.startswith(f"{x},".encode("ascii")):
                raise CheckpointIntegrityError(f"{census_path}: row for x={x} missing or out of order")
            hasher.update(line)
        offset = fh.tell()
    return hasher, offset


def resume_sweep(
    checkpoint_path,
    census_path=None,
    *,
    workers: int = 1,
    segment_len: int = DEFAULT_SEGMENT_LEN,
) -> Iterator[CensusRecord]:
    """Continue a checkpointed sweep, yielding the records after last_completed_x.

    The digest is validated against the census file recorded in the
    checkpoint (or ``census_path`` when given) before any work starts.
    A completed sweep yields nothing.
    """
    checkpoint = read_checkpoint(checkpoint_path)
    path = census_path or checkpoint.census_path
    if not path:
        raise CheckpointError(f"{checkpoint_path}: no census file recorded; pass census_path to validate the digest")
    hasher, _ = _hash_existing_rows(path, checkpoint.last_completed_x)
    if hasher.hexdigest() != checkpoint.digest:
        raise CheckpointIntegrityError(f"{path}: rows do not match the checkpoint digest; refusing to resume")
    return census_sweep(
        checkpoint.n_max,
        workers=workers,
        segment_len=segment_len,
        start_x=checkpoint.last_completed_x + 1,
        cum_pi_start=checkpoint.cumulative_pi_at_square,
    )


# ---------------------------------------------------------------------------
# File-writing orchestration (CSV output + periodic checkpoints)
# ---------------------------------------------------------------------------


def _mark_partial(path) -> None:
    try:
        os.replace(path, str(path) + ".partial")
    except OSError:
        pass  # the original error is what the caller will see


def run_census(
    n_max: Optional[int],
    out_path,
    *,
    checkpoint_path=None,
    workers: int = 1,
    segment_len: int = DEFAULT_SEGMENT_LEN,
    checkpoint_every: int = DEFAULT_CHECKPOINT_EVERY,
    resume: bool = False,
    stop_after: Optional[int] = None,
) -> int:
    """Sweep to n_max, writing census CSV rows and periodic checkpoints.

    Returns the number of rows written by this invocation.  With
    ``resume=True`` the existing file is digest-validated, trimmed back to
    the checkpointed row, and extended; the concatenation is byte-identical
    to an uninterrupted run.  ``stop_after`` completes the given x, writes
    a checkpoint, and returns early (a clean interruption).
    """
    out_path = Path(out_path)
    checkpoint_every = max(1, int(checkpoint_every))

    if resume:
        if checkpoint_path is None:
            raise CheckpointError("resume requires a checkpoint path")
        checkpoint = read_checkpoint(checkpoint_path)
        if n_max is not None and n_max != checkpoint.n_max:
            raise CheckpointError(
                f"checkpoint is for n_max={checkpoint.n_max}, not n_max={n_max}"
            )
        n_max = checkpoint.n_max
        hasher, keep_offset = _hash_existing_rows(out_path, checkpoint.last_completed_x)
        if hasher.hexdigest() != checkpoint.digest:
            raise CheckpointIntegrityError(
                f"{out_path}: rows do not match the checkpoint digest; refusing to resume"
            )
        with open(out_path, "rb+") as fh:
            fh.truncate(keep_offset)  # drop rows newer than the checkpoint
        start_x = checkpoint.last_completed_x + 1
        cum_pi_start = checkpoint.cumulative_pi_at_square
        mode = "ab"
    else:
        if n_max is None:
            raise ValueError("n_max is required for a fresh sweep")
        hasher = hashlib.sha256()
        start_x = 2
        cum_pi_start = None
        mode = "wb"

    # pi(x - 1) lookups for reconstructing pi(x**2) in checkpoints.
    pi_below = np.cumsum(sieve_flags(n_max), dtype=np.int64) if checkpoint_path is not None else None

    stream = census_sweep(
        n_max,
        workers=workers,
        segment_len=segment_len,
        start_x=start_x,
        cum_pi_start=cum_pi_start,
    )
    written = 0
    try:
        with open(out_path, mode) as fh:
            if mode == "wb":
                fh.write((CENSUS_HEADER + "\n").encode("ascii"))
            for record in stream:
                line = encode_census_row(record)
                fh.write(line)
                hasher.update(line)
                written += 1
                stopping = stop_after is not None and record.x >= stop_after
                if checkpoint_path is not None and (
                    record.x % checkpoint_every == 0 or record.x == n_max or stopping
                ):
                    fh.flush()
                    os.fsync(fh.fileno())
                    write_checkpoint(
                        checkpoint_path,
                        SweepCheckpoint(
                            n_max=n_max,
                            last_completed_x=record.x,
                            cumulative_pi_at_square=record.prime_count + int(pi_below[record.x - 1]),
                            segment_cursor=record.x**2 + 1,
                            digest=hasher.hexdigest(),
                            census_path=str(out_path),
                        ),
                    )
                if stopping:
                    stream.close()
                    break
            fh.flush()
            os.fsync(fh.fileno())
    except OSError:
        _mark_partial(out_path)
        raise
    return written
