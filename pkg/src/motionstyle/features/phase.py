"""Gait phase from contact labels.

Phase is a scalar in [0, 1): 0 at every left-heel strike, 0.5 at every
right-heel strike, linear in between, frozen during stand segments.
"""

from __future__ import annotations

import numpy as np

from ..errors import LabelingError
from ..motion.skeleton import L_HEEL, R_HEEL, STAND


def _strike_frames(contact: np.ndarray, col: int) -> np.ndarray:
    """Frames where the contact flag rises (False -> True)."""
    on = contact[:, col].astype(bool)
    rising = np.flatnonzero(on[1:] & ~on[:-1]) + 1
    if on[0]:
        rising = np.concatenate([[0], rising])
    return rising


def compute_phase(contact_labels: np.ndarray,
                  action_labels: np.ndarray) -> np.ndarray:
    """contact_labels (F, 4) bool, action_labels (F,) int -> phase (F,) float32."""
    contact = np.asarray(contact_labels)
    action = np.asarray(action_labels)
    n = contact.shape[0]
    if contact.shape != (n, 4) or action.shape != (n,):
        raise LabelingError("contact_labels must be (F, 4) and action_labels (F,)")

    walk = action != STAND
    left = _strike_frames(contact, L_HEEL)
    right = _strike_frames(contact, R_HEEL)
    # strikes during stand do not advance the clock
    left = left[walk[left]] if len(left) else left
    right = right[walk[right]] if len(right) else right
    events = sorted([(int(f), 0.0) for f in left] + [(int(f), 0.5) for f in right])

    walk_frames = np.flatnonzero(walk)
    if len(events) == 0:
        if len(walk_frames) > 0:
            raise LabelingError(
                f"no contact events in walk segment frames "
                f"{walk_frames[0]}..{walk_frames[-1]}")
        return np.zeros(n, dtype=np.float32)

    runs = []
    if len(walk_frames) > 0:
        run_start = walk_frames[0]
        prev = walk_frames[0]
        for f in walk_frames[1:]:
            if f != prev + 1:
                runs.append((int(run_start), int(prev)))
                run_start = f
            prev = f
        runs.append((int(run_start), int(prev)))

    for a, b in runs:
        in_run = [f for f, _ in events if a <= f <= b]
        if not in_run:
            raise LabelingError(f"no contact events in walk segment frames {a}..{b}")
        if min(in_run) > a:
            # the clock was frozen through the preceding stand; anchor the
            # run start with the heel already planted there (when both are
            # down, the one not about to re-strike)
            def _next(strikes):
                ahead = strikes[(strikes >= a) & (strikes <= b)]
                return int(ahead[0]) if len(ahead) else n
            cands = []
            if contact[a, L_HEEL]:
                cands.append((_next(left), 0.0))
            if contact[a, R_HEEL]:
                cands.append((_next(right), 0.5))
            if cands:
                events.append((a, max(cands)[1]))
    events.sort()

    # unwrap: consecutive anchors advance by 0.5 (alternating sides) or a
    # full cycle (same side twice, a missed opposite strike)
    frames = [events[0][0]]
    values = [events[0][1]]
    for f, anchor in events[1:]:
        if f == frames[-1]:
            continue
        prev_anchor = values[-1] % 1.0
        delta = (anchor - prev_anchor) % 1.0
        if delta == 0.0:
            delta = 1.0
        frames.append(f)
        values.append(values[-1] + delta)

    unwrapped = np.interp(np.arange(n), frames, values)
    for t in range(1, n):
        if action[t] == STAND:
            unwrapped[t] = unwrapped[t - 1]
    return (unwrapped % 1.0).astype(np.float32)
