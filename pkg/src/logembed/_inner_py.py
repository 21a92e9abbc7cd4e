"""Pure-Python training kernels (NumPy), the fallback when the compiled
extension is unavailable.

Both backends share one contract: randomness is pre-drawn by the trainer and
passed in as arrays, so a kernel call is a deterministic function of its
inputs.  The math here delegates to the reference implementations in
logembed.model; the compiled backend re-implements the same update and is
tested against this one.
"""
from __future__ import annotations

import numpy as np

from .model import EmbeddingModel, global_list_loss, local_term

COMPILED = False

LR_FLOOR = 1e-4  # linear decay never drops below this fraction of the base rate


def _lr_factor(done: int, total: int) -> float:
    f = 1.0 - done / total
    return f if f > LR_FLOOR else LR_FLOOR


def gine_batch(source, w_source, lists, eta, compute_loss=False):
    """Apply one ranked-list gradient step per row of `lists` (gine mapping).

    Returns the summed list loss when `compute_loss`, else 0.0.
    """
    m = EmbeddingModel(source, source, w_source, w_source)  # gine path reads only source/w_source
    total = 0.0
    for nodes in lists:
        loss, g = global_list_loss(m, nodes, "gine")
        source[g.nodes] -= eta * g.wrt_source
        w_source -= eta * g.wrt_w_source
        if compute_loss:
            total += loss
    return total


def log_epoch(source, target, w_source, w_target,
              indptr, neighbors, visit_order,
              negatives, gate, level_lists,
              lam, eta1, eta2, n_negative,
              decay, progress_base, progress_total,
              compute_loss=False):
    """One pass over `visit_order` of the joint local+global update.

    Per visited node: one negative-sampling update per neighbor (learning rate
    eta1), then with probability lam one ranked-list update on the log mapping
    (learning rate eta2).  `negatives` supplies n_negative pre-drawn rows per
    directed edge in visit order; `gate` and `level_lists` supply one uniform
    and one pre-sampled list per visit.  Returns (loss_sum, n_global_updates).
    """
    m = EmbeddingModel(source, target, w_source, w_target)
    loss_sum = 0.0
    n_global = 0
    edges_done = progress_base
    e_local = 0
    for idx, v in enumerate(visit_order):
        for ctx in neighbors[indptr[v]:indptr[v + 1]]:
            negs = negatives[e_local * n_negative:(e_local + 1) * n_negative]
            e_local += 1
            eff = eta1 * _lr_factor(edges_done, progress_total) if decay else eta1
            edges_done += 1
            loss, g = local_term(m, v, ctx, negs)
            target[g.target_rows] -= eff * g.wrt_targets
            source[v] -= eff * g.wrt_center
            if compute_loss:
                loss_sum += loss
        if gate[idx] < lam:
            eff = eta2 * _lr_factor(edges_done, progress_total) if decay else eta2
            loss, g = global_list_loss(m, level_lists[idx], "log")
            source[g.nodes] -= eff * g.wrt_source
            target[g.nodes] -= eff * g.wrt_target
            w_source -= eff * g.wrt_w_source
            w_target -= eff * g.wrt_w_target
            n_global += 1
            if compute_loss:
                loss_sum += loss
    return loss_sum, n_global
