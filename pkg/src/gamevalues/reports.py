"""Bound reports: the interchange records emitted by the CLI, their JSON and
CSV projections, and re-verification of certificates."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .algebra import ValidationError, eig_sym
from .catalog import as_unique, resolve_game
from .games import DeterministicStrategy, strategy_value_exact
from .quantum_bounds import (Frame, cost_matrix, q1_sync_value, unitary_value_z3)
from .vect_sdp import build_program, check_gram

BOUND_TYPES = ("exact", "lower", "upper")


def encode_value(value):
    if isinstance(value, Fraction):
        return {"num": value.numerator, "den": value.denominator}
    return float(value)


def decode_value(data):
    if isinstance(data, dict):
        return Fraction(int(data["num"]), int(data["den"]))
    return float(data)


def value_as_float(data) -> float:
    return float(decode_value(data)) if isinstance(data, dict) else float(data)


@dataclass(frozen=True)
class BoundReport:
    game: str
    kind: str
    bound: str
    value: Fraction | float
    tol: float
    status: str = "ok"
    certificate: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.bound not in BOUND_TYPES:
            raise ValidationError(f"bound type must be one of {BOUND_TYPES}")

    def to_json(self) -> dict:
        out = {"game": self.game, "kind": self.kind, "bound": self.bound,
               "value": encode_value(self.value), "tol": self.tol,
               "status": self.status, "certificate": self.certificate}
        out.update(self.extra)
        return out


def dumps_reports(reports: list[dict]) -> str:
    return json.dumps({"reports": reports}, sort_keys=True, indent=2) + "\n"


def csv_of_reports(reports: list[dict]) -> str:
    """CSV projection: one row per report, certificates elided."""
    lines = ["game,kind,bound,value,status,tol"]
    for rep in reports:
        val = rep["value"]
        text = f"{val['num']}/{val['den']}" if isinstance(val, dict) else repr(float(val))
        lines.append(f"{rep['game']},{rep['kind']},{rep['bound']},{text},{rep['status']},{rep['tol']}")
    return "\n".join(lines) + "\n"


def complex_matrix_to_json(m: np.ndarray) -> list:
    return [[[float(c.real), float(c.imag)] for c in row] for row in np.asarray(m, dtype=complex)]


def complex_matrix_from_json(data) -> np.ndarray:
    return np.array([[complex(re, im) for re, im in row] for row in data])


def verify_certificate(report: dict) -> dict:
    """Recompute a reported bound from its certificate alone.

    Returns {"ok", "stated", "recomputed", "residuals"}; ok requires the
    recomputed value to match within the report's stated tolerance (and, for
    Gram certificates, feasibility within ten times that tolerance).
    """
    for key in ("game", "kind", "value", "certificate"):
        if key not in report:
            raise ValidationError(f"certificate report is missing field '{key}'")
    game_any, pi, _, _ = resolve_game(report["game"])
    game = as_unique(game_any)
    stated = decode_value(report["value"])
    tol = float(report.get("tol", 1e-9)) or 1e-9
    cert = report["certificate"]
    residuals: dict = {}

    if "strategy" in cert:
        strat = DeterministicStrategy(hA=cert["strategy"]["hA"], hB=cert["strategy"]["hB"])
        recomputed = strategy_value_exact(game, pi, strat)
        residuals["value"] = abs(float(recomputed) - float(stated))
    elif "frame" in cert:
        frame = Frame.from_json(cert["frame"])
        recomputed = q1_sync_value(frame, game, pi)
        residuals["value"] = abs(recomputed - float(stated))
    elif "Z" in cert:
        z = np.array(cert["Z"], dtype=float)
        cm = cost_matrix(game, pi)
        if z.shape != cm.entries.shape:
            raise ValidationError("Z has the wrong shape for this game")
        sym_gap = float(np.max(np.abs(z - z.T)))
        residuals["symmetry"] = sym_gap
        if sym_gap > 10 * tol:
            return {"ok": False, "stated": encode_value(stated),
                    "recomputed": None, "residuals": residuals}
        w, _ = eig_sym(cm.entries + z)
        recomputed = game.nx * float(w[-1])
        residuals["value"] = abs(recomputed - float(stated))
    elif "gram" in cert:
        mode = cert.get("mode", "bipartite")
        prog = build_program(game, pi, mode)
        gram = np.array(cert["gram"], dtype=float)
        if gram.shape != (prog.size, prog.size):
            raise ValidationError("gram has the wrong shape for this game")
        residuals.update(check_gram(prog, gram))
        recomputed = prog.value_of(gram)
        residuals["value"] = abs(recomputed - float(stated))
        feasible = max(residuals["affine"], residuals["cone"], residuals["nonneg"]) <= 10 * tol
        ok = feasible and residuals["value"] <= max(tol, 1e-6)
        return {"ok": bool(ok), "stated": encode_value(stated),
                "recomputed": encode_value(recomputed), "residuals": residuals}
    elif "bipartite_frames" in cert:
        payload = cert["bipartite_frames"]
        alice = Frame.from_json(payload["alice"])
        bob = Frame.from_json(payload["bob"])
        alice.validate()
        bob.validate()
        state = np.array([complex(re, im) for re, im in payload["state"]])
        if abs(np.linalg.norm(state) - 1.0) > 1e-9:
            raise ValidationError("state vector is not normalized")
        hbar = state.reshape(alice.d, bob.d).conj()
        recomputed = 0.0
        for x in range(game.nx):
            for y in range(game.ny):
                w = pi.pi[x, y]
                if w == 0:
                    continue
                for b in range(game.k):
                    a = int(game.perm[x, y, b])
                    amp = alice.vectors[x, a] @ hbar @ bob.vectors[y, b]
                    recomputed += w * float(np.abs(amp) ** 2)
        residuals["value"] = abs(recomputed - float(stated))
    elif "unitaries" in cert:
        mats = [complex_matrix_from_json(u) for u in cert["unitaries"]]
        if not hasattr(game_any, "group"):
            raise ValidationError("unitary certificates need a group based game")
        recomputed = unitary_value_z3(game_any, pi, mats)
        residuals["value"] = abs(recomputed - float(stated))
    else:
        raise ValidationError("certificate payload not recognized "
                              "(expected strategy, frame, Z, gram or unitaries)")
    ok = residuals["value"] <= max(tol, 1e-12)
    return {"ok": bool(ok), "stated": encode_value(stated),
            "recomputed": encode_value(recomputed), "residuals": residuals}
