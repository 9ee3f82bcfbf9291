"""``gerbes`` command line: JSON request in, JSON report out.

Exit codes: 0 ok, 1 mathematical negative or failure (with witness), 2 input
error, 3 resource cap.  Payloads come from ``--input FILE`` or stdin.
"""

import argparse
import json
import os
import sys
import time

import numpy as np

from . import config
from .circle import CircleValue
from .cochain import (
    Cochain,
    Group,
    classes_equal,
    cohomology_group,
    is_cocycle,
    solve_coboundary,
)
from .crossmod import CrossedModule, finite_fiber_pair, validate_crossed_module
from .duality import double_dual_check, dual_gerbe, make_duality_input, omega_membership
from .errors import (
    GerbeError,
    InputError,
    InternalVerificationFailed,
    NoSolutionAtLevel,
    SizeLimitExceeded,
    WitnessError,
)
from .gerbe import (
    canonical_representation,
    count_representation_classes,
    make_gerbe,
    representation_exists,
)
from .group import (
    CentralExtensionData,
    GroupHom,
    abelian_invariants,
    central_extension,
    quotient_by_central,
)
from .serialize import (
    _int_list,
    _require,
    parse_abelian,
    parse_cochain,
    parse_form,
    parse_group,
    parse_s_cochain,
    remap,
    s_cochain_json,
)
from .spectral import degree_three_bound, e2_page

EXIT_OK, EXIT_NEGATIVE, EXIT_INPUT, EXIT_LIMIT = 0, 1, 2, 3


class Negative(Exception):
    """A well-posed question whose answer is no."""

    def __init__(self, message, result=None, witness=None):
        super().__init__(message)
        self.result = result
        self.witness = witness


def _jsonable(x):
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, CircleValue):
        return str(x)
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if hasattr(x, "to_json"):
        return _jsonable(x.to_json())
    return x


# --------------------------------------------------------------------------
# payload helpers


def _group_field(payload, key="group"):
    obj = payload.get(key, payload) if isinstance(payload, dict) else payload
    return parse_group(obj)


def _gerbe_field(payload):
    obj = _require(payload, "gerbe", dict) if "gerbe" in payload else payload
    G, relabel = parse_group(_require(obj, "group", dict))
    alpha = obj.get("alpha")
    alpha = None if alpha is None else parse_cochain(alpha, Group(G), relabel)
    return make_gerbe(G, alpha), relabel


def _group_summary(G):
    out = {
        "group": G.to_json(),
        "order": G.order,
        "abelian": bool(G.is_abelian()),
        "exponent": G.exponent,
        "center": [int(z) for z in G.center],
        "census": _jsonable(G.census()),
    }
    if G.is_abelian():
        out["invariant_factors"] = list(abelian_invariants(G)[0].factors)
    return out


# --------------------------------------------------------------------------
# commands


def cmd_group(action, payload, opts):
    if action == "inspect":
        G, _ = _group_field(payload)
        return _group_summary(G), None
    if action == "quotient":
        G, relabel = _group_field(payload)
        S_el = remap(_int_list(_require(payload, "central_subgroup"), "central_subgroup"), relabel)
        q = quotient_by_central(G, S_el)
        return {
            "S": q.S.to_json(),
            "s_elements": q.s_elements.tolist(),
            "K": q.K.to_json(),
            "pi": q.pi.image.tolist(),
            "section": np.asarray(q.section).tolist(),
            "F": s_cochain_json(q.S, q.F),
        }, None
    if action == "extension":
        S = parse_abelian(_require(payload, "S"))
        K, relabel = parse_group(_require(payload, "K", dict))
        F = parse_s_cochain(S, K, relabel, payload.get("F", []))
        G, iota, pi, section = central_extension(CentralExtensionData(S, K, F))
        out = _group_summary(G)
        out.update(
            {"iota": iota.image.tolist(), "pi": pi.image.tolist(), "section": np.asarray(section).tolist()}
        )
        return out, None
    raise InputError(f"unknown group action {action!r}")


def cmd_cohomology(action, payload, opts):
    G, _ = _group_field(payload)
    n = _require(payload, "degree", int)
    H = cohomology_group(G, n)
    return {"degree": n, "order": H.order, **H.to_json()}, None


def cmd_cocycle(action, payload, opts):
    if action == "check":
        c = parse_cochain(_require(payload, "cochain", dict))
        check = is_cocycle(c)
        if not check:
            raise Negative("not a cocycle", {"cocycle": False}, {"tuple": check.witness})
        return {"cocycle": True}, None
    if action == "solve":
        c = parse_cochain(_require(payload, "cochain", dict))
        b = solve_coboundary(c, opts.level_multiplier)
        return {"primitive": b.to_json()}, None
    if action == "equal":
        a = parse_cochain(_require(payload, "a", dict))
        b = parse_cochain(_require(payload, "b", dict))
        if a.base != b.base or a.degree != b.degree:
            raise InputError("cochains live on different bases or degrees")
        if not classes_equal(a, b, opts.level_multiplier):
            raise Negative("classes differ", {"equal": False})
        return {"equal": True}, None
    raise InputError(f"unknown cocycle action {action!r}")


def cmd_gerbe(action, payload, opts):
    gerbe, relabel = _gerbe_field(payload)
    if action == "make":
        return {"gerbe": gerbe.to_json()}, None
    mode = opts.mode
    if mode == "canonical":
        rep = canonical_representation(gerbe)
        return {"representation": rep.to_json(), "verified": True}, None
    from .cochain import ActionGroupoid

    npts = _require(payload, "space_size", int)
    act = np.array([_int_list(r, "action row") for r in _require(payload, "action", list)])
    if act.shape != (npts, gerbe.G.order):
        raise InputError("action table has the wrong shape")
    new = np.empty_like(act)
    new[:, relabel] = act
    groupoid = ActionGroupoid(npts, gerbe.G, new)
    if mode == "exists":
        rep = representation_exists(gerbe, groupoid, opts.level_multiplier)
        if rep is None:
            raise Negative("pi* alpha is not exact on the action groupoid", {"exists": False})
        return {"exists": True}, {"representation": rep.to_json()}
    if mode == "count":
        return {"classes": count_representation_classes(gerbe, groupoid)}, None
    raise InputError(f"unknown representation mode {mode!r}")


def _duality_input(payload):
    gerbe, relabel = _gerbe_field(payload)
    S_el = remap(_int_list(_require(payload, "central_subgroup"), "central_subgroup"), relabel)
    return make_duality_input(gerbe, S_el)


def _omega(inp, opts):
    try:
        return omega_membership(inp, opts.level_multiplier)
    except NoSolutionAtLevel as exc:
        raise Negative(
            "gerbe is not in Omega(G, S)",
            {"in_omega": False},
            {"stage": exc.stage, "level": exc.level, "message": str(exc)},
        ) from None


def cmd_dual(action, payload, opts):
    inp = _duality_input(payload)
    witness = _omega(inp, opts)
    dual = dual_gerbe(inp, witness, opts.level_multiplier)
    G_hat = dual.G_hat
    classes = {
        "alpha_trivial": classes_equal(inp.gerbe.alpha, Cochain.zero(Group(inp.G), 3)),
        "alpha_hat_trivial": classes_equal(dual.alpha_hat, Cochain.zero(Group(G_hat), 3)),
        "F_trivial": bool(not inp.quotient.F.any()) or _f_trivial(inp),
        "F_hat_trivial": dual.F_hat.is_zero() or _abelian_trivial(dual.F_hat),
    }
    result = dual.to_json()
    result["s_hat_elements"] = dual.s_hat_elements().tolist()
    result["dual_invariant_factors"] = (
        list(abelian_invariants(G_hat)[0].factors) if G_hat.is_abelian() else None
    )
    result["classes"] = classes
    wit = {"beta": witness.beta.to_json(), "eta_level": dual.eta_level}
    return result, wit


def _abelian_trivial(c):
    from .cochain import solve_abelian_coboundary

    return solve_abelian_coboundary(c) is not None


def _f_trivial(inp):
    from .cochain import AbelianCochain

    q = inp.quotient
    return _abelian_trivial(AbelianCochain(Group(q.K), 2, q.S, q.F))


def cmd_doubledual(action, payload, opts):
    inp = _duality_input(payload)
    witness = _omega(inp, opts)
    report = double_dual_check(inp, witness, opts.level_multiplier)
    return report.to_json(), {"transported": report.transported.to_json()}


def cmd_crossmod(action, payload, opts):
    if action == "pair":
        G, relabel = _group_field(payload)
        S_el = remap(_int_list(_require(payload, "central_subgroup"), "central_subgroup"), relabel)
        q = quotient_by_central(G, S_el)
        b = parse_form(q.S, _require(payload, "form"))
        pair = finite_fiber_pair(G, S_el, b, payload.get("level"), bool(payload.get("literal", False)))
        checks = [validate_crossed_module(pair.X1), validate_crossed_module(pair.X2)]
        result = pair.to_json()
        result["valid"] = [bool(c) for c in checks]
        result["pi0_X1_is_G"] = bool(pair.pi0_iso_G.is_homomorphism() and pair.pi0_iso_G.is_bijective())
        result["pi0_X2_is_SxK"] = bool(
            pair.pi0_iso_SK.is_homomorphism() and pair.pi0_iso_SK.is_bijective()
        )
        bad = [
            {"module": name, "reason": c.reason, "witness": c.witness}
            for name, c in zip(("X1", "X2"), checks)
            if not c
        ]
        if bad:
            raise Negative("crossed module axioms fail", result, bad)
        return result, None
    if action == "validate":
        N, rN = parse_group(_require(payload, "N", dict))
        E, rE = parse_group(_require(payload, "E", dict))
        phi_in = _int_list(_require(payload, "phi"), "phi")
        if len(phi_in) != N.order:
            raise InputError("phi has the wrong length")
        phi = np.empty(N.order, dtype=np.int64)
        phi[rN] = remap(phi_in, rE)
        rows = np.array([_int_list(r, "action row") for r in _require(payload, "action", list)])
        if rows.shape != (N.order, E.order):
            raise InputError("action table has the wrong shape")
        act = np.empty_like(rows)
        act[np.ix_(rN, rE)] = remap(rows, rN)
        X = CrossedModule(N, E, GroupHom(N, E, phi), act)
        check = validate_crossed_module(X)
        if not check:
            raise Negative("crossed module axioms fail", {"valid": False}, {"reason": check.reason, "witness": check.witness})
        return {"valid": True, "crossed_module": X.to_json()}, None
    raise InputError(f"unknown crossmod action {action!r}")


def cmd_spectral(action, payload, opts):
    K, _ = parse_group(_require(payload, "K", dict))
    S = parse_abelian(_require(payload, "S"))
    p_max = payload.get("p_max", 3)
    q_max = payload.get("q_max", 2)
    if not (isinstance(p_max, int) and isinstance(q_max, int)) or p_max < 0 or not 0 <= q_max <= 3:
        raise InputError("need p_max >= 0 and 0 <= q_max <= 3")
    page = e2_page(K, S, p_max, q_max)
    bound, _ = degree_three_bound(K, S)
    return {
        "K": K.to_json(),
        "S": S.to_json(),
        "e2": [page[key].to_json() for key in sorted(page, key=lambda t: (t[1], t[0]))],
        "degree_three_bound": bound,
    }, None


COMMANDS = {
    "group": (cmd_group, ["inspect", "quotient", "extension"]),
    "cohomology": (cmd_cohomology, None),
    "cocycle": (cmd_cocycle, ["check", "solve", "equal"]),
    "gerbe": (cmd_gerbe, ["make", "rep"]),
    "dual": (cmd_dual, None),
    "doubledual": (cmd_doubledual, None),
    "crossmod": (cmd_crossmod, ["pair", "validate"]),
    "spectral": (cmd_spectral, ["e2"]),
}


def _env_flag(name):
    return os.environ.get(config.ENV_PREFIX + name, "").lower() in ("1", "true", "yes")


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", "-i", help="JSON payload file (default: stdin)")
    common.add_argument("--level-multiplier", type=int, default=None)
    common.add_argument("--max-order", type=int, default=None)
    common.add_argument("--max-matrix-dim", type=int, default=None)
    common.add_argument("--emit-witness", action="store_true", default=None)
    parser = argparse.ArgumentParser(
        prog="gerbes", description="Multiplicative gerbes over finite groups."
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, actions) in COMMANDS.items():
        p = sub.add_parser(name, parents=[common])
        if actions is not None:
            p.add_argument("action", choices=actions)
        if name == "gerbe":
            p.add_argument("mode", nargs="?", choices=["exists", "count", "canonical"])
    return parser


def _read_payload(path, stdin):
    text = stdin.read() if path in (None, "-") else open(path, encoding="utf-8").read()
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON: {exc}") from None
    if not isinstance(payload, dict):
        raise InputError("payload must be a JSON object")
    return payload


def run(argv=None, stdin=None):
    """Execute one request; returns ``(exit_code, report_dict)``."""
    stdin = sys.stdin if stdin is None else stdin
    parser = build_parser()
    try:
        opts = parser.parse_args(argv)
    except SystemExit as exc:
        code = EXIT_OK if exc.code == 0 else EXIT_INPUT
        return code, None
    name = opts.command + (f" {opts.action}" if getattr(opts, "action", None) else "")
    if opts.command == "gerbe" and opts.action == "rep":
        if opts.mode is None:
            opts.mode = "exists"
        name += f" {opts.mode}"
    emit = opts.emit_witness if opts.emit_witness is not None else _env_flag("EMIT_WITNESS")
    changes = {
        k: v
        for k, v in (
            ("max_order", opts.max_order),
            ("max_matrix_dim", opts.max_matrix_dim),
            ("level_multiplier", opts.level_multiplier),
        )
        if v is not None
    }
    report = {"command": name, "status": "ok", "result": None, "witness": None, "diagnostics": None}
    start = time.perf_counter()
    code = EXIT_OK
    try:
        if any(v is not None and v < 1 for v in changes.values()):
            raise InputError("numeric options must be positive")
        with config.settings(**changes):
            payload = _read_payload(opts.input, stdin)
            func = COMMANDS[opts.command][0]
            result, witness = func(getattr(opts, "action", None), payload, opts)
        report["result"] = _jsonable(result)
        if emit and witness is not None:
            report["witness"] = _jsonable(witness)
    except Negative as exc:
        code = EXIT_NEGATIVE
        report.update(status="negative", result=_jsonable(exc.result), witness=_jsonable(exc.witness))
        report["diagnostics"] = str(exc)
    except (WitnessError, NoSolutionAtLevel, InternalVerificationFailed) as exc:
        code = EXIT_NEGATIVE
        report["status"] = "failure"
        report["diagnostics"] = f"{type(exc).__name__}: {exc}"
        wit = {"error": type(exc).__name__}
        for attr in ("witness", "level", "stage"):
            if getattr(exc, attr, None) is not None:
                wit[attr] = _jsonable(getattr(exc, attr))
        report["witness"] = wit
    except SizeLimitExceeded as exc:
        code = EXIT_LIMIT
        report["status"] = "resource_limit"
        report["diagnostics"] = str(exc)
    except (InputError, GerbeError, KeyError, TypeError, ValueError, OSError) as exc:
        code = EXIT_INPUT
        report["status"] = "input_error"
        report["diagnostics"] = f"{type(exc).__name__}: {exc}"
    report["timing_s"] = round(time.perf_counter() - start, 6)
    return code, report


def main(argv=None):
    code, report = run(argv)
    if report is not None:
        sys.stdout.write(json.dumps(report, sort_keys=True) + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
