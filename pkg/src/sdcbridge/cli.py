"""Command-line entry point.

Every subcommand runs one pipeline and emits a JSON report
``{command, version, config, results, witnesses, timestamp}`` to stdout or
``--out``. Exit codes: 0 success, 1 the audited property does not hold
(witnesses in the report), 2 usage or I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import __version__
from .closeness import check_t_closeness, cluster_deniability, t_from_epsilon
from .domain import Attribute, Distribution, empirical_distribution
from .dp_audit import check_epsilon_rr, deniability_at_epsilon, min_epsilon_rr
from .exceptions import DisclosureControlError
from .io import (
    dumps_report,
    load_matrix,
    load_table,
    make_report,
    parse_labels,
    save_matrix,
    save_table,
)
from .permutation import (
    DEFAULT_ALPHA_LOSS,
    DEFAULT_ALPHA_RISK,
    check_dvf_privacy,
    decompose,
    pram_apply,
    risk_and_loss,
)
from .randomized_response import (
    deniability_entropy,
    design_uniform_stay,
    estimate_true_proportions,
    posterior,
    project_to_simplex,
    randomize,
    secrecy_report,
)

EXIT_OK, EXIT_VIOLATED, EXIT_ERROR = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    seed: int = 0
    epsilon: float | None = None
    t: float | None = None
    alphas: tuple[float, float] | None = None
    d: list[int] | None = None
    v: list[float] | None = None
    criterion: str = "variance"
    order: dict[str, list[str]] = field(default_factory=dict)
    threshold: float = 0.5
    table: str | None = None
    matrix: str | None = None
    original: str | None = None
    anonymized: str | None = None
    sensitive: str | None = None
    prior: dict[str, float] | None = None
    value: str | None = None
    categories: list[str] | None = None
    p_stay: float | None = None
    project: bool = False
    out: str | None = None
    table_out: str | None = None
    matrix_out: str | None = None

    def validate(self):
        if self.epsilon is not None and self.t is not None:
            raise UsageError("give at most one of --epsilon and --t")
        if self.alphas is not None:
            a_risk, a_loss = self.alphas
            if not a_risk < 1.0 < a_loss:
                raise UsageError(f"--alphas needs alpha_risk < 1 < alpha_loss, got {self.alphas}")


# ---------------------------------------------------------------------------
# flag parsing helpers


def _floats(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _ints(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def _alphas(text: str) -> tuple[float, float]:
    vals = _floats(text)
    if len(vals) != 2:
        raise argparse.ArgumentTypeError("expected two comma-separated values A,B")
    return vals[0], vals[1]


def _order(text: str) -> tuple[str, list[str]]:
    if "=" not in text:
        raise argparse.ArgumentTypeError("expected COL=a,b,c")
    col, labels = text.split("=", 1)
    return col, parse_labels(labels)


def _prior(text: str) -> dict[str, float]:
    out = {}
    for part in parse_labels(text):
        if "=" not in part:
            raise argparse.ArgumentTypeError("expected label=prob pairs, e.g. yes=0.3,no=0.7")
        k, v = part.rsplit("=", 1)
        out[k] = float(v)
    return out


def _labels(text: str) -> list[str]:
    return parse_labels(text)


# ---------------------------------------------------------------------------
# subcommand implementations; each returns (results, witnesses, violated)


def _schema(cfg: RunConfig, categorical=()):
    schema = {k: list(v) for k, v in cfg.order.items()}
    for c in categorical:
        schema.setdefault(c, "categorical")
    return schema


def _require(cfg: RunConfig, *names):
    missing = [n for n in names if getattr(cfg, n) is None]
    if missing:
        raise UsageError("missing required option(s): " + ", ".join("--" + m.replace("_", "-")
                                                                    for m in missing))


def _prior_dist(cfg: RunConfig, P) -> Distribution:
    if cfg.prior is None:
        return Distribution.uniform(P.domain)
    return Distribution.from_mapping(cfg.prior, P.domain)


def cmd_rr_design(cfg: RunConfig):
    _require(cfg, "categories", "p_stay")
    P = design_uniform_stay(cfg.categories, cfg.p_stay)
    if cfg.matrix_out:
        save_matrix(P, cfg.matrix_out)
    audit = min_epsilon_rr(P)
    return {"labels": list(P.domain.labels), "matrix": P.entries,
            "min_epsilon": audit.min_epsilon}, [], False


def _apply(cfg: RunConfig, via_pram: bool):
    _require(cfg, "table", "sensitive", "matrix")
    P = load_matrix(cfg.matrix)
    schema = _schema(cfg)
    schema.setdefault(cfg.sensitive, Attribute.categorical(cfg.sensitive, P.domain.labels))
    table = load_table(cfg.table, schema)
    if via_pram:
        out = pram_apply(table, cfg.sensitive, P, cfg.seed)
    else:
        reported = randomize(table.column(cfg.sensitive), P, cfg.seed)
        out = table.with_column(cfg.sensitive, reported,
                                Attribute(cfg.sensitive, P.domain, table.attribute(cfg.sensitive).ordered))
    if cfg.table_out:
        save_table(out, cfg.table_out)
    dom = P.domain
    before = empirical_distribution(table.column(cfg.sensitive), dom) if table.n else None
    after = empirical_distribution(out.column(cfg.sensitive), dom) if out.n else None
    changed = int(sum(a != b for a, b in zip(table.column(cfg.sensitive), out.column(cfg.sensitive))))
    return {
        "n": table.n,
        "changed": changed,
        "original_distribution": before.as_dict() if before else None,
        "randomized_distribution": after.as_dict() if after else None,
        "values": list(out.column(cfg.sensitive)),
    }, [], False


def cmd_rr_apply(cfg):
    return _apply(cfg, via_pram=False)


def cmd_pram_apply(cfg):
    return _apply(cfg, via_pram=True)


def cmd_estimate(cfg: RunConfig):
    _require(cfg, "table", "sensitive", "matrix")
    P = load_matrix(cfg.matrix)
    schema = _schema(cfg)
    schema.setdefault(cfg.sensitive, Attribute.categorical(cfg.sensitive, P.domain.labels))
    table = load_table(cfg.table, schema)
    lam = empirical_distribution(table.column(cfg.sensitive), P.domain)
    raw = estimate_true_proportions(lam, P)
    res = {"reported_distribution": lam.as_dict(), "raw_estimate": raw.as_dict(),
           "sums_to_one": raw.sums_to_one,
           "has_negative": bool((raw.weights < 0).any())}
    if cfg.project:
        res["projected"] = project_to_simplex(raw).as_dict()
    return res, [], False


def cmd_posterior(cfg: RunConfig):
    _require(cfg, "matrix", "value")
    P = load_matrix(cfg.matrix)
    prior = _prior_dist(cfg, P)
    post = posterior(P, prior, cfg.value)
    return {"value": cfg.value, "prior": prior.as_dict(), "posterior": post.as_dict(),
            "entropy": deniability_entropy(post),
            "max_posterior": float(post.weights.max())}, [], False


def cmd_secrecy(cfg: RunConfig):
    _require(cfg, "matrix")
    P = load_matrix(cfg.matrix)
    rep = secrecy_report(P, _prior_dist(cfg, P))
    return rep.to_dict(), [], False


def cmd_audit_dp(cfg: RunConfig):
    _require(cfg, "matrix")
    P = load_matrix(cfg.matrix)
    res = check_epsilon_rr(P, cfg.epsilon) if cfg.epsilon is not None else min_epsilon_rr(P)
    results = res.to_dict()
    if cfg.prior is not None:
        results["deniability"] = [row.to_dict() for row in
                                  deniability_at_epsilon(P, _prior_dist(cfg, P), cfg.threshold)]
    violated = res.satisfies is False
    witnesses = []
    if violated:
        witnesses.append({"column": res.worst_column, "pair": list(res.worst_pair),
                          "ratio": res.worst_ratio, "min_epsilon": res.min_epsilon})
    return results, witnesses, violated


def cmd_audit_closeness(cfg: RunConfig):
    _require(cfg, "table", "sensitive")
    if cfg.t is None and cfg.epsilon is None:
        raise UsageError("audit-closeness needs --t or --epsilon")
    t = cfg.t if cfg.t is not None else t_from_epsilon(cfg.epsilon)
    table = load_table(cfg.table, _schema(cfg, categorical=[cfg.sensitive]))
    rep = check_t_closeness(table, cfg.sensitive, t)
    den = cluster_deniability(table, cfg.sensitive, cfg.threshold)
    results = rep.to_dict()
    results["deniability"] = [c.to_dict() for c in den]
    witnesses = [c.to_dict() for c in rep.per_cluster if c.violates]
    return results, witnesses, not rep.satisfied


def _pair(cfg: RunConfig):
    _require(cfg, "original", "anonymized")
    schema = _schema(cfg)
    X = load_table(cfg.original, schema)
    Y = load_table(cfg.anonymized, schema)
    return X, Y


def cmd_revmap(cfg: RunConfig):
    X, Y = _pair(cfg)
    Z, _ = decompose(X, Y, record_map=X.record_map if X.record_map is not None else range(X.n))
    if cfg.table_out:
        save_table(Z, cfg.table_out)
    return {"n": Z.n, "columns": {k: Z.column(k) for k in Z.names}}, [], False


def cmd_decompose(cfg: RunConfig):
    X, Y = _pair(cfg)
    Z, profile = decompose(X, Y)
    if cfg.table_out:
        save_table(Z, cfg.table_out)
    return {"n": Z.n, "permuted": {k: Z.column(k) for k in Z.names},
            "profile": profile.to_dict()}, [], False


def cmd_check_dvf(cfg: RunConfig):
    X, Y = _pair(cfg)
    verdict = check_dvf_privacy(X, Y, None, cfg.d, cfg.v, cfg.criterion, cfg.t)
    results = verdict.to_dict()
    witnesses = [{"record": i, "checks": results["per_record"][i]} for i in verdict.failing_records]
    return results, witnesses, not verdict.satisfied


def cmd_risk_loss(cfg: RunConfig):
    X, Y = _pair(cfg)
    if cfg.alphas is None:
        cfg.alphas = (DEFAULT_ALPHA_RISK, DEFAULT_ALPHA_LOSS)
    _, profile = decompose(X, Y)
    scores = risk_and_loss(profile, *cfg.alphas)
    return {"alphas": list(cfg.alphas),
            "attributes": {k: s.to_dict() for k, s in scores.items()}}, [], False


COMMANDS = {
    "rr-design": (cmd_rr_design, "build a keep-with-probability-p randomized response matrix"),
    "rr-apply": (cmd_rr_apply, "randomize a column respondent-side"),
    "pram-apply": (cmd_pram_apply, "post-randomize a column controller-side"),
    "estimate": (cmd_estimate, "estimate true proportions from randomized reports"),
    "posterior": (cmd_posterior, "posterior of the true value given one report"),
    "secrecy": (cmd_secrecy, "entropy-based secrecy report of a channel"),
    "audit-dp": (cmd_audit_dp, "minimal epsilon of a channel / check against --epsilon"),
    "audit-closeness": (cmd_audit_closeness, "t-closeness of clustered data (max-ratio distance)"),
    "revmap": (cmd_revmap, "reverse-map anonymized attributes onto the originals"),
    "decompose": (cmd_decompose, "permutation + residual noise decomposition"),
    "check-dvf": (cmd_check_dvf, "(d, v, f)-permuted privacy verification"),
    "risk-loss": (cmd_risk_loss, "power-mean disclosure risk and information loss"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sdcbridge", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    S = argparse.SUPPRESS
    for name, (_, help_) in COMMANDS.items():
        p = sub.add_parser(name, help=help_, argument_default=S)
        p.add_argument("--config", help="JSON file with the same keys as the flags")
        p.add_argument("--seed", type=int)
        p.add_argument("--out", help="write the JSON report here instead of stdout")
        p.add_argument("--table")
        p.add_argument("--matrix")
        p.add_argument("--original")
        p.add_argument("--anonymized")
        p.add_argument("--sensitive")
        p.add_argument("--epsilon", type=float)
        p.add_argument("--t", type=float)
        p.add_argument("--alphas", type=_alphas, metavar="A,B")
        p.add_argument("--d", type=_ints, metavar="D1,D2,...")
        p.add_argument("--v", type=_floats, metavar="V1,V2,...")
        p.add_argument("--criterion", choices=["variance", "distinct-count", "t-closeness"])
        p.add_argument("--order", type=_order, action="append", metavar="COL=a,b,c")
        p.add_argument("--prior", type=_prior, metavar="a=0.3,b=0.7")
        p.add_argument("--value")
        p.add_argument("--categories", type=_labels, metavar="a,b,c")
        p.add_argument("--p-stay", dest="p_stay", type=float)
        p.add_argument("--threshold", type=float,
                       help="max posterior / cluster probability above which a row is flagged")
        p.add_argument("--project", action="store_true")
        p.add_argument("--table-out", dest="table_out")
        p.add_argument("--matrix-out", dest="matrix_out")
    return parser


def resolve_config(ns: argparse.Namespace) -> RunConfig:
    values = {}
    if getattr(ns, "config", None):
        with open(ns.config, encoding="utf-8") as fh:
            values.update(json.load(fh))
    flags = {k: v for k, v in vars(ns).items() if k not in ("command", "config")}
    if "order" in flags:
        flags["order"] = dict(flags["order"])
    values.update(flags)
    known = set(RunConfig.__dataclass_fields__)
    unknown = set(values) - known
    if unknown:
        raise UsageError(f"unknown configuration keys: {sorted(unknown)}")
    if values.get("alphas") is not None:
        values["alphas"] = tuple(float(a) for a in values["alphas"])
    cfg = RunConfig(**values)
    cfg.validate()
    return cfg


def run(argv=None) -> int:
    """Parse ``argv``, run one subcommand, write its report; return the exit code."""
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_ERROR
    func = COMMANDS[ns.command][0]
    try:
        cfg = resolve_config(ns)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            results, witnesses, violated = func(cfg)
        notes = sorted({str(w.message) for w in caught})
        if notes and isinstance(results, dict):
            results["warnings"] = notes
        report = make_report(ns.command, __version__, asdict(cfg), results, witnesses)
        text = dumps_report(report)
        if cfg.out:
            Path(cfg.out).write_text(text, encoding="utf-8")
        else:
            sys.stdout.write(text)
    except (UsageError, DisclosureControlError, OSError, ValueError) as exc:
        print(f"sdcbridge {ns.command}: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    return EXIT_VIOLATED if violated else EXIT_OK


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
