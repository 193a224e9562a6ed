"""Experiment commands behind the command-line interface.

A command takes a validated configuration document (a dict loaded from
JSON) and an output directory, and writes CSV tables, JSON records and,
unless disabled, PNG figures. All randomness derives from the
configuration's ``seed``.
"""

import copy
import hashlib
import json
import logging
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path

import numpy as np

from . import approx, dataset, exact, fvm, nn, problems
from .errors import ConfigError, DimensionMismatchError, FormatError, SimulationFailure
from .flux import FluxChoice
from .physics import PdeKind, PdeSystem
from .surrogate import LfSolver, SurrogateKind, SurrogateModel, load_model, save_model

log = logging.getLogger(__name__)

COMPONENTS = {
    PdeKind.BURGERS_1D: ("u",),
    PdeKind.BURGERS_ND: ("u",),
    PdeKind.SWE_1D: ("h", "hu"),
    PdeKind.SWE_2D: ("h", "hu", "hv"),
}
FLUX_COMPONENTS = {PdeKind.BURGERS_1D: ("f",), PdeKind.SWE_1D: ("f_h", "f_hu")}
MODEL_NAMES = ("vnn", "bfnn")
RESTART_SEED_STRIDE = 1000
# config keys that change what is rendered but not any computed number
OUTPUT_ONLY_KEYS = ("figures",)


# -- configuration ---------------------------------------------------------


def preset_names():
    return sorted(p.stem for p in resources.files("nnflux.presets").iterdir() if p.name.endswith(".json"))


def load_config(ref):
    """Read a config from a path, or from a shipped preset name."""
    path = Path(ref)
    if not path.exists():
        res = resources.files("nnflux.presets").joinpath(f"{ref}.json")
        if not res.is_file():
            raise ConfigError(f"no config file or preset named {ref!r}")
        text = res.read_text()
    else:
        text = path.read_text()
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"config is not valid JSON: {exc.msg}", line=exc.lineno) from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    return cfg


def with_seed(cfg, seed):
    cfg = copy.deepcopy(cfg)
    if seed is not None:
        cfg["seed"] = int(seed)
    return cfg


def config_hash(cfg):
    """Short sha256 of the canonical JSON, ignoring output-only switches."""
    cfg = {k: v for k, v in cfg.items() if k not in OUTPUT_ONLY_KEYS}
    canon = json.dumps(cfg, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()[:16]


def _get(cfg, path, kind=None, default=KeyError):
    node = cfg
    for key in path.split("."):
        if not isinstance(node, dict) or key not in node:
            if default is KeyError:
                raise ConfigError(f"{path}: required field is missing")
            return default
        node = node[key]
    if kind is not None:
        ok = isinstance(node, kind) and not (kind in (int, (int, float)) and isinstance(node, bool))
        if not ok:
            raise ConfigError(f"{path}: expected {getattr(kind, '__name__', 'number')}, got {node!r}")
    return node


def _enum(cfg, path, enum, default=KeyError):
    value = _get(cfg, path, str, default)
    if value is None or isinstance(value, enum):
        return value
    try:
        return enum(value)
    except ValueError:
        allowed = ", ".join(e.value for e in enum)
        raise ConfigError(f"{path}: {value!r} is not one of {allowed}") from None


def seed_of(cfg):
    return _get(cfg, "seed", int)


def pde_of(cfg):
    kind = _enum(cfg, "pde.kind", PdeKind)
    g = float(_get(cfg, "pde.gravity", (int, float), 1.0))
    nu = float(_get(cfg, "pde.viscosity", (int, float), 0.0))
    if kind is PdeKind.BURGERS_1D:
        return PdeSystem.burgers1d(viscosity=nu)
    if kind is PdeKind.BURGERS_ND:
        beta = tuple(_get(cfg, "pde.beta", list, [1.0, 1.0]))
        return PdeSystem.burgers2d(beta=beta, viscosity=nu)
    if kind is PdeKind.SWE_1D:
        return PdeSystem.swe1d(g)
    return PdeSystem.swe2d(g)


def schedule_of(doc, path):
    kind = _get(doc, "kind", str, "step")
    if kind == "step":
        return nn.StepDecay(float(doc.get("factor", 0.5)), int(doc.get("every", 300)))
    if kind == "constant":
        return nn.Constant()
    if kind == "cosine":
        return nn.Cosine(int(doc["epochs"]), float(doc.get("floor", 1e-4)))
    raise ConfigError(f"{path}.kind: unknown schedule {kind!r}")


def train_config_of(cfg, name):
    base = f"models.{name}.training"
    doc = _get(cfg, base, dict)
    seed = seed_of(cfg) + int(_get(doc, "seed_offset", int, 0))
    try:
        return nn.TrainConfig(
            epochs=_get(doc, "epochs", int),
            batch_size=_get(doc, "batch_size", int),
            initial_lr=float(_get(doc, "initial_lr", (int, float))),
            schedule=schedule_of(doc.get("schedule", {}), f"{base}.schedule"),
            loss_norm=_get(doc, "loss_norm", str, "l1"),
            seed=seed,
        )
    except ConfigError as exc:
        raise ConfigError(f"{base}.{exc}") from None
    except ValueError as exc:
        raise ConfigError(f"{base}: {exc}") from None


def network_spec_of(cfg, name, m):
    base = f"models.{name}"
    kind = _enum(cfg, f"{base}.kind", SurrogateKind)
    layers = _get(cfg, f"{base}.hidden_layers", list)
    act = _enum(cfg, f"{base}.activation", nn.Activation, nn.Activation.TANH)
    n_in = 2 * m if kind is SurrogateKind.VANILLA else 3 * m
    try:
        return kind, nn.NetworkSpec(n_in, m, tuple(layers), act)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{base}.hidden_layers: {exc}") from None


def sampling_of(cfg, pde):
    tag = pde.one_d().kind
    default = dataset.SamplingSpec.burgers(1, 0) if pde.is_burgers else dataset.SamplingSpec.swe(1, 0)
    u_range = tuple(_get(cfg, "sampling.u_range", list, list(default.u_range)))
    h_range = tuple(_get(cfg, "sampling.h_range", list, list(default.h_range)))
    seed = seed_of(cfg)
    n_train = _get(cfg, "sampling.train_count", int)
    n_test = _get(cfg, "sampling.test_count", int)
    try:
        return (
            dataset.SamplingSpec(tag, n_train, seed, u_range, h_range),
            dataset.SamplingSpec(tag, n_test, seed + 1, u_range, h_range),
        )
    except ValueError as exc:
        raise ConfigError(f"sampling: {exc}") from None


def _out(out):
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_json(path, doc):
    Path(path).write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n")


def _write_table(path, header, rows, chash, meta=""):
    lines = [f"# config_hash={chash}{' ' + meta if meta else ''}", ",".join(header)]
    for row in rows:
        lines.append(",".join(v if isinstance(v, str) else repr(float(v)) for v in row))
    Path(path).write_text("\n".join(lines) + "\n")


def read_table(path):
    """Read a harness CSV into ``(header, float array, meta)``."""
    meta, header, rows = {}, None, []
    for i, line in enumerate(Path(path).read_text().splitlines(), 1):
        if line.startswith("#"):
            for tok in line[1:].split():
                if "=" in tok:
                    k, v = tok.split("=", 1)
                    meta[k] = v
            continue
        if not line.strip():
            continue
        if header is None:
            header = line.split(",")
            continue
        parts = line.split(",")
        if len(parts) != len(header):
            raise FormatError(f"expected {len(header)} fields", line=i)
        try:
            rows.append([float(p) for p in parts])
        except ValueError as exc:
            raise FormatError(str(exc), line=i) from exc
    if header is None:
        raise FormatError("table has no header", line=1)
    return header, np.array(rows).reshape(-1, len(header)), meta


def _figures_on(cfg):
    return bool(cfg.get("figures", True))


# -- gen-data --------------------------------------------------------------


def cmd_gen_data(cfg, out):
    out = _out(out)
    pde = pde_of(cfg).one_d()
    train_spec, test_spec = sampling_of(cfg, pde)
    lf = _enum(cfg, "lf_solver", LfSolver, "roe")
    chash = config_hash(cfg)
    files = {}
    for name, spec in (("train", train_spec), ("test", test_spec)):
        Up, Um = dataset.sample_states(spec)
        ds = dataset.build_dataset(Up, Um, pde, with_lf=lf.value if lf else None)
        path = out / f"{name}.csv"
        dataset.write_dataset(path, ds, comments=[f"config_hash={chash}", f"seed={spec.seed}"])
        files[name] = {"path": path.name, "rows": len(ds), "seed": spec.seed}
    manifest = {"config_hash": chash, "pde": pde.kind.value, "lf_solver": lf.value, "files": files}
    _write_json(out / "manifest.json", manifest)
    return manifest


# -- train -----------------------------------------------------------------


def _data_path(cfg, out, name):
    ref = _get(cfg, f"data.{name}", str, None)
    path = Path(ref) if ref else Path(out) / f"{name}.csv"
    if not path.exists():
        raise ConfigError(f"data.{name}: dataset {str(path)!r} not found (run gen-data first)")
    return path


def train_model(cfg, name, ds, pde, progress=None, metadata=None):
    """Train the surrogate ``models.<name>`` of ``cfg`` on a dataset.

    With ``training.restarts = k > 1`` the network is trained from ``k``
    seeds and the run with the lowest final training loss is kept; held-out
    data never enters the selection.
    """
    kind, spec = network_spec_of(cfg, name, pde.m)
    tcfg = train_config_of(cfg, name)
    lf = None
    if kind is SurrogateKind.BIFIDELITY:
        lf = _enum(cfg, f"models.{name}.lf_solver", LfSolver, "roe")
        if ds.lf is not None and ds.lf_solver == lf.value:
            base = ds.lf
        else:
            base = dataset.lf_function(lf.value)(pde, ds.u_plus, ds.u_minus)
        X = np.hstack([ds.u_plus, ds.u_minus, base])
    else:
        base = None
        X = np.hstack([ds.u_plus, ds.u_minus])
    restarts = int(_get(cfg, f"models.{name}.training.restarts", int, 1))
    if restarts < 1:
        raise ConfigError(f"models.{name}.training.restarts: must be >= 1")
    best = None
    for r in range(restarts):
        run_cfg = replace(tcfg, seed=tcfg.seed + RESTART_SEED_STRIDE * r)
        params, hist = nn.train(X, ds.target, spec, run_cfg, base=base, progress=progress)
        log.info("%s restart %d: final training loss %.3e", name, r, hist.loss[-1])
        if best is None or hist.loss[-1] < best[1].loss[-1]:
            best = (params, hist, run_cfg.seed)
    params, hist, seed = best
    meta = dict(metadata or {})
    if restarts > 1:
        meta.update(restarts=restarts, selected_seed=seed)
    model = SurrogateModel(kind, pde.kind, params, lf_solver=lf, gravity=pde.gravity, metadata=meta)
    return model, hist


def cmd_train(cfg, out, which=None):
    out = _out(out)
    pde = pde_of(cfg).one_d()
    ds = dataset.read_dataset(_data_path(cfg, out, "train"))
    if ds.pde_tag is not pde.kind:
        raise DimensionMismatchError(f"dataset is for {ds.pde_tag.value}, config for {pde.kind.value}")
    names = [n for n in MODEL_NAMES if n in cfg.get("models", {})] if which is None else [which]
    if not names:
        raise ConfigError("models: no model sections to train")
    chash = config_hash(cfg)
    summary = {}
    histories = {}
    for name in names:
        log.info("training %s", name)
        model, hist = train_model(cfg, name, ds, pde, metadata={"config_hash": chash, "name": name})
        save_model(model, out / f"{name}.model.json")
        rows = [(e + 1, l, r) for e, (l, r) in enumerate(zip(hist.loss, hist.lr))]
        _write_table(out / f"{name}_history.csv", ["epoch", "loss", "lr"], rows, chash)
        summary[name] = {"final_loss": hist.loss[-1], "epochs": len(hist.loss)}
        histories[name] = hist.loss
    if _figures_on(cfg):
        from . import figures

        figures.loss_history(out / "loss_history.png", histories)
    _write_json(out / "train_summary.json", {"config_hash": chash, "models": summary})
    return summary


# -- eval-apriori ----------------------------------------------------------


def _model_path(cfg, out, name):
    ref = _get(cfg, f"model_paths.{name}", str, None)
    return Path(ref) if ref else Path(out) / f"{name}.model.json"


def load_models(cfg, out, pde):
    models = {}
    for name in MODEL_NAMES:
        path = _model_path(cfg, out, name)
        if path.exists():
            model = load_model(path)
            if model.pde_tag is not pde.kind:
                raise DimensionMismatchError(f"{path}: model is for {model.pde_tag.value}")
            models[name] = model
    return models


def baseline_fluxes(pde):
    fns = {
        "godunov": exact.godunov_flux,
        "roe": approx.roe_flux,
        "roe_harten": approx.roe_flux_fixed,
        "hll": approx.hll_flux,
    }
    return {k: (lambda Up, Um, f=f: f(pde, Up, Um)) for k, f in fns.items()}


def stress_set(cfg, pde):
    count = int(_get(cfg, "stress.count", int, 10000))
    seed = seed_of(cfg) + 2
    if pde.is_burgers:
        return "rarefaction", dataset.rarefaction_scenario_burgers(count, seed)
    return "scenario_one", dataset.scenario_one_swe(count, seed)


@dataclass
class EvalReport:
    """Relative l1 error per flux, and per-sample absolute errors on the stress set."""

    relative_l1: dict
    relative_l1_components: dict
    stress_name: str
    stress_errors: dict = field(repr=False)
    test_size: int = 0

    def stress_percentile(self, name, q, component=None):
        e = self.stress_errors[name]
        e = e if component is None else e[:, component]
        return float(np.percentile(e, q))

    def fraction_below(self, name, other, component):
        return float(np.mean(self.stress_errors[name][:, component] < self.stress_errors[other][:, component]))


def evaluate(pde, test, models, stress_pairs, stress_name="stress"):
    """A priori errors of baselines and surrogates against the Godunov targets."""
    fluxes = baseline_fluxes(pde)
    fluxes.update(models)
    rel, rel_c, preds = {}, {}, {}
    for name, fn in fluxes.items():
        p = fn(test.u_plus, test.u_minus)
        preds[name] = p
        rel[name] = nn.relative_loss(test.target, p)
        rel_c[name] = [nn.relative_loss(test.target[:, k], p[:, k]) for k in range(pde.m)]
    Up, Um = stress_pairs
    ref = exact.godunov_flux(pde, Up, Um)
    errs = {name: np.abs(fn(Up, Um) - ref) for name, fn in fluxes.items() if name != "godunov"}
    report = EvalReport(rel, rel_c, stress_name, errs, len(test))
    return report, preds


def cmd_eval_apriori(cfg, out):
    out = _out(out)
    pde = pde_of(cfg).one_d()
    test = dataset.read_dataset(_data_path(cfg, out, "test"))
    if test.pde_tag is not pde.kind:
        raise DimensionMismatchError(f"test set is for {test.pde_tag.value}, config for {pde.kind.value}")
    models = load_models(cfg, out, pde)
    stress_name, pairs = stress_set(cfg, pde)
    report, preds = evaluate(pde, test, models, pairs, stress_name)
    chash = config_hash(cfg)
    comps = FLUX_COMPONENTS[pde.kind]

    rows = [(n, report.relative_l1[n], *report.relative_l1_components[n]) for n in report.relative_l1]
    _write_table(out / "apriori_errors.csv", ["flux", "rel_l1", *[f"rel_l1_{c}" for c in comps]], rows, chash)

    names = list(preds)
    header = ["sample"] + [f"{n}_{c}" for n in names for c in comps]
    data = np.column_stack([np.arange(len(test))] + [preds[n] for n in names])
    data[:, 1 : 1 + pde.m] = test.target
    _write_table(out / "apriori_scatter.csv", header, data, chash)

    enames = list(report.stress_errors)
    header = ["sample"] + [f"{n}_{c}" for n in enames for c in comps]
    data = np.column_stack([np.arange(len(pairs[0]))] + [report.stress_errors[n] for n in enames])
    _write_table(out / f"{stress_name}_abs_errors.csv", header, data, chash)

    bins = np.logspace(-10, 1, 45)
    hist_rows = []
    for k in range(len(bins) - 1):
        row = [bins[k], bins[k + 1]]
        for n in enames:
            for j in range(pde.m):
                e = np.clip(report.stress_errors[n][:, j], bins[0], bins[-1] * 0.999)
                row.append(np.count_nonzero((e >= bins[k]) & (e < bins[k + 1])))
        hist_rows.append(row)
    _write_table(
        out / f"{stress_name}_histogram.csv",
        ["bin_lo", "bin_hi"] + [f"{n}_{c}" for n in enames for c in comps],
        hist_rows,
        chash,
    )
    summary = {
        "config_hash": chash,
        "relative_l1": report.relative_l1,
        "stress": stress_name,
        "stress_p10": {n: [report.stress_percentile(n, 10, j) for j in range(pde.m)] for n in enames},
        "stress_p90": {n: [report.stress_percentile(n, 90, j) for j in range(pde.m)] for n in enames},
    }
    _write_json(out / "apriori_summary.json", summary)
    if _figures_on(cfg):
        from . import figures

        shown = {n: preds[n] for n in names if n != "godunov"}
        figures.flux_scatter(out / "apriori_scatter.png", test.target, shown, comps)
        figures.error_histogram(out / f"{stress_name}_histogram.png", report.stress_errors, comps, bins)
    return report


# -- simulate --------------------------------------------------------------


def simulation_config(cfg, flux=None, model_path=None, out=None):
    sim = _get(cfg, "simulation", dict)
    case = _get(cfg, "simulation.case", str)
    if case not in problems.SETUPS:
        raise ConfigError(f"simulation.case: unknown case {case!r}")
    setup = problems.SETUPS[case]
    pde = pde_of(cfg) if "pde" in cfg else setup.pde
    if pde.kind is not setup.pde.kind:
        raise ConfigError(f"pde.kind: case {case!r} needs {setup.pde.kind.value}")
    mesh = problems.build_mesh(_get(cfg, "simulation.mesh", dict, setup.mesh_spec))
    choice = FluxChoice(flux) if flux else _enum(cfg, "simulation.flux", FluxChoice)
    bc_doc = sim.get("bc", {})
    periodic = bc_doc.get("periodic", [["left", "right"]] if setup.periodic else [])
    bc = fvm.BoundaryCondition(rules=dict(bc_doc.get("rules", {})), periodic=tuple(tuple(p) for p in periodic))
    model = None
    if choice in (FluxChoice.VNN, FluxChoice.BFNN):
        path = Path(model_path) if model_path else _model_path(cfg, out or ".", choice.value)
        if not path.exists():
            raise ConfigError(f"model_paths.{choice.value}: model file {str(path)!r} not found")
        model = load_model(path)
    ic = problems.initial_condition(
        _get(cfg, "simulation.ic", str, case), **_get(cfg, "simulation.ic_params", dict, {})
    )
    try:
        config = fvm.make_config(
            pde,
            mesh,
            choice,
            float(_get(cfg, "simulation.t_final", (int, float), setup.t_final)),
            bc,
            cfl=float(_get(cfg, "simulation.cfl", (int, float), 0.4)),
            snapshot_times=tuple(_get(cfg, "simulation.snapshot_times", list, [])),
            model=model,
        )
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise ConfigError(f"simulation: {exc}") from None
        raise ConfigError(f"simulation.bc: {exc}") from None
    return config, ic


def snapshot_name(t):
    return f"snapshot_t{t:g}.csv"


def write_snapshot(path, mesh, pde, U, t, chash):
    names = ["x", "y"][: mesh.dim]
    header = [*names, "measure", *COMPONENTS[pde.kind]]
    data = np.column_stack([mesh.cell_centroids, mesh.cell_measures, U])
    _write_table(path, header, data, chash, meta=f"t={t!r}")


def cmd_simulate(cfg, out, flux=None, model_path=None):
    """Run one simulation; on failure writes ``failure.json`` and re-raises."""
    out = _out(out)
    config, ic = simulation_config(cfg, flux, model_path, out)
    chash = config_hash(cfg)
    record = {
        "config_hash": chash,
        "case": cfg["simulation"]["case"],
        "flux": config.flux.value,
        "t_final": config.t_final,
        "n_cells": config.mesh.n_cells,
    }
    try:
        result = fvm.run_simulation(config, ic)
    except SimulationFailure as exc:
        record.update(exc.record())
        _write_json(out / "failure.json", record)
        _write_json(out / "run.json", record)
        raise
    times = sorted(set(result.snapshots) | {config.t_final})
    snaps = dict(result.snapshots)
    snaps[config.t_final] = result.state.U
    for t in times:
        write_snapshot(out / snapshot_name(t), config.mesh, config.pde, snaps[t], t, chash)
    defect = result.balance_defect(config.mesh)
    record.update(
        status="ok",
        steps=result.steps,
        snapshot_times=times,
        boundary_outflow=result.boundary_outflow.tolist(),
        balance_defect=defect.tolist(),
    )
    _write_json(out / "run.json", record)
    if _figures_on(cfg):
        from . import figures

        comps = COMPONENTS[config.pde.kind]
        for t in times:
            if config.mesh.dim == 1:
                x = config.mesh.cell_centroids[:, 0]
                figures.profiles_1d(
                    out / f"profile_t{t:g}.png", x, {config.flux.value: snaps[t]}, comps, f"t = {t:g}"
                )
            else:
                figures.field_2d(out / f"field_t{t:g}.png", config.mesh, snaps[t][:, 0], comps[0])
    return result, record


# -- compare ---------------------------------------------------------------


@dataclass
class Snapshot:
    coords: np.ndarray
    measure: np.ndarray
    values: np.ndarray
    components: list


def read_snapshot(path):
    header, data, _ = read_table(path)
    if "measure" not in header:
        raise FormatError(f"{path}: not a snapshot table")
    k = header.index("measure")
    return Snapshot(data[:, :k], data[:, k], data[:, k + 1 :], header[k + 1 :])


def compare_runs(dir_a, dir_b):
    """Per-cell absolute differences of two runs at every shared snapshot time."""
    ra = json.loads((Path(dir_a) / "run.json").read_text())
    rb = json.loads((Path(dir_b) / "run.json").read_text())
    for r, d in ((ra, dir_a), (rb, dir_b)):
        if r.get("status") != "ok":
            raise ConfigError(f"{d}: run did not complete")
    if [float(t) for t in ra["snapshot_times"]] != [float(t) for t in rb["snapshot_times"]]:
        raise ConfigError("runs have different snapshot times")
    fields = {}
    for t in ra["snapshot_times"]:
        a = read_snapshot(Path(dir_a) / snapshot_name(t))
        b = read_snapshot(Path(dir_b) / snapshot_name(t))
        if a.coords.shape != b.coords.shape or not np.allclose(a.coords, b.coords, rtol=0, atol=1e-12):
            raise DimensionMismatchError("runs use different meshes")
        if a.components != b.components:
            raise DimensionMismatchError("runs hold different state components")
        fields[t] = (a, np.abs(a.values - b.values), b)
    return fields


def error_summary(fields):
    rows = []
    for t, (a, err, b) in fields.items():
        for k, c in enumerate(a.components):
            l1 = float(np.sum(a.measure * err[:, k]))
            ref = float(np.sum(a.measure * np.abs(b.values[:, k])))
            rows.append({"time": t, "component": c, "l1": l1, "rel_l1": l1 / ref if ref else 0.0,
                         "linf": float(err[:, k].max())})
    return rows


def cmd_compare(dir_a, dir_b, out, figures_on=True):
    out = _out(out)
    fields = compare_runs(dir_a, dir_b)
    chash = config_hash({"compare": [str(dir_a), str(dir_b)]})
    for t, (a, err, _) in fields.items():
        dims = ["x", "y"][: a.coords.shape[1]]
        _write_table(
            out / f"error_t{t:g}.csv",
            [*dims, "measure", *[f"abs_err_{c}" for c in a.components]],
            np.column_stack([a.coords, a.measure, err]),
            chash,
        )
    rows = error_summary(fields)
    lines = [f"# config_hash={chash} a={dir_a} b={dir_b}", "time,component,l1,rel_l1,linf"]
    lines += [f"{r['time']!r},{r['component']},{r['l1']!r},{r['rel_l1']!r},{r['linf']!r}" for r in rows]
    (out / "compare_summary.csv").write_text("\n".join(lines) + "\n")
    if figures_on:
        from . import figures

        for t, (a, err, b) in fields.items():
            if a.coords.shape[1] == 1:
                figures.profiles_1d(
                    out / f"compare_t{t:g}.png", a.coords[:, 0], {"a": a.values, "b": b.values}, a.components
                )
    return rows


# -- gradcheck -------------------------------------------------------------


def gradient_checks(count=20, seed=0, eps=1e-6):
    """Backprop against central differences on random small networks.

    Alternates tanh/ReLU and l1/l2. Targets sit at least 1e-2 away from the
    predictions, so the l1 kink is never crossed by the finite-difference
    step; ReLU configurations with a pre-activation within 1e-4 of zero are
    redrawn for the same reason. Returns a list of per-configuration maxima.
    """
    rng = np.random.default_rng(seed)
    results = []
    while len(results) < count:
        i = len(results)
        act = (nn.Activation.TANH, nn.Activation.RELU)[i % 2]
        norm = (nn.LossNorm.L1, nn.LossNorm.L2)[(i // 2) % 2]
        n_in, n_out = int(rng.integers(1, 5)), int(rng.integers(1, 3))
        hidden = tuple(int(w) for w in rng.integers(2, 6, size=int(rng.integers(1, 4))))
        spec = nn.NetworkSpec(n_in, n_out, hidden, act)
        params = nn.init_params(spec, int(rng.integers(1 << 30)))
        for b in params.biases:
            b[:] = rng.normal(0.0, 0.3, b.shape)
        X = rng.normal(size=(int(rng.integers(2, 9)), n_in))
        zs, acts = nn._forward_cache(params, X)
        if act is nn.Activation.RELU and any(np.abs(z).min() < 1e-4 for z in zs[:-1]):
            continue
        pred = acts[-1]
        T = pred + rng.choice([-1.0, 1.0], pred.shape) * rng.uniform(1e-2, 1.0, pred.shape)
        base = rng.normal(size=pred.shape) if i % 3 == 2 else None
        if base is not None:
            T = T + base
        _, g = nn.backward(params, X, T, norm, base)
        fd = nn.finite_difference_gradient(params, X, T, norm, base, eps)
        results.append({"activation": act.value, "loss": norm.value, "rel_err": nn.gradient_relative_error(g, fd)})
    return results


def cmd_gradcheck(cfg, out):
    out = _out(out)
    count = int(_get(cfg, "gradcheck.count", int, 20)) if cfg else 20
    seed = seed_of(cfg) if cfg and "seed" in cfg else 0
    results = gradient_checks(count, seed)
    chash = config_hash(cfg or {})
    rows = [(i, r["activation"], r["loss"], r["rel_err"]) for i, r in enumerate(results)]
    _write_table(out / "gradcheck.csv", ["config", "activation", "loss", "max_rel_err"], rows, chash)
    return max(r["rel_err"] for r in results)
