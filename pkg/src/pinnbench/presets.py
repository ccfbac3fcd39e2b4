"""Experiment configurations and the named preset registry.

An ExperimentConfig is the single flat description of a run: problem,
predictor, risk family, net size, sample counts, and training settings.
Presets cover every row of the benchmark grids; each resolves to the
(problem, model, risk, training) quadruple consumed by the trainer.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

from . import pde_zoo
from .errors import ConfigurationError
from .losses import FAMILIES, RiskSpec
from .models import MODEL_KINDS, PredictorModel
from .network import NetSpec
from .pde_zoo import PdeProblem
from .training import TrainConfig

PROBLEM_KINDS = ("poisson", "burgers1_inviscid", "burgers1_viscid",
                 "burgers2_inviscid", "burgers3_viscid", "kdv")


@dataclass(frozen=True)
class ExperimentConfig:
    """One run description; resolvable to (problem, model, risk, training)."""

    name: str
    problem_kind: str
    model_kind: str
    family: str
    depth: int
    width: int
    epochs: int
    learning_rate: float
    activation: str = "tanh"
    problem_args: dict = field(default_factory=dict)
    lam: float = 1.0
    q_blend: float = 1e-9
    beta_penalty: float = 0.0
    n_bulk: int = 1000
    boundary_per_face: object = None
    n_initial: int | None = None
    repeats: int = 3
    eval_cadence: int = 100
    test_resolution: object = 51
    seed_init: int = 0
    seed_sample: int = 1000

    def __post_init__(self):
        if self.problem_kind not in PROBLEM_KINDS:
            raise ConfigurationError(f"unknown problem kind {self.problem_kind!r}")
        if self.model_kind not in MODEL_KINDS:
            raise ConfigurationError(f"unknown model kind {self.model_kind!r}")
        if self.family not in FAMILIES:
            raise ConfigurationError(f"unknown risk family {self.family!r}")

    def problem(self) -> PdeProblem:
        ctor = getattr(pde_zoo, self.problem_kind)
        try:
            return ctor(**self.problem_args)
        except TypeError as err:
            raise ConfigurationError(
                f"bad problem arguments {self.problem_args}: {err}") from err

    def resolve(self) -> tuple[PdeProblem, PredictorModel, RiskSpec, TrainConfig]:
        problem = self.problem()
        spec = NetSpec(problem.input_dim, problem.n_fields, self.depth,
                       self.width, self.activation)
        model = PredictorModel(self.model_kind, problem, spec,
                               lam=self.lam, q_blend=self.q_blend)
        bpf = self.boundary_per_face
        risk = RiskSpec(self.family, beta_penalty=self.beta_penalty,
                        n_bulk=self.n_bulk,
                        boundary_per_face=tuple(bpf) if isinstance(bpf, list) else bpf,
                        n_initial=self.n_initial)
        train = TrainConfig(self.epochs, self.learning_rate,
                            seed_init=self.seed_init, seed_sample=self.seed_sample,
                            repeats=self.repeats, eval_cadence=self.eval_cadence,
                            test_resolution=self.test_resolution)
        return problem, model, risk, train

    def to_dict(self) -> dict:
        return asdict(self)


def config_from_dict(data: dict) -> ExperimentConfig:
    if not isinstance(data, dict):
        raise ConfigurationError("config must be a mapping")
    known = set(ExperimentConfig.__dataclass_fields__)
    unknown = set(data) - known
    if unknown:
        raise ConfigurationError(f"unknown config keys: {sorted(unknown)}")
    try:
        return ExperimentConfig(**data)
    except TypeError as err:
        raise ConfigurationError(str(err)) from err


# registry -----------------------------------------------------------------

_FAMILY_OF = {"vanilla": "vanilla_composite",
              "boundary_included": "boundary_included_composite",
              "initial_included": "initial_included_composite"}


def _nu_tag(nu: float) -> str:
    return "nu" + format(nu, "g").replace(".", "p")


def _poisson_presets() -> list[ExperimentConfig]:
    # Six loss settings per dimension; bulk counts scale with dimension for
    # the boundary-included settings, penalty settings use the dense mesh.
    out = []
    mesh = {1: 1001, 2: 101, 3: 21, 10: 3}
    for d in (1, 2, 3, 10):
        epochs = 7000 if d == 10 else 2000
        n_free = 5000 if d == 10 else 1000
        common = dict(problem_kind="poisson", problem_args={"d": d},
                      depth=4, width=150, epochs=epochs, learning_rate=1e-4,
                      test_resolution=mesh[d])
        for fam, tag in (("energy", "energy"), ("residual", "residual")):
            out.append(ExperimentConfig(
                name=f"poisson_d{d}_{tag}_b_lambda1", model_kind="boundary_included",
                family=fam, n_bulk=n_free, **common))
            out.append(ExperimentConfig(
                name=f"poisson_d{d}_{tag}_b_lambda5",
                model_kind="boundary_included_scaled", lam=5.0,
                family=fam, n_bulk=n_free, **common))
            beta = 50.0 if fam == "energy" else 200.0
            out.append(ExperimentConfig(
                name=f"poisson_d{d}_{tag}_p", model_kind="vanilla",
                family=fam, beta_penalty=beta, n_bulk=10000,
                boundary_per_face=200, **common))
    return out


def _composite_sets(problem_kind: str, model: str, bulk: int,
                    per_face, initial: int) -> dict:
    """Sample bindings for the three-model comparison grids."""
    sets = {"n_bulk": bulk}
    if model != "boundary_included":
        sets["boundary_per_face"] = per_face
    if model != "initial_included":
        sets["n_initial"] = initial
    return sets


def _burgers1_presets() -> list[ExperimentConfig]:
    out = []
    inviscid = {57: 4, 3441: 40, 81201: 200, 181801: 300}
    viscid = {57: 4, 3441: 40, 181801: 300}
    for count, width in inviscid.items():
        for model in _FAMILY_OF:
            out.append(ExperimentConfig(
                name=f"burgers1_inviscid_{model}_{count}p",
                problem_kind="burgers1_inviscid", model_kind=model,
                family=_FAMILY_OF[model], depth=4, width=width,
                epochs=30000, learning_rate=1e-4, test_resolution=101,
                **_composite_sets("burgers1_inviscid", model, 1000,
                                  [500, 500], 1000)))
    for count, width in viscid.items():
        for nu in (0.01, 0.1, 0.5, 1.0, 2.0, 10.0):
            for model in _FAMILY_OF:
                out.append(ExperimentConfig(
                    name=f"burgers1_viscid_{_nu_tag(nu)}_{model}_{count}p",
                    problem_kind="burgers1_viscid", problem_args={"nu": nu},
                    model_kind=model, family=_FAMILY_OF[model],
                    depth=4, width=width, epochs=30000, learning_rate=1e-4,
                    test_resolution=101,
                    **_composite_sets("burgers1_viscid", model, 1000,
                                      [500, 500], 1000)))
    return out


def _burgers2_presets() -> list[ExperimentConfig]:
    out = []
    for count, width in {66: 4, 1794: 28, 20802: 100}.items():
        for model in _FAMILY_OF:
            out.append(ExperimentConfig(
                name=f"burgers2_{model}_{count}p",
                problem_kind="burgers2_inviscid", model_kind=model,
                family=_FAMILY_OF[model], depth=4, width=width,
                epochs=30000, learning_rate=1e-3, test_resolution=[41, 41, 21],
                **_composite_sets("burgers2_inviscid", model, 800,
                                  [200, 200, 200, 200], 800)))
    return out


def _burgers3_presets() -> list[ExperimentConfig]:
    out = []
    faces = [166, 166, 166, 166, 170, 170]
    for count, width in {75: 4, 3603: 40}.items():
        for nu in (0.01, 0.1, 0.5, 1.0):
            for model in _FAMILY_OF:
                out.append(ExperimentConfig(
                    name=f"burgers3_{_nu_tag(nu)}_{model}_{count}p",
                    problem_kind="burgers3_viscid",
                    problem_args={"re": 1.0 / nu},
                    model_kind=model, family=_FAMILY_OF[model],
                    depth=4, width=width, epochs=10000, learning_rate=1e-3,
                    test_resolution=[13, 13, 13, 9],
                    **_composite_sets("burgers3_viscid", model, 1000,
                                      faces, 1000)))
    return out


def _kdv_presets() -> list[ExperimentConfig]:
    out = []
    grids = {1: ({57: 4, 541: 15, 1009: 21, 1981: 30},
                 dict(depth=4, activation="sigmoid", epochs=60000,
                      n_bulk=500, per_face=[125, 125], n_initial=250,
                      q=1e-9, test_resolution=[101, 101])),
             2: ({417: 13, 2109: 31, 4137: 44, 10221: 70},
                 dict(depth=4, activation="sigmoid", epochs=30000,
                      n_bulk=2000, per_face=[500, 500], n_initial=1000,
                      q=1e-9, test_resolution=[301, 201])),
             3: ({3297: 32},
                 dict(depth=5, activation="sin", epochs=5000,
                      n_bulk=18000, per_face=[457, 457], n_initial=914,
                      q=1e-4, test_resolution=[320, 320]))}
    for n_sol, (sizes, cfg) in grids.items():
        for count, width in sizes.items():
            for model in _FAMILY_OF:
                out.append(ExperimentConfig(
                    name=f"kdv{n_sol}_{model}_{count}p",
                    problem_kind="kdv", problem_args={"soliton_count": n_sol},
                    model_kind=model, family=_FAMILY_OF[model],
                    depth=cfg["depth"], width=width,
                    activation=cfg["activation"], epochs=cfg["epochs"],
                    learning_rate=1e-4, q_blend=cfg["q"],
                    test_resolution=cfg["test_resolution"],
                    **_composite_sets("kdv", model, cfg["n_bulk"],
                                      cfg["per_face"], cfg["n_initial"])))
    return out


def build_registry() -> dict[str, ExperimentConfig]:
    registry: dict[str, ExperimentConfig] = {}
    for cfg in (_poisson_presets() + _burgers1_presets() + _burgers2_presets()
                + _burgers3_presets() + _kdv_presets()):
        if cfg.name in registry:
            raise ConfigurationError(f"duplicate preset name {cfg.name!r}")
        registry[cfg.name] = cfg
    return registry


PRESETS = build_registry()


def get_preset(name: str) -> ExperimentConfig:
    try:
        return PRESETS[name]
    except KeyError:
        raise ConfigurationError(
            f"unknown preset {name!r}; available presets:\n  "
            + "\n  ".join(sorted(PRESETS))) from None


def preset_names() -> list[str]:
    return sorted(PRESETS)
