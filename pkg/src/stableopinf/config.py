"""Experiment configuration and the built-in experiment presets."""

import dataclasses
from dataclasses import dataclass, field

import numpy as np

from .io import read_json

PROBLEMS = ("synthetic", "burgers", "reaction_diffusion")
ALL_METHODS = ("intrusive", "plain", "tikhonov", "pir", "spir")


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    """Everything needed to rerun one experiment deterministically.

    Signal ranges are ``[lo, hi]`` pairs. Initial-condition modes are
    ``"uniform"`` (entries uniform in the given range), ``"zero"``, ``"basis"``
    (``V r`` with ``r`` uniform in ``[0, 1]^n``) and, for tests only,
    ``"train"`` (reuse the training initial conditions of the nearest
    training parameter).
    """

    problem: str
    N: int = None
    mesh_h: float = None
    dt: float = 1e-3
    K: int = 1000
    train_params: list = field(default_factory=list)
    M_b: int = 1
    M_t: int = 1
    basis_input: list = field(default_factory=lambda: [0.0, 2.0])
    basis_ic: str = "uniform"
    train_input: list = field(default_factory=lambda: [0.0, 2.0])
    train_ic: str = "uniform"
    ic_range: list = field(default_factory=lambda: [0.0, 1.0])
    M_test: int = 7
    M_test_inputs: int = 1
    test_input: list = field(default_factory=lambda: [0.0, 10.0])
    test_ic: str = "uniform"
    dims: list = field(default_factory=lambda: [2, 4, 6, 8, 10])
    lambda_grid: list = field(default_factory=lambda: [1e-15, 1e5, 51])
    methods: list = field(default_factory=lambda: list(ALL_METHODS))
    eps: float = 1e-10
    constant: bool = False
    quad_scale: float = None
    seed: int = 0
    spir_max_iters: int = 200_000

    def __post_init__(self):
        self.validate()

    def validate(self):
        if self.problem not in PROBLEMS:
            raise ConfigError(f"unknown problem {self.problem!r}")
        if self.problem == "reaction_diffusion":
            if not self.mesh_h:
                raise ConfigError("reaction_diffusion needs mesh_h")
        elif not self.N or self.N < 2:
            raise ConfigError("N must be at least 2")
        for name in ("M_b", "M_t", "M_test", "M_test_inputs", "K"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1")
        if self.dt <= 0:
            raise ConfigError("dt must be positive")
        if self.eps <= 0:
            raise ConfigError("eps must be positive")
        if len(self.train_params) < 1 or np.any(np.diff(self.train_params) <= 0):
            raise ConfigError("train_params must be strictly increasing and nonempty")
        if not self.dims or min(self.dims) < 1:
            raise ConfigError("dims must be positive")
        bad = set(self.methods) - set(ALL_METHODS)
        if bad:
            raise ConfigError(f"unknown methods {sorted(bad)}")
        if len(self.lambda_grid) != 3:
            raise ConfigError("lambda_grid is [lo, hi, m]")
        for mode in (self.basis_ic, self.train_ic, self.test_ic):
            if mode not in ("uniform", "zero", "basis", "train"):
                raise ConfigError(f"unknown initial-condition mode {mode!r}")
        if self.test_ic == "train" and self.M_test_inputs > self.M_t:
            raise ConfigError("test_ic='train' needs M_test_inputs <= M_t")

    @property
    def test_params(self):
        return np.linspace(self.train_params[0], self.train_params[-1], self.M_test)

    def to_dict(self):
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, d):
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - names
        if unknown:
            raise ConfigError(f"unknown config keys {sorted(unknown)}")
        return cls(**d)

    @classmethod
    def load(cls, path):
        return cls.from_dict(read_json(path))

    def replace(self, **kw):
        return dataclasses.replace(self, **kw)


def synthetic(**kw):
    """Synthetic random quadratic model, N=128, parameters 0.1..1.0."""
    base = dict(problem="synthetic", N=128, dt=1e-3, K=1000,
                train_params=[round(0.1 * i, 1) for i in range(1, 11)], M_b=1, M_t=3,
                basis_input=[0.0, 2.0], basis_ic="uniform", train_input=[0.0, 2.0],
                train_ic="uniform", ic_range=[0.0, 1.0], M_test=7, M_test_inputs=1,
                test_input=[0.0, 10.0], test_ic="uniform", dims=[2, 4, 6, 8, 10],
                lambda_grid=[1e-15, 1e5, 51], methods=["intrusive", "plain", "pir"])
    base.update(kw)
    return ExperimentConfig(**base)


def burgers(**kw):
    """Burgers' equation, N=128, dt=1e-4 over [0, 1], parameters 10..100."""
    base = dict(problem="burgers", N=128, dt=1e-4, K=10_000,
                train_params=[10.0 * i for i in range(1, 11)], M_b=1, M_t=10,
                basis_input=[0.0, 2.0], basis_ic="zero", train_input=[0.0, 2.0],
                train_ic="basis", M_test=7, M_test_inputs=5, test_input=[0.0, 4.0],
                test_ic="train", dims=list(range(2, 11)), lambda_grid=[1e-15, 1e5, 51],
                methods=["intrusive", "plain", "tikhonov", "pir", "spir"])
    base.update(kw)
    return ExperimentConfig(**base)


def reaction_diffusion(**kw):
    """Reaction-diffusion on the unit square, h=1/12 (N=144), parameters in [1, 1.5]."""
    base = dict(problem="reaction_diffusion", mesh_h=1 / 12, dt=1e-3, K=20_000,
                train_params=[float(v) for v in np.linspace(1.0, 1.5, 10)], M_b=1, M_t=10,
                basis_input=[0.0, 1.0], basis_ic="zero", train_input=[0.0, 1.0],
                train_ic="zero", M_test=7, M_test_inputs=1, test_input=[0.0, 1.0],
                test_ic="zero", dims=list(range(2, 11)), lambda_grid=[1e-10, 1e10, 51],
                methods=["intrusive", "plain", "tikhonov", "pir", "spir"], constant=True)
    base.update(kw)
    return ExperimentConfig(**base)


PRESETS = {"synthetic": synthetic, "burgers": burgers, "reaction_diffusion": reaction_diffusion}
