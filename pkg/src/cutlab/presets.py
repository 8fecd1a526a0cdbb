"""Named constant presets and flat ``key=value`` overrides."""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

from .localquery import EstimatorConfig


@dataclass(frozen=True)
class ConstantPreset:
    name: str
    c1: float = 2.0            # for-each encoder constant
    c: float = 0.05            # Gap-Hamming gap constant
    c1_forall: float = 0.05    # additive-error constant of the for-all decoder analysis
    c2: float = 0.1            # for-all oracle error rate is c2 * eps (calibrated)
    C_kappa: float = 8.0
    C_sample: float = 1.0
    C_final: float = 2.0
    beta0: float = 0.25
    final_rule: str = "clog"
    enum_cap: int = 20_000
    repetitions: int = 5
    promise_fraction: float = 1 / 1000

    def as_dict(self) -> dict:
        return asdict(self)

    def estimator(self, eps: float, seed: int) -> EstimatorConfig:
        return EstimatorConfig(eps=eps, beta0=self.beta0, C_kappa=self.C_kappa, C_sample=self.C_sample,
                               C_final=self.C_final, final_rule=self.final_rule, seed=seed)


PRESETS = {
    "desk": ConstantPreset("desk"),
    "paper": ConstantPreset("paper", C_kappa=2000.0),
}


def parse_constants(text: str) -> dict[str, object]:
    types = {f.name: f.type for f in fields(ConstantPreset)}
    out: dict[str, object] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected key=value, got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in types or key == "name":
            raise ValueError(f"line {lineno}: unknown constant {key!r}")
        kind = types[key]
        out[key] = int(value) if kind == "int" else value if kind == "str" else float(value)
    return out


def load_preset(name: str = "desk", constants: str | Path | None = None) -> ConstantPreset:
    if name not in PRESETS:
        raise ValueError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
    preset = PRESETS[name]
    if constants is not None:
        overrides = parse_constants(Path(constants).read_text())
        preset = replace(preset, name=f"custom({name})", **overrides)
    if preset.name == "paper" and (preset.C_kappa != 2000.0 or preset.promise_fraction != 1 / 1000):
        raise ValueError("the paper preset pins C_kappa=2000 and promise fraction 1/1000")
    return preset
