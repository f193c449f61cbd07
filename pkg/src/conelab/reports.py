"""Structured check records shared by the analysis suites and the CLI."""
from __future__ import annotations

from dataclasses import dataclass, field


def _jsonable(v):
    """Coerce numpy scalars/arrays and containers into plain JSON types."""
    if hasattr(v, "item") and not hasattr(v, "__len__"):
        v = v.item()
    if isinstance(v, bool) or v is None or isinstance(v, (int, str)):
        return v
    if isinstance(v, float):
        return float(f"{v:.12g}")
    if isinstance(v, complex):
        return [_jsonable(v.real), _jsonable(v.imag)]
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if hasattr(v, "tolist"):
        return _jsonable(v.tolist())
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return str(v)


@dataclass
class CheckRecord:
    """One verified property: a pass/fail/not-applicable status with the
    residual and, on failure, a witness description."""
    name: str
    prop: str = ""                 # which identity/property was checked
    status: str = "pass"           # pass | fail | not-applicable | info
    residual: float | None = None
    value: object = None
    witness: str | None = None

    def to_dict(self) -> dict:
        out = {"check": self.name, "property": self.prop, "status": self.status}
        if self.residual is not None:
            out["residual"] = float(f"{self.residual:.12g}")
        if self.value is not None:
            out["value"] = _jsonable(self.value)
        if self.witness:
            out["witness"] = self.witness
        return out


@dataclass
class SuiteReport:
    title: str
    records: list[CheckRecord] = field(default_factory=list)

    def add(self, *args, **kwargs) -> CheckRecord:
        rec = CheckRecord(*args, **kwargs)
        self.records.append(rec)
        return rec

    @property
    def passed(self) -> bool:
        return all(r.status != "fail" for r in self.records)

    def __getitem__(self, name: str) -> CheckRecord:
        for r in self.records:
            if r.name == name:
                return r
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {"suite": self.title, "passed": self.passed,
                "records": [r.to_dict() for r in self.records]}

    def format_text(self) -> str:
        lines = [f"== {self.title} =="]
        for r in self.records:
            bits = [f"[{r.status:>4}]" if r.status != "not-applicable" else "[ n/a]",
                    r.name]
            if r.value is not None:
                bits.append(f"= {_jsonable(r.value)}")
            if r.residual is not None:
                bits.append(f"(residual {r.residual:.3g})")
            if r.witness:
                bits.append(f"witness: {r.witness}")
            lines.append("  " + " ".join(str(b) for b in bits))
        return "\n".join(lines)
