from pathlib import Path

from numeric.exceptions import EnergyLabError, ParameterError
from numeric.scalars import format_scalar, parse_scalar

from .sets import FiniteSet, from_values


def parse_set_text(text: str, source: str = "<text>") -> FiniteSet:
    """One value per line; ``#`` starts a comment and blank lines are skipped."""
    values = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            values.append(parse_scalar(line))
        except EnergyLabError as exc:
            raise ParameterError(f"{source}:{lineno}: {exc}") from exc
    return from_values(values)


def read_set_file(path) -> FiniteSet:
    path = Path(path)
    if not path.is_file():
        raise ParameterError(f"set file {path} does not exist.")
    return parse_set_text(path.read_text(encoding="utf-8"), str(path))


def write_set_file(A: FiniteSet, path, comment: str = None) -> Path:
    path = Path(path)
    lines = []
    if comment:
        lines.extend(f"# {line}" for line in comment.splitlines())
    lines.extend(format_scalar(x) for x in A)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path
