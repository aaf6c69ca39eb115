"""Command-line entry point.

    vgdl-tutor GAME.txt                       # tutorial text on stdout
    vgdl-tutor GAME.txt --format dot          # mechanic graph as DOT
    vgdl-tutor games/ --out build/ --format all
    vgdl-tutor GAME.txt --validate-only

Exit status: 0 success, 1 at least one game failed, 2 bad invocation.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence, TextIO

from .graph import NoWinPath, build_graph, classify, export_dot, export_json, find_critical_paths
from .mechanics import DEFAULT_TABLES, Tables, UnknownAvatarClass, discover_mechanics, load_tables
from .textgen import generate_tutorial, grammar_for
from .vgdl import Diagnostic, VGDLError, parse, tokenize, validate

FORMATS = ("text", "json", "dot", "all")
EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    input: Path
    output_format: str = "text"
    seed: int = 0
    include_optional: bool = False
    validate_only: bool = False
    tables_override: Path | None = None
    output_dir: Path | None = None

    def check(self) -> None:
        if self.output_format not in FORMATS:
            raise UsageError(f"unknown format {self.output_format!r}")
        if not self.input.exists():
            raise UsageError(f"no such file or directory: {self.input}")
        if self.input.is_dir() and self.output_dir is None:
            raise UsageError("--out is required when the input is a directory")
        if self.output_format == "all" and self.output_dir is None and not self.validate_only:
            raise UsageError("--format all needs --out")
        if self.tables_override is not None and not self.tables_override.is_file():
            raise UsageError(f"no such tables file: {self.tables_override}")


@dataclass
class GameResult:
    path: Path
    artifacts: dict[str, str] = field(default_factory=dict)
    diagnostics: list[Diagnostic] = field(default_factory=list)
    failed: bool = False


def _diag(path: Path, message: str, line: int | None = None, severity: str = "Error") -> Diagnostic:
    return Diagnostic(severity, line, message, str(path))


def process_game(path: Path, config: RunConfig, tables: Tables = DEFAULT_TABLES) -> GameResult:
    """Run one game through the whole pipeline; never raises for bad games."""
    result = GameResult(path)
    try:
        game = parse(tokenize(path.read_text(encoding="utf-8")))
    except (VGDLError, UnicodeDecodeError, OSError) as exc:
        line = getattr(exc, "line", None)
        message = str(exc).split(": ", 1)[-1] if line is not None else str(exc)
        result.diagnostics.append(_diag(path, message, line))
        result.failed = True
        return result

    result.diagnostics.extend(replace(d, file=str(path)) for d in validate(game))
    if any(d.is_error for d in result.diagnostics):
        result.failed = True
    if result.failed or config.validate_only:
        return result

    try:
        mechanics = discover_mechanics(game, tables)
        graph = build_graph(mechanics, game.ancestry())
        paths = find_critical_paths(graph)
    except (UnknownAvatarClass, NoWinPath, ValueError) as exc:
        result.diagnostics.append(_diag(path, str(exc)))
        result.failed = True
        return result
    graph = classify(graph, paths)
    doc = generate_tutorial(
        graph, paths, grammar_for(game), config.seed, config.include_optional, path.stem
    )

    fmt = config.output_format
    if fmt in ("text", "all"):
        result.artifacts["text"] = doc.to_text()
    if fmt in ("dot", "all"):
        result.artifacts["dot"] = export_dot(graph)
    if fmt in ("json", "all"):
        result.artifacts["json"] = export_json(graph, paths, doc.to_dict())
    return result


OUTPUT_SUFFIXES = {"text": ".tutorial.txt", "dot": ".graph.dot", "json": ".json"}


def write_artifacts(result: GameResult, out_dir: Path) -> list[Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for kind, text in result.artifacts.items():
        target = out_dir / (result.path.stem + OUTPUT_SUFFIXES[kind])
        target.write_text(text, encoding="utf-8")
        written.append(target)
    return written


def format_diagnostic(d: Diagnostic) -> str:
    where = f"{d.file}:{d.line}" if d.line is not None else d.file
    return f"{d.severity}: {where}: {d.message}"


def print_diagnostics(diags: Sequence[Diagnostic], stream: TextIO | None = None) -> None:
    stream = sys.stderr if stream is None else stream
    for d in sorted(diags, key=lambda d: (d.file, -1 if d.line is None else d.line)):
        print(format_diagnostic(d), file=stream)


def run(config: RunConfig, stdout: TextIO | None = None, stderr: TextIO | None = None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    try:
        config.check()
        tables = load_tables(config.tables_override) if config.tables_override else DEFAULT_TABLES
    except (UsageError, ValueError) as exc:
        stderr.write(build_parser().format_usage())
        print(f"vgdl-tutor: error: {exc}", file=stderr)
        return EXIT_USAGE

    batch = config.input.is_dir()
    paths = sorted(config.input.glob("*.txt")) if batch else [config.input]
    results = [process_game(p, config, tables) for p in paths]

    diagnostics = [d for r in results for d in r.diagnostics]
    print_diagnostics(diagnostics, stderr)
    for r in results:
        if r.failed or config.validate_only:
            continue
        if config.output_dir is not None:
            write_artifacts(r, config.output_dir)
        else:
            stdout.write(r.artifacts[config.output_format])

    failed = sum(r.failed for r in results)
    if batch:
        print(
            f"processed {len(results)} games: {len(results) - failed} ok, {failed} failed",
            file=stderr,
        )
    return EXIT_FAILED if failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vgdl-tutor",
        description="Generate instruction tutorials from VGDL game descriptions.",
    )
    parser.add_argument("input", type=Path, help="VGDL file, or a directory of .txt games")
    parser.add_argument("--format", choices=FORMATS, default="text", dest="output_format")
    parser.add_argument("--seed", type=int, default=0, help="seed for free grammar choices")
    parser.add_argument(
        "--include-optional", action="store_true",
        help="also teach mechanics that are on no critical path",
    )
    parser.add_argument(
        "--validate-only", action="store_true", help="only report diagnostics"
    )
    parser.add_argument("--tables", type=Path, dest="tables_override",
                        help="capability/effect table overrides")
    parser.add_argument("--out", type=Path, dest="output_dir", help="output directory")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return run(RunConfig(**vars(args)))


if __name__ == "__main__":
    sys.exit(main())
