"""Command line entry point: ``hetnet-in-plots render --spec <path>``.

The spec file is YAML with the PlotSpec fields (input_csv, figure_kind,
output_image, optional title/xlabel/ylabel).  A list of specs renders each
figure in order, which reproduces a whole figure set in one invocation.
"""

from __future__ import annotations

import argparse
import sys

import yaml

from .errors import ConfigError, PlotsError
from .render import PlotSpec, render

_FIELDS = {"input_csv", "figure_kind", "output_image", "title", "xlabel",
           "ylabel"}


def _spec_from_mapping(raw, index=None) -> PlotSpec:
    where = "spec" if index is None else f"spec[{index}]"
    if not isinstance(raw, dict):
        raise ConfigError(f"{where}: must be a mapping")
    unknown = set(raw) - _FIELDS
    if unknown:
        raise ConfigError(f"{where}: unknown key(s) {sorted(unknown)}")
    for req in ("input_csv", "figure_kind", "output_image"):
        if req not in raw:
            raise ConfigError(f"{where}.{req}: missing required key")
    return PlotSpec(**{k: str(v) for k, v in raw.items()})


def load_specs(path: str) -> list[PlotSpec]:
    try:
        with open(path) as fh:
            raw = yaml.safe_load(fh)
    except OSError as e:
        raise ConfigError(f"cannot read spec: {e}") from e
    except yaml.YAMLError as e:
        raise ConfigError(f"spec is not valid YAML: {e}") from e
    if isinstance(raw, list):
        return [_spec_from_mapping(r, i) for i, r in enumerate(raw)]
    return [_spec_from_mapping(raw)]


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="hetnet-in-plots",
        description="Render figures from hetnet-in CSV outputs")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("render")
    p.add_argument("--spec", required=True)
    args = parser.parse_args(argv)
    try:
        for spec in load_specs(args.spec):
            out = render(spec)
            print(out)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    except PlotsError as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
