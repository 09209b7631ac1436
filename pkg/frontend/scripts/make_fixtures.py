#!/usr/bin/env python3
"""Regenerate the recorded service outputs used by the frontend tests.

Run from the repository root with the odflow package installed:

    python3 frontend/scripts/make_fixtures.py
"""

import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[2]
sys.path.insert(0, str(ROOT / "tests"))

from conftest import make_banana_project  # noqa: E402
from odflow.model import save_project  # noqa: E402
from odflow.scene import render_svg  # noqa: E402


def main() -> None:
    out = ROOT / "frontend" / "tests" / "fixtures"
    out.mkdir(parents=True, exist_ok=True)
    project = make_banana_project()
    (out / "banana.project.json").write_text(save_project(project))
    (out / "banana.svg").write_bytes(render_svg(project))
    (out / "banana.selected-9.svg").write_bytes(render_svg(project, selection="9"))
    print(f"fixtures written to {out}")


if __name__ == "__main__":
    main()
