"""Run generated scripts in a task workspace with a timeout and no network."""

from __future__ import annotations

import os
import subprocess
import time
from pathlib import Path

from ..errors import GeoError
from .types import ScriptAttempt

MAX_CAPTURE_CHARS = 64_000
_SITE_DIR = Path(__file__).resolve().parent / "_sandbox_site"
_SRC_DIR = Path(__file__).resolve().parents[2]  # directory holding the geoagents package


class SandboxUnavailable(GeoError):
    """The interpreter could not be started at all (an abort-level fault)."""

    code = "sandbox_unavailable"


def sandbox_env(workspace: Path, extra: dict | None = None) -> dict:
    env = {
        "PATH": os.environ.get("PATH", "/usr/bin:/bin"),
        "HOME": str(workspace),
        "PYTHONPATH": os.pathsep.join([str(_SITE_DIR), str(_SRC_DIR)]),
        "PYTHONDONTWRITEBYTECODE": "1",
        "PYTHONHASHSEED": "0",
        "PYTHONIOENCODING": "utf-8",
        "LANG": "C.UTF-8",
    }
    env.update(extra or {})
    return env


def _clip(text: str) -> str:
    return text if len(text) <= MAX_CAPTURE_CHARS else text[-MAX_CAPTURE_CHARS:]


def run_script(script: str, workspace: Path, name: str, interpreter: list, timeout_ms: int,
               extra_env: dict | None = None) -> ScriptAttempt:
    """Write ``script`` under ``workspace/.scripts`` and execute it there."""
    scripts = workspace / ".scripts"
    scripts.mkdir(parents=True, exist_ok=True)
    path = scripts / f"{name}.py"
    path.write_text(script, encoding="utf-8")
    start = time.monotonic()
    try:
        proc = subprocess.run([*interpreter, str(path)], cwd=workspace, env=sandbox_env(workspace, extra_env),
                              capture_output=True, text=True, encoding="utf-8", errors="replace",
                              timeout=timeout_ms / 1000, stdin=subprocess.DEVNULL)
    except FileNotFoundError as exc:
        raise SandboxUnavailable(f"interpreter not found: {interpreter[0]!r}") from exc
    except PermissionError as exc:
        raise SandboxUnavailable(f"interpreter not executable: {interpreter[0]!r}") from exc
    except subprocess.TimeoutExpired as exc:
        wall = int((time.monotonic() - start) * 1000)
        out = exc.stdout.decode("utf-8", "replace") if isinstance(exc.stdout, bytes) else (exc.stdout or "")
        err = exc.stderr.decode("utf-8", "replace") if isinstance(exc.stderr, bytes) else (exc.stderr or "")
        err += f"\nTimeoutError: script exceeded {timeout_ms} ms"
        return ScriptAttempt(script, None, _clip(out), _clip(err), wall, timed_out=True)
    wall = int((time.monotonic() - start) * 1000)
    return ScriptAttempt(script, proc.returncode, _clip(proc.stdout), _clip(proc.stderr), wall)
