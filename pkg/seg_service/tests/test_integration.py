"""End-to-end wire test: a live server consumed by the engine CLI.

Starts uvicorn as a subprocess with the color-region backend, waits for
health to go ready, then runs `cadquery segment --provider remote:<url>`
on a plate fixture. The engine and the service interact only over HTTP.
"""

from __future__ import annotations

import json
import socket
import subprocess
import sys
import time
import urllib.request
from pathlib import Path

import pytest

REPO_ROOT = Path(__file__).resolve().parents[2]
MODEL = REPO_ROOT / "suites" / "oracle10" / "models" / "plate4.obj"


def _free_port() -> int:
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        return s.getsockname()[1]


@pytest.fixture(scope="module")
def server():
    port = _free_port()
    proc = subprocess.Popen(
        [sys.executable, "-m", "seg_service.app",
         "--backend", "color", "--port", str(port)],
        stdout=subprocess.PIPE, stderr=subprocess.STDOUT)
    base = f"http://127.0.0.1:{port}"
    try:
        deadline = time.time() + 30
        ready = False
        while time.time() < deadline:
            try:
                with urllib.request.urlopen(f"{base}/v1/health", timeout=1) as r:
                    if r.status == 200:
                        ready = True
                        break
            except Exception:
                time.sleep(0.2)
        if not ready:
            raise RuntimeError("server never became healthy")
        yield base
    finally:
        proc.terminate()
        proc.wait(timeout=10)


def test_engine_segments_through_live_service(server, tmp_path):
    out = tmp_path / "parts.json"
    subprocess.run(
        [sys.executable, "-m", "cadqa.cli", "segment",
         "--model", str(MODEL), "--prompt", "hole",
         "--provider", f"remote:{server}",
         "--box-threshold", "0.0",
         "--width", "640", "--height", "360", "--out", str(out)],
        check=True, capture_output=True, text=True)
    parts = json.loads(out.read_text())
    assert parts, "live service returned no aligned parts"
    manifest = json.loads((MODEL.parent / "plate4.manifest.json").read_text())
    walls = {frozenset([h["wall"]]) for h in manifest["holes"]}
    got = {frozenset(p["face_ids"]) for p in parts}
    # Color regions map 1:1 to faces, so every hole wall must come back as
    # its own aligned part among the detections.
    assert walls <= got
