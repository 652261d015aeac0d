"""HTTP service exposing the segmentation wire protocol.

POST /v1/segment: PNG in, scored RLE masks out. GET /v1/health answers 503
while the backend loads (or after a load failure) and 200 once ready.
GET /v1/schema publishes the JSON schemas. Inference is serialized through
one worker; a bounded admission queue answers 429 on overflow.
"""

from __future__ import annotations

import argparse
import base64
import binascii
import contextlib
import io
import threading
import uuid

import numpy as np
from fastapi import FastAPI, Request
from fastapi.concurrency import run_in_threadpool
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from PIL import Image, UnidentifiedImageError

from .backends import SegmentationBackend, make_backend
from .protocol import (
    HEALTH_SCHEMA,
    SEGMENT_REQUEST_SCHEMA,
    SEGMENT_RESPONSE_SCHEMA,
    SegmentRequest,
    encode_mask,
)

DEFAULT_QUEUE_SIZE = 8


class ServiceState:
    def __init__(self, backend: SegmentationBackend, queue_size: int):
        self.backend = backend
        self.queue_size = queue_size
        self.status = "loading"
        self.reason = ""
        self.pending = 0
        self.admission = threading.Lock()
        self.inference = threading.Lock()

    def load(self) -> None:
        try:
            self.backend.load()
            self.status = "ok"
        except Exception as exc:
            self.status = "failed"
            self.reason = f"{type(exc).__name__}: {exc}"


def _decode_image(payload: str) -> np.ndarray:
    try:
        raw = base64.b64decode(payload, validate=True)
    except (binascii.Error, ValueError) as exc:
        raise ValueError(f"image is not valid base64: {exc}") from exc
    try:
        image = Image.open(io.BytesIO(raw)).convert("RGB")
    except UnidentifiedImageError as exc:
        raise ValueError("image bytes are not a decodable image") from exc
    return np.asarray(image)


def create_app(backend: SegmentationBackend | None = None,
               queue_size: int = DEFAULT_QUEUE_SIZE,
               load_on_startup: bool = True) -> FastAPI:
    state = ServiceState(backend or make_backend("color"), queue_size)

    @contextlib.asynccontextmanager
    async def lifespan(app: FastAPI):
        if load_on_startup:
            threading.Thread(target=state.load, daemon=True).start()
        yield

    app = FastAPI(title="seg-service", lifespan=lifespan)
    app.state.service = state

    @app.exception_handler(RequestValidationError)
    async def malformed(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400,
                            content={"error": "malformed request",
                                     "detail": exc.errors()})

    @app.get("/v1/health")
    async def health():
        if state.status != "ok":
            body = {"status": state.status}
            if state.reason:
                body["reason"] = state.reason
            return JSONResponse(status_code=503, content=body)
        return {"status": "ok", "model_versions": state.backend.versions()}

    @app.get("/v1/schema")
    async def schema():
        return {
            "segment_request": SEGMENT_REQUEST_SCHEMA,
            "segment_response": SEGMENT_RESPONSE_SCHEMA,
            "health": HEALTH_SCHEMA,
        }

    @app.post("/v1/segment")
    async def segment(request: SegmentRequest):
        if state.status != "ok":
            return JSONResponse(status_code=503,
                                content={"error": f"models {state.status}"})
        with state.admission:
            if state.pending >= state.queue_size:
                return JSONResponse(status_code=429,
                                    content={"error": "queue full"})
            state.pending += 1
        try:
            try:
                image = _decode_image(request.image)
            except ValueError as exc:
                return JSONResponse(status_code=400,
                                    content={"error": str(exc)})
            try:
                detections = await run_in_threadpool(
                    _infer, state, image, request.prompt)
            except Exception as exc:
                diagnostic = uuid.uuid4().hex[:12]
                return JSONResponse(
                    status_code=500,
                    content={"error": "inference failed",
                             "diagnostic_id": diagnostic,
                             "detail": f"{type(exc).__name__}: {exc}"})
            kept = [d for d in detections if d.score >= request.box_threshold]
            return {
                "detections": [
                    {"bbox": list(d.bbox), "score": d.score,
                     "mask_rle": encode_mask(d.mask)}
                    for d in kept
                ],
            }
        finally:
            with state.admission:
                state.pending -= 1

    return app


def _infer(state: ServiceState, image: np.ndarray, prompt: str):
    # GPU-style serialization: one inference at a time.
    with state.inference:
        return state.backend.detect(image, prompt)


def main() -> None:
    parser = argparse.ArgumentParser(description="segmentation microservice")
    parser.add_argument("--backend", default="color",
                        help="color | grounded (needs the ml extra)")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8731)
    parser.add_argument("--queue-size", type=int, default=DEFAULT_QUEUE_SIZE)
    args = parser.parse_args()

    import uvicorn
    app = create_app(make_backend(args.backend), queue_size=args.queue_size)
    uvicorn.run(app, host=args.host, port=args.port)


if __name__ == "__main__":
    main()
