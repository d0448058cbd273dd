"""Local HTTP + WebSocket service around relief sessions.

HTTP handles session lifecycle and bulk downloads; the WebSocket at
/session/{id}/stream carries the interactive loop: JSON control messages
in, binary frames out.  Parameter changes are coalesced (only the latest
pending set is solved) and at most one unsent frame exists per socket.
"""
from __future__ import annotations

import asyncio
import io
import json
import os
import uuid
from dataclasses import dataclass, field, replace
from threading import Lock, Thread

import numpy as np
from fastapi import FastAPI, Request, Response, WebSocket, WebSocketDisconnect
from fastapi.responses import JSONResponse

from .basesurface import parse_base
from .cloud import load_cloud, save_mesh
from .compression import ReliefParams
from .errors import ReliefError
from .session import Session, SessionConfig, prepare_session
from .target import TargetRequest, solve_for_height
from .wire import FrameMessage, encode_frame

DEFAULT_PORT = 7878
DEFAULT_MAX_UPLOAD = 512 * 1024 * 1024


@dataclass
class SessionEntry:
    id: str
    state: str = "Preparing"      # Preparing | Ready | Targeting | Error
    session: Session | None = None
    error: str | None = None
    exports: dict = field(default_factory=dict)
    lock: Lock = field(default_factory=Lock)


def _params_json(p: ReliefParams) -> dict:
    return {"alpha": p.alpha, "beta": p.beta, "gamma": p.gamma}


def _parse_config(raw: str | None, view_raw: str | None):
    cfg = json.loads(raw) if raw else {}
    params = ReliefParams(
        alpha=float(cfg.get("alpha", 4.0)),
        beta=float(cfg.get("beta", 0.01)),
        gamma=float(cfg.get("gamma", 0.02)),
        base=parse_base(cfg.get("base", "plane")),
    )
    config = SessionConfig(
        target_controls=int(cfg.get("target_controls", 8000)),
        mbs_levels=int(cfg.get("mbs_levels", 8)),
        reference_mode=bool(cfg.get("reference_mode", False)),
        initial_params=params,
    )
    if view_raw:
        view = tuple(float(v) for v in json.loads(view_raw))
    else:
        view = (0.0, 0.0, 1.0)
    return config, view


def create_app(max_upload: int | None = None) -> FastAPI:
    app = FastAPI(title="relief service")
    sessions: dict[str, SessionEntry] = {}
    cap = max_upload if max_upload is not None else \
        int(os.environ.get("RELIEF_MAX_UPLOAD", DEFAULT_MAX_UPLOAD))

    def entry_or_404(sid: str) -> SessionEntry:
        entry = sessions.get(sid)
        if entry is None:
            raise _HTTPError(404, "NoSuchSession", f"unknown session {sid}")
        return entry

    def ready_or_409(sid: str) -> Session:
        entry = entry_or_404(sid)
        if entry.session is None:
            raise _HTTPError(409, "NotReady", f"session is {entry.state}")
        return entry.session

    class _HTTPError(Exception):
        def __init__(self, status, code, message):
            self.status, self.code, self.message = status, code, message

    @app.exception_handler(_HTTPError)
    async def _http_error(request: Request, exc: _HTTPError):
        return JSONResponse({"code": exc.code, "message": exc.message},
                            status_code=exc.status)

    @app.post("/session", status_code=202)
    async def create_session(request: Request):
        form = await request.form()
        upload = form.get("cloud")
        if upload is None:
            raise _HTTPError(400, "MalformedFile", "missing 'cloud' file part")
        data = await upload.read()
        if len(data) > cap:
            raise _HTTPError(413, "TooLarge",
                             f"upload {len(data)} bytes exceeds cap {cap}")
        name = upload.filename or "cloud.ply"
        fmt = "xyz" if name.endswith(".xyz") else "ply"
        try:
            cloud = load_cloud(io.BytesIO(data), fmt)
            config, view = _parse_config(form.get("config"), form.get("view"))
        except ReliefError as e:
            raise _HTTPError(400, e.code, str(e))
        except (ValueError, json.JSONDecodeError) as e:
            raise _HTTPError(400, "MalformedFile", str(e))

        entry = SessionEntry(id=uuid.uuid4().hex)
        sessions[entry.id] = entry

        def prepare():
            try:
                entry.session = prepare_session(cloud, view, config)
                entry.state = "Ready"
            except Exception as e:
                entry.error = getattr(e, "code", type(e).__name__)
                entry.state = "Error"

        Thread(target=prepare, daemon=True).start()
        return {"id": entry.id, "state": entry.state}

    @app.get("/session/{sid}")
    async def session_info(sid: str):
        entry = entry_or_404(sid)
        out = {"id": sid, "state": entry.state, "error": entry.error}
        ses = entry.session
        if ses is not None:
            out.update({
                "point_count": ses.point_count,
                "control_count": len(ses.controls),
                "rho": ses.rho,
                "diagonal": ses.cloud.diagonal,
                "prepare_timings_ms": ses.prepare_timings,
                "params": _params_json(ses.params),
            })
        return out

    @app.delete("/session/{sid}")
    async def delete_session(sid: str):
        entry_or_404(sid)
        del sessions[sid]
        return {"id": sid, "state": "closed"}

    @app.get("/session/{sid}/xy")
    async def session_xy(sid: str):
        ses = ready_or_409(sid)
        buf = np.ascontiguousarray(ses.vis_xy, dtype="<f4").tobytes()
        return Response(buf, media_type="application/octet-stream")

    @app.get("/session/{sid}/span")
    async def session_span(sid: str):
        ses = ready_or_409(sid)
        frame = ses.latest_frame()
        return {"span": frame.span, "seq": frame.seq}

    @app.get("/session/{sid}/mesh-topology")
    async def mesh_topology(sid: str):
        ses = ready_or_409(sid)
        buf = np.ascontiguousarray(ses.triangles, dtype="<u4").tobytes()
        return Response(buf, media_type="application/octet-stream")

    @app.get("/session/{sid}/mesh")
    async def mesh(sid: str, format: str = "ply"):
        if format not in ("ply", "obj"):
            raise _HTTPError(400, "MalformedFile", f"unknown format {format}")
        ses = ready_or_409(sid)
        out = io.BytesIO()
        save_mesh(ses.export_mesh(), out, format)
        media = "application/octet-stream" if format == "ply" else "text/plain"
        return Response(out.getvalue(), media_type=media)

    @app.get("/session/{sid}/export/{name}")
    async def export_download(sid: str, name: str):
        entry = entry_or_404(sid)
        blob = entry.exports.get(name)
        if blob is None:
            raise _HTTPError(404, "NoSuchExport", f"unknown export {name}")
        return Response(blob, media_type="application/octet-stream")

    @app.websocket("/session/{sid}/stream")
    async def stream(ws: WebSocket, sid: str):
        await ws.accept()
        entry = sessions.get(sid)
        if entry is None or entry.session is None:
            await ws.close(code=1011)
            return
        ses = entry.session
        frame = ses.latest_frame()
        await ws.send_json({
            "seq": frame.seq,
            "point_count": ses.point_count,
            "xy": f"/session/{sid}/xy",
            "params": _params_json(ses.params),
        })

        loop = asyncio.get_running_loop()
        pending: list = []          # latest-wins slot for set_params/set_base
        wake = asyncio.Event()
        closed = False

        def send_frame_blocking(params):
            f = ses.adjust(params)
            return encode_frame(FrameMessage(f.seq, f.span, f.z, f.normals))

        async def worker():
            while not closed:
                await wake.wait()
                wake.clear()
                batch, params_last = [], None
                for msg in pending:
                    if msg[0] == "params":
                        params_last = msg  # coalesce: newest params win
                    else:
                        batch.append(msg)  # targets/exports are never dropped
                pending.clear()
                if params_last is not None:
                    batch.append(params_last)
                for msg in batch:
                    try:
                        if msg[0] == "params":
                            buf = await loop.run_in_executor(
                                None, send_frame_blocking, msg[1])
                            await ws.send_bytes(buf)
                        elif msg[0] == "target":
                            await run_target(msg[1])
                        elif msg[0] == "export":
                            await run_export(msg[1])
                    except ReliefError as e:
                        await ws.send_json({"error": {"code": e.code,
                                                      "message": str(e)}})

        async def run_target(h0: float):
            entry.state = "Targeting"

            def progress(solves, alpha, beta, h):
                asyncio.run_coroutine_threadsafe(
                    ws.send_json({"progress": {"solves": solves,
                                               "span": h}}), loop)
            try:
                res = await loop.run_in_executor(
                    None, solve_for_height, ses, TargetRequest(h0), progress)
                params = replace(ses.params, alpha=res.alpha, beta=res.beta)
                await ws.send_json({"target": {
                    "alpha": res.alpha, "beta": res.beta,
                    "span": res.span, "solves": res.solves}})
                buf = await loop.run_in_executor(
                    None, send_frame_blocking, params)
                await ws.send_bytes(buf)
            finally:
                entry.state = "Ready"

        async def run_export(fmt: str):
            if fmt not in ("ply", "obj"):
                raise ReliefError("unknown export format")
            out = io.BytesIO()
            mesh = await loop.run_in_executor(None, ses.export_mesh)
            save_mesh(mesh, out, fmt)
            name = f"{uuid.uuid4().hex}.{fmt}"
            entry.exports[name] = out.getvalue()
            await ws.send_json({"export": {
                "url": f"/session/{sid}/export/{name}", "format": fmt}})

        task = asyncio.create_task(worker())
        try:
            while True:
                raw = await ws.receive_text()
                try:
                    msg = json.loads(raw)
                    if "set_params" in msg:
                        p = msg["set_params"]
                        params = replace(
                            ses.params,
                            alpha=float(p.get("alpha", ses.params.alpha)),
                            beta=float(p.get("beta", ses.params.beta)),
                            gamma=float(p.get("gamma", ses.params.gamma)))
                        pending.append(("params", params))
                    elif "set_base" in msg:
                        base = parse_base(msg["set_base"]["base"])
                        pending.append(("params",
                                        replace(ses.params, base=base)))
                    elif "target_height" in msg:
                        pending.append(("target",
                                        float(msg["target_height"]["h0"])))
                    elif "export" in msg:
                        pending.append(("export",
                                        msg["export"].get("format", "ply")))
                    else:
                        raise ValueError(f"unknown message keys {list(msg)}")
                except (ValueError, KeyError, TypeError,
                        json.JSONDecodeError) as e:
                    await ws.send_json({"error": {"code": "BadMessage",
                                                  "message": str(e)}})
                    continue
                wake.set()
        except WebSocketDisconnect:
            pass
        finally:
            closed = True
            wake.set()
            task.cancel()

    return app


def serve(port: int | None = None, host: str = "127.0.0.1"):
    import uvicorn
    if port is None:
        port = int(os.environ.get("RELIEF_PORT", DEFAULT_PORT))
    uvicorn.run(create_app(), host=host, port=port)
