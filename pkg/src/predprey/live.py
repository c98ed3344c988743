"""Live play: evolved controllers versus a human-commanded robot.

The Session object owns all game logic and is driven tick by tick, so it
can be tested headlessly and scripted deterministically. The FastAPI app
wraps a Session per WebSocket connection and supports two pacing modes:

* real-time: a ticker task targets dt wall-clock spacing (the sim never
  time-warps; each tick advances exactly dt of simulated time),
* lockstep: one tick per received control message, for scripted clients
  and reproducible trials.

Message schema (JSON, one object per WebSocket message):

  client -> server
    {"type": "start", "role": "prey"|"pred0"|"pred1"|"pred2",
     "seed": int, "lockstep": bool?, "generation": int?}
    {"type": "control", "trial": int, "keys": int bitmask (0..15),
     "client_time": number?}
    {"type": "stats"}

  server -> client
    {"type": "frame", "trial", "tick", "time", "prey": {x, y, theta},
     "predators": [{x, y, theta} x3],
     "observations": [{x_image, area, ir} x3], "caught", "human_role"}
    {"type": "trial_end", "trial", "time", "caught", "role",
     "generation", "seed"}
    {"type": "stats", "groups": [{role, generation, count, mean, stddev}],
     "trials": [{trial, role, generation, time, caught, seed}]}
    {"type": "error", "code", "message"}

Key bitmask: forward=1, back=2, left=4, right=8.
"""

from __future__ import annotations

import asyncio
import json
import math
from dataclasses import dataclass
from pathlib import Path

from fastapi import FastAPI, WebSocket, WebSocketDisconnect

from . import neat
from .coevo import PREDATOR_ROLES, ROLE_CYCLE, ROLE_PREY
from .config import RunConfig, load_run_config
from .episode import outputs_to_command
from .runs import (CONFIG_SNAPSHOT, InventoryError, available_generations,
                   load_hof_genome)
from .sensors import camera_observe, ir_observe, omniscient_observe, predator_inputs
from .world import WheelCommand, WorldState, initial_placement, step_world

KEY_FORWARD = 1
KEY_BACK = 2
KEY_LEFT = 4
KEY_RIGHT = 8
ALL_KEYS = KEY_FORWARD | KEY_BACK | KEY_LEFT | KEY_RIGHT

COUNTDOWN_SECONDS = 3.0


class TrialInProgress(RuntimeError):
    pass


class NoTrials(RuntimeError):
    pass


class ProtocolError(ValueError):
    pass


def keystate_to_command(bits: int, omega_max: float) -> WheelCommand:
    """Keyboard mapping. Opposite keys cancel; turning while driving arcs.

    Fractions of omega_max (left, right):
      forward (1, 1)         back (-0.6, -0.6)
      left spin (-0.5, 0.5)  right spin (0.5, -0.5)
      forward+left (0.25, 1)    forward+right (1, 0.25)
      back+left (-0.15, -0.6)   back+right (-0.6, -0.15)
    """
    if bits & ~ALL_KEYS:
        raise ProtocolError(f"unknown key bits in {bits:#x}")
    fwd = bool(bits & KEY_FORWARD) and not bits & KEY_BACK
    bck = bool(bits & KEY_BACK) and not bits & KEY_FORWARD
    lft = bool(bits & KEY_LEFT) and not bits & KEY_RIGHT
    rgt = bool(bits & KEY_RIGHT) and not bits & KEY_LEFT
    if fwd and lft:
        frac = (0.25, 1.0)
    elif fwd and rgt:
        frac = (1.0, 0.25)
    elif fwd:
        frac = (1.0, 1.0)
    elif bck and lft:
        frac = (-0.15, -0.6)
    elif bck and rgt:
        frac = (-0.6, -0.15)
    elif bck:
        frac = (-0.6, -0.6)
    elif lft:
        frac = (-0.5, 0.5)
    elif rgt:
        frac = (0.5, -0.5)
    else:
        frac = (0.0, 0.0)
    return WheelCommand(frac[0] * omega_max, frac[1] * omega_max)


@dataclass
class TrialRecord:
    trial_id: int
    role: str
    time: float
    caught: bool
    generation: int
    seed: int

    def to_json_dict(self) -> dict:
        return {"trial": self.trial_id, "role": self.role, "time": self.time,
                "caught": self.caught, "generation": self.generation,
                "seed": self.seed}


def trial_stats(records) -> list:
    """Count/mean/stddev of trial times grouped by (role, generation)."""
    if not records:
        raise NoTrials("no finished trials")
    groups = {}
    for rec in records:
        groups.setdefault((rec.role, rec.generation), []).append(rec.time)
    out = []
    for role, generation in sorted(groups):
        times = groups[(role, generation)]
        mean = sum(times) / len(times)
        var = sum((t - mean) ** 2 for t in times) / len(times)
        out.append({"role": role, "generation": generation,
                    "count": len(times), "mean": mean,
                    "stddev": math.sqrt(var)})
    return out


class Session:
    """One interactive play session over a fixed set of evolved genomes."""

    def __init__(self, genomes: dict, generation: int, settings: RunConfig,
                 records=None):
        for role in ROLE_CYCLE:
            if role not in genomes:
                raise ProtocolError(f"missing genome for role {role}")
        self.genomes = genomes
        self.generation = generation
        self.settings = settings
        self.records = records if records is not None else []
        self._next_trial_id = len(self.records) + 1
        self._trial = None

    @property
    def trial_active(self) -> bool:
        return self._trial is not None and not self._trial["finished"]

    @property
    def clock_started(self) -> bool:
        return self.trial_active and self._trial["clock_started"]

    @property
    def trial_id(self):
        return self._trial["id"] if self._trial else None

    def start_trial(self, role: str, seed: int) -> dict:
        if self.trial_active:
            raise TrialInProgress("a trial is already running")
        if role not in ROLE_CYCLE:
            raise ProtocolError(f"unknown role {role!r}")
        state = initial_placement(self.settings.arena, seed)
        nets = {r: neat.Network(self.genomes[r])
                for r in ROLE_CYCLE if r != role}
        self._trial = {
            "id": self._next_trial_id,
            "role": role,
            "seed": seed,
            "state": state,
            "nets": nets,
            "keybits": 0,
            "clock_started": False,
            "finished": False,
        }
        self._next_trial_id += 1
        return self._frame(state)

    def apply_control(self, bits: int):
        """Latch the newest key state; it applies from the next tick.
        Controls for finished trials are ignored."""
        if bits & ~ALL_KEYS:
            raise ProtocolError(f"unknown key bits in {bits:#x}")
        if not self.trial_active:
            return
        self._trial["keybits"] = bits
        self._trial["clock_started"] = True

    def begin_clock(self):
        if self.trial_active:
            self._trial["clock_started"] = True

    def tick(self):
        """Advance one dt. Returns (frame, trial_end dict or None), or None
        while no trial clock is running."""
        if not self.trial_active or not self._trial["clock_started"]:
            return None
        trial = self._trial
        state: WorldState = trial["state"]
        arena = self.settings.arena

        human_cmd = keystate_to_command(trial["keybits"], arena.omega_max)
        if trial["role"] == ROLE_PREY:
            prey_cmd = human_cmd
        else:
            prey_cmd = outputs_to_command(
                trial["nets"][ROLE_PREY].activate(
                    omniscient_observe(state, arena)),
                arena.omega_max)
        predator_cmds = []
        for i, r in enumerate(PREDATOR_ROLES):
            if r == trial["role"]:
                predator_cmds.append(human_cmd)
            else:
                predator_cmds.append(outputs_to_command(
                    trial["nets"][r].activate(
                        predator_inputs(state, i, self.settings.camera,
                                        arena)),
                    arena.omega_max))

        state = step_world(state, prey_cmd, predator_cmds, arena)
        trial["state"] = state

        trial_end = None
        if state.caught or state.tick >= arena.n_ticks:
            t = state.catch_time if state.caught else arena.episode_time
            record = TrialRecord(trial["id"], trial["role"], t, state.caught,
                                 self.generation, trial["seed"])
            self.records.append(record)
            trial["finished"] = True
            trial_end = {
                "type": "trial_end",
                "trial": trial["id"],
                "time": t,
                "caught": state.caught,
                "role": trial["role"],
                "generation": self.generation,
                "seed": trial["seed"],
            }
        return self._frame(state), trial_end

    def stats_message(self) -> dict:
        return {
            "type": "stats",
            "groups": trial_stats(self.records),
            "trials": [r.to_json_dict() for r in self.records],
        }

    def _frame(self, state: WorldState) -> dict:
        arena = self.settings.arena
        observations = []
        for i in range(3):
            x_image, area = camera_observe(state, i, self.settings.camera,
                                           arena.robot_body_radius)
            observations.append({
                "x_image": x_image,
                "area": area,
                "ir": ir_observe(state, i, arena),
            })
        def pose_dict(p):
            return {"x": p.x, "y": p.y, "theta": p.theta}
        return {
            "type": "frame",
            "trial": self._trial["id"],
            "tick": state.tick,
            "time": state.tick * arena.dt,
            "prey": pose_dict(state.prey.pose),
            "predators": [pose_dict(p.pose) for p in state.predators],
            "observations": observations,
            "caught": state.caught,
            "human_role": self._trial["role"],
        }


# ---------------------------------------------------------------------------
# FastAPI service

def load_session_genomes(run_dir, generation: int) -> dict:
    return {role: load_hof_genome(run_dir, generation, role)
            for role in ROLE_CYCLE}


def create_app(run_dir, generation: int, runs_root=None, static_dir=None,
               pace: float = 1.0, trial_log_path=None):
    """Build the live-play app around one run directory and generation.

    pace > 1 speeds up real-time mode (wall sleep dt/pace); lockstep mode
    ignores pacing entirely.
    """
    run_dir = Path(run_dir)
    runs_root = Path(runs_root) if runs_root is not None else run_dir.parent
    settings = load_run_config(run_dir / CONFIG_SNAPSHOT)
    default_genomes = load_session_genomes(run_dir, generation)

    app = FastAPI(title="predprey live bridge")
    app.state.busy = asyncio.Lock()
    app.state.all_records = []
    app.state.trial_log_path = (Path(trial_log_path) if trial_log_path
                                else run_dir / "trials.jsonl")

    @app.get("/runs")
    def list_runs():
        entries = []
        if runs_root.is_dir():
            for child in sorted(runs_root.iterdir()):
                if not (child / CONFIG_SNAPSHOT).exists():
                    continue
                gens = available_generations(child)
                if gens:
                    entries.append({"run": child.name, "generations": gens})
        return {"runs": entries, "serving": {
            "run": run_dir.name, "generation": generation}}

    def _flush_trials(records):
        if not records:
            return
        app.state.all_records.extend(records)
        with open(app.state.trial_log_path, "a", encoding="utf-8") as fh:
            for rec in records:
                fh.write(json.dumps(rec.to_json_dict(), sort_keys=True) + "\n")

    @app.websocket("/ws")
    async def ws_endpoint(ws: WebSocket):
        await ws.accept()
        if app.state.busy.locked():
            await ws.send_json({"type": "error", "code": "busy",
                                "message": "another client is connected"})
            await ws.close()
            return
        async with app.state.busy:
            records = []
            session = Session(default_genomes, generation, settings, records)
            lockstep = False
            ticker_task = None
            send_lock = asyncio.Lock()

            async def send(payload):
                async with send_lock:
                    await ws.send_json(payload)

            async def emit(result):
                if result is None:
                    return
                frame, trial_end = result
                await send(frame)
                if trial_end is not None:
                    await send(trial_end)

            async def ticker(sess):
                interval = settings.arena.dt / pace
                loop = asyncio.get_running_loop()
                # the trial clock starts on the first control message or
                # after the countdown, whichever comes first
                deadline = loop.time() + COUNTDOWN_SECONDS / pace
                while sess.trial_active and not sess.clock_started:
                    if loop.time() >= deadline:
                        sess.begin_clock()
                        break
                    await asyncio.sleep(interval / 4.0)
                deadline = loop.time()
                while sess.trial_active:
                    deadline += interval
                    delay = deadline - loop.time()
                    if delay > 0:
                        await asyncio.sleep(delay)
                    await emit(sess.tick())

            try:
                while True:
                    raw = await ws.receive_text()
                    try:
                        msg = json.loads(raw)
                    except json.JSONDecodeError:
                        await send({"type": "error", "code": "protocol",
                                    "message": "not valid JSON"})
                        continue
                    mtype = msg.get("type")
                    try:
                        if mtype == "start":
                            lockstep = bool(msg.get("lockstep", False))
                            role = msg.get("role", ROLE_PREY)
                            seed = int(msg.get("seed", 0))
                            gen = int(msg.get("generation", session.generation))
                            if gen != session.generation:
                                genomes = load_session_genomes(run_dir, gen)
                                session = Session(genomes, gen, settings,
                                                  records)
                            await send(session.start_trial(role, seed))
                            if not lockstep:
                                ticker_task = asyncio.create_task(
                                    ticker(session))
                        elif mtype == "control":
                            session.apply_control(int(msg.get("keys", 0)))
                            if lockstep:
                                await emit(session.tick())
                        elif mtype == "stats":
                            await send(session.stats_message())
                        else:
                            await send({
                                "type": "error", "code": "protocol",
                                "message": f"unknown message type {mtype!r}"})
                    except TrialInProgress as exc:
                        await send({"type": "error",
                                    "code": "trial_in_progress",
                                    "message": str(exc)})
                    except NoTrials as exc:
                        await send({"type": "error", "code": "no_trials",
                                    "message": str(exc)})
                    except InventoryError as exc:
                        await send({"type": "error", "code": "inventory",
                                    "message": str(exc)})
                    except (ProtocolError, ValueError) as exc:
                        await send({"type": "error", "code": "protocol",
                                    "message": str(exc)})
            except WebSocketDisconnect:
                pass
            finally:
                if ticker_task is not None:
                    ticker_task.cancel()
                _flush_trials(records)

    if static_dir is not None and Path(static_dir).is_dir():
        from fastapi.staticfiles import StaticFiles
        app.mount("/", StaticFiles(directory=str(static_dir), html=True),
                  name="static")

    return app
