// Top-down canvas rendering. The client draws only server-authoritative
// state: no prediction, no interpolation; a dropped frame is a skip.

import type { FrameMessage, PoseMsg } from "./protocol.js";

export interface ArenaView {
  sideMeters: number;     // arena side length in meters
  bodyRadius: number;     // robot disc radius in meters
  episodeTime: number;    // trial length in seconds
}

export const DEFAULT_VIEW: ArenaView = {
  sideMeters: 4.0,
  bodyRadius: 0.1,
  episodeTime: 30.0,
};

export interface Transform {
  scale: number;   // pixels per meter
  offsetX: number;
  offsetY: number;
}

// arena fits the square viewport with a 10% margin on each side
export function fitTransform(
  canvasWidth: number,
  canvasHeight: number,
  sideMeters: number,
): Transform {
  const margin = 0.1;
  const usable = Math.min(canvasWidth, canvasHeight) * (1 - 2 * margin);
  const scale = usable / sideMeters;
  const offsetX = (canvasWidth - usable) / 2;
  const offsetY = (canvasHeight - usable) / 2;
  return { scale, offsetX, offsetY };
}

export function toPixels(
  t: Transform,
  sideMeters: number,
  x: number,
  y: number,
): [number, number] {
  // world y grows upward; canvas y grows downward
  return [t.offsetX + x * t.scale, t.offsetY + (sideMeters - y) * t.scale];
}

function drawRobot(
  ctx: CanvasRenderingContext2D,
  t: Transform,
  view: ArenaView,
  pose: PoseMsg,
  fill: string,
  outlined: boolean,
): void {
  const [cx, cy] = toPixels(t, view.sideMeters, pose.x, pose.y);
  const r = view.bodyRadius * t.scale;
  ctx.beginPath();
  ctx.arc(cx, cy, r, 0, 2 * Math.PI);
  ctx.fillStyle = fill;
  ctx.fill();
  if (outlined) {
    ctx.lineWidth = 3;
    ctx.strokeStyle = "#ffd400";
    ctx.stroke();
  }
  // heading tick
  const hx = cx + Math.cos(pose.theta) * r * 1.6;
  const hy = cy - Math.sin(pose.theta) * r * 1.6;
  ctx.beginPath();
  ctx.moveTo(cx, cy);
  ctx.lineTo(hx, hy);
  ctx.lineWidth = 2;
  ctx.strokeStyle = "#222";
  ctx.stroke();
}

export function renderFrame(
  ctx: CanvasRenderingContext2D,
  frame: FrameMessage,
  view: ArenaView,
  width: number,
  height: number,
): void {
  const t = fitTransform(width, height, view.sideMeters);
  ctx.clearRect(0, 0, width, height);

  // walls
  const [x0, y0] = toPixels(t, view.sideMeters, 0, view.sideMeters);
  const side = view.sideMeters * t.scale;
  ctx.fillStyle = "#f7f4ea";
  ctx.fillRect(x0, y0, side, side);
  ctx.lineWidth = 3;
  ctx.strokeStyle = "#444";
  ctx.strokeRect(x0, y0, side, side);

  drawRobot(ctx, t, view, frame.prey, "#2e9e44", frame.human_role === "prey");
  frame.predators.forEach((pose, i) =>
    drawRobot(ctx, t, view, pose, "#c83232",
      frame.human_role === `pred${i}`),
  );

  // timer
  ctx.fillStyle = "#222";
  ctx.font = "16px monospace";
  ctx.textAlign = "left";
  ctx.fillText(timerText(frame.time, view.episodeTime), x0, y0 - 8);

  if (frame.caught) {
    banner(ctx, width, height, `caught at ${frame.time.toFixed(1)} s`);
  }
}

export function timerText(time: number, episodeTime: number): string {
  return `${time.toFixed(1)} / ${episodeTime.toFixed(1)}`;
}

export function banner(
  ctx: CanvasRenderingContext2D,
  width: number,
  height: number,
  text: string,
): void {
  ctx.fillStyle = "rgba(0, 0, 0, 0.65)";
  ctx.fillRect(0, height / 2 - 30, width, 60);
  ctx.fillStyle = "#fff";
  ctx.font = "24px sans-serif";
  ctx.textAlign = "center";
  ctx.fillText(text, width / 2, height / 2 + 8);
}

export function disconnectedOverlay(
  ctx: CanvasRenderingContext2D,
  width: number,
  height: number,
): void {
  banner(ctx, width, height, "disconnected - press connect to retry");
}
