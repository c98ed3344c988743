// Wire schema of the live-bridge WebSocket service. One JSON object per
// message; numbers are plain decimals, angles in radians.

export const KEY_FORWARD = 1;
export const KEY_BACK = 2;
export const KEY_LEFT = 4;
export const KEY_RIGHT = 8;
export const ALL_KEYS = KEY_FORWARD | KEY_BACK | KEY_LEFT | KEY_RIGHT;

export type Role = "prey" | "pred0" | "pred1" | "pred2";

export interface PoseMsg {
  x: number;
  y: number;
  theta: number;
}

export interface ObservationMsg {
  x_image: number;
  area: number;
  ir: number;
}

export interface FrameMessage {
  type: "frame";
  trial: number;
  tick: number;
  time: number;
  prey: PoseMsg;
  predators: PoseMsg[];
  observations: ObservationMsg[];
  caught: boolean;
  human_role: Role;
}

export interface TrialEndMessage {
  type: "trial_end";
  trial: number;
  time: number;
  caught: boolean;
  role: Role;
  generation: number;
  seed: number;
}

export interface StatsGroup {
  role: Role;
  generation: number;
  count: number;
  mean: number;
  stddev: number;
}

export interface TrialRow {
  trial: number;
  role: Role;
  time: number;
  caught: boolean;
  generation: number;
  seed: number;
}

export interface StatsMessage {
  type: "stats";
  groups: StatsGroup[];
  trials: TrialRow[];
}

export interface ErrorMessage {
  type: "error";
  code: string;
  message: string;
}

export type ServerMessage =
  | FrameMessage
  | TrialEndMessage
  | StatsMessage
  | ErrorMessage;

export interface StartMessage {
  type: "start";
  role: Role;
  seed: number;
  lockstep?: boolean;
  generation?: number;
}

export interface ControlMessage {
  type: "control";
  trial: number;
  keys: number;
  client_time: number;
}

export interface StatsRequest {
  type: "stats";
}

export type ClientMessage = StartMessage | ControlMessage | StatsRequest;

export function parseServerMessage(raw: string): ServerMessage {
  const msg = JSON.parse(raw);
  if (
    msg.type !== "frame" &&
    msg.type !== "trial_end" &&
    msg.type !== "stats" &&
    msg.type !== "error"
  ) {
    throw new Error(`unknown server message type: ${msg.type}`);
  }
  return msg as ServerMessage;
}

export function controlMessage(
  trial: number,
  keys: number,
  clientTime: number,
): ControlMessage {
  if ((keys & ~ALL_KEYS) !== 0) {
    throw new Error(`invalid key bits: ${keys}`);
  }
  return { type: "control", trial, keys, client_time: clientTime };
}
