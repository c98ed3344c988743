// Client state: latest frame, connection status, trial history. Strictly
// server-authoritative; every number shown on screen came from a message.

import type {
  FrameMessage,
  ServerMessage,
  StatsGroup,
  TrialRow,
} from "./protocol.js";

export type ConnectionState = "disconnected" | "connecting" | "connected";

export class ViewModel {
  connection: ConnectionState = "disconnected";
  latestFrame: FrameMessage | null = null;
  trialRows: TrialRow[] = [];
  serverGroups: StatsGroup[] = [];
  lastError: string | null = null;
  trialActive = false;

  onFrame: (frame: FrameMessage) => void = () => {};
  onTrialEnd: () => void = () => {};
  onStats: () => void = () => {};

  apply(msg: ServerMessage): void {
    switch (msg.type) {
      case "frame":
        this.latestFrame = msg;
        this.onFrame(msg);
        break;
      case "trial_end":
        this.trialActive = false;
        this.trialRows.push({
          trial: msg.trial,
          role: msg.role,
          time: msg.time,
          caught: msg.caught,
          generation: msg.generation,
          seed: msg.seed,
        });
        this.onTrialEnd();
        break;
      case "stats":
        // server history is authoritative; replace local accumulation
        this.trialRows = msg.trials.slice();
        this.serverGroups = msg.groups.slice();
        this.onStats();
        break;
      case "error":
        this.lastError = `${msg.code}: ${msg.message}`;
        break;
    }
  }
}
