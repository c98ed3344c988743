// Keyboard capture: arrow keys and WASD maintain a key-state bitmask.
// A control message goes out on every state change and at least every
// HEARTBEAT_MS while a trial is active (lost keyup events self-heal).

import { KEY_BACK, KEY_FORWARD, KEY_LEFT, KEY_RIGHT } from "./protocol.js";

export const HEARTBEAT_MS = 100;

const KEY_BITS: Record<string, number> = {
  ArrowUp: KEY_FORWARD,
  ArrowDown: KEY_BACK,
  ArrowLeft: KEY_LEFT,
  ArrowRight: KEY_RIGHT,
  w: KEY_FORWARD,
  s: KEY_BACK,
  a: KEY_LEFT,
  d: KEY_RIGHT,
};

export class ControlChannel {
  private bits = 0;
  private lastSent = -Infinity;
  private active = false;

  constructor(
    private readonly send: (bits: number) => void,
    private readonly now: () => number = () => performance.now(),
  ) {}

  get state(): number {
    return this.bits;
  }

  trialStarted(): void {
    this.active = true;
    this.bits = 0;
    this.lastSent = -Infinity;
  }

  trialEnded(): void {
    this.active = false;
  }

  keyDown(key: string): boolean {
    const bit = KEY_BITS[key.length === 1 ? key.toLowerCase() : key];
    if (bit === undefined) return false;
    this.update(this.bits | bit);
    return true;
  }

  keyUp(key: string): boolean {
    const bit = KEY_BITS[key.length === 1 ? key.toLowerCase() : key];
    if (bit === undefined) return false;
    this.update(this.bits & ~bit);
    return true;
  }

  // heartbeat hook; call on a timer at HEARTBEAT_MS or faster
  poll(): void {
    if (this.active && this.now() - this.lastSent >= HEARTBEAT_MS) {
      this.emit();
    }
  }

  private update(bits: number): void {
    const changed = bits !== this.bits;
    this.bits = bits;
    if (changed && this.active) {
      this.emit();
    }
  }

  private emit(): void {
    this.lastSent = this.now();
    this.send(this.bits);
  }
}
