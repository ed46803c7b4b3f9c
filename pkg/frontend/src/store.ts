import { ConnectionStatus } from "./socket.js";
import { SnapshotFrame } from "./protocol.js";

// Last-frame-wins state. The console never derives device state itself;
// it only remembers what the gateway most recently said.

export type Snapshot = Record<string, unknown>;

export class ConsoleStore {
  status: ConnectionStatus = "closed";
  virtualMs = 0;
  private snapshots = new Map<string, Snapshot>();
  private pending = new Set<string>();
  private listeners: Array<() => void> = [];

  subscribe(listener: () => void): void {
    this.listeners.push(listener);
  }

  apply(frame: SnapshotFrame): void {
    this.snapshots.set(frame.device, frame.snapshot);
    this.virtualMs = frame.virtual_ms;
    this.pending.delete(frame.device); // snapshot answers the in-flight command
    this.notify();
  }

  setStatus(status: ConnectionStatus): void {
    this.status = status;
    this.notify();
  }

  markPending(device: string): void {
    this.pending.add(device);
    this.notify();
  }

  isPending(device: string): boolean {
    return this.pending.has(device);
  }

  snapshot(device: string): Snapshot | undefined {
    return this.snapshots.get(device);
  }

  private notify(): void {
    for (const listener of this.listeners) listener();
  }
}
