import { ReconnectBackoff } from "./backoff.js";
import {
  ClientCommand,
  isErrorFrame,
  isSnapshotFrame,
  SnapshotFrame,
} from "./protocol.js";

// Minimal slice of the WebSocket surface, so tests can hand in a fake.
export interface SocketLike {
  onopen: ((ev?: unknown) => void) | null;
  onclose: ((ev?: unknown) => void) | null;
  onmessage: ((ev: { data: string }) => void) | null;
  send(data: string): void;
  close(): void;
}

export type SocketFactory = (url: string) => SocketLike;

export type ConnectionStatus = "connecting" | "open" | "closed";

export interface GatewayEvents {
  onSnapshot?: (frame: SnapshotFrame) => void;
  onError?: (error: string, detail: string) => void;
  onStatus?: (status: ConnectionStatus) => void;
}

export class GatewayClient {
  status: ConnectionStatus = "closed";
  private socket: SocketLike | null = null;
  private backoff = new ReconnectBackoff();
  private stopped = false;

  constructor(
    private url: string,
    private events: GatewayEvents,
    private factory: SocketFactory,
    private schedule: (fn: () => void, ms: number) => void = (fn, ms) => {
      setTimeout(fn, ms);
    },
  ) {}

  connect(): void {
    this.stopped = false;
    this.setStatus("connecting");
    const socket = this.factory(this.url);
    this.socket = socket;
    socket.onopen = () => {
      this.backoff.reset();
      this.setStatus("open");
    };
    socket.onmessage = (ev) => this.handleMessage(ev.data);
    socket.onclose = () => {
      this.socket = null;
      this.setStatus("closed");
      if (this.stopped) return;
      const delay = this.backoff.nextDelay();
      this.schedule(() => {
        if (!this.stopped) this.connect();
      }, delay);
    };
  }

  stop(): void {
    this.stopped = true;
    this.socket?.close();
  }

  /** Serialize one command onto the wire; false when not connected. */
  send(command: ClientCommand): boolean {
    if (this.status !== "open" || this.socket === null) return false;
    try {
      this.socket.send(JSON.stringify(command));
      return true;
    } catch (err) {
      console.log("gateway send failed", err);
      return false;
    }
  }

  private handleMessage(data: string): void {
    let parsed: unknown;
    try {
      parsed = JSON.parse(data);
    } catch {
      console.log("gateway sent unparseable frame", data);
      return;
    }
    if (isSnapshotFrame(parsed)) {
      this.events.onSnapshot?.(parsed);
    } else if (isErrorFrame(parsed)) {
      this.events.onError?.(parsed.error, parsed.detail ?? "");
    }
  }

  private setStatus(status: ConnectionStatus): void {
    this.status = status;
    this.events.onStatus?.(status);
  }
}
