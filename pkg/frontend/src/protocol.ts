// Wire contract with the gateway. Nothing in here simulates devices:
// the console only builds command objects and recognizes frames.

export interface SnapshotFrame {
  device: string;
  snapshot: Record<string, unknown>;
  virtual_ms: number;
}

export interface ErrorFrame {
  error: string;
  detail: string;
}

export type ClientCommand = { target: string; action: string } & Record<
  string,
  unknown
>;

export function isSnapshotFrame(value: unknown): value is SnapshotFrame {
  if (typeof value !== "object" || value === null) return false;
  const frame = value as Record<string, unknown>;
  return (
    typeof frame.device === "string" &&
    typeof frame.virtual_ms === "number" &&
    typeof frame.snapshot === "object" &&
    frame.snapshot !== null
  );
}

export function isErrorFrame(value: unknown): value is ErrorFrame {
  if (typeof value !== "object" || value === null) return false;
  return typeof (value as Record<string, unknown>).error === "string";
}

export type EmergencyKind = "fire" | "police" | "ambulance";

// One builder per console control; the gateway whitelist mirrors these.
export const commands = {
  streetlightByte(byte: string): ClientCommand {
    return { target: "streetlight", action: "command", byte };
  },
  applianceSet(appliance: string, on: boolean): ClientCommand {
    return { target: "home", action: "set", appliance, on };
  },
  notice(text: string): ClientCommand {
    return { target: "display", action: "notice", text };
  },
  emergency(kind: EmergencyKind): ClientCommand {
    return { target: "accident", action: "button", kind };
  },
  accidentReset(): ClientCommand {
    return { target: "accident", action: "reset" };
  },
  doorArm(armed: boolean): ClientCommand {
    return { target: "door", action: "arm", armed };
  },
};
