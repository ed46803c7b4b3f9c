import { ClientCommand } from "./protocol.js";

export type Dispatch = (command: ClientCommand) => void;

// Double-click guard: the same command within the window is dropped, so
// one click always means exactly one frame on the wire.
export function debounced(
  dispatch: Dispatch,
  windowMs = 250,
  now: () => number = () => Date.now(),
): Dispatch {
  const lastSent = new Map<string, number>();
  return (command) => {
    const key = JSON.stringify(command);
    const at = now();
    const previous = lastSent.get(key);
    if (previous !== undefined && at - previous < windowMs) return;
    lastSent.set(key, at);
    dispatch(command);
  };
}
