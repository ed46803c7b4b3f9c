// Linear reconnect backoff: 500 ms per failed attempt, capped at 3 s.
// Reset on a successful open so a flaky link recovers quickly.

const STEP_MS = 500;
const MAX_MS = 3000;

export class ReconnectBackoff {
  private attempts = 0;

  nextDelay(): number {
    this.attempts += 1;
    return Math.min(this.attempts * STEP_MS, MAX_MS);
  }

  reset(): void {
    this.attempts = 0;
  }
}
