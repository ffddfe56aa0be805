// Interval poller keeping views fresh; the default period is 5 s and comes
// from config.json.

export class Poller {
  private timer: ReturnType<typeof setInterval> | null = null;

  constructor(
    private readonly refresh: () => Promise<void> | void,
    private readonly intervalMs: number = 5000,
  ) {}

  start(): void {
    this.stop();
    this.timer = setInterval(() => void this.refresh(), this.intervalMs);
  }

  stop(): void {
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
  }

  get running(): boolean {
    return this.timer !== null;
  }
}
