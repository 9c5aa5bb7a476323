/** One in-flight mutation at a time; controls stay disabled until the
 * response lands. The UI holds no authoritative state: after every mutation
 * the whole view is re-fetched from the service. */

export class MutationGate {
  private queue: Promise<void> = Promise.resolve();
  busy = false;
  lastError: string | null = null;
  private listeners: (() => void)[] = [];

  onChange(fn: () => void): void {
    this.listeners.push(fn);
  }

  private emit(): void {
    for (const fn of this.listeners) fn();
  }

  /** Serialize a mutation; rejections surface in lastError, never unhandled. */
  run(action: () => Promise<void>): Promise<void> {
    const next = this.queue.then(async () => {
      this.busy = true;
      this.lastError = null;
      this.emit();
      try {
        await action();
      } catch (err) {
        this.lastError = err instanceof Error ? err.message : String(err);
      } finally {
        this.busy = false;
        this.emit();
      }
    });
    this.queue = next.catch(() => undefined);
    return next;
  }

  /** Resolves once every queued mutation has settled. */
  idle(): Promise<void> {
    return this.queue;
  }
}
