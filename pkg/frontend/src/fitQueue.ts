/**
 * Newest-wins request manager: at most one in-flight request per key;
 * starting a new one aborts its predecessor, whose result is dropped.
 */

export class FitQueue {
  private readonly controllers = new Map<string, AbortController>();

  async request<T>(
    key: string,
    run: (signal: AbortSignal) => Promise<T>,
  ): Promise<T | null> {
    this.controllers.get(key)?.abort();
    const controller = new AbortController();
    this.controllers.set(key, controller);
    try {
      const result = await run(controller.signal);
      return controller.signal.aborted ? null : result;
    } catch (error) {
      if (controller.signal.aborted) {
        return null;
      }
      throw error;
    } finally {
      if (this.controllers.get(key) === controller) {
        this.controllers.delete(key);
      }
    }
  }

  cancel(key: string): void {
    this.controllers.get(key)?.abort();
    this.controllers.delete(key);
  }

  cancelAll(): void {
    for (const controller of this.controllers.values()) {
      controller.abort();
    }
    this.controllers.clear();
  }
}
