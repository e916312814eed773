/**
 * Offline verdict queue. A verdict that cannot reach the service is parked
 * here (persisted to storage, keyed by task_id) and replayed on reconnect.
 * One entry per task: re-deciding the same task before delivery overwrites,
 * so replay delivers each verdict exactly once.
 */

import type { DecisionInput } from './types';

export interface StorageLike {
  getItem(key: string): string | null;
  setItem(key: string, value: string): void;
  removeItem(key: string): void;
}

export class MemoryStorage implements StorageLike {
  private map = new Map<string, string>();
  getItem(key: string): string | null {
    return this.map.has(key) ? (this.map.get(key) as string) : null;
  }
  setItem(key: string, value: string): void {
    this.map.set(key, value);
  }
  removeItem(key: string): void {
    this.map.delete(key);
  }
}

const DEFAULT_KEY = 'scanforge-review.pending-verdicts';

export class VerdictQueue {
  constructor(
    private readonly storage: StorageLike,
    private readonly key = DEFAULT_KEY,
  ) {}

  private load(): Record<string, DecisionInput> {
    const raw = this.storage.getItem(this.key);
    if (!raw) return {};
    try {
      return JSON.parse(raw) as Record<string, DecisionInput>;
    } catch {
      return {};
    }
  }

  private save(entries: Record<string, DecisionInput>): void {
    if (Object.keys(entries).length === 0) {
      this.storage.removeItem(this.key);
    } else {
      this.storage.setItem(this.key, JSON.stringify(entries));
    }
  }

  enqueue(decision: DecisionInput): void {
    const entries = this.load();
    entries[decision.task_id] = decision;
    this.save(entries);
  }

  remove(taskId: string): void {
    const entries = this.load();
    delete entries[taskId];
    this.save(entries);
  }

  pending(): DecisionInput[] {
    return Object.values(this.load());
  }

  get size(): number {
    return Object.keys(this.load()).length;
  }
}
