/** Thin typed client for the review service JSON endpoints. */

import type { DecisionInput, Progress, TaskView, TaskWire } from './types';
import { toTaskView } from './types';

export class ApiError extends Error {
  constructor(
    message: string,
    readonly status: number,
  ) {
    super(message);
  }
}

/** Decision outcome: delivered, or superseded by another reviewer (409). */
export type PostResult = 'recorded' | 'conflict';

export class ReviewApi {
  constructor(
    private readonly baseUrl = '',
    private readonly fetchFn: typeof fetch = fetch.bind(globalThis),
  ) {}

  /** Next open task for this reviewer, or null when the queue is empty. */
  async nextTask(reviewer: string): Promise<TaskView | null> {
    const resp = await this.fetchFn(
      `${this.baseUrl}/tasks/next?reviewer=${encodeURIComponent(reviewer)}`,
    );
    if (resp.status === 204) return null;
    if (!resp.ok) throw new ApiError(`GET /tasks/next -> ${resp.status}`, resp.status);
    const wire = (await resp.json()) as TaskWire;
    return toTaskView(wire);
  }

  /**
   * Deliver one verdict. A 409 means another reviewer already decided the
   * task; the verdict is obsolete, not retryable, so it reports 'conflict'
   * rather than throwing.
   */
  async postDecision(decision: DecisionInput): Promise<PostResult> {
    const resp = await this.fetchFn(`${this.baseUrl}/decisions`, {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify(decision),
    });
    if (resp.status === 201) return 'recorded';
    if (resp.status === 409) return 'conflict';
    throw new ApiError(`POST /decisions -> ${resp.status}`, resp.status);
  }

  /** Live counters; the UI renders these verbatim, never its own tallies. */
  async progress(): Promise<Progress> {
    const resp = await this.fetchFn(`${this.baseUrl}/progress`);
    if (!resp.ok) throw new ApiError(`GET /progress -> ${resp.status}`, resp.status);
    return (await resp.json()) as Progress;
  }
}
