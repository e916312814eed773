/**
 * The single-task review loop: fetch a task, capture one verdict, deliver
 * it, advance. All counters come from /progress after each change; the UI
 * never keeps its own tallies. Verdicts that cannot be delivered are queued
 * durably and replayed before anything else on the next attempt, so nothing
 * is ever dropped silently.
 */

import type { PostResult, ReviewApi } from './api';
import type { VerdictQueue } from './queue';
import type { DecisionInput, Progress, TaskView, Verdict } from './types';

export type Phase = 'loading' | 'task' | 'editing' | 'empty' | 'offline';

export interface LoopState {
  phase: Phase;
  task: TaskView | null;
  progress: Progress | null;
  pendingVerdicts: number;
  banner: string | null;
}

export class TaskLoop {
  private state: LoopState = {
    phase: 'loading',
    task: null,
    progress: null,
    pendingVerdicts: 0,
    banner: null,
  };

  constructor(
    private readonly api: ReviewApi,
    private readonly queue: VerdictQueue,
    private readonly reviewer: string,
    private readonly onChange: (state: LoopState) => void = () => {},
  ) {}

  snapshot(): LoopState {
    return { ...this.state };
  }

  private update(patch: Partial<LoopState>): void {
    this.state = { ...this.state, ...patch, pendingVerdicts: this.queue.size };
    this.onChange(this.snapshot());
  }

  /** Replay queued verdicts, refresh progress, fetch the next task. */
  async start(): Promise<void> {
    this.update({ phase: 'loading', banner: null });
    try {
      await this.flushQueue();
      const progress = await this.api.progress();
      const task = await this.api.nextTask(this.reviewer);
      this.update({
        phase: task ? 'task' : 'empty',
        task,
        progress,
        banner: null,
      });
    } catch {
      this.update({
        phase: 'offline',
        banner: 'Cannot reach the review service. Verdicts are kept locally; retry when back online.',
      });
    }
  }

  beginEdit(): void {
    if (this.state.phase === 'task') this.update({ phase: 'editing' });
  }

  cancelEdit(): void {
    if (this.state.phase === 'editing') this.update({ phase: 'task' });
  }

  /** Deliver one verdict for the current task and advance. */
  async submit(verdict: Verdict, editedText?: string): Promise<void> {
    const task = this.state.task;
    if (!task) return;
    if (verdict === 'edit' && !editedText?.trim()) return; // submit stays disabled
    const decision: DecisionInput = {
      task_id: task.taskId,
      verdict,
      reviewer_id: this.reviewer,
      ...(verdict === 'edit' ? { edited_text: editedText } : {}),
    };
    try {
      await this.deliver(decision);
    } catch {
      // park it durably; the task is considered handled locally
      this.queue.enqueue(decision);
      this.update({
        phase: 'offline',
        task: null,
        banner: 'Verdict saved locally; it will be delivered on reconnect.',
      });
      return;
    }
    await this.start();
  }

  private async deliver(decision: DecisionInput): Promise<PostResult> {
    const result = await this.api.postDecision(decision);
    this.queue.remove(decision.task_id);
    return result;
  }

  private async flushQueue(): Promise<void> {
    for (const decision of this.queue.pending()) {
      // a 409 marks the verdict obsolete (someone else decided); deliver()
      // removes it either way, so each queued verdict is sent exactly once
      await this.deliver(decision);
    }
  }
}
