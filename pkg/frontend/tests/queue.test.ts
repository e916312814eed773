import { describe, expect, it } from 'vitest';

import { MemoryStorage, VerdictQueue } from '../src/queue';
import type { DecisionInput } from '../src/types';

const d = (taskId: string, verdict: DecisionInput['verdict'] = 'accept'): DecisionInput => ({
  task_id: taskId,
  verdict,
  reviewer_id: 'r',
});

describe('VerdictQueue', () => {
  it('persists across instances sharing the storage', () => {
    const storage = new MemoryStorage();
    const q1 = new VerdictQueue(storage);
    q1.enqueue(d('a:0:0'));
    q1.enqueue(d('b:0:0'));
    const q2 = new VerdictQueue(storage);
    expect(q2.size).toBe(2);
    expect(q2.pending().map((x) => x.task_id)).toEqual(['a:0:0', 'b:0:0']);
  });

  it('re-deciding the same task overwrites instead of duplicating', () => {
    const q = new VerdictQueue(new MemoryStorage());
    q.enqueue(d('a:0:0', 'accept'));
    q.enqueue(d('a:0:0', 'reject'));
    expect(q.size).toBe(1);
    expect(q.pending()[0]?.verdict).toBe('reject');
  });

  it('remove clears delivered verdicts and empties the storage key', () => {
    const storage = new MemoryStorage();
    const q = new VerdictQueue(storage);
    q.enqueue(d('a:0:0'));
    q.remove('a:0:0');
    expect(q.size).toBe(0);
    expect(storage.getItem('scanforge-review.pending-verdicts')).toBeNull();
  });

  it('survives corrupted storage contents', () => {
    const storage = new MemoryStorage();
    storage.setItem('scanforge-review.pending-verdicts', '{not json');
    const q = new VerdictQueue(storage);
    expect(q.size).toBe(0);
    q.enqueue(d('a:0:0'));
    expect(q.size).toBe(1);
  });
});
