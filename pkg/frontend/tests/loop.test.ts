import { describe, expect, it } from 'vitest';

import { ReviewApi } from '../src/api';
import { TaskLoop } from '../src/loop';
import { MemoryStorage, VerdictQueue } from '../src/queue';
import { makeStubService, makeTask } from './stub_service';

function makeLoop(service: ReturnType<typeof makeStubService>, reviewer = 'alice') {
  const api = new ReviewApi('http://svc', service.fetchFn);
  const queue = new VerdictQueue(new MemoryStorage());
  return { loop: new TaskLoop(api, queue, reviewer), queue };
}

describe('task loop round trips', () => {
  it('accept advances and mirrors /progress exactly', async () => {
    const service = makeStubService([makeTask(1), makeTask(2)]);
    const { loop } = makeLoop(service);
    await loop.start();
    expect(loop.snapshot().phase).toBe('task');
    expect(loop.snapshot().task?.taskId).toBe('scene1:0:0');

    await loop.submit('accept');
    const state = loop.snapshot();
    // the displayed counters are the service's own numbers
    expect(state.progress).toEqual(service.progress());
    expect(state.progress?.decided).toBe(1);
    expect(state.task?.taskId).toBe('scene2:0:0');
  });

  it('reject and edit round-trip too', async () => {
    const service = makeStubService([makeTask(1), makeTask(2)]);
    const { loop } = makeLoop(service);
    await loop.start();
    await loop.submit('reject');
    expect(service.decisions.get('scene1:0:0')?.verdict).toBe('reject');

    loop.beginEdit();
    expect(loop.snapshot().phase).toBe('editing');
    await loop.submit('edit', 'a sharper question');
    expect(service.decisions.get('scene2:0:0')).toMatchObject({
      verdict: 'edit',
      edited_text: 'a sharper question',
    });
    expect(loop.snapshot().progress).toEqual(service.progress());
  });

  it('empty queue shows the final accept rate from the service', async () => {
    const service = makeStubService([makeTask(1)]);
    const { loop } = makeLoop(service);
    await loop.start();
    await loop.submit('accept');
    const state = loop.snapshot();
    expect(state.phase).toBe('empty');
    expect(state.task).toBeNull();
    expect(state.progress?.accept_rate).toBe(1);
  });

  it('edit without text is refused before any network call', async () => {
    const service = makeStubService([makeTask(1)]);
    const { loop } = makeLoop(service);
    await loop.start();
    const requestsBefore = service.requests.length;
    await loop.submit('edit', '   ');
    expect(service.requests.length).toBe(requestsBefore);
    expect(loop.snapshot().task?.taskId).toBe('scene1:0:0');
  });
});

describe('offline behaviour', () => {
  it('queues the verdict durably and replays it exactly once on reconnect', async () => {
    const service = makeStubService([makeTask(1), makeTask(2)]);
    const { loop, queue } = makeLoop(service);
    await loop.start();

    service.offline = true;
    await loop.submit('accept');
    expect(loop.snapshot().phase).toBe('offline');
    expect(loop.snapshot().banner).toMatch(/reconnect/i);
    expect(queue.size).toBe(1);
    expect(service.decisions.size).toBe(0);

    service.offline = false;
    await loop.start();
    expect(service.decisions.get('scene1:0:0')?.verdict).toBe('accept');
    expect(queue.size).toBe(0);
    expect(loop.snapshot().progress).toEqual(service.progress());

    // exactly two POSTs: the dead offline attempt and the single replay
    const posts = service.requests.filter((r) => r.startsWith('POST'));
    expect(posts.length).toBe(2);
    expect(service.progress().decided).toBe(1);
  });

  it('a queued verdict superseded by another reviewer drains without error', async () => {
    const service = makeStubService([makeTask(1)]);
    const alice = makeLoop(service, 'alice');
    await alice.loop.start();
    service.offline = true;
    await alice.loop.submit('accept');
    service.offline = false;

    // bob decides the same task while alice is offline
    const bobApi = new ReviewApi('http://svc', service.fetchFn);
    await bobApi.postDecision({ task_id: 'scene1:0:0', verdict: 'reject', reviewer_id: 'bob' });
    expect(service.decisions.get('scene1:0:0')?.reviewer_id).toBe('bob');

    await alice.loop.start(); // replays alice's stale verdict -> 409 -> dropped
    expect(alice.queue.size).toBe(0);
    expect(service.decisions.get('scene1:0:0')?.verdict).toBe('reject');
    expect(alice.loop.snapshot().phase).toBe('empty');
  });
});
