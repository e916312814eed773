import { describe, expect, it } from 'vitest';

import { ApiError, ReviewApi } from '../src/api';
import { toTaskView } from '../src/types';
import { makeStubService, makeTask } from './stub_service';

describe('ReviewApi', () => {
  it('maps the wire task and resolves image urls against /images', async () => {
    const service = makeStubService([makeTask(7)]);
    const api = new ReviewApi('http://svc', service.fetchFn);
    const task = await api.nextTask('alice');
    expect(task).not.toBeNull();
    expect(task?.taskId).toBe('scene7:0:0');
    expect(task?.highlightUrl).toBe('/images/scene7/0/highlight.png');
    expect(task?.contextUrls).toEqual(['/images/scene7/0/ctx_0.png']);
    expect(task?.cropUrl).toBeNull();
  });

  it('204 means the queue is empty', async () => {
    const service = makeStubService([]);
    const api = new ReviewApi('http://svc', service.fetchFn);
    expect(await api.nextTask('alice')).toBeNull();
  });

  it('409 on a decision reports conflict instead of throwing', async () => {
    const service = makeStubService([makeTask(1)]);
    const api = new ReviewApi('http://svc', service.fetchFn);
    await api.postDecision({ task_id: 'scene1:0:0', verdict: 'accept', reviewer_id: 'a' });
    const result = await api.postDecision({
      task_id: 'scene1:0:0',
      verdict: 'reject',
      reviewer_id: 'b',
    });
    expect(result).toBe('conflict');
  });

  it('other failures throw ApiError with the status', async () => {
    const service = makeStubService([]);
    const api = new ReviewApi('http://svc', service.fetchFn);
    await expect(
      api.postDecision({ task_id: 'nope:0:0', verdict: 'accept', reviewer_id: 'a' }),
    ).rejects.toThrowError(ApiError);
  });

  it('progress returns the service numbers untouched', async () => {
    const service = makeStubService([makeTask(1), makeTask(2)]);
    const api = new ReviewApi('http://svc', service.fetchFn);
    await api.postDecision({ task_id: 'scene1:0:0', verdict: 'accept', reviewer_id: 'a' });
    expect(await api.progress()).toEqual(service.progress());
  });
});

describe('toTaskView', () => {
  it('tolerates missing image paths', () => {
    const view = toTaskView({ ...makeTask(1), image_paths: {} });
    expect(view.highlightUrl).toBeNull();
    expect(view.contextUrls).toEqual([]);
  });
});
