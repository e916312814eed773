/**
 * In-memory double of the review service with the same endpoint semantics,
 * exposed as a fetch-compatible function so tests drive the real client
 * code path.
 */

import type { DecisionInput, Progress, TaskWire } from '../src/types';

export interface StubService {
  fetchFn: typeof fetch;
  decisions: Map<string, DecisionInput>;
  progress(): Progress;
  /** When true every request rejects like a dead network. */
  offline: boolean;
  requests: string[];
}

export function makeTask(i: number): TaskWire {
  return {
    task_id: `scene${i}:0:0`,
    scene_id: `scene${i}`,
    instance_id: 0,
    category: 'chair',
    question_text: `question ${i}`,
    dense_referring_expression: `expression ${i}`,
    image_paths: { highlight: `scene${i}/0/highlight.png`, context: [`scene${i}/0/ctx_0.png`] },
    state: 'open',
  };
}

export function makeStubService(tasks: TaskWire[]): StubService {
  const decisions = new Map<string, DecisionInput>();
  const leases = new Map<string, string>();

  const progress = (): Progress => {
    const decided = decisions.size;
    const kept = [...decisions.values()].filter(
      (d) => d.verdict === 'accept' || d.verdict === 'edit',
    ).length;
    return {
      open: tasks.length - decided,
      decided,
      total: tasks.length,
      accept_rate: decided ? kept / decided : 0,
    };
  };

  const service: StubService = {
    decisions,
    progress,
    offline: false,
    requests: [],
    fetchFn: (async (input: RequestInfo | URL, init?: RequestInit): Promise<Response> => {
      const url = String(input);
      service.requests.push(`${init?.method ?? 'GET'} ${url}`);
      if (service.offline) throw new TypeError('network down');

      if (url.includes('/tasks/next')) {
        const reviewer = new URL(url, 'http://x').searchParams.get('reviewer') ?? 'anon';
        for (const task of tasks) {
          if (decisions.has(task.task_id)) continue;
          const holder = leases.get(task.task_id);
          if (holder && holder !== reviewer) continue;
          leases.set(task.task_id, reviewer);
          return new Response(JSON.stringify(task), { status: 200 });
        }
        return new Response(null, { status: 204 });
      }
      if (url.includes('/decisions')) {
        const body = JSON.parse(String(init?.body)) as DecisionInput;
        if (!tasks.some((t) => t.task_id === body.task_id)) {
          return new Response('{"detail": "no such task"}', { status: 404 });
        }
        const existing = decisions.get(body.task_id);
        if (existing && existing.reviewer_id !== body.reviewer_id) {
          return new Response('{"detail": "conflict"}', { status: 409 });
        }
        if (body.verdict === 'edit' && !body.edited_text?.trim()) {
          return new Response('{"detail": "edit needs text"}', { status: 422 });
        }
        decisions.set(body.task_id, body);
        return new Response(JSON.stringify(body), { status: 201 });
      }
      if (url.includes('/progress')) {
        return new Response(JSON.stringify(progress()), { status: 200 });
      }
      return new Response('not found', { status: 404 });
    }) as typeof fetch,
  };
  return service;
}
