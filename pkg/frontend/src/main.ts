/** Browser bootstrap: wire the loop, renderer, and keyboard together. */

import { ReviewApi } from './api';
import { actionForKey } from './keymap';
import { TaskLoop } from './loop';
import { VerdictQueue } from './queue';
import { render } from './render';

function reviewerId(): string {
  const params = new URLSearchParams(window.location.search);
  const fromUrl = params.get('reviewer');
  if (fromUrl) {
    window.localStorage.setItem('scanforge-review.reviewer', fromUrl);
    return fromUrl;
  }
  let stored = window.localStorage.getItem('scanforge-review.reviewer');
  if (!stored) {
    stored = window.prompt('Reviewer id:', 'reviewer') || 'anonymous';
    window.localStorage.setItem('scanforge-review.reviewer', stored);
  }
  return stored;
}

function start(): void {
  const root = document.getElementById('app');
  if (!root) throw new Error('missing #app element');

  const api = new ReviewApi('');
  const queue = new VerdictQueue(window.localStorage);
  const loop = new TaskLoop(api, queue, reviewerId(), (state) => {
    render(root, state);
    wire(state.phase);
  });

  function wire(phase: string): void {
    document.getElementById('accept')?.addEventListener('click', () => loop.submit('accept'));
    document.getElementById('reject')?.addEventListener('click', () => loop.submit('reject'));
    document.getElementById('edit')?.addEventListener('click', () => loop.beginEdit());
    document.getElementById('retry')?.addEventListener('click', () => loop.start());
    document.getElementById('cancel-edit')?.addEventListener('click', () => loop.cancelEdit());
    document.getElementById('submit-edit')?.addEventListener('click', () => {
      const box = document.getElementById('edit-box') as HTMLTextAreaElement | null;
      if (box) loop.submit('edit', box.value);
    });
    if (phase === 'editing') {
      (document.getElementById('edit-box') as HTMLTextAreaElement | null)?.focus();
    }
  }

  window.addEventListener('keydown', (event) => {
    const editing = loop.snapshot().phase === 'editing';
    const action = actionForKey(event, editing);
    if (!action) return;
    event.preventDefault();
    if (action === 'accept') void loop.submit('accept');
    else if (action === 'reject') void loop.submit('reject');
    else if (action === 'edit') loop.beginEdit();
    else if (action === 'cancel-edit') loop.cancelEdit();
    else if (action === 'submit-edit') {
      const box = document.getElementById('edit-box') as HTMLTextAreaElement | null;
      if (box && box.value.trim()) void loop.submit('edit', box.value);
    }
  });

  void loop.start();
}

start();
