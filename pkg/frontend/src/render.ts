/** DOM rendering for the loop state. Pure: state in, DOM out. */

import type { LoopState } from './loop';

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function render(root: HTMLElement, state: LoopState): void {
  root.replaceChildren();

  const header = el('header');
  header.append(el('h1', 'title', 'Question review'));
  if (state.progress) {
    const p = state.progress;
    header.append(
      el(
        'div',
        'progress',
        `${p.decided} decided / ${p.open} open of ${p.total} — accept rate ${(p.accept_rate * 100).toFixed(0)}%`,
      ),
    );
  }
  if (state.pendingVerdicts > 0) {
    header.append(el('div', 'pending', `${state.pendingVerdicts} verdict(s) queued locally`));
  }
  root.append(header);

  if (state.banner) {
    const banner = el('div', 'banner', state.banner);
    const retry = el('button', 'retry', 'Retry');
    retry.id = 'retry';
    banner.append(retry);
    root.append(banner);
  }

  if (state.phase === 'loading') {
    root.append(el('p', 'status', 'Loading…'));
    return;
  }
  if (state.phase === 'empty') {
    const p = state.progress;
    root.append(
      el(
        'p',
        'status',
        p
          ? `Queue empty. Final accept rate: ${(p.accept_rate * 100).toFixed(1)}%`
          : 'Queue empty.',
      ),
    );
    return;
  }
  if (!state.task) return;

  const task = state.task;
  const main = el('main');

  if (task.highlightUrl) {
    const figure = el('figure', 'highlight');
    const img = el('img');
    img.src = task.highlightUrl;
    img.alt = `highlighted ${task.category}`;
    figure.append(img);
    main.append(figure);
  }

  if (task.contextUrls.length) {
    const strip = el('div', 'context-strip');
    for (const url of task.contextUrls) {
      const thumb = el('img', 'thumb');
      thumb.src = url;
      thumb.alt = 'context frame';
      thumb.addEventListener('click', () => thumb.classList.toggle('zoomed'));
      strip.append(thumb);
    }
    main.append(strip);
  }

  const texts = el('section', 'texts');
  texts.append(el('h2', undefined, `${task.category} — ${task.sceneId} #${task.instanceId}`));
  texts.append(el('p', 'expression', task.denseReferringExpression));
  texts.append(el('p', 'question', task.questionText));
  main.append(texts);

  const controls = el('div', 'controls');
  if (state.phase === 'editing') {
    const box = el('textarea', 'edit-box') as HTMLTextAreaElement;
    box.id = 'edit-box';
    box.value = task.questionText;
    const submit = el('button', 'submit', 'Save edit (Enter)') as HTMLButtonElement;
    submit.id = 'submit-edit';
    submit.disabled = box.value.trim().length === 0;
    box.addEventListener('input', () => {
      submit.disabled = box.value.trim().length === 0;
    });
    const cancel = el('button', undefined, 'Cancel (Esc)');
    cancel.id = 'cancel-edit';
    controls.append(box, submit, cancel);
  } else {
    const accept = el('button', 'accept', 'Accept (A)');
    accept.id = 'accept';
    const reject = el('button', 'reject', 'Reject (R)');
    reject.id = 'reject';
    const edit = el('button', 'edit', 'Edit (E)');
    edit.id = 'edit';
    controls.append(accept, reject, edit);
  }
  main.append(controls);
  root.append(main);
}
