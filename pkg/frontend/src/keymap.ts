/** Keyboard-first verdict capture: A accept, R reject, E edit. */

export type KeyAction = 'accept' | 'reject' | 'edit' | 'submit-edit' | 'cancel-edit';

interface KeyEventLike {
  key: string;
  target?: unknown;
  metaKey?: boolean;
  ctrlKey?: boolean;
  altKey?: boolean;
}

function isTypingTarget(target: unknown): boolean {
  if (typeof HTMLElement === 'undefined' || !(target instanceof HTMLElement)) return false;
  return (
    target instanceof HTMLInputElement ||
    target instanceof HTMLTextAreaElement ||
    target.isContentEditable
  );
}

/**
 * Map a keydown to a verdict action. While the reviewer is typing an edit,
 * only Enter (submit) and Escape (cancel) count; letters go to the text box.
 */
export function actionForKey(event: KeyEventLike, editing: boolean): KeyAction | null {
  if (event.metaKey || event.ctrlKey || event.altKey) return null;
  if (editing) {
    if (event.key === 'Enter') return 'submit-edit';
    if (event.key === 'Escape') return 'cancel-edit';
    return null;
  }
  if (isTypingTarget(event.target)) return null;
  switch (event.key.toLowerCase()) {
    case 'a':
      return 'accept';
    case 'r':
      return 'reject';
    case 'e':
      return 'edit';
    default:
      return null;
  }
}
