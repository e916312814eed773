/** Wire shapes of the review service plus the view model the UI renders. */

export type Verdict = 'accept' | 'reject' | 'edit';

/** Raw task as served by GET /tasks/next. */
export interface TaskWire {
  task_id: string;
  scene_id: string;
  instance_id: number;
  category: string;
  question_text: string;
  dense_referring_expression: string;
  image_paths: {
    crop?: string;
    highlight?: string;
    context?: string[];
  };
  state: string;
}

export interface Progress {
  open: number;
  decided: number;
  total: number;
  accept_rate: number;
}

export interface DecisionInput {
  task_id: string;
  verdict: Verdict;
  reviewer_id: string;
  edited_text?: string;
}

/** Task plus resolved image URLs; images are exactly the service's assets. */
export interface TaskView {
  taskId: string;
  sceneId: string;
  instanceId: number;
  category: string;
  questionText: string;
  denseReferringExpression: string;
  highlightUrl: string | null;
  cropUrl: string | null;
  contextUrls: string[];
}

export function toTaskView(wire: TaskWire, imageBase = '/images'): TaskView {
  const resolve = (p: string | undefined | null): string | null =>
    p ? `${imageBase}/${p}` : null;
  return {
    taskId: wire.task_id,
    sceneId: wire.scene_id,
    instanceId: wire.instance_id,
    category: wire.category,
    questionText: wire.question_text,
    denseReferringExpression: wire.dense_referring_expression,
    highlightUrl: resolve(wire.image_paths?.highlight),
    cropUrl: resolve(wire.image_paths?.crop),
    contextUrls: (wire.image_paths?.context ?? []).map((p) => `${imageBase}/${p}`),
  };
}
