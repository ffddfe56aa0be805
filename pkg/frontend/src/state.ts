// Pure view-model logic: everything here derives straight from API payloads
// so the UI can never drift from server state.

import type { AnswerStatus, CaseStatus, QuestionDoc, Role } from './types.js';

export type BackgroundState = 'neutral' | 'green' | 'red';

export interface QuestionCardViewModel {
  question: QuestionDoc;
  background: BackgroundState;
  editable: boolean;
  submittable: boolean;
  locked: boolean;
}

/** Card background is a pure function of the answer status. */
export function backgroundState(status: AnswerStatus | null): BackgroundState {
  if (status === 'Accepted') return 'green';
  if (status === 'ChangesRequested') return 'red';
  return 'neutral';
}

/** Suppliers may edit unanswered, drafted, or change-requested answers. */
export function isEditable(status: AnswerStatus | null): boolean {
  return status === null || status === 'Draft' || status === 'ChangesRequested';
}

export function cardViewModel(question: QuestionDoc): QuestionCardViewModel {
  const status = question.answer?.status ?? null;
  return {
    question,
    background: backgroundState(status),
    editable: isEditable(status),
    submittable: status === 'Draft' || status === 'ChangesRequested',
    locked: status === 'Accepted',
  };
}

/** The validator queue holds exactly the submitted answers. */
export function reviewQueue(questions: QuestionDoc[]): QuestionDoc[] {
  return questions.filter((q) => q.answer?.status === 'Submitted');
}

/** Group cards by principle, then segment, then lifecycle stage. */
export function groupedWorkspace(
  questions: QuestionDoc[],
): Map<string, Map<string, QuestionDoc[]>> {
  const byPrinciple = new Map<string, Map<string, QuestionDoc[]>>();
  for (const question of questions) {
    if (question.retired) continue;
    let segments = byPrinciple.get(question.principle);
    if (!segments) {
      segments = new Map();
      byPrinciple.set(question.principle, segments);
    }
    const key = `${question.segment} / ${question.stage}`;
    const bucket = segments.get(key) ?? [];
    bucket.push(question);
    segments.set(key, bucket);
  }
  return byPrinciple;
}

export type ViewName = 'workspace' | 'queue' | 'dashboard';

/** Role gating, first line of defense (the server enforces it again). */
export function visibleViews(role: Role): ViewName[] {
  switch (role) {
    case 'AiSupplier':
      return ['workspace'];
    case 'EthicsValidator':
      return ['queue'];
    case 'Regulator':
      return ['dashboard'];
    case 'AiSupplierAdmin':
    case 'SystemAdmin':
      return ['workspace', 'queue', 'dashboard'];
    default:
      return [];
  }
}

export function regulatorControlsEnabled(status: CaseStatus): boolean {
  return status === 'RegulatorReview';
}

export function reportDownloadsVisible(status: CaseStatus): boolean {
  return status === 'Certified';
}

/** Client-side mirror of the server's EmptyFlagList rule. */
export function validateFlagSelection(selected: string[]): string | null {
  return selected.length === 0 ? 'Select at least one question to flag.' : null;
}

/** Client-side mirror of the non-empty review comment rule. */
export function validateRequestChanges(comment: string): string | null {
  return comment.trim() === '' ? 'Requesting changes needs a comment.' : null;
}
