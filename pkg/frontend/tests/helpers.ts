import type { AnswerStatus, QuestionDoc } from '../src/types.js';

export function question(id: string, status: AnswerStatus | null): QuestionDoc {
  return {
    id,
    principle: 'transparency',
    segment: 'explainability',
    stage: 'Design',
    desideratum: 'Complete',
    type: { kind: 'extended' },
    text: `question ${id}`,
    requirement_links: ['R101.1'],
    retired: false,
    answer:
      status === null
        ? null
        : {
            status,
            version: 1,
            content: { type: 'text', body: 'an answer' },
            comments: [],
          },
  };
}
