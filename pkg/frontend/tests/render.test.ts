import { describe, expect, it } from 'vitest';

import {
  escapeHtml,
  renderAnswerWorkspace,
  renderError,
  renderRegulatorDashboard,
  renderReviewQueue,
} from '../src/render.js';
import type { QuestionsPayload } from '../src/types.js';
import { question } from './helpers.js';

function payload(partial: Partial<QuestionsPayload> = {}): QuestionsPayload {
  return {
    case: 'transparency',
    version: 7,
    status: 'UnderValidation',
    questions: [],
    ...partial,
  };
}

describe('supplier workspace rendering', () => {
  it('accepted answers render as locked green cards without edit controls', () => {
    const html = renderAnswerWorkspace(payload({ questions: [question('Q1', 'Accepted')] }));
    expect(html).toContain('bg-green');
    expect(html).toContain('locked');
    expect(html).toContain('Accepted · locked');
    expect(html).not.toContain('data-action="submit"');
    expect(html).not.toContain('data-editor');
  });

  it('change-requested answers render red, editable, with validator feedback', () => {
    const q = question('Q1', 'ChangesRequested');
    q.answer!.comments.push({
      author_role: 'EthicsValidator',
      verdict: 'RequestChanges',
      text: 'needs a distribution test reference',
      timestamp: '2026-01-01T00:00:00Z',
      answer_version: 1,
    });
    const html = renderAnswerWorkspace(payload({ questions: [q] }));
    expect(html).toContain('bg-red');
    expect(html).toContain('data-action="submit"');
    expect(html).toContain('data-editor="Q1"');
    expect(html).toContain('needs a distribution test reference');
  });

  it('workspace never contains review controls', () => {
    const html = renderAnswerWorkspace(
      payload({ questions: [question('Q1', 'Submitted'), question('Q2', 'Draft')] }),
    );
    expect(html).not.toContain('data-action="accept"');
    expect(html).not.toContain('data-action="request-changes"');
  });

  it('choice questions render their options as a select', () => {
    const q = question('Q1', null);
    q.type = { kind: 'choice', options: ['Yes', 'No'] };
    const html = renderAnswerWorkspace(payload({ questions: [q] }));
    expect(html).toContain('<select');
    expect(html).toContain('Yes');
  });
});

describe('validator queue rendering', () => {
  it('shows only submitted answers', () => {
    const html = renderReviewQueue(
      payload({ questions: [question('Q1', 'Submitted'), question('Q2', 'Accepted')] }),
    );
    expect(html).toContain('data-question="Q1"');
    expect(html).not.toContain('data-question="Q2"');
    expect(html).toContain('data-action="accept"');
    expect(html).toContain('data-action="request-changes"');
  });

  it('acceptance removes the card on the next rendered payload', () => {
    const before = renderReviewQueue(payload({ questions: [question('Q1', 'Submitted')] }));
    const after = renderReviewQueue(payload({ questions: [question('Q1', 'Accepted')] }));
    expect(before).toContain('data-question="Q1"');
    expect(after).not.toContain('data-question="Q1"');
    expect(after).toContain('Nothing to review.');
  });
});

describe('regulator dashboard rendering', () => {
  it('disables decision controls outside RegulatorReview', () => {
    const html = renderRegulatorDashboard(
      payload({ status: 'Drafting' }),
      null,
      null,
      [],
      { full: '/full', summary: '/summary' },
    );
    expect(html).toContain('regulator-controls disabled');
    expect(html).toContain('<button data-action="approve" disabled>');
  });

  it('shows verdict, matrix, audit and live controls in RegulatorReview', () => {
    const html = renderRegulatorDashboard(
      payload({ status: 'RegulatorReview', questions: [question('Q1', 'Accepted')] }),
      { mitigated: true, root_satisfaction: 100, unresolved: [], threshold: 100 },
      [
        {
          requirement: 'R101.1',
          recommendation: 'DR101.1',
          constraint: 'EC101',
          uaia_or_hazard: 'UAIA101',
          losses: ['L6'],
        },
      ],
      [
        {
          seq: 1,
          actor: 'SystemAdmin',
          action: 'parse_case',
          target: 'transparency',
          timestamp: '2026-01-01T00:00:00Z',
          prior_state: null,
          new_state: null,
        },
      ],
      { full: '/full', summary: '/summary' },
    );
    expect(html).toContain('All hazards mitigated');
    expect(html).toContain('R101.1');
    expect(html).toContain('#1');
    expect(html).toContain('data-flag="Q1"');
    expect(html).not.toContain('disabled>');
  });

  it('offers report downloads only when certified', () => {
    const certified = renderRegulatorDashboard(
      payload({ status: 'Certified' }),
      null,
      null,
      [],
      { full: '/r?kind=full', summary: '/r?kind=summary' },
    );
    expect(certified).toContain('Full report');
    expect(certified).toContain('Summary report');
    const pending = renderRegulatorDashboard(
      payload({ status: 'RegulatorReview' }),
      null,
      null,
      [],
      { full: '/f', summary: '/s' },
    );
    expect(pending).not.toContain('Full report');
  });
});

describe('error banner and escaping', () => {
  it('renders surfaced API errors with their status', () => {
    const html = renderError('role AiSupplier cannot review', 403);
    expect(html).toContain('Error 403');
    expect(html).toContain('role AiSupplier cannot review');
  });

  it('escapes markup in user content', () => {
    expect(escapeHtml('<script>alert("x")</script>')).toBe(
      '&lt;script&gt;alert(&quot;x&quot;)&lt;/script&gt;',
    );
    const q = question('Q1', null);
    q.text = 'is <b>bold</b> & "quoted"?';
    const html = renderAnswerWorkspace(payload({ questions: [q] }));
    expect(html).toContain('is &lt;b&gt;bold&lt;/b&gt; &amp; &quot;quoted&quot;?');
  });
});

describe('metric question cards', () => {
  it('offer no save button; uploads happen via the API or CLI', () => {
    const q = question('Q1', null);
    q.type = { kind: 'metric', metric: 'faithfulness' };
    const html = renderAnswerWorkspace(payload({ questions: [q] }));
    expect(html).not.toContain('data-action="save"');
    expect(html).toContain('upload the input CSV');
  });
});
