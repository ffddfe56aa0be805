// HTML renderers. Pure string builders over view models; main.ts wires the
// produced markup to API calls via event delegation.

import {
  cardViewModel,
  groupedWorkspace,
  regulatorControlsEnabled,
  reportDownloadsVisible,
  reviewQueue,
} from './state.js';
import type {
  AuditRecordDoc,
  MatrixRowDoc,
  QuestionDoc,
  QuestionsPayload,
  VerdictPayload,
} from './types.js';

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;')
    .replace(/'/g, '&#39;');
}

function commentThread(question: QuestionDoc): string {
  const comments = question.answer?.comments ?? [];
  if (comments.length === 0) return '';
  const items = comments
    .map(
      (c) =>
        `<li class="comment ${c.verdict === 'Accept' ? 'comment-accept' : 'comment-changes'}">
          <span class="comment-meta">${escapeHtml(c.author_role)} · ${escapeHtml(c.verdict)} · v${c.answer_version}</span>
          ${escapeHtml(c.text)}
        </li>`,
    )
    .join('');
  return `<ul class="comments">${items}</ul>`;
}

function answerSummary(question: QuestionDoc): string {
  const answer = question.answer;
  if (!answer) return '<p class="answer-body empty">Unanswered.</p>';
  const content = answer.content;
  if (content.type === 'text') {
    return `<p class="answer-body">${escapeHtml(content.body ?? '')}</p>`;
  }
  if (content.type === 'choice') {
    const options = question.type.options ?? [];
    const label = options[content.index ?? -1] ?? `option ${content.index}`;
    return `<p class="answer-body">Selected: ${escapeHtml(label)}</p>`;
  }
  if (content.value === null || content.value === undefined) {
    return `<p class="answer-body failed">Metric failed: ${escapeHtml(content.error ?? 'unknown')}</p>`;
  }
  return `<p class="answer-body">Metric ${escapeHtml(content.metric ?? '')} = ${content.value.toFixed(6)}
    <span class="digest">sha256 ${escapeHtml((content.inputs_digest ?? '').slice(0, 12))}…</span></p>`;
}

function answerEditor(question: QuestionDoc): string {
  const qid = escapeHtml(question.id);
  if (question.type.kind === 'choice') {
    const options = (question.type.options ?? [])
      .map((option, i) => `<option value="${i}">${escapeHtml(option)}</option>`)
      .join('');
    return `<select class="editor" data-editor="${qid}">${options}</select>`;
  }
  if (question.type.kind === 'metric') {
    return `<p class="hint">Algorithmic question (${escapeHtml(question.type.metric ?? '')}):
      upload the input CSV with the API or CLI; the recorded result appears here.</p>`;
  }
  return `<textarea class="editor" data-editor="${qid}" rows="3" placeholder="Describe the evidence"></textarea>`;
}

/** Supplier view: editable drafts, locked accepted answers, submit buttons. */
export function renderAnswerWorkspace(payload: QuestionsPayload): string {
  const groups = groupedWorkspace(payload.questions);
  const sections: string[] = [];
  for (const [principle, segments] of groups) {
    const blocks: string[] = [];
    for (const [segment, questions] of segments) {
      const cards = questions.map((question) => {
        const vm = cardViewModel(question);
        const qid = escapeHtml(question.id);
        return `<article class="card bg-${vm.background}${vm.locked ? ' locked' : ''}" data-question="${qid}">
          <header><span class="qid">${qid}</span> <span class="status">${escapeHtml(
            question.answer?.status ?? 'Unanswered',
          )}</span></header>
          <p class="question-text">${escapeHtml(question.text)}</p>
          ${answerSummary(question)}
          ${commentThread(question)}
          ${vm.editable ? answerEditor(question) : ''}
          <footer>
            ${
              vm.editable && question.type.kind !== 'metric'
                ? `<button data-action="save" data-question="${qid}">Save draft</button>`
                : ''
            }
            ${vm.submittable ? `<button data-action="submit" data-question="${qid}">Submit for review</button>` : ''}
            ${vm.locked ? '<span class="lock-note">Accepted · locked</span>' : ''}
          </footer>
        </article>`;
      });
      blocks.push(`<section class="segment"><h3>${escapeHtml(segment)}</h3>${cards.join('')}</section>`);
    }
    sections.push(`<section class="principle"><h2>${escapeHtml(principle)}</h2>${blocks.join('')}</section>`);
  }
  return `<div class="workspace" data-case-version="${payload.version}">
    <p class="case-status">Case status: <strong>${escapeHtml(payload.status)}</strong></p>
    ${sections.join('') || '<p class="empty">No questions in this case.</p>'}
  </div>`;
}

/** Validator view: only submitted answers, with accept / request-changes. */
export function renderReviewQueue(payload: QuestionsPayload): string {
  const queue = reviewQueue(payload.questions);
  const cards = queue.map((question) => {
    const qid = escapeHtml(question.id);
    return `<article class="card bg-neutral" data-question="${qid}">
      <header><span class="qid">${qid}</span> <span class="status">Submitted · v${question.answer?.version ?? 0}</span></header>
      <p class="question-text">${escapeHtml(question.text)}</p>
      ${answerSummary(question)}
      ${commentThread(question)}
      <textarea class="review-comment" data-comment="${qid}" rows="2" placeholder="Feedback to the supplier"></textarea>
      <footer>
        <button data-action="accept" data-question="${qid}">Accept</button>
        <button data-action="request-changes" data-question="${qid}">Request changes</button>
      </footer>
    </article>`;
  });
  return `<div class="queue" data-case-version="${payload.version}">
    <p class="case-status">Case status: <strong>${escapeHtml(payload.status)}</strong> ·
      ${queue.length} answer(s) awaiting review</p>
    ${cards.join('') || '<p class="empty">Nothing to review.</p>'}
  </div>`;
}

/** Regulator view: status, verdict, flag/approve, matrix, audit timeline. */
export function renderRegulatorDashboard(
  payload: QuestionsPayload,
  verdict: VerdictPayload | null,
  matrix: MatrixRowDoc[] | null,
  audit: AuditRecordDoc[],
  reportBase: { full: string; summary: string },
): string {
  const controls = regulatorControlsEnabled(payload.status);
  const checkboxes = payload.questions
    .filter((q) => q.answer?.status === 'Accepted')
    .map(
      (q) =>
        `<label class="flag-option"><input type="checkbox" data-flag="${escapeHtml(q.id)}"> ${escapeHtml(q.id)}</label>`,
    )
    .join('');
  const verdictBlock = verdict
    ? `<p class="verdict ${verdict.mitigated ? 'verdict-good' : 'verdict-bad'}">
        ${verdict.mitigated ? 'All hazards mitigated' : 'Unresolved hazards remain'}
        (root satisfaction ${verdict.root_satisfaction}, threshold ${verdict.threshold})
        ${verdict.unresolved.length ? ' · unresolved: ' + verdict.unresolved.map(escapeHtml).join(', ') : ''}
      </p>`
    : '<p class="verdict">Verdict unavailable.</p>';
  const matrixBlock = matrix
    ? `<table class="matrix"><thead><tr>
        <th>Requirement</th><th>Recommendation</th><th>Constraint</th><th>Hazard/Action</th><th>Losses</th>
      </tr></thead><tbody>${matrix
        .map(
          (row) => `<tr><td>${escapeHtml(row.requirement)}</td><td>${escapeHtml(row.recommendation)}</td>
            <td>${escapeHtml(row.constraint)}</td><td>${escapeHtml(row.uaia_or_hazard)}</td>
            <td>${row.losses.map(escapeHtml).join('; ')}</td></tr>`,
        )
        .join('')}</tbody></table>`
    : '<p class="empty">Trace matrix unavailable (case incomplete).</p>';
  const auditBlock = audit
    .map(
      (record) => `<li><span class="seq">#${record.seq}</span> ${escapeHtml(record.timestamp)}
        <strong>${escapeHtml(record.action)}</strong> ${escapeHtml(record.target)}
        ${record.new_state ? '→ ' + escapeHtml(record.new_state) : ''} (${escapeHtml(record.actor)})</li>`,
    )
    .join('');
  const downloads = reportDownloadsVisible(payload.status)
    ? `<p class="downloads">
        <a href="${reportBase.full}" download>Full report</a> ·
        <a href="${reportBase.summary}" download>Summary report</a>
      </p>`
    : '';
  return `<div class="dashboard" data-case-version="${payload.version}">
    <p class="case-status">Case status: <strong>${escapeHtml(payload.status)}</strong></p>
    ${verdictBlock}
    ${downloads}
    <section class="regulator-controls${controls ? '' : ' disabled'}">
      <h3>Regulator decision</h3>
      <div class="flag-list">${checkboxes || '<span class="empty">No accepted answers yet.</span>'}</div>
      <textarea class="regulator-comment" data-regulator-comment rows="2" placeholder="Comment"></textarea>
      <footer>
        <button data-action="approve" ${controls ? '' : 'disabled'}>Approve (certify)</button>
        <button data-action="flag" ${controls ? '' : 'disabled'}>Flag selected</button>
      </footer>
    </section>
    <section><h3>Traceability matrix</h3>${matrixBlock}</section>
    <section><h3>Audit timeline</h3><ol class="audit">${auditBlock}</ol></section>
  </div>`;
}

export function renderError(message: string, status?: number): string {
  const label = status ? `Error ${status}` : 'Error';
  return `<div class="error-banner" role="alert"><strong>${label}:</strong> ${escapeHtml(message)}</div>`;
}
