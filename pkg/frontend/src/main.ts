// Application bootstrap: session form, view switching, event wiring.
// Every mutation round-trips through the API and then re-fetches the
// payload; no status is ever transitioned locally.

import { ApiClient, ApiError } from './api.js';
import { Poller } from './poll.js';
import {
  renderAnswerWorkspace,
  renderError,
  renderRegulatorDashboard,
  renderReviewQueue,
} from './render.js';
import {
  validateFlagSelection,
  validateRequestChanges,
  visibleViews,
  type ViewName,
} from './state.js';
import type { ClientConfig, QuestionsPayload, Role, SessionContext } from './types.js';

interface AppState {
  config: ClientConfig;
  session: SessionContext | null;
  client: ApiClient | null;
  view: ViewName | null;
  payload: QuestionsPayload | null;
}

const state: AppState = {
  config: { apiBaseUrl: 'http://127.0.0.1:8910', pollIntervalMs: 5000 },
  session: null,
  client: null,
  view: null,
  payload: null,
};

function el<T extends HTMLElement>(selector: string): T {
  const node = document.querySelector<T>(selector);
  if (!node) throw new Error(`missing element ${selector}`);
  return node;
}

function showError(error: unknown): void {
  const banner = el<HTMLDivElement>('#errors');
  if (error instanceof ApiError) {
    banner.innerHTML = renderError(error.message, error.status);
  } else {
    banner.innerHTML = renderError(String(error));
  }
}

function clearError(): void {
  el<HTMLDivElement>('#errors').innerHTML = '';
}

async function refresh(): Promise<void> {
  const { client, session, view } = state;
  if (!client || !session || !view) return;
  try {
    const payload = await client.getQuestions(session.activeCase);
    state.payload = payload;
    const root = el<HTMLDivElement>('#view');
    if (view === 'workspace') {
      root.innerHTML = renderAnswerWorkspace(payload);
    } else if (view === 'queue') {
      root.innerHTML = renderReviewQueue(payload);
    } else {
      const [verdict, matrix, audit] = await Promise.all([
        client.getVerdict(session.activeCase).catch(() => null),
        client.getMatrix(session.activeCase).then((m) => m.rows).catch(() => null),
        client.getAudit(session.activeCase).then((a) => a.records).catch(() => []),
      ]);
      root.innerHTML = renderRegulatorDashboard(payload, verdict, matrix, audit, {
        full: client.reportUrl(session.activeCase, 'full'),
        summary: client.reportUrl(session.activeCase, 'summary'),
      });
    }
  } catch (error) {
    showError(error);
  }
}

async function mutate(action: () => Promise<unknown>): Promise<void> {
  clearError();
  try {
    await action();
  } catch (error) {
    showError(error); // 403/409 from the server surface here, non-destructively
  }
  await refresh(); // always re-read; the server owns every status
}

function currentVersion(): number {
  return state.payload?.version ?? 0;
}

function handleViewClick(event: Event): void {
  const target = event.target as HTMLElement;
  const button = target.closest<HTMLButtonElement>('button[data-action]');
  if (!button || !state.client || !state.session) return;
  const client = state.client;
  const caseId = state.session.activeCase;
  const action = button.dataset.action;
  const qid = button.dataset.question ?? '';

  if (action === 'save') {
    const editor = document.querySelector<HTMLElement>(`[data-editor="${qid}"]`);
    const question = state.payload?.questions.find((q) => q.id === qid);
    if (!editor || !question) return;
    const content =
      question.type.kind === 'choice'
        ? { type: 'choice' as const, index: Number((editor as HTMLSelectElement).value) }
        : { type: 'text' as const, body: (editor as HTMLTextAreaElement).value };
    void mutate(() => client.writeAnswer(caseId, qid, currentVersion(), content));
  } else if (action === 'submit') {
    void mutate(() => client.submitAnswer(caseId, qid, currentVersion()));
  } else if (action === 'accept' || action === 'request-changes') {
    const box = document.querySelector<HTMLTextAreaElement>(`[data-comment="${qid}"]`);
    const comment = box?.value ?? '';
    if (action === 'request-changes') {
      const problem = validateRequestChanges(comment);
      if (problem) {
        showError(problem);
        return;
      }
    }
    const verdict = action === 'accept' ? 'Accept' : 'RequestChanges';
    void mutate(() => client.reviewAnswer(caseId, qid, currentVersion(), verdict, comment));
  } else if (action === 'approve' || action === 'flag') {
    const comment =
      document.querySelector<HTMLTextAreaElement>('[data-regulator-comment]')?.value ?? '';
    if (action === 'flag') {
      const selected = Array.from(
        document.querySelectorAll<HTMLInputElement>('input[data-flag]:checked'),
      ).map((input) => input.dataset.flag ?? '');
      const problem = validateFlagSelection(selected);
      if (problem) {
        showError(problem);
        return;
      }
      void mutate(() => client.regulatorReview(caseId, currentVersion(), 'Flag', selected, comment));
    } else {
      void mutate(() => client.regulatorReview(caseId, currentVersion(), 'Approve', [], comment));
    }
  }
}

let poller: Poller | null = null;

function startSession(event: Event): void {
  event.preventDefault();
  const token = el<HTMLInputElement>('#token').value.trim();
  const role = el<HTMLSelectElement>('#role').value as Role;
  const activeCase = el<HTMLInputElement>('#case-id').value.trim();
  state.session = { token, role, activeCase };
  state.client = new ApiClient(state.config.apiBaseUrl, token);
  const views = visibleViews(role);
  if (views.length === 0) {
    showError('This role has no interactive views; visitors can download summary reports of certified cases.');
    return;
  }
  state.view = views[0];
  const nav = el<HTMLElement>('#nav');
  nav.innerHTML = views
    .map((view) => `<button data-view="${view}">${view}</button>`)
    .join(' ');
  nav.hidden = false;
  el<HTMLElement>('#session-form').hidden = true;
  poller?.stop();
  poller = new Poller(refresh, state.config.pollIntervalMs);
  poller.start();
  void refresh();
}

function handleNavClick(event: Event): void {
  const button = (event.target as HTMLElement).closest<HTMLButtonElement>('button[data-view]');
  if (!button) return;
  state.view = button.dataset.view as ViewName;
  void refresh();
}

async function boot(): Promise<void> {
  try {
    const response = await fetch('./config.json');
    if (response.ok) {
      const loaded = (await response.json()) as Partial<ClientConfig>;
      state.config = { ...state.config, ...loaded };
    }
  } catch {
    // keep defaults when no config.json is served
  }
  el<HTMLFormElement>('#session-form').addEventListener('submit', startSession);
  el<HTMLElement>('#nav').addEventListener('click', handleNavClick);
  el<HTMLDivElement>('#view').addEventListener('click', handleViewClick);
}

if (typeof document !== 'undefined') {
  void boot();
}
