// Thin typed client over the workflow HTTP API. Every mutation carries the
// case version it read (If-Match); the server's answer is never applied
// locally -- callers re-fetch state instead.

import type {
  AnswerContentDoc,
  AuditRecordDoc,
  MatrixRowDoc,
  QuestionsPayload,
  VerdictPayload,
} from './types.js';

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly token: string,
    private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private headers(version?: number): Record<string, string> {
    const headers: Record<string, string> = {};
    if (this.token) headers['Authorization'] = `Bearer ${this.token}`;
    if (version !== undefined) headers['If-Match'] = String(version);
    return headers;
  }

  private async request<T>(path: string, init: RequestInit = {}): Promise<T> {
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, init);
    if (!response.ok) {
      let code = 'error';
      let message = `${response.status} ${response.statusText}`;
      try {
        const body = await response.json();
        code = body.code ?? code;
        message = body.message ?? message;
      } catch {
        // non-JSON error body; keep the status line
      }
      throw new ApiError(response.status, code, message);
    }
    return (await response.json()) as T;
  }

  getQuestions(caseId: string): Promise<QuestionsPayload> {
    return this.request(`/cases/${caseId}/questions`, { headers: this.headers() });
  }

  getVerdict(caseId: string): Promise<VerdictPayload> {
    return this.request(`/cases/${caseId}/verdict`, { headers: this.headers() });
  }

  getAudit(caseId: string): Promise<{ records: AuditRecordDoc[] }> {
    return this.request(`/cases/${caseId}/audit`, { headers: this.headers() });
  }

  getMatrix(caseId: string): Promise<{ rows: MatrixRowDoc[] }> {
    return this.request(`/cases/${caseId}/matrix`, { headers: this.headers() });
  }

  writeAnswer(caseId: string, questionId: string, version: number, content: AnswerContentDoc) {
    return this.request(`/cases/${caseId}/answers/${questionId}`, {
      method: 'POST',
      headers: { ...this.headers(version), 'Content-Type': 'application/json' },
      body: JSON.stringify({ content }),
    });
  }

  submitAnswer(caseId: string, questionId: string, version: number) {
    return this.request(`/cases/${caseId}/answers/${questionId}/submit`, {
      method: 'POST',
      headers: this.headers(version),
    });
  }

  reviewAnswer(
    caseId: string,
    questionId: string,
    version: number,
    verdict: 'Accept' | 'RequestChanges',
    text: string,
  ) {
    return this.request(`/cases/${caseId}/answers/${questionId}/review`, {
      method: 'POST',
      headers: { ...this.headers(version), 'Content-Type': 'application/json' },
      body: JSON.stringify({ verdict, text }),
    });
  }

  regulatorReview(
    caseId: string,
    version: number,
    decision: 'Approve' | 'Flag',
    flaggedQuestions: string[],
    comment: string,
  ) {
    return this.request(`/cases/${caseId}/regulator-review`, {
      method: 'POST',
      headers: { ...this.headers(version), 'Content-Type': 'application/json' },
      body: JSON.stringify({ decision, flagged_questions: flaggedQuestions, comment }),
    });
  }

  reportUrl(caseId: string, kind: 'full' | 'summary'): string {
    return `${this.baseUrl}/cases/${caseId}/report?kind=${kind}`;
  }
}
