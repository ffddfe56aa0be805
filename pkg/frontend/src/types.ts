// Wire types mirroring the workflow service's JSON API.

export type Role =
  | 'AiSupplier'
  | 'AiSupplierAdmin'
  | 'Regulator'
  | 'SystemAdmin'
  | 'EthicsValidator'
  | 'AiUser'
  | 'Visitor';

export type AnswerStatus = 'Draft' | 'Submitted' | 'ChangesRequested' | 'Accepted';

export type CaseStatus =
  | 'Drafting'
  | 'UnderValidation'
  | 'ValidatorApproved'
  | 'RegulatorReview'
  | 'RegulatorFlagged'
  | 'Certified';

export interface QuestionTypeDoc {
  kind: 'extended' | 'choice' | 'metric';
  options?: string[];
  metric?: string;
}

export interface AnswerContentDoc {
  type: 'text' | 'choice' | 'metric';
  body?: string;
  index?: number;
  metric?: string;
  value?: number | null;
  inputs_digest?: string;
  error?: string | null;
}

export interface ReviewCommentDoc {
  author_role: Role;
  verdict: 'Accept' | 'RequestChanges';
  text: string;
  timestamp: string;
  answer_version: number;
}

export interface AnswerDoc {
  status: AnswerStatus;
  version: number;
  content: AnswerContentDoc;
  comments: ReviewCommentDoc[];
}

export interface QuestionDoc {
  id: string;
  principle: string;
  segment: string;
  stage: string;
  desideratum: string;
  type: QuestionTypeDoc;
  text: string;
  requirement_links: string[];
  retired: boolean;
  answer: AnswerDoc | null;
}

export interface QuestionsPayload {
  case: string;
  version: number;
  status: CaseStatus;
  questions: QuestionDoc[];
}

export interface VerdictPayload {
  mitigated: boolean;
  root_satisfaction: number;
  unresolved: string[];
  threshold: number;
}

export interface AuditRecordDoc {
  seq: number;
  actor: string;
  action: string;
  target: string;
  timestamp: string;
  prior_state: string | null;
  new_state: string | null;
}

export interface MatrixRowDoc {
  requirement: string;
  recommendation: string;
  constraint: string;
  uaia_or_hazard: string;
  losses: string[];
}

export interface SessionContext {
  token: string;
  role: Role;
  activeCase: string;
}

export interface ClientConfig {
  apiBaseUrl: string;
  pollIntervalMs: number;
}
