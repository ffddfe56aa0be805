// Integration against the real workflow service (requires the sibling
// Python package installed: `pip install -e ..`). Drives the golden case
// with the same client + renderers the browser uses.

import { spawn, type ChildProcess } from 'node:child_process';
import { mkdtempSync, readFileSync, writeFileSync } from 'node:fs';
import { tmpdir } from 'node:os';
import { dirname, join } from 'node:path';
import { fileURLToPath } from 'node:url';
import { afterAll, beforeAll, describe, expect, it } from 'vitest';

const HERE = dirname(fileURLToPath(import.meta.url));

import { ApiClient, ApiError } from '../src/api.js';
import { renderAnswerWorkspace, renderError, renderReviewQueue } from '../src/render.js';
import { reviewQueue } from '../src/state.js';

const PORT = 8947;
const BASE = `http://127.0.0.1:${PORT}`;
const CASE = 'transparency';

let server: ChildProcess | null = null;

const supplier = new ApiClient(BASE, 'sup-token');
const validator = new ApiClient(BASE, 'val-token');

async function waitForServer(): Promise<void> {
  for (let attempt = 0; attempt < 60; attempt++) {
    try {
      const response = await fetch(`${BASE}/`);
      if (response.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((resolve) => setTimeout(resolve, 250));
  }
  throw new Error('service did not come up on ' + BASE);
}

beforeAll(async () => {
  const dir = mkdtempSync(join(tmpdir(), 'elens-web-'));
  const tokenFile = join(dir, 'tokens.json');
  writeFileSync(
    tokenFile,
    JSON.stringify({
      'sup-token': { user: 'ada', role: 'AiSupplier' },
      'val-token': { user: 'vic', role: 'EthicsValidator' },
    }),
  );
  server = spawn(
    'elens',
    ['serve', '--data-dir', join(dir, 'data'), '--token-file', tokenFile, '--port', String(PORT)],
    { stdio: 'ignore' },
  );
  await waitForServer();
  const source = readFileSync(join(HERE, '..', '..', 'examples', 'transparency.elens'));
  const created = await fetch(`${BASE}/cases`, {
    method: 'POST',
    headers: { Authorization: 'Bearer sup-token' },
    body: source,
  });
  expect(created.status).toBe(201);
}, 30000);

afterAll(() => {
  server?.kill();
});

describe('live service', () => {
  it('walks an answer to Accepted: green card, locked workspace, empty queue', async () => {
    let payload = await supplier.getQuestions(CASE);
    expect(payload.status).toBe('Drafting');

    await supplier.writeAnswer(CASE, 'QR101.1', payload.version, {
      type: 'text',
      body: 'explanations shown inline',
    });
    payload = await supplier.getQuestions(CASE);
    await supplier.submitAnswer(CASE, 'QR101.1', payload.version);

    // validator's polled payload now queues the submitted answer
    payload = await validator.getQuestions(CASE);
    expect(reviewQueue(payload.questions).map((q) => q.id)).toContain('QR101.1');
    expect(renderReviewQueue(payload)).toContain('data-question="QR101.1"');

    await validator.reviewAnswer(CASE, 'QR101.1', payload.version, 'Accept', 'verified');

    // next poll: card gone from the queue, green + locked in the workspace
    payload = await validator.getQuestions(CASE);
    expect(reviewQueue(payload.questions)).toHaveLength(0);
    expect(renderReviewQueue(payload)).not.toContain('data-question="QR101.1"');
    const workspace = renderAnswerWorkspace(payload);
    expect(workspace).toMatch(/bg-green[^>]*data-question="QR101\.1"/);
    expect(workspace).toContain('Accepted · locked');
  }, 20000);

  it('request-changes renders a red editable card on the next poll', async () => {
    let payload = await supplier.getQuestions(CASE);
    await supplier.writeAnswer(CASE, 'QR101.4', payload.version, {
      type: 'text',
      body: 'first draft',
    });
    payload = await supplier.getQuestions(CASE);
    await supplier.submitAnswer(CASE, 'QR101.4', payload.version);
    payload = await validator.getQuestions(CASE);
    await validator.reviewAnswer(CASE, 'QR101.4', payload.version, 'RequestChanges', 'cite the model card');

    payload = await supplier.getQuestions(CASE);
    const workspace = renderAnswerWorkspace(payload);
    expect(workspace).toMatch(/bg-red[^>]*data-question="QR101\.4"/);
    expect(workspace).toContain('cite the model card');
    expect(workspace).toContain('data-editor="QR101.4"');
  }, 20000);

  it('a supplier-forced review surfaces the server 403', async () => {
    let payload = await supplier.getQuestions(CASE);
    await supplier.writeAnswer(CASE, 'QR101.3', payload.version, { type: 'choice', index: 0 });
    payload = await supplier.getQuestions(CASE);
    await supplier.submitAnswer(CASE, 'QR101.3', payload.version);
    payload = await supplier.getQuestions(CASE);

    const error = await supplier
      .reviewAnswer(CASE, 'QR101.3', payload.version, 'Accept', 'self-approval attempt')
      .catch((e: unknown) => e);
    expect(error).toBeInstanceOf(ApiError);
    const apiError = error as ApiError;
    expect(apiError.status).toBe(403);
    const banner = renderError(apiError.message, apiError.status);
    expect(banner).toContain('Error 403');
    expect(banner).toContain('only ethics validators');
  }, 20000);

  it('stale writes surface as 409 version conflicts', async () => {
    const payload = await supplier.getQuestions(CASE);
    const error = await supplier
      .writeAnswer(CASE, 'QR101.4', payload.version + 100, { type: 'text', body: 'stale' })
      .catch((e: unknown) => e);
    expect((error as ApiError).status).toBe(409);
    expect((error as ApiError).code).toBe('version-conflict');
  }, 20000);
});
