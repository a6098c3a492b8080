/**
 * End-to-end: a scripted annotation session against the real service.
 *
 * Spawns `mrcaudit serve` on a local port with the committed entry sample,
 * drives three full annotation flows through the same modules the browser
 * uses (API client, client-side validation, draft store), then exports and
 * checks the records come back field-for-field identical.
 */

import { spawn, ChildProcess } from 'node:child_process';
import { mkdtempSync } from 'node:fs';
import { tmpdir } from 'node:os';
import { join, dirname } from 'node:path';
import { fileURLToPath } from 'node:url';
import { afterAll, beforeAll, describe, expect, it } from 'vitest';

import { WorkbenchClient } from '../src/api.js';
import { MemoryDraftStore } from '../src/drafts.js';
import { AnnotationFlow } from '../src/flow.js';
import type { WireRecord } from '../src/types.js';

const HERE = dirname(fileURLToPath(import.meta.url));
const ENTRIES = join(HERE, 'fixtures', 'entries.jsonl');
const PORT = 8470 + Math.floor(Math.random() * 400);
const BASE = `http://127.0.0.1:${PORT}`;

let service: ChildProcess;

async function waitForService(): Promise<void> {
  const deadline = Date.now() + 45_000;
  let lastError: unknown = null;
  while (Date.now() < deadline) {
    try {
      const response = await fetch(`${BASE}/progress`);
      if (response.ok) return;
    } catch (error) {
      lastError = error;
    }
    await new Promise((resolve) => setTimeout(resolve, 250));
  }
  throw new Error(`service did not come up on ${BASE}: ${lastError}`);
}

beforeAll(async () => {
  const logDir = mkdtempSync(join(tmpdir(), 'mrcaudit-e2e-'));
  service = spawn(
    'python3',
    ['-m', 'mrcaudit.cli', 'serve', '--entries', ENTRIES, '--log', join(logDir, 'log.jsonl'), '--port', String(PORT)],
    { stdio: ['ignore', 'pipe', 'pipe'] },
  );
  service.stderr?.on('data', () => undefined);
  await waitForService();
});

afterAll(() => {
  service?.kill('SIGKILL');
});

describe('scripted annotation session', () => {
  const client = new WorkbenchClient(BASE);
  const drafts = new MemoryDraftStore();
  const submitted: WireRecord[] = [];

  it('lists the served sample', async () => {
    const tasks = await client.listTasks();
    expect(tasks.length).toBe(5);
    expect(tasks.every((task) => task.status === 'unclaimed')).toBe(true);
  });

  it('annotates three entries end to end', async () => {
    const flow = new AnnotationFlow(client, drafts, 'browser-a1');

    // entry 0: facts + reasoning + knowledge + linguistic marks
    await flow.open('NewsQA:e2e:0');
    expect(flow.task?.status).toBe('in_progress');
    flow.setAnswerType('AnswerType/Span');
    flow.toggleFact(0, 2);
    flow.toggleFact(1, 0);
    flow.toggleLabel('Reasoning/Operational/Bridge');
    flow.toggleLabel('Reasoning/Temporal');
    flow.toggleLabel('Knowledge/Intuitive');
    flow.toggleLabel('LinguisticComplexity/LexicalVariety/Redundancy');
    flow.setLinguisticRefs('LinguisticComplexity/LexicalVariety/Redundancy', [[0, 2]]);
    flow.setNotes('first scripted entry');
    expect(flow.revalidate().ok).toBe(true);
    expect((await flow.submit()).kind).toBe('accepted');
    submitted.push(structuredClone(flow.record!));

    // entry 1: unanswerable with a correctness complaint
    await flow.open('NewsQA:e2e:1');
    flow.setAnswerType('AnswerType/Unanswerable');
    flow.setCorrectness({
      verdict: 'Correctness/Wrong',
      sub_reason: 'Correctness/AnswerPresent',
      note: 'the passage does answer it',
    });
    expect((await flow.submit()).kind).toBe('accepted');
    submitted.push(structuredClone(flow.record!));

    // entry 2: the minimal retrieval case from the guideline examples
    await flow.open('NewsQA:e2e:2');
    flow.setAnswerType('AnswerType/Span');
    flow.toggleFact(0, 2);
    flow.toggleLabel('Reasoning/Retrieval');
    expect((await flow.submit()).kind).toBe('accepted');
    submitted.push(structuredClone(flow.record!));

    const tasks = await client.listTasks({ status: 'submitted' });
    expect(tasks.map((task) => task.entry_id)).toEqual(['NewsQA:e2e:0', 'NewsQA:e2e:1', 'NewsQA:e2e:2']);
  });

  it('rejects on the server what the client flags locally', async () => {
    const bad: WireRecord = {
      schema_version: '1.0',
      entry_id: 'NewsQA:e2e:3',
      annotator_id: 'browser-a1',
      answer_type: 'AnswerType/Unanswerable',
      supporting_facts: [[0, 0]],
      reasoning: [],
      knowledge: [],
      linguistic: [],
      correctness: null,
      notes: '',
    };
    const response = await client.submit('NewsQA:e2e:3', bad);
    expect(response.accepted).toBe(false);
    if (!response.accepted) {
      expect(response.errors.map((e) => e.rule)).toContain('unanswerable.facts');
    }
  });

  it('export returns the entered records field-for-field', async () => {
    const payload = await client.exportRecords({ annotator: 'browser-a1' });
    expect(payload).not.toBeNull();
    const byEntry = new Map(payload!.records.map((record) => [record.entry_id, record]));
    expect(byEntry.size).toBe(3);
    for (const record of submitted) {
      expect(byEntry.get(record.entry_id)).toEqual(record);
    }
    expect(payload!.entries.map((entry) => entry.id)).toEqual([
      'NewsQA:e2e:0',
      'NewsQA:e2e:1',
      'NewsQA:e2e:2',
    ]);
  });

  it('echoes the schema version header', async () => {
    const response = await fetch(`${BASE}/taxonomy`);
    expect(response.headers.get('x-schema-version')).toBe('1.0');
  });
});
