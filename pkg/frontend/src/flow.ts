/**
 * Annotation session state machine.
 *
 * One flow instance handles one annotator working through tasks: open a
 * task (claiming it), mutate the draft record, re-validate after every
 * change, and submit once clean. The DOM layer is a thin projection of this
 * state, which keeps the behavior testable without a browser.
 */

import { SubmitOutcome, WorkbenchApi } from './api.js';
import { DraftStore, draftKey } from './drafts.js';
import { Catalog, validateRecord } from './validation.js';
import {
  CorrectnessNote,
  FactRef,
  TaskSummary,
  TaxonomyManifest,
  ValidationOutcome,
  WireEntry,
  WireRecord,
  blankRecord,
  canonicalizeRecord,
} from './types.js';

export type SubmitResult =
  | { kind: 'accepted' }
  | { kind: 'rejected'; errors: { rule: string; message: string; subject: string }[] }
  | { kind: 'blocked'; outcome: ValidationOutcome }
  | { kind: 'network-error'; message: string };

export class AnnotationFlow {
  manifest: TaxonomyManifest | null = null;
  catalog: Catalog | null = null;
  entry: WireEntry | null = null;
  task: TaskSummary | null = null;
  record: WireRecord | null = null;
  outcome: ValidationOutcome | null = null;
  lastServerMessage: string | null = null;

  constructor(
    readonly client: WorkbenchApi,
    readonly drafts: DraftStore,
    readonly annotatorId: string,
  ) {}

  async loadTaxonomy(): Promise<TaxonomyManifest> {
    this.manifest = await this.client.taxonomy();
    this.catalog = new Catalog(this.manifest);
    return this.manifest;
  }

  /** Open a task: claim it and restore the draft, prior record, or a blank. */
  async open(entryId: string): Promise<void> {
    if (!this.catalog) await this.loadTaxonomy();
    const detail = await this.client.getTask(entryId, this.annotatorId);
    this.entry = detail.entry;
    this.task = detail.task;
    const draft = this.drafts.load(draftKey(this.annotatorId, entryId));
    if (draft && draft.annotator_id === this.annotatorId) {
      this.record = draft;
    } else if (detail.record && detail.record.annotator_id === this.annotatorId) {
      this.record = detail.record;
    } else {
      this.record = blankRecord(entryId, this.annotatorId);
    }
    if (detail.task.status === 'unclaimed') {
      this.task = await this.client.claim(entryId, this.annotatorId);
    }
    this.revalidate();
  }

  private mutate(change: (record: WireRecord) => void): void {
    if (!this.record) throw new Error('no task open');
    change(this.record);
    this.drafts.save(draftKey(this.annotatorId, this.record.entry_id), this.record);
    this.revalidate();
  }

  revalidate(): ValidationOutcome {
    if (!this.record || !this.entry || !this.catalog) throw new Error('no task open');
    this.outcome = validateRecord(this.record, this.entry, this.catalog);
    return this.outcome;
  }

  get unanswerableSelected(): boolean {
    return this.record !== null && this.catalog !== null && this.record.answer_type === this.catalog.unanswerable;
  }

  setAnswerType(path: string | null): void {
    this.mutate((record) => {
      record.answer_type = path;
      if (this.catalog && path === this.catalog.unanswerable) {
        // Mirror of the schema rule: unanswerable excludes reasoning and facts.
        record.reasoning = [];
        record.supporting_facts = [];
      }
    });
  }

  toggleFact(passage: number, sentence: number): void {
    this.mutate((record) => {
      const at = record.supporting_facts.findIndex(([p, s]) => p === passage && s === sentence);
      if (at >= 0) record.supporting_facts.splice(at, 1);
      else record.supporting_facts.push([passage, sentence]);
    });
  }

  hasFact(passage: number, sentence: number): boolean {
    return this.record?.supporting_facts.some(([p, s]) => p === passage && s === sentence) ?? false;
  }

  toggleLabel(path: string): void {
    const family = path.split('/')[0];
    this.mutate((record) => {
      const flip = (labels: string[]): string[] =>
        labels.includes(path) ? labels.filter((l) => l !== path) : [...labels, path];
      if (family === 'Reasoning') record.reasoning = flip(record.reasoning);
      else if (family === 'Knowledge') record.knowledge = flip(record.knowledge);
      else if (family === 'LinguisticComplexity') {
        const at = record.linguistic.findIndex((mark) => mark.label === path);
        if (at >= 0) record.linguistic.splice(at, 1);
        else record.linguistic.push({ label: path, sentences: [] });
      } else throw new Error(`not a toggleable label family: ${path}`);
    });
  }

  hasLabel(path: string): boolean {
    if (!this.record) return false;
    return (
      this.record.reasoning.includes(path) ||
      this.record.knowledge.includes(path) ||
      this.record.linguistic.some((mark) => mark.label === path)
    );
  }

  setLinguisticRefs(path: string, refs: FactRef[]): void {
    this.mutate((record) => {
      const mark = record.linguistic.find((m) => m.label === path);
      if (!mark) throw new Error(`${path} is not selected`);
      mark.sentences = refs;
    });
  }

  setCorrectness(note: CorrectnessNote | null): void {
    this.mutate((record) => {
      record.correctness = note;
    });
  }

  setNotes(text: string): void {
    this.mutate((record) => {
      record.notes = text;
    });
  }

  get canSubmit(): boolean {
    return this.outcome !== null && this.outcome.ok;
  }

  async submit(): Promise<SubmitResult> {
    if (!this.record) throw new Error('no task open');
    const outcome = this.revalidate();
    if (!outcome.ok) {
      return { kind: 'blocked', outcome };
    }
    const canonical = canonicalizeRecord(this.record);
    let response: SubmitOutcome;
    try {
      response = await this.client.submit(canonical.entry_id, canonical);
    } catch (error) {
      // Network failure: the draft stays put so the work can be resumed.
      this.lastServerMessage = error instanceof Error ? error.message : String(error);
      return { kind: 'network-error', message: this.lastServerMessage };
    }
    if (!response.accepted) {
      this.lastServerMessage = response.errors.map((e) => `${e.rule}: ${e.message}`).join('; ');
      return { kind: 'rejected', errors: response.errors };
    }
    this.record = canonical;
    this.drafts.clear(draftKey(this.annotatorId, canonical.entry_id));
    this.lastServerMessage = null;
    if (this.task) this.task = { ...this.task, status: 'submitted' };
    return { kind: 'accepted' };
  }
}
