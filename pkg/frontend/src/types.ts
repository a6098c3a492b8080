/** Wire shapes shared with the workbench service. */

export interface TaxonomyNode {
  name: string;
  description: string;
  children: TaxonomyNode[];
}

export interface Rule {
  id: string;
  kind: 'error' | 'warning';
  field: string;
  params?: Record<string, unknown>;
}

export interface TaxonomyManifest {
  schema_version: string;
  taxonomy: TaxonomyNode[];
  rules: Rule[];
}

/** [passage index, sentence index] */
export type FactRef = [number, number];

export interface CorrectnessNote {
  verdict: string;
  sub_reason: string | null;
  note: string;
}

export interface LinguisticMark {
  label: string;
  sentences: FactRef[];
}

export interface WireRecord {
  schema_version: string;
  entry_id: string;
  annotator_id: string;
  answer_type: string | null;
  supporting_facts: FactRef[];
  reasoning: string[];
  knowledge: string[];
  linguistic: LinguisticMark[];
  correctness: CorrectnessNote | null;
  notes: string;
}

export interface WirePassage {
  title: string | null;
  text: string;
  sentences: [number, number][];
}

export interface WireEntry {
  schema_version: string;
  id: string;
  dataset: string;
  question: string;
  answers: unknown[];
  passages: WirePassage[];
  extras: Record<string, unknown>;
}

export interface Finding {
  rule: string;
  message: string;
  subject: string;
}

export interface ValidationOutcome {
  ok: boolean;
  errors: Finding[];
  warnings: Finding[];
}

export interface TaskSummary {
  entry_id: string;
  dataset: string;
  status: 'unclaimed' | 'in_progress' | 'submitted';
  assigned: string | null;
  updated_at: string | null;
  annotators: string[];
}

export interface TaskDetail {
  task: TaskSummary;
  entry: WireEntry;
  record: WireRecord | null;
}

export interface Progress {
  total: number;
  by_status: Record<string, number>;
  by_annotator: Record<string, number>;
}

export interface ExportPayload {
  schema_version: string;
  records: WireRecord[];
  entries: WireEntry[];
}

export const SCHEMA_VERSION = '1.0';

export function blankRecord(entryId: string, annotatorId: string): WireRecord {
  return {
    schema_version: SCHEMA_VERSION,
    entry_id: entryId,
    annotator_id: annotatorId,
    answer_type: null,
    supporting_facts: [],
    reasoning: [],
    knowledge: [],
    linguistic: [],
    correctness: null,
    notes: '',
  };
}

function compareRefs(a: FactRef, b: FactRef): number {
  return a[0] - b[0] || a[1] - b[1];
}

/** Sort and deduplicate collections the way the service serializes them. */
export function canonicalizeRecord(record: WireRecord): WireRecord {
  const facts = new Map<string, FactRef>();
  for (const ref of record.supporting_facts) facts.set(`${ref[0]}:${ref[1]}`, [ref[0], ref[1]]);
  const linguistic = new Map<string, Set<string>>();
  for (const mark of record.linguistic) {
    const refs = linguistic.get(mark.label) ?? new Set<string>();
    for (const ref of mark.sentences) refs.add(`${ref[0]}:${ref[1]}`);
    linguistic.set(mark.label, refs);
  }
  const parseRef = (key: string): FactRef => {
    const [p, s] = key.split(':');
    return [Number(p), Number(s)];
  };
  return {
    ...record,
    supporting_facts: [...facts.values()].sort(compareRefs),
    reasoning: [...new Set(record.reasoning)].sort(),
    knowledge: [...new Set(record.knowledge)].sort(),
    linguistic: [...linguistic.entries()]
      .sort(([a], [b]) => (a < b ? -1 : a > b ? 1 : 0))
      .map(([label, refs]) => ({
        label,
        sentences: [...refs].map(parseRef).sort(compareRefs),
      })),
    correctness: record.correctness ? { ...record.correctness } : null,
  };
}
